#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinchain/chain_model.hpp"
#include "spinchain/fit.hpp"

namespace spinchain {

enum class ScanMode {
    Grid,  // cartesian product eps_j x eps_b
    Axes,  // (eps_j, 0) for every eps_j, then (0, eps_b) for every nonzero eps_b
};

struct ScanConfig {
    std::vector<int> sizes{10, 20, 50, 100, 150, 200, 300, 400, 500};
    std::vector<double> eps_j_grid{0.0};
    std::vector<double> eps_b_grid{0.0};
    std::vector<double> corr_p{0.5};
    double base_coupling = 1.0;
    std::size_t n_real = 1000;
    std::optional<std::uint64_t> seed;  // must be set explicitly
    int transfer_index = 0;             // evaluate at t_n, n = transfer_index
    ScanMode mode = ScanMode::Grid;

    void validate() const;
};

struct ScanRow {
    int n_sites = 0;
    double corr_p = 0.5;
    double eps_j = 0.0;
    double eps_b = 0.0;
    double time = 0.0;
    double mean_fidelity = 0.0;
    double std_error = 0.0;
    std::size_t n_real = 0;
};

// (eps_j, eps_b) pairs in emission order for one chain length.
std::vector<std::pair<double, double>> scan_points(const ScanConfig& config);

// One row per (N, eps_j, eps_b) in grid order, using only corr_p.front().
// Deterministic given the seed; realizations share streams across disorder
// amplitudes (common random numbers).
std::vector<ScanRow> scan_fidelity(const ScanConfig& config);

// Rows ordered by (corr_p, N, eps).
std::vector<ScanRow> run_correlated_scan(const ScanConfig& config);

struct ScalingFitOptions {
    // Rows enter only if 2 F - 1 exceeds this.
    double min_signal = 0.4;
    std::size_t min_rows = 4;
};

// Fits F = (1 + exp(-kappa_j N eps_j^2 - kappa_b eps_b^2 / N)) / 2 as a
// no-intercept regression of ln(2F - 1) on (-N eps_j^2, -eps_b^2 / N).
// A parameter without min_rows informative rows is left out (NaN). Throws
// std::invalid_argument if neither is identifiable.
// params = {kappa_j, kappa_b}.
FitResult fit_scaling(const std::vector<ScanRow>& rows, const ScalingFitOptions& options = {});

enum class DisorderAxis { Coupling, Field };

// Per-N crossing of F = f_target along one disorder axis (rows with the other
// amplitude zero), interpolated in log eps, plus the power law in N.
ThresholdResult threshold_extract(const std::vector<ScanRow>& rows, double f_target, DisorderAxis axis);

struct PerturbationRow {
    std::string kind;  // "coupling", "field" or "mixed"
    double eps_j = 0.0;
    double eps_b = 0.0;
    double mc_fidelity = 0.0;
    double mc_std_error = 0.0;
    double formula_fidelity = 0.0;
    double mc_infidelity() const { return 1.0 - mc_fidelity; }
    double formula_infidelity() const { return 1.0 - formula_fidelity; }
    double ratio() const { return mc_infidelity() / formula_infidelity(); }
};

struct PerturbationComparison {
    int n_sites = 0;
    double time = 0.0;
    std::size_t n_real = 0;
    double field_sum = 0.0;
    double coupling_sum = 0.0;
    double richardson_change = 0.0;
    std::vector<PerturbationRow> rows;
    FitResult coupling_slope;  // log-log infidelity vs eps_j
    FitResult field_slope;     // log-log infidelity vs eps_b
    // Mixed (eps, eps) infidelity minus the sum of the pure ones, per eps,
    // with the combined Monte-Carlo standard error.
    std::vector<double> additivity_eps;
    std::vector<double> additivity_excess;
    std::vector<double> additivity_sigma;
};

// Monte-Carlo fidelity at t_n for pure coupling, pure field and mixed
// disorder on each amplitude of `eps_grid`, against the second-order formula.
PerturbationComparison compare_perturbation(int n_sites, double base_coupling, const std::vector<double>& eps_grid,
                                            std::size_t n_real, std::uint64_t master_seed, int transfer_index = 0);

}  // namespace spinchain
