#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "spinchain/chain_model.hpp"
#include "spinchain/fit.hpp"
#include "spinchain/propagator.hpp"

namespace spinchain {

struct TrimmedSeries {
    FidelitySeries series;
    std::size_t dropped = 0;
    bool reached = false;  // false: the level was never reached, series returned unchanged
};

// Drops every sample before the first one with F(t) <= level.
TrimmedSeries transient_trim(const FidelitySeries& series, double level = 0.55);

// Modified box counting: for window length L the time axis is cut into
// consecutive windows of L / dt samples (neighbours share their boundary
// sample), Delta_i is max - min inside window i, and M(L) = sum_i Delta_i / L.
struct BoxCountCurve {
    double dt = 0.0;
    std::vector<double> lengths;
    std::vector<double> counts;
    std::vector<std::size_t> windows;

    // Filled by apply_fit.
    bool fitted = false;
    double fit_lo = 0.0;
    double fit_hi = 0.0;
    double dimension = 0.0;
    double dimension_error = 0.0;

    bool degenerate() const;
    std::size_t size() const { return lengths.size(); }
};

// Geometric grid with ratio 2^(1/4) from 4 dt to duration / 8, each length
// rounded to a whole number of samples, duplicates removed.
std::vector<double> default_window_lengths(double dt, double duration);

// Throws std::invalid_argument if a length is not a multiple of dt, is
// shorter than dt, or is longer than the series.
BoxCountCurve box_count(std::span<const double> values, double dt, std::span<const double> lengths);
BoxCountCurve box_count(const FidelitySeries& series, std::span<const double> lengths);
BoxCountCurve box_count(const FidelitySeries& series);

// Local dimension -d log M / d log L from a centred 5-point regression.
std::vector<double> local_dimensions(const BoxCountCurve& curve);

struct DimensionFitOptions {
    double min_r_squared = 0.995;
    double min_decades = 1.0;
    std::size_t min_points = 6;
    // Windows are first sought below the first L whose local dimension
    // reaches this level (the finite-range regime where M ~ L^-2). If none
    // qualifies there, the whole grid is searched.
    double saturation_level = 1.9;
};

// Least squares of log M on log L; D = -slope. With an explicit window
// [lo, hi] the points inside it are used (at least min_points required,
// else std::invalid_argument). Without one, the longest contiguous run of
// interior grid points spanning >= min_decades with R^2 >= min_r_squared is
// chosen, ties going to the run farthest from both grid ends. When no run
// qualifies the result has ok == false and a diagnostic note.
// params = {intercept, dimension}.
FitResult fit_dimension(const BoxCountCurve& curve,
                        std::optional<std::pair<double, double>> window = std::nullopt,
                        const DimensionFitOptions& options = {});

void apply_fit(BoxCountCurve& curve, const FitResult& fit);

struct SeriesDimension {
    BoxCountCurve curve;
    FitResult fit;
    std::size_t trimmed = 0;
};

// Trim, box count on the default grid, automatic fit.
SeriesDimension series_dimension(const FidelitySeries& series, const DimensionFitOptions& options = {});

struct DimensionPoint {
    double eps_j = 0.0;
    double mean_dimension = 0.0;  // NaN when no realization gave a fit
    double std_error = 0.0;
    std::size_t fitted = 0;
    std::size_t attempted = 0;
};

// Fractal dimension of single-realization fidelity series across an eps_j
// grid, averaged over realizations 0 .. n_real-1.
std::vector<DimensionPoint> dimension_curve(const ChainSpec& base, std::span<const double> eps_j_grid,
                                            std::size_t n_real, std::uint64_t master_seed, double t_max,
                                            double dt, const DimensionFitOptions& options = {});

// Amplitude at which D falls through d_target per chain length and its power
// law in N. Non-finite D values are skipped.
ThresholdResult dimension_threshold(std::span<const double> sizes, const std::vector<std::vector<double>>& eps_grids,
                                    const std::vector<std::vector<double>>& dimensions, double d_target);

}  // namespace spinchain
