#include "spinchain/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "spinchain/perturbation.hpp"
#include "spinchain/propagator.hpp"

namespace spinchain {

void ScanConfig::validate() const {
    if (sizes.empty()) throw std::invalid_argument("ScanConfig: no chain lengths");
    if (eps_j_grid.empty() || eps_b_grid.empty()) throw std::invalid_argument("ScanConfig: empty disorder grid");
    if (corr_p.empty()) throw std::invalid_argument("ScanConfig: empty correlation list");
    if (n_real == 0) throw std::invalid_argument("ScanConfig: n_real must be >= 1");
    if (!seed) throw std::invalid_argument("ScanConfig: an explicit seed is required");
    if (transfer_index < 0) throw std::invalid_argument("ScanConfig: transfer_index must be >= 0");
    for (int n : sizes) {
        ChainSpec s;
        s.n_sites = n;
        s.base_coupling = base_coupling;
        s.validate();
    }
    for (double e : eps_j_grid) {
        if (!(e >= 0.0)) throw std::invalid_argument("ScanConfig: eps_j must be >= 0");
    }
    for (double e : eps_b_grid) {
        if (!(e >= 0.0)) throw std::invalid_argument("ScanConfig: eps_b must be >= 0");
    }
    for (double p : corr_p) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("ScanConfig: corr_p must lie in [0, 1]");
    }
}

std::vector<std::pair<double, double>> scan_points(const ScanConfig& config) {
    std::vector<std::pair<double, double>> pts;
    if (config.mode == ScanMode::Grid) {
        for (double ej : config.eps_j_grid) {
            for (double eb : config.eps_b_grid) pts.emplace_back(ej, eb);
        }
    } else {
        for (double ej : config.eps_j_grid) pts.emplace_back(ej, 0.0);
        for (double eb : config.eps_b_grid) {
            if (eb != 0.0) pts.emplace_back(0.0, eb);
        }
    }
    return pts;
}

namespace {

std::vector<ScanRow> scan_for(const ScanConfig& config, double corr_p) {
    std::vector<ScanRow> rows;
    const auto pts = scan_points(config);
    for (int n : config.sizes) {
        for (const auto& [ej, eb] : pts) {
            ChainSpec spec;
            spec.n_sites = n;
            spec.base_coupling = config.base_coupling;
            spec.eps_j = ej;
            spec.eps_b = eb;
            spec.corr_p = corr_p;
            const double t = transfer_time(spec, config.transfer_index);
            const double times[] = {t};
            const auto ens = ensemble_average(spec, config.n_real, *config.seed, times);
            ScanRow row;
            row.n_sites = n;
            row.corr_p = corr_p;
            row.eps_j = ej;
            row.eps_b = eb;
            row.time = t;
            row.mean_fidelity = ens.mean[0];
            row.std_error = ens.std_error[0];
            row.n_real = config.n_real;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace

std::vector<ScanRow> scan_fidelity(const ScanConfig& config) {
    config.validate();
    return scan_for(config, config.corr_p.front());
}

std::vector<ScanRow> run_correlated_scan(const ScanConfig& config) {
    config.validate();
    std::vector<ScanRow> rows;
    for (double p : config.corr_p) {
        auto part = scan_for(config, p);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

FitResult fit_scaling(const std::vector<ScanRow>& rows, const ScalingFitOptions& options) {
    FitResult fit;
    fit.model = "scaling_law";
    fit.names = {"kappa_j", "kappa_b"};
    fit.mask.assign(rows.size(), false);

    std::vector<double> xj, xb, y;
    std::vector<std::size_t> idx;
    std::size_t informative_j = 0, informative_b = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ScanRow& r = rows[i];
        const double signal = 2.0 * r.mean_fidelity - 1.0;
        if (!(signal > options.min_signal) || signal >= 1.0) continue;
        const double a = -static_cast<double>(r.n_sites) * r.eps_j * r.eps_j;
        const double b = -r.eps_b * r.eps_b / static_cast<double>(r.n_sites);
        if (a == 0.0 && b == 0.0) continue;
        xj.push_back(a);
        xb.push_back(b);
        y.push_back(std::log(signal));
        idx.push_back(i);
        informative_j += a != 0.0 ? 1 : 0;
        informative_b += b != 0.0 ? 1 : 0;
    }
    const bool use_j = informative_j >= options.min_rows;
    const bool use_b = informative_b >= options.min_rows;
    if (!use_j && !use_b) {
        throw std::invalid_argument("fit_scaling: fewer than " + std::to_string(options.min_rows) +
                                    " usable rows for every parameter");
    }

    // Normal equations for the active regressors, rows restricted to those
    // informative about an active parameter.
    double sjj = 0.0, sjb = 0.0, sbb = 0.0, sjy = 0.0, sby = 0.0, syy = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double a = use_j ? xj[k] : 0.0;
        const double b = use_b ? xb[k] : 0.0;
        if (a == 0.0 && b == 0.0) continue;
        sjj += a * a;
        sjb += a * b;
        sbb += b * b;
        sjy += a * y[k];
        sby += b * y[k];
        syy += y[k] * y[k];
        fit.mask[idx[k]] = true;
        ++used;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double kj = nan, kb = nan, vjj = nan, vbb = nan;
    if (use_j && use_b) {
        const double det = sjj * sbb - sjb * sjb;
        kj = (sbb * sjy - sjb * sby) / det;
        kb = (sjj * sby - sjb * sjy) / det;
        vjj = sbb / det;
        vbb = sjj / det;
    } else if (use_j) {
        kj = sjy / sjj;
        vjj = 1.0 / sjj;
    } else {
        kb = sby / sbb;
        vbb = 1.0 / sbb;
    }
    double rss = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (!fit.mask[idx[k]]) continue;
        const double pred = (use_j ? kj * xj[k] : 0.0) + (use_b ? kb * xb[k] : 0.0);
        rss += (y[k] - pred) * (y[k] - pred);
    }
    const std::size_t p = (use_j ? 1 : 0) + (use_b ? 1 : 0);
    const double sigma2 = used > p ? rss / static_cast<double>(used - p) : 0.0;
    fit.params = {kj, kb};
    fit.std_errors = {use_j ? std::sqrt(sigma2 * vjj) : nan, use_b ? std::sqrt(sigma2 * vbb) : nan};
    fit.residual_norm = std::sqrt(rss);
    fit.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    fit.ok = true;
    if (!use_j) fit.note = "kappa_j not identifiable (too few coupling-disorder rows)";
    if (!use_b) fit.note = "kappa_b not identifiable (too few field-disorder rows)";
    return fit;
}

ThresholdResult threshold_extract(const std::vector<ScanRow>& rows, double f_target, DisorderAxis axis) {
    std::map<int, std::vector<std::pair<double, double>>> curves;
    for (const ScanRow& r : rows) {
        const double along = axis == DisorderAxis::Coupling ? r.eps_j : r.eps_b;
        const double other = axis == DisorderAxis::Coupling ? r.eps_b : r.eps_j;
        if (other != 0.0 || along <= 0.0) continue;
        curves[r.n_sites].emplace_back(along, r.mean_fidelity);
    }
    std::vector<double> sizes;
    std::vector<std::vector<double>> xs, ys;
    for (auto& [n, pts] : curves) {
        std::sort(pts.begin(), pts.end());
        sizes.push_back(n);
        xs.emplace_back();
        ys.emplace_back();
        for (const auto& [e, f] : pts) {
            xs.back().push_back(e);
            ys.back().push_back(f);
        }
    }
    ThresholdResult r = threshold_power_law(sizes, xs, ys, f_target);
    r.fit.model = axis == DisorderAxis::Coupling ? "coupling_threshold_power_law" : "field_threshold_power_law";
    return r;
}

PerturbationComparison compare_perturbation(int n_sites, double base_coupling, const std::vector<double>& eps_grid,
                                            std::size_t n_real, std::uint64_t master_seed, int transfer_index) {
    ChainSpec clean;
    clean.n_sites = n_sites;
    clean.base_coupling = base_coupling;
    clean.validate();
    const double t = transfer_time(clean, transfer_index);

    const CleanPropagatorTable table = make_propagator_table(clean);
    const PerturbationCoefficients coeffs = compute_coefficients_converged(table, t);

    PerturbationComparison cmp;
    cmp.n_sites = n_sites;
    cmp.time = t;
    cmp.n_real = n_real;
    cmp.field_sum = coeffs.field_sum();
    cmp.coupling_sum = coeffs.coupling_sum();
    cmp.richardson_change = coeffs.richardson_change;

    const double times[] = {t};
    auto run = [&](const std::string& kind, double ej, double eb) {
        ChainSpec spec = clean;
        spec.eps_j = ej;
        spec.eps_b = eb;
        const auto ens = ensemble_average(spec, n_real, master_seed, times);
        PerturbationRow row;
        row.kind = kind;
        row.eps_j = ej;
        row.eps_b = eb;
        row.mc_fidelity = ens.mean[0];
        row.mc_std_error = ens.std_error[0];
        row.formula_fidelity = perturbative_fidelity(coeffs, ej, eb);
        cmp.rows.push_back(row);
        return row;
    };

    std::vector<double> lx, ly_j, ly_b;
    for (double eps : eps_grid) {
        const auto rj = run("coupling", eps, 0.0);
        const auto rb = run("field", 0.0, eps);
        const auto rm = run("mixed", eps, eps);
        lx.push_back(eps);
        ly_j.push_back(rj.mc_infidelity());
        ly_b.push_back(rb.mc_infidelity());
        cmp.additivity_eps.push_back(eps);
        cmp.additivity_excess.push_back(rm.mc_infidelity() - rj.mc_infidelity() - rb.mc_infidelity());
        cmp.additivity_sigma.push_back(std::sqrt(rm.mc_std_error * rm.mc_std_error + rj.mc_std_error * rj.mc_std_error +
                                                 rb.mc_std_error * rb.mc_std_error));
    }
    cmp.coupling_slope = fit_power_law(lx, ly_j);
    cmp.field_slope = fit_power_law(lx, ly_b);
    return cmp;
}

}  // namespace spinchain
