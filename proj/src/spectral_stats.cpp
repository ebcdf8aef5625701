#include "spinchain/spectral_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinchain/parallel.hpp"
#include "spinchain/tridiagonal_eigen.hpp"

namespace spinchain {

double SpacingHistogram::total_mass() const {
    double m = 0.0;
    for (std::size_t k = 0; k < density.size(); ++k) m += density[k] * (upper[k] - lower[k]);
    return m;
}

void append_normalized_spacings(std::span<const double> ev, std::vector<double>& out) {
    if (ev.size() < 2) return;
    const std::size_t gaps = ev.size() - 1;
    const double mean_gap = (ev.back() - ev.front()) / static_cast<double>(gaps);
    for (std::size_t i = 0; i < gaps; ++i) {
        const double g = ev[i + 1] - ev[i];
        out.push_back(mean_gap > 0.0 ? g / mean_gap : 0.0);
    }
}

SpacingSample collect_spacings(const ChainSpec& spec, std::size_t n_real, std::uint64_t master_seed) {
    spec.validate();
    if (n_real == 0) throw std::invalid_argument("collect_spacings: n_real must be >= 1");
    std::vector<std::vector<double>> per(n_real);
    parallel_for(n_real, [&](std::size_t r) {
        const auto h = build_hamiltonian(spec, sample_disorder(spec, master_seed, r));
        const auto ev = tridiagonal_eigenvalues(h.diag, h.offdiag);
        per[r].reserve(ev.size() - 1);
        append_normalized_spacings(ev, per[r]);
    });
    SpacingSample sample;
    sample.realizations = n_real;
    sample.spacings.reserve(n_real * static_cast<std::size_t>(spec.n_sites - 1));
    for (const auto& p : per) sample.spacings.insert(sample.spacings.end(), p.begin(), p.end());
    return sample;
}

namespace {

std::size_t bin_index(double s, double w) {
    return static_cast<std::size_t>(std::floor(s / w + 0.5));
}

// Exact bin average of exp(-s).
double poisson_bin_density(double lo, double hi) {
    return (std::exp(-lo) - std::exp(-hi)) / (hi - lo);
}

}  // namespace

SpacingHistogram spacing_histogram(std::span<const double> spacings, double w, double s_max) {
    if (!(w > 0.0)) throw std::invalid_argument("spacing_histogram: bin width must be > 0");
    if (spacings.empty()) throw std::invalid_argument("spacing_histogram: empty sample");
    double top = s_max;
    for (double s : spacings) {
        if (s < 0.0) throw std::invalid_argument("spacing_histogram: negative spacing");
        top = std::max(top, s);
    }
    const std::size_t bins = bin_index(top, w) + 1;
    SpacingHistogram h;
    h.width = w;
    h.lower.resize(bins);
    h.upper.resize(bins);
    h.density.assign(bins, 0.0);
    for (std::size_t k = 0; k < bins; ++k) {
        h.lower[k] = k == 0 ? 0.0 : (static_cast<double>(k) - 0.5) * w;
        h.upper[k] = (static_cast<double>(k) + 0.5) * w;
    }
    std::vector<std::size_t> counts(bins, 0);
    for (double s : spacings) ++counts[bin_index(s, w)];
    const double total = static_cast<double>(spacings.size());
    for (std::size_t k = 0; k < bins; ++k) {
        h.density[k] = static_cast<double>(counts[k]) / (total * (h.upper[k] - h.lower[k]));
    }
    return h;
}

double eta(std::span<const double> spacings, double w) {
    const SpacingHistogram h = spacing_histogram(spacings, w);
    const std::size_t unit_bin = bin_index(1.0, w);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k <= unit_bin; ++k) {
        const double width = h.upper[k] - h.lower[k];
        const double pp = poisson_bin_density(h.lower[k], h.upper[k]);
        const double pd = k == unit_bin ? 1.0 / width : 0.0;
        num += std::abs(h.density[k] - pp) * width;
        den += std::abs(pd - pp) * width;
    }
    return num / den;
}

std::vector<double> eta_curve(const ChainSpec& base, std::span<const double> eps_j_grid, std::size_t n_real,
                              std::uint64_t master_seed, double width) {
    std::vector<double> out;
    out.reserve(eps_j_grid.size());
    for (double e : eps_j_grid) {
        ChainSpec s = base;
        s.eps_j = e;
        out.push_back(eta(collect_spacings(s, n_real, master_seed), width));
    }
    return out;
}

ThresholdResult eta_threshold(std::span<const double> sizes, const std::vector<std::vector<double>>& eps_grids,
                              const std::vector<std::vector<double>>& eta_values, double target) {
    ThresholdResult r = threshold_power_law(sizes, eps_grids, eta_values, target);
    r.fit.model = "eta_threshold_power_law";
    return r;
}

}  // namespace spinchain
