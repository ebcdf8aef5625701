#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spinchain/chain_model.hpp"
#include "spinchain/fit.hpp"

namespace spinchain {

// Nearest-neighbour level spacings, each realization normalized to its own
// mean gap, pooled in realization order.
struct SpacingSample {
    std::vector<double> spacings;
    std::size_t realizations = 0;
};

// Histogram on bins centred at multiples of the width w: bin 0 is [0, w/2),
// bin k >= 1 is [(k - 1/2) w, (k + 1/2) w). The range grows past s_max if
// needed so that no spacing is dropped and the total mass is exactly 1.
struct SpacingHistogram {
    double width = 0.0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> density;

    double center(std::size_t k) const { return static_cast<double>(k) * width; }
    double total_mass() const;
};

// Appends the normalized spacings of one sorted spectrum.
void append_normalized_spacings(std::span<const double> sorted_eigenvalues, std::vector<double>& out);

SpacingSample collect_spacings(const ChainSpec& spec, std::size_t n_real, std::uint64_t master_seed);

SpacingHistogram spacing_histogram(std::span<const double> spacings, double width, double s_max = 5.0);

// Distance of P(s) from the Poisson law exp(-s) on the bins up to s = 1,
// normalized by the same distance for the delta law P_D (all mass in the bin
// centred on s = 1). The clean chain gives exactly 1; a Poisson spectrum
// tends to 0. Throws std::invalid_argument on an empty sample or w <= 0.
double eta(std::span<const double> spacings, double width = 0.05);
inline double eta(const SpacingSample& sample, double width = 0.05) { return eta(sample.spacings, width); }

// eta for each disorder amplitude of a grid (eps_j values; eps_b from base).
std::vector<double> eta_curve(const ChainSpec& base, std::span<const double> eps_j_grid, std::size_t n_real,
                              std::uint64_t master_seed, double width = 0.05);

// Amplitude at which eta falls through `target`, per chain length, and its
// power law in N.
ThresholdResult eta_threshold(std::span<const double> sizes, const std::vector<std::vector<double>>& eps_grids,
                              const std::vector<std::vector<double>>& eta_values, double target);

}  // namespace spinchain
