#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spinchain/random_stream.hpp"

namespace spinchain {

// Physical parameters of a modulated XY chain with static disorder.
//
// Couplings are J_k = J sqrt(k (N - k)), k = 1..N-1, perturbed to
// J_k (1 + delta_k); local fields are b_k. Disorder amplitudes bound the
// uniform distributions of delta_k (dimensionless) and b_k (units of J).
// corr_p is the probability that neighbouring coupling errors share a sign;
// 0.5 is the uncorrelated model.
struct ChainSpec {
    int n_sites = 2;
    double base_coupling = 1.0;
    double eps_j = 0.0;
    double eps_b = 0.0;
    double corr_p = 0.5;

    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
    bool is_clean() const { return eps_j == 0.0 && eps_b == 0.0; }
};

struct DisorderRealization {
    std::vector<double> delta;      // N-1 relative coupling errors
    std::vector<double> field_err;  // N local fields
};

// Single-excitation sector Hamiltonian, real symmetric tridiagonal.
struct TridiagonalHamiltonian {
    std::vector<double> diag;
    std::vector<double> offdiag;

    std::size_t dim() const { return diag.size(); }
    double max_abs() const;
};

// Clean coupling J sqrt(k (N - k)) of bond k (1-based, 1..N-1).
double clean_coupling(const ChainSpec& spec, int bond);

// Perfect-transfer time t_n = (2n + 1) pi / (4 J).
double transfer_time(const ChainSpec& spec, int n = 0);

DisorderRealization zero_disorder(const ChainSpec& spec);

// Draws one realization. Every call consumes exactly 2(N-1) + N numbers from
// the stream, independent of the amplitudes, so runs that differ only in
// eps_j / eps_b / corr_p see common random numbers.
DisorderRealization sample_disorder(const ChainSpec& spec, RandomStream& stream);

// Stream keyed by (master_seed, n_sites, realization).
RandomStream realization_stream(std::uint64_t master_seed, int n_sites, std::uint64_t realization);
DisorderRealization sample_disorder(const ChainSpec& spec, std::uint64_t master_seed,
                                    std::uint64_t realization);

// offdiag[k] = 2 J_k (1 + delta_k); diag[j] = -2 b_j. The realization-wide
// constant sum_k b_k only contributes a global phase and is dropped.
TridiagonalHamiltonian build_hamiltonian(const ChainSpec& spec, const DisorderRealization& real);
TridiagonalHamiltonian build_clean_hamiltonian(const ChainSpec& spec);

}  // namespace spinchain
