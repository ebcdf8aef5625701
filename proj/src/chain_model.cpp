#include "spinchain/chain_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spinchain {

void ChainSpec::validate() const {
    if (n_sites < 2) {
        throw std::invalid_argument("ChainSpec: n_sites must be >= 2, got " + std::to_string(n_sites));
    }
    if (!(base_coupling > 0.0) || !std::isfinite(base_coupling)) {
        throw std::invalid_argument("ChainSpec: base_coupling must be finite and > 0");
    }
    if (!(eps_j >= 0.0) || !std::isfinite(eps_j)) {
        throw std::invalid_argument("ChainSpec: eps_j must be finite and >= 0");
    }
    if (!(eps_b >= 0.0) || !std::isfinite(eps_b)) {
        throw std::invalid_argument("ChainSpec: eps_b must be finite and >= 0");
    }
    if (!(corr_p >= 0.0 && corr_p <= 1.0)) {
        throw std::invalid_argument("ChainSpec: corr_p must lie in [0, 1]");
    }
}

double TridiagonalHamiltonian::max_abs() const {
    double m = 0.0;
    for (double v : diag) m = std::max(m, std::abs(v));
    for (double v : offdiag) m = std::max(m, std::abs(v));
    return m;
}

double clean_coupling(const ChainSpec& spec, int bond) {
    if (bond < 1 || bond >= spec.n_sites) {
        throw std::invalid_argument("clean_coupling: bond " + std::to_string(bond) + " outside 1.." +
                                    std::to_string(spec.n_sites - 1));
    }
    const double k = bond;
    return spec.base_coupling * std::sqrt(k * (spec.n_sites - k));
}

double transfer_time(const ChainSpec& spec, int n) {
    return (2.0 * n + 1.0) * std::numbers::pi / (4.0 * spec.base_coupling);
}

DisorderRealization zero_disorder(const ChainSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_sites);
    return {std::vector<double>(n - 1, 0.0), std::vector<double>(n, 0.0)};
}

DisorderRealization sample_disorder(const ChainSpec& spec, RandomStream& stream) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_sites);
    DisorderRealization real;
    real.delta.resize(n - 1);
    real.field_err.resize(n);

    // Magnitudes are uniform on [0, eps_j]; the sign chain is a Markov chain
    // that keeps the previous sign with probability corr_p. At corr_p = 0.5
    // this is exactly i.i.d. uniform on [-eps_j, eps_j].
    bool positive = true;
    for (std::size_t k = 0; k < n - 1; ++k) {
        const double magnitude = spec.eps_j * stream.uniform01();
        const double u = stream.uniform01();
        positive = (k == 0) ? (u < 0.5) : (u < spec.corr_p ? positive : !positive);
        // eps_j == 0 must give +0.0, not -0.0.
        real.delta[k] = (positive || magnitude == 0.0) ? magnitude : -magnitude;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double u = stream.uniform01();
        real.field_err[k] = spec.eps_b == 0.0 ? 0.0 : spec.eps_b * (2.0 * u - 1.0);
    }
    return real;
}

RandomStream realization_stream(std::uint64_t master_seed, int n_sites, std::uint64_t realization) {
    return RandomStream(master_seed, {static_cast<std::uint64_t>(n_sites), realization});
}

DisorderRealization sample_disorder(const ChainSpec& spec, std::uint64_t master_seed,
                                    std::uint64_t realization) {
    RandomStream stream = realization_stream(master_seed, spec.n_sites, realization);
    return sample_disorder(spec, stream);
}

TridiagonalHamiltonian build_hamiltonian(const ChainSpec& spec, const DisorderRealization& real) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_sites);
    if (real.delta.size() != n - 1 || real.field_err.size() != n) {
        throw std::invalid_argument("build_hamiltonian: realization has " +
                                    std::to_string(real.field_err.size()) + " sites / " +
                                    std::to_string(real.delta.size()) + " bonds, chain has " +
                                    std::to_string(n) + " sites");
    }
    TridiagonalHamiltonian h;
    h.diag.resize(n);
    h.offdiag.resize(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        h.diag[j] = -2.0 * real.field_err[j];
    }
    for (std::size_t k = 0; k < n - 1; ++k) {
        h.offdiag[k] = 2.0 * clean_coupling(spec, static_cast<int>(k) + 1) * (1.0 + real.delta[k]);
    }
    return h;
}

TridiagonalHamiltonian build_clean_hamiltonian(const ChainSpec& spec) {
    return build_hamiltonian(spec, zero_disorder(spec));
}

}  // namespace spinchain
