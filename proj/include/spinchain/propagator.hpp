#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spinchain/chain_model.hpp"
#include "spinchain/tridiagonal_eigen.hpp"

namespace spinchain {

using Complex = std::complex<double>;

// Full spectral representation H = V diag(E) V^T, eigenvalues ascending,
// column m of `eigenvectors` belongs to eigenvalues[m]. Each column is
// normalized with its first nonzero component positive.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    RealMatrix eigenvectors;

    std::size_t dim() const { return eigenvalues.size(); }
};

// Eigenvalues plus the first and last component of every eigenvector: all
// that the end-to-end amplitude f_N(t) = sum_m V_Nm V_1m exp(-i E_m t) needs.
struct EndpointSpectrum {
    std::vector<double> eigenvalues;
    std::vector<double> first;  // V_1m
    std::vector<double> last;   // V_Nm

    // Spectral weights V_Nm V_1m of the transfer amplitude.
    std::vector<double> transfer_weights() const;
};

SpectralDecomposition eigendecompose(const TridiagonalHamiltonian& h);
EndpointSpectrum endpoint_spectrum(const TridiagonalHamiltonian& h);

// U_row^col(t) = <row| exp(-i H t) |col>, zero-based site indices.
Complex propagator_element(const SpectralDecomposition& sd, std::size_t row, std::size_t col, double t);

// Full propagator matrix U(t), row-major n*n.
std::vector<Complex> propagator_matrix(const SpectralDecomposition& sd, double t);

// f_j(t) = <j| exp(-i H t) |1> for every site j.
std::vector<Complex> amplitudes(const SpectralDecomposition& sd, double t);

Complex transfer_amplitude(const EndpointSpectrum& es, double t);

// Bloch-sphere averaged fidelity |f|/3 + |f|^2/6 + 1/2. Magnitudes up to
// 1 + 1e-9 are clamped to 1; larger ones mean unitarity was lost upstream
// and raise std::domain_error.
double fidelity_of_amplitude(Complex f_n);

struct FidelitySeries {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Complex> amplitude;
    std::vector<double> fidelity;

    std::size_t size() const { return times.size(); }
    double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }
};

// Samples t_i = i dt, i = 0 .. floor(t_max / dt).
FidelitySeries fidelity_series(const EndpointSpectrum& es, double t_max, double dt);
FidelitySeries fidelity_series(const ChainSpec& spec, const DisorderRealization& real, double t_max,
                               double dt);

struct EnsembleFidelity {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> std_error;
    std::size_t n_real = 0;
};

// Disorder-averaged fidelity over realizations 0 .. n_real-1 of
// sample_disorder(spec, master_seed, r). Realizations may run concurrently;
// the reduction is always in ascending realization order.
EnsembleFidelity ensemble_average(const ChainSpec& spec, std::size_t n_real, std::uint64_t master_seed,
                                  std::span<const double> times);

// Per-realization fidelities, n_real rows of times.size() values.
std::vector<std::vector<double>> realization_fidelities(const ChainSpec& spec, std::size_t n_real,
                                                        std::uint64_t master_seed,
                                                        std::span<const double> times);

}  // namespace spinchain
