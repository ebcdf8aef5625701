#include "spinchain/propagator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spinchain/parallel.hpp"

namespace spinchain {

std::vector<double> EndpointSpectrum::transfer_weights() const {
    std::vector<double> w(eigenvalues.size());
    for (std::size_t m = 0; m < w.size(); ++m) w[m] = first[m] * last[m];
    return w;
}

SpectralDecomposition eigendecompose(const TridiagonalHamiltonian& h) {
    SpectralDecomposition sd;
    sd.eigenvalues = h.diag;
    sd.eigenvectors = RealMatrix::identity(h.dim());
    tridiagonal_ql(sd.eigenvalues, h.offdiag, &sd.eigenvectors);

    // Fix the sign: first component above roundoff is positive.
    const std::size_t n = h.dim();
    for (std::size_t m = 0; m < n; ++m) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) norm2 += sd.eigenvectors(j, m) * sd.eigenvectors(j, m);
        const double cutoff = 1e-12 * std::sqrt(norm2);
        for (std::size_t j = 0; j < n; ++j) {
            const double v = sd.eigenvectors(j, m);
            if (std::abs(v) > cutoff) {
                if (v < 0.0) {
                    for (std::size_t i = 0; i < n; ++i) sd.eigenvectors(i, m) = -sd.eigenvectors(i, m);
                }
                break;
            }
        }
    }
    return sd;
}

EndpointSpectrum endpoint_spectrum(const TridiagonalHamiltonian& h) {
    const std::size_t n = h.dim();
    RealMatrix rows(2, n);
    rows(0, 0) = 1.0;
    rows(1, n - 1) = 1.0;
    EndpointSpectrum es;
    es.eigenvalues = h.diag;
    tridiagonal_ql(es.eigenvalues, h.offdiag, &rows);
    es.first.assign(rows.row(0).begin(), rows.row(0).end());
    es.last.assign(rows.row(1).begin(), rows.row(1).end());
    return es;
}

Complex propagator_element(const SpectralDecomposition& sd, std::size_t row, std::size_t col, double t) {
    Complex acc{0.0, 0.0};
    for (std::size_t m = 0; m < sd.dim(); ++m) {
        acc += sd.eigenvectors(row, m) * sd.eigenvectors(col, m) * std::polar(1.0, -sd.eigenvalues[m] * t);
    }
    return acc;
}

std::vector<Complex> propagator_matrix(const SpectralDecomposition& sd, double t) {
    const std::size_t n = sd.dim();
    std::vector<Complex> phase(n);
    for (std::size_t m = 0; m < n; ++m) phase[m] = std::polar(1.0, -sd.eigenvalues[m] * t);
    std::vector<Complex> u(n * n);
    std::vector<Complex> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t m = 0; m < n; ++m) scaled[m] = sd.eigenvectors(i, m) * phase[m];
        for (std::size_t j = i; j < n; ++j) {
            Complex acc{0.0, 0.0};
            const auto vj = sd.eigenvectors.row(j);
            for (std::size_t m = 0; m < n; ++m) acc += scaled[m] * vj[m];
            u[i * n + j] = acc;
            u[j * n + i] = acc;
        }
    }
    return u;
}

std::vector<Complex> amplitudes(const SpectralDecomposition& sd, double t) {
    const std::size_t n = sd.dim();
    std::vector<Complex> c(n);
    for (std::size_t m = 0; m < n; ++m) c[m] = sd.eigenvectors(0, m) * std::polar(1.0, -sd.eigenvalues[m] * t);
    std::vector<Complex> f(n);
    for (std::size_t j = 0; j < n; ++j) {
        Complex acc{0.0, 0.0};
        const auto vj = sd.eigenvectors.row(j);
        for (std::size_t m = 0; m < n; ++m) acc += vj[m] * c[m];
        f[j] = acc;
    }
    return f;
}

Complex transfer_amplitude(const EndpointSpectrum& es, double t) {
    Complex acc{0.0, 0.0};
    for (std::size_t m = 0; m < es.eigenvalues.size(); ++m) {
        acc += es.first[m] * es.last[m] * std::polar(1.0, -es.eigenvalues[m] * t);
    }
    return acc;
}

double fidelity_of_amplitude(Complex f_n) {
    double a = std::abs(f_n);
    if (a > 1.0) {
        if (a > 1.0 + 1e-9) {
            throw std::domain_error("fidelity_of_amplitude: |f_N| = " + std::to_string(a) +
                                    " exceeds 1, propagation is not unitary");
        }
        a = 1.0;
    }
    return a / 3.0 + a * a / 6.0 + 0.5;
}

FidelitySeries fidelity_series(const EndpointSpectrum& es, double t_max, double dt) {
    if (!(dt > 0.0) || !(t_max >= dt)) {
        throw std::invalid_argument("fidelity_series: need dt > 0 and t_max >= dt");
    }
    const auto count = static_cast<std::size_t>(std::floor(t_max / dt * (1.0 + 1e-12))) + 1;
    const std::size_t n = es.eigenvalues.size();
    const std::vector<double> w = es.transfer_weights();

    FidelitySeries s;
    s.dt = dt;
    s.times.resize(count);
    s.amplitude.resize(count);
    s.fidelity.resize(count);

    // Phasor recurrence z_m <- z_m exp(-i E_m dt), resynchronised from the
    // exact phase every kResync steps to bound the accumulated rounding.
    constexpr std::size_t kResync = 1024;
    std::vector<Complex> z(n), step(n);
    for (std::size_t m = 0; m < n; ++m) step[m] = std::polar(1.0, -es.eigenvalues[m] * dt);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (i % kResync == 0) {
            for (std::size_t m = 0; m < n; ++m) z[m] = w[m] * std::polar(1.0, -es.eigenvalues[m] * t);
        }
        Complex acc{0.0, 0.0};
        for (std::size_t m = 0; m < n; ++m) {
            acc += z[m];
            z[m] *= step[m];
        }
        s.times[i] = t;
        s.amplitude[i] = acc;
        s.fidelity[i] = fidelity_of_amplitude(acc);
    }
    return s;
}

FidelitySeries fidelity_series(const ChainSpec& spec, const DisorderRealization& real, double t_max,
                               double dt) {
    return fidelity_series(endpoint_spectrum(build_hamiltonian(spec, real)), t_max, dt);
}

std::vector<std::vector<double>> realization_fidelities(const ChainSpec& spec, std::size_t n_real,
                                                        std::uint64_t master_seed,
                                                        std::span<const double> times) {
    spec.validate();
    std::vector<std::vector<double>> out(n_real);
    parallel_for(n_real, [&](std::size_t r) {
        const auto real = sample_disorder(spec, master_seed, r);
        const auto es = endpoint_spectrum(build_hamiltonian(spec, real));
        std::vector<double> f(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) f[i] = fidelity_of_amplitude(transfer_amplitude(es, times[i]));
        out[r] = std::move(f);
    });
    return out;
}

EnsembleFidelity ensemble_average(const ChainSpec& spec, std::size_t n_real, std::uint64_t master_seed,
                                  std::span<const double> times) {
    if (n_real == 0) throw std::invalid_argument("ensemble_average: n_real must be >= 1");
    const auto per_real = realization_fidelities(spec, n_real, master_seed, times);

    EnsembleFidelity ens;
    ens.times.assign(times.begin(), times.end());
    ens.n_real = n_real;
    ens.mean.assign(times.size(), 0.0);
    ens.std_error.assign(times.size(), 0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n_real; ++r) sum += per_real[r][i];
        const double mean = sum / static_cast<double>(n_real);
        double ss = 0.0;
        for (std::size_t r = 0; r < n_real; ++r) {
            const double d = per_real[r][i] - mean;
            ss += d * d;
        }
        ens.mean[i] = mean;
        if (n_real > 1) {
            ens.std_error[i] = std::sqrt(ss / static_cast<double>(n_real - 1) / static_cast<double>(n_real));
        }
    }
    return ens;
}

}  // namespace spinchain
