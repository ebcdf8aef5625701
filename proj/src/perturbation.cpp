#include "spinchain/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spinchain/parallel.hpp"

namespace spinchain {

double PerturbationCoefficients::field_sum() const {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += 2.0 * d_diag[k].real() - c[k] * c[k];
    return s;
}

double PerturbationCoefficients::coupling_sum() const {
    double s = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) s += 2.0 * f_diag[k].real() - e[k] * e[k];
    return s;
}

double spectral_quadrature_step(const SpectralDecomposition& sd, double samples_per_period) {
    if (sd.dim() < 2) throw std::invalid_argument("spectral_quadrature_step: need at least two levels");
    const double range = sd.eigenvalues.back() - sd.eigenvalues.front();
    if (!(range > 0.0)) throw std::invalid_argument("spectral_quadrature_step: degenerate spectrum");
    return 2.0 * std::numbers::pi / range / samples_per_period;
}

CleanPropagatorTable make_propagator_table(const ChainSpec& spec, double step) {
    CleanPropagatorTable table;
    table.spec = spec;
    table.spec.eps_j = 0.0;
    table.spec.eps_b = 0.0;
    table.decomposition = eigendecompose(build_clean_hamiltonian(table.spec));
    table.step = step > 0.0 ? step : spectral_quadrature_step(table.decomposition, 20.0);
    return table;
}

namespace {

// Composite Simpson weights for `intervals` (even) subintervals of width h.
double simpson_weight(std::size_t i, std::size_t intervals, double h) {
    if (i == 0 || i == intervals) return h / 3.0;
    return (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
}

struct OperatorIntegrals {
    std::vector<Complex> total;  // G_j
    Complex ordered;             // time-ordered double integral
};

// Sampled integrand g_j(s_i), i = 0..intervals, j = 0..n-1 (row-major by i).
OperatorIntegrals integrate(const std::vector<Complex>& g, std::size_t n, std::size_t intervals, double h) {
    OperatorIntegrals out;
    out.total.assign(n, Complex{});
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double w = simpson_weight(i, intervals, h);
        for (std::size_t j = 0; j < n; ++j) out.total[j] += w * g[i * n + j];
    }

    // Gamma_j(s_i) = int_0^{s_i} g_j: Simpson up to even nodes, plus the
    // three-point rule (5 f0 + 8 f1 - f2) h / 12 for the odd node after one.
    std::vector<Complex> gamma_even(n, Complex{});
    std::vector<Complex> gamma(n);
    Complex ordered{};
    for (std::size_t i = 0; i <= intervals; ++i) {
        if (i % 2 == 0) {
            if (i > 0) {
                for (std::size_t j = 0; j < n; ++j) {
                    gamma_even[j] += h / 3.0 * (g[(i - 2) * n + j] + 4.0 * g[(i - 1) * n + j] + g[i * n + j]);
                }
            }
            gamma = gamma_even;
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                gamma[j] = gamma_even[j] +
                           h / 12.0 * (5.0 * g[(i - 1) * n + j] + 8.0 * g[i * n + j] - g[(i + 1) * n + j]);
            }
        }
        // <1|O(s) O(s')|1> = sum_j conj(g_j(s)) g_j(s').
        Complex inner{};
        for (std::size_t j = 0; j < n; ++j) inner += std::conj(g[i * n + j]) * gamma[j];
        ordered += simpson_weight(i, intervals, h) * inner;
    }
    out.ordered = ordered;
    return out;
}

PerturbationCoefficients evaluate(const CleanPropagatorTable& table, double t, std::size_t intervals) {
    const std::size_t n = table.dim();
    const auto& sd = table.decomposition;
    PerturbationCoefficients pc;
    pc.t = t;
    pc.c.assign(n, 0.0);
    pc.d_diag.assign(n, Complex{});
    pc.e.assign(n - 1, 0.0);
    pc.f_diag.assign(n - 1, Complex{});
    if (t == 0.0) return pc;

    const double h = t / static_cast<double>(intervals);
    pc.step = h;

    // Propagator at every node, U[i][row*n + col].
    std::vector<std::vector<Complex>> u(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) u[i] = propagator_matrix(sd, static_cast<double>(i) * h);

    std::vector<double> bond(n - 1);
    for (std::size_t l = 0; l + 1 < n; ++l) {
        bond[l] = 2.0 * clean_coupling(table.spec, static_cast<int>(l) + 1);
    }

    // One task per operator: sites 0..n-1 are fields, n..2n-2 are bonds.
    parallel_for(2 * n - 1, [&](std::size_t op) {
        std::vector<Complex> g((intervals + 1) * n);
        for (std::size_t i = 0; i <= intervals; ++i) {
            const auto& U = u[i];
            Complex* gi = g.data() + i * n;
            if (op < n) {
                // <j| e^{iHs} (1 - 2|l><l|) e^{-iHs} |1> = delta_j1 - 2 conj(U_lj) U_l1
                const std::size_t l = op;
                const Complex ul1 = U[l * n];
                for (std::size_t j = 0; j < n; ++j) gi[j] = -2.0 * std::conj(U[l * n + j]) * ul1;
                gi[0] += 1.0;
            } else {
                const std::size_t l = op - n;
                const Complex a1 = U[l * n];
                const Complex b1 = U[(l + 1) * n];
                for (std::size_t j = 0; j < n; ++j) {
                    gi[j] = bond[l] * (std::conj(U[l * n + j]) * b1 + std::conj(U[(l + 1) * n + j]) * a1);
                }
            }
        }
        const OperatorIntegrals in = integrate(g, n, intervals, h);
        double norm2 = 0.0;
        for (const Complex& v : in.total) norm2 += std::norm(v);
        // Re of the ordered integral from the factorized full-square form.
        const Complex ordered{0.5 * norm2, in.ordered.imag()};
        if (op < n) {
            pc.c[op] = in.total[0].real();
            pc.d_diag[op] = ordered;
        } else {
            pc.e[op - n] = in.total[0].real();
            pc.f_diag[op - n] = ordered;
        }
    });
    return pc;
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(std::span<const Complex> a) {
    double m = 0.0;
    for (const Complex& v : a) m = std::max(m, std::abs(v));
    return m;
}

template <class T>
double max_diff(std::span<const T> a, std::span<const T> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Largest change of any coefficient, relative to the largest coefficient.
// Families that vanish by symmetry (E, Im D at the transfer time) are pure
// roundoff and must not be measured against their own scale.
double richardson_change(const PerturbationCoefficients& coarse, const PerturbationCoefficients& fine) {
    const double scale = std::max({max_abs(std::span<const double>(fine.c)), max_abs(std::span<const Complex>(fine.d_diag)),
                                   max_abs(std::span<const double>(fine.e)), max_abs(std::span<const Complex>(fine.f_diag))});
    const double diff = std::max({max_diff<double>(coarse.c, fine.c), max_diff<Complex>(coarse.d_diag, fine.d_diag),
                                  max_diff<double>(coarse.e, fine.e), max_diff<Complex>(coarse.f_diag, fine.f_diag)});
    return scale > 0.0 ? diff / scale : diff;
}

}  // namespace

PerturbationCoefficients compute_coefficients(const CleanPropagatorTable& table, double t, double tolerance) {
    if (!(t >= 0.0)) throw std::invalid_argument("compute_coefficients: t must be >= 0");
    if (!(table.step > 0.0)) throw std::invalid_argument("compute_coefficients: table step must be > 0");
    if (t == 0.0) return evaluate(table, 0.0, 2);

    auto intervals = static_cast<std::size_t>(std::ceil(t / table.step));
    intervals += intervals % 2;
    intervals = std::max<std::size_t>(intervals, 2);

    const PerturbationCoefficients coarse = evaluate(table, t, intervals);
    PerturbationCoefficients fine = evaluate(table, t, 2 * intervals);
    const double change = richardson_change(coarse, fine);
    fine.richardson_change = change;
    if (change > tolerance) {
        throw CoarseQuadratureError("compute_coefficients: step " + std::to_string(coarse.step) +
                                        " too coarse, coefficients moved by " + std::to_string(change) +
                                        " relative on halving",
                                    change);
    }
    return fine;
}

PerturbationCoefficients compute_coefficients_converged(const CleanPropagatorTable& table, double t,
                                                        double tolerance, int max_halvings) {
    CleanPropagatorTable work = table;
    for (int k = 0;; ++k) {
        try {
            return compute_coefficients(work, t, tolerance);
        } catch (const CoarseQuadratureError&) {
            if (k >= max_halvings) throw;
            work.step *= 0.5;
        }
    }
}

double perturbative_fidelity(const PerturbationCoefficients& coeffs, double eps_j, double eps_b) {
    return 1.0 - eps_b * eps_b / 3.0 * coeffs.field_sum() / 3.0 - eps_j * eps_j / 3.0 * coeffs.coupling_sum() / 3.0;
}

}  // namespace spinchain
