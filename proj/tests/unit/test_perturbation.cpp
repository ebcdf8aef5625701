#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinchain/experiments.hpp"
#include "spinchain/perturbation.hpp"

using namespace spinchain;

namespace {

using cd = std::complex<double>;
const cd I1{0.0, 1.0};

// int_0^t exp(i w s) ds
cd I(double w, double t) {
    if (std::abs(w) < 1e-9) return t;
    return (std::exp(I1 * w * t) - 1.0) / (I1 * w);
}

// int_0^t ds exp(i a s) int_0^s ds' exp(i b s')
cd K(double a, double b, double t) {
    if (std::abs(b) > 1e-9) return (I(a + b, t) - I(a, t)) / (I1 * b);
    if (std::abs(a) < 1e-9) return t * t / 2.0;
    return t * std::exp(I1 * a * t) / (I1 * a) - (std::exp(I1 * a * t) - 1.0) / std::pow(I1 * a, 2);
}

struct Exact {
    cd first;    // G_1
    cd ordered;  // time-ordered double integral
};

// Closed-form coefficients for a real symmetric operator, from the clean
// eigenbasis computed by a dense solver.
Exact exact(const Eigen::MatrixXd& v, const Eigen::VectorXd& e, const Eigen::MatrixXd& op, double t) {
    const Eigen::MatrixXd o = v.transpose() * op * v;
    const int n = static_cast<int>(e.size());
    Exact out{0.0, 0.0};
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) out.first += v(0, m) * o(m, k) * v(0, k) * I(e(m) - e(k), t);
    for (int m = 0; m < n; ++m)
        for (int p = 0; p < n; ++p)
            for (int k = 0; k < n; ++k)
                out.ordered += v(0, m) * o(m, p) * o(p, k) * v(0, k) * K(e(m) - e(p), e(p) - e(k), t);
    return out;
}

}  // namespace

TEST_CASE("coefficients vanish at t = 0") {
    const auto table = make_propagator_table(ChainSpec{.n_sites = 6});
    const auto c = compute_coefficients(table, 0.0);
    for (double v : c.c) CHECK(v == 0.0);
    CHECK(c.field_sum() == 0.0);
    CHECK(c.coupling_sum() == 0.0);
    CHECK(perturbative_fidelity(c, 0.1, 0.1) == 1.0);
}

TEST_CASE("coefficients against closed-form eigenbasis integrals") {
    const int n = 8;
    ChainSpec spec{.n_sites = n, .base_coupling = 0.9};
    const double t = transfer_time(spec, 0);
    const auto h = build_clean_hamiltonian(spec);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) dense(i, i) = h.diag[i];
    for (int i = 0; i + 1 < n; ++i) dense(i, i + 1) = dense(i + 1, i) = h.offdiag[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);

    const auto table = make_propagator_table(spec);
    const auto pc = compute_coefficients_converged(table, t, 1e-8);
    CHECK(pc.richardson_change <= 1e-8);

    for (int l = 0; l < n; ++l) {
        Eigen::MatrixXd o = Eigen::MatrixXd::Identity(n, n);
        o(l, l) = -1.0;
        const Exact ex = exact(es.eigenvectors(), es.eigenvalues(), o, t);
        CHECK(std::abs(ex.first.imag()) < 1e-10);
        CHECK(pc.c[l] == doctest::Approx(ex.first.real()).epsilon(1e-7));
        CHECK(std::abs(pc.d_diag[l] - ex.ordered) < 1e-7 * (1.0 + std::abs(ex.ordered)));
    }
    for (int l = 0; l + 1 < n; ++l) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
        w(l, l + 1) = w(l + 1, l) = 2.0 * clean_coupling(spec, l + 1);
        const Exact ex = exact(es.eigenvectors(), es.eigenvalues(), w, t);
        CHECK(pc.e[l] == doctest::Approx(ex.first.real()).epsilon(1e-7));
        CHECK(std::abs(pc.f_diag[l] - ex.ordered) < 1e-7 * (1.0 + std::abs(ex.ordered)));
    }
}

TEST_CASE("coarse quadrature is reported") {
    auto table = make_propagator_table(ChainSpec{.n_sites = 10});
    table.step *= 20.0;
    CHECK_THROWS_AS(compute_coefficients(table, 3.0, 1e-10), CoarseQuadratureError);
    CHECK_NOTHROW(compute_coefficients_converged(table, 3.0, 1e-6, 10));
}

TEST_CASE("formula is quadratic and matches a small Monte-Carlo run") {
    const int n = 10;
    ChainSpec spec{.n_sites = n};
    const auto pc = compute_coefficients_converged(make_propagator_table(spec), transfer_time(spec));
    CHECK(pc.field_sum() > 0.0);
    CHECK(pc.coupling_sum() > 0.0);
    const double a = 1.0 - perturbative_fidelity(pc, 1e-3, 0.0);
    const double b = 1.0 - perturbative_fidelity(pc, 2e-3, 0.0);
    CHECK(b / a == doctest::Approx(4.0));

    const auto cmp = compare_perturbation(n, 1.0, {5e-3, 1e-2}, 4000, 21);
    for (const auto& row : cmp.rows) {
        CHECK(row.ratio() == doctest::Approx(1.0).epsilon(0.1));
    }
}
