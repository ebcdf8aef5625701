#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oracles.hpp"
#include "spinchain/chain_model.hpp"
#include "spinchain/propagator.hpp"

using namespace spinchain;

TEST_CASE("perfect transfer in the clean chain") {
    for (int n : {2, 10, 100, 500}) {
        ChainSpec s{.n_sites = n};
        const auto es = endpoint_spectrum(build_clean_hamiltonian(s));
        for (int k = 0; k < 3; ++k) {
            const double f = fidelity_of_amplitude(transfer_amplitude(es, transfer_time(s, k)));
            CHECK(f >= 1.0 - 1e-9);
        }
    }
}

TEST_CASE("clean closed form |f_N| = |sin 2Jt|^(N-1)") {
    ChainSpec s{.n_sites = 5};
    const auto es = endpoint_spectrum(build_clean_hamiltonian(s));
    CHECK(std::abs(transfer_amplitude(es, 0.3)) == doctest::Approx(std::pow(std::sin(0.6), 4)).epsilon(1e-12));
    CHECK(std::abs(transfer_amplitude(es, 0.3)) == doctest::Approx(0.10165).epsilon(1e-4));
    for (int n = 2; n <= 12; ++n) {
        ChainSpec c{.n_sites = n, .base_coupling = 0.8};
        const auto e = endpoint_spectrum(build_clean_hamiltonian(c));
        for (double t : {0.0, 0.17, 0.9, 2.4, 11.3}) {
            const double expect = std::pow(std::abs(std::sin(2 * 0.8 * t)), n - 1);
            CHECK(std::abs(std::abs(transfer_amplitude(e, t)) - expect) < 1e-12);
        }
    }
}

TEST_CASE("spectral propagator against the matrix exponential") {
    RandomStream times(99, {});
    for (int n : {2, 3, 7, 12}) {
        ChainSpec s{.n_sites = n, .eps_j = 0.3, .eps_b = 0.5};
        const auto real = sample_disorder(s, 5, 1);
        const auto h = build_hamiltonian(s, real);
        const auto sd = eigendecompose(h);
        const auto es = endpoint_spectrum(h);
        for (int k = 0; k < 5; ++k) {
            const double t = times.uniform(0.0, 10.0);
            const auto ref = oracle::tridiagonal_propagator(h.diag, h.offdiag, t);
            const auto u = propagator_matrix(sd, t);
            double err = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) err = std::max(err, std::abs(u[i * n + j] - ref(i, j)));
            CHECK(err < 1e-10);
            CHECK(std::abs(transfer_amplitude(es, t) - ref(n - 1, 0)) < 1e-10);
            CHECK(std::abs(propagator_element(sd, 2 % n, 0, t) - ref(2 % n, 0)) < 1e-10);
        }
    }
}

TEST_CASE("unitarity, reciprocity and eigenvector signs") {
    ChainSpec s{.n_sites = 40, .eps_j = 0.2, .eps_b = 0.3};
    const auto sd = eigendecompose(build_hamiltonian(s, sample_disorder(s, 1, 2)));
    for (double t : {0.5, 3.0, 40.0}) {
        const auto a = amplitudes(sd, t);
        double norm = 0.0;
        for (auto z : a) norm += std::norm(z);
        CHECK(std::abs(norm - 1.0) < 1e-10);
        CHECK(std::abs(propagator_element(sd, 39, 0, t) - propagator_element(sd, 0, 39, t)) < 1e-12);
    }
    for (std::size_t m = 0; m < sd.dim(); ++m) CHECK(sd.eigenvectors(0, m) > 0.0);
}

TEST_CASE("fidelity map") {
    CHECK(fidelity_of_amplitude({0, 0}) == doctest::Approx(0.5));
    CHECK(fidelity_of_amplitude({0, 1}) == doctest::Approx(1.0));
    CHECK(fidelity_of_amplitude({0.6, 0.0}) == doctest::Approx(0.2 + 0.06 + 0.5));
    CHECK(fidelity_of_amplitude({1.0 + 1e-10, 0}) == 1.0);
    CHECK_THROWS_AS(fidelity_of_amplitude({1.01, 0}), std::domain_error);
}

TEST_CASE("fidelity series matches direct evaluation") {
    ChainSpec s{.n_sites = 30, .eps_j = 0.1};
    const auto real = sample_disorder(s, 3, 0);
    const auto es = endpoint_spectrum(build_hamiltonian(s, real));
    const auto series = fidelity_series(s, real, 300.0, 0.1);
    REQUIRE(series.size() == 3001);
    CHECK(series.duration() == doctest::Approx(300.0));
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{1500}, std::size_t{3000}}) {
        CHECK(std::abs(series.amplitude[i] - transfer_amplitude(es, series.times[i])) < 1e-11);
        CHECK(series.fidelity[i] >= 0.5);
        CHECK(series.fidelity[i] <= 1.0);
    }
    CHECK_THROWS_AS(fidelity_series(es, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("ensemble average") {
    ChainSpec s{.n_sites = 20, .eps_j = 0.05};
    std::vector<double> t{transfer_time(s)};
    const auto a = ensemble_average(s, 50, 7, t);
    const auto b = ensemble_average(s, 50, 7, t);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.n_real == 50);
    CHECK(a.mean[0] < 1.0);
    CHECK(a.mean[0] > 0.9);

    const auto per = realization_fidelities(s, 50, 7, t);
    double sum = 0.0;
    for (const auto& row : per) sum += row[0];
    CHECK(a.mean[0] == doctest::Approx(sum / 50).epsilon(1e-14));

    ChainSpec clean{.n_sites = 20};
    const auto c = ensemble_average(clean, 3, 7, t);
    CHECK(c.mean[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.std_error[0] < 1e-12);
}
