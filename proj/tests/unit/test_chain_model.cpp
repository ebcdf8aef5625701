#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oracles.hpp"
#include "spinchain/chain_model.hpp"

using namespace spinchain;

TEST_CASE("clean couplings and transfer time") {
    ChainSpec s{.n_sites = 5, .base_coupling = 0.5};
    CHECK(clean_coupling(s, 1) == doctest::Approx(0.5 * 2.0));
    CHECK(clean_coupling(s, 2) == doctest::Approx(0.5 * std::sqrt(6.0)));
    CHECK(clean_coupling(s, 4) == doctest::Approx(clean_coupling(s, 1)));
    CHECK_THROWS_AS(clean_coupling(s, 0), std::invalid_argument);
    CHECK_THROWS_AS(clean_coupling(s, 5), std::invalid_argument);
    CHECK(transfer_time(s, 0) == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(transfer_time(s, 2) == doctest::Approx(5 * std::numbers::pi / 2.0));
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS((ChainSpec{.n_sites = 1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChainSpec{.n_sites = 4, .base_coupling = 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChainSpec{.n_sites = 4, .eps_j = -0.1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChainSpec{.n_sites = 4, .corr_p = 1.2}.validate()), std::invalid_argument);
    CHECK_NOTHROW((ChainSpec{.n_sites = 4, .eps_j = 0.3, .eps_b = 2.0, .corr_p = 0.1}.validate()));
}

TEST_CASE("sector Hamiltonian matches the full Pauli construction") {
    SUBCASE("N = 3 clean") {
        ChainSpec s{.n_sites = 3};
        const auto h = build_clean_hamiltonian(s);
        REQUIRE(h.offdiag.size() == 2);
        CHECK(h.offdiag[0] == doctest::Approx(2.0 * std::sqrt(2.0)));
        CHECK(h.offdiag[1] == doctest::Approx(2.0 * std::sqrt(2.0)));
        const auto full = oracle::pauli_hamiltonian({std::sqrt(2.0), std::sqrt(2.0)}, {0, 0, 0});
        const auto block = oracle::single_excitation_block(full, 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(block(i, i).real() == doctest::Approx(0.0));
            if (i < 2) CHECK(block(i, i + 1).real() == doctest::Approx(h.offdiag[i]));
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
        CHECK(es.eigenvalues()(0) == doctest::Approx(-4.0));
        CHECK(es.eigenvalues()(1) == doctest::Approx(0.0).scale(1.0));
        CHECK(es.eigenvalues()(2) == doctest::Approx(4.0));
    }
    SUBCASE("N = 2 with fields") {
        ChainSpec s{.n_sites = 2, .eps_b = 0.5};
        DisorderRealization r{{0.0}, {0.1, -0.1}};
        const auto h = build_hamiltonian(s, r);
        CHECK(h.diag[0] == doctest::Approx(-0.2));
        CHECK(h.diag[1] == doctest::Approx(0.2));
        CHECK(h.offdiag[0] == doctest::Approx(2.0));
    }
    SUBCASE("N = 5 random disorder") {
        ChainSpec s{.n_sites = 5, .base_coupling = 0.7, .eps_j = 0.3, .eps_b = 0.4};
        const auto r = sample_disorder(s, 11, 0);
        const auto h = build_hamiltonian(s, r);
        std::vector<double> j, b = r.field_err;
        double bsum = 0;
        for (int k = 1; k < 5; ++k) j.push_back(clean_coupling(s, k) * (1.0 + r.delta[k - 1]));
        for (double v : b) bsum += v;
        const auto block = oracle::single_excitation_block(oracle::pauli_hamiltonian(j, b), 5);
        for (int i = 0; i < 5; ++i) {
            CHECK(block(i, i).real() - bsum == doctest::Approx(h.diag[i]));
            for (int k = 0; k < 5; ++k) {
                double expect = 0.0;
                if (k == i + 1) expect = h.offdiag[i];
                if (i == k + 1) expect = h.offdiag[k];
                if (k != i) CHECK(std::abs(block(i, k) - expect) < 1e-12);
            }
        }
    }
}

TEST_CASE("disorder sampling") {
    ChainSpec s{.n_sites = 50, .eps_j = 0.2, .eps_b = 0.3};
    const auto a = sample_disorder(s, 3, 7);
    const auto b = sample_disorder(s, 3, 7);
    CHECK(a.delta == b.delta);
    CHECK(a.field_err == b.field_err);
    REQUIRE(a.delta.size() == 49);
    REQUIRE(a.field_err.size() == 50);
    for (double d : a.delta) CHECK(std::abs(d) <= 0.2);
    for (double d : a.field_err) CHECK(std::abs(d) <= 0.3);

    SUBCASE("common random numbers across amplitudes") {
        ChainSpec half = s;
        half.eps_j = 0.1;
        half.eps_b = 0.15;
        const auto c = sample_disorder(half, 3, 7);
        for (std::size_t k = 0; k < c.delta.size(); ++k) CHECK(c.delta[k] == doctest::Approx(a.delta[k] / 2.0));
        for (std::size_t k = 0; k < c.field_err.size(); ++k)
            CHECK(c.field_err[k] == doctest::Approx(a.field_err[k] / 2.0));
    }
    SUBCASE("zero amplitudes give the clean chain") {
        ChainSpec clean{.n_sites = 50};
        const auto z = sample_disorder(clean, 3, 7);
        for (double d : z.delta) CHECK(d == 0.0);
        CHECK(build_hamiltonian(clean, z).offdiag == build_clean_hamiltonian(clean).offdiag);
    }
    SUBCASE("dimension mismatch") {
        DisorderRealization bad{{0.0}, {0.0, 0.0}};
        CHECK_THROWS_AS(build_hamiltonian(s, bad), std::invalid_argument);
    }
}

TEST_CASE("sign correlation frequency") {
    for (double p : {0.1, 0.5, 0.9}) {
        ChainSpec s{.n_sites = 200, .eps_j = 0.1, .corr_p = p};
        long same = 0, pairs = 0;
        for (std::uint64_t r = 0; r < 100; ++r) {
            const auto d = sample_disorder(s, 17, r);
            for (std::size_t k = 1; k < d.delta.size(); ++k) {
                same += (d.delta[k] > 0) == (d.delta[k - 1] > 0) ? 1 : 0;
                ++pairs;
            }
        }
        const double freq = double(same) / pairs;
        const double sigma = std::sqrt(p * (1 - p) / pairs);
        CHECK(std::abs(freq - p) < 3.0 * sigma);
    }
}
