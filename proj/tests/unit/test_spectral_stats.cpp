#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "spinchain/random_stream.hpp"
#include "spinchain/spectral_stats.hpp"

using namespace spinchain;

TEST_CASE("normalized spacings") {
    std::vector<double> ev{-3, -1, 0, 3}, out;
    append_normalized_spacings(ev, out);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == doctest::Approx(0.5));
    CHECK(out[2] == doctest::Approx(1.5));
}

TEST_CASE("histogram bins and mass") {
    std::vector<double> s{0.0, 0.01, 0.98, 1.0, 1.02, 7.3};
    const auto h = spacing_histogram(s, 0.05, 5.0);
    CHECK(h.lower[0] == 0.0);
    CHECK(h.upper[0] == doctest::Approx(0.025));
    CHECK(h.lower[20] == doctest::Approx(0.975));
    CHECK(h.center(20) == doctest::Approx(1.0));
    CHECK(h.upper.back() >= 7.3);
    CHECK(h.total_mass() == doctest::Approx(1.0));
    CHECK(h.density[20] * 0.05 == doctest::Approx(0.5));
    CHECK_THROWS_AS(spacing_histogram(s, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(spacing_histogram(std::vector<double>{}, 0.05), std::invalid_argument);
}

TEST_CASE("eta limits") {
    SUBCASE("clean chain gives exactly one") {
        const auto sample = collect_spacings(ChainSpec{.n_sites = 100}, 1, 0);
        CHECK(sample.spacings.size() == 99);
        CHECK(eta(sample) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("exponential spacings give nearly zero") {
        RandomStream rng(12, {});
        std::vector<double> s(100000);
        for (auto& v : s) v = -std::log(1.0 - rng.uniform01());
        CHECK(eta(s) <= 0.05);
    }
}

TEST_CASE("eta curve falls with disorder") {
    ChainSpec base{.n_sites = 100};
    std::vector<double> grid{1e-3, 1e-1, 1.0};
    const auto curve = eta_curve(base, grid, 20, 5);
    CHECK(curve[0] >= 0.9);
    CHECK(curve[1] < curve[0]);
    CHECK(curve[2] <= 0.1);
    CHECK(eta_curve(base, grid, 20, 5) == curve);
}
