#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "spinchain/fit.hpp"

using namespace spinchain;

TEST_CASE("straight line") {
    std::vector<double> x{0, 1, 2, 3, 4}, y;
    for (double v : x) y.push_back(1.5 - 0.25 * v);
    const auto f = fit_line(x, y);
    CHECK(f.ok);
    CHECK(f.param("intercept") == doctest::Approx(1.5));
    CHECK(f.param("slope") == doctest::Approx(-0.25));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.error("slope") < 1e-12);
    CHECK(f.used() == 5);
    CHECK_THROWS_AS(f.param("nope"), std::out_of_range);
}

TEST_CASE("slope error estimate") {
    // residuals +-1 alternating around y = x
    std::vector<double> x{0, 1, 2, 3}, y{1, 0, 3, 2};
    const auto f = fit_line(x, y);
    CHECK(f.param("slope") == doctest::Approx(0.6));
    // s^2 = RSS/(n-2), se = sqrt(s^2 / Sxx)
    double rss = 0;
    for (int i = 0; i < 4; ++i) rss += std::pow(y[i] - (f.param("intercept") + 0.6 * x[i]), 2);
    CHECK(f.error("slope") == doctest::Approx(std::sqrt(rss / 2 / 5.0)));
}

TEST_CASE("through origin and power law") {
    std::vector<double> x{1, 2, 4, 8}, y;
    for (double v : x) y.push_back(3 * v);
    CHECK(fit_through_origin(x, y).param("slope") == doctest::Approx(3.0));

    std::vector<double> p{0.0, 10, 20, 40, 80};
    std::vector<double> q{1.0, 0.7 * std::pow(10, -0.5), 0.7 * std::pow(20, -0.5), 0.7 * std::pow(40, -0.5),
                          0.7 * std::pow(80, -0.5)};
    const auto f = fit_power_law(p, q);
    CHECK(f.mask[0] == false);
    CHECK(f.used() == 4);
    CHECK(f.param("exponent") == doctest::Approx(-0.5));
    CHECK(f.param("prefactor") == doctest::Approx(0.7));
}

TEST_CASE("log-linear crossing") {
    std::vector<double> x{0.01, 0.1, 1.0}, y{1.0, 0.8, 0.4};
    const auto c = log_linear_crossing(x, y, 0.6);
    REQUIRE(c);
    CHECK(*c == doctest::Approx(std::sqrt(0.1)));
    CHECK_FALSE(log_linear_crossing(x, y, 0.2));
    CHECK_FALSE(log_linear_crossing(x, y, 1.5));
    std::vector<double> bad{0.0, 1, 2};
    CHECK_THROWS_AS(log_linear_crossing(bad, y, 0.9), std::invalid_argument);
}

TEST_CASE("threshold family with exact square-root law") {
    // F = (1 + exp(-k N e^2)) / 2 crosses F* at e = sqrt(ln(1/(2F*-1)) / (k N))
    std::vector<double> sizes{10, 20, 50, 100};
    std::vector<std::vector<double>> xs, ys;
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(std::pow(10.0, -3 + i * 0.05));
    for (double n : sizes) {
        std::vector<double> f;
        for (double e : grid) f.push_back(0.5 * (1 + std::exp(-0.2 * n * e * e)));
        xs.push_back(grid);
        ys.push_back(f);
    }
    const auto t = threshold_power_law(sizes, xs, ys, 0.9);
    CHECK(t.fit.ok);
    CHECK(t.fit.param("exponent") == doctest::Approx(-0.5).epsilon(1e-3));
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        REQUIRE(t.crossings[k]);
        CHECK(*t.crossings[k] == doctest::Approx(std::sqrt(std::log(1 / 0.8) / (0.2 * sizes[k]))).epsilon(2e-3));
    }
    const auto none = threshold_power_law(sizes, xs, ys, 0.3);
    CHECK_FALSE(none.fit.ok);
    CHECK(none.fit.note.find("out of range") != std::string::npos);
}
