#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spinchain {

// Outcome of a least-squares fit. `mask[i]` records whether input row i
// entered the regression, so a fit can be re-run exactly.
struct FitResult {
    std::string model;
    std::vector<std::string> names;
    std::vector<double> params;
    std::vector<double> std_errors;
    double residual_norm = 0.0;
    double r_squared = 0.0;
    std::vector<bool> mask;
    double window_lo = 0.0;
    double window_hi = 0.0;
    bool ok = false;
    std::string note;

    double param(const std::string& name) const;
    double error(const std::string& name) const;
    std::size_t used() const;
};

// y = a + b x. params = {intercept, slope}.
FitResult fit_line(std::span<const double> x, std::span<const double> y);

// y = b x through the origin. params = {slope}.
FitResult fit_through_origin(std::span<const double> x, std::span<const double> y);

// y = c x^p via log-log least squares. params = {prefactor c, exponent p};
// non-positive rows are masked out.
FitResult fit_power_law(std::span<const double> x, std::span<const double> y);

// First downward crossing of `target` by the sampled curve y(x), x ascending,
// interpolated linearly in log x. Returns nothing if the curve never falls
// from >= target to < target.
std::optional<double> log_linear_crossing(std::span<const double> x, std::span<const double> y,
                                          double target);

// Threshold curve: one (size, crossing) pair per family member plus a
// power-law fit of crossing vs size over the members that crossed.
struct ThresholdResult {
    double target = 0.0;
    std::vector<double> sizes;
    std::vector<std::optional<double>> crossings;
    FitResult fit;
};

ThresholdResult threshold_power_law(std::span<const double> sizes,
                                    const std::vector<std::vector<double>>& xs,
                                    const std::vector<std::vector<double>>& ys, double target);

}  // namespace spinchain
