#include "spinchain/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace spinchain {

double FitResult::param(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return params.at(i);
    }
    throw std::out_of_range("FitResult: no parameter '" + name + "'");
}

double FitResult::error(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return std_errors.at(i);
    }
    throw std::out_of_range("FitResult: no parameter '" + name + "'");
}

std::size_t FitResult::used() const {
    std::size_t n = 0;
    for (bool b : mask) n += b ? 1 : 0;
    return n;
}

FitResult fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    FitResult fit;
    fit.model = "line";
    fit.names = {"intercept", "slope"};
    fit.mask.assign(x.size(), true);
    const std::size_t n = x.size();
    if (n < 2) {
        fit.note = "fewer than 2 points";
        fit.params = {0.0, 0.0};
        fit.std_errors = {0.0, 0.0};
        return fit;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        fit.note = "degenerate abscissae";
        fit.params = {my, 0.0};
        fit.std_errors = {0.0, 0.0};
        return fit;
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - intercept - slope * x[i];
        rss += r * r;
    }
    const double dof = static_cast<double>(n) - 2.0;
    const double sigma2 = dof > 0 ? rss / dof : 0.0;
    const double se_slope = std::sqrt(sigma2 / sxx);
    const double se_intercept = std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    fit.params = {intercept, slope};
    fit.std_errors = {se_intercept, se_slope};
    fit.residual_norm = std::sqrt(rss);
    fit.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    fit.ok = true;
    return fit;
}

FitResult fit_through_origin(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_through_origin: size mismatch");
    FitResult fit;
    fit.model = "proportional";
    fit.names = {"slope"};
    fit.mask.assign(x.size(), true);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    if (x.empty() || sxx == 0.0) {
        fit.note = "no usable points";
        fit.params = {0.0};
        fit.std_errors = {0.0};
        return fit;
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - slope * x[i];
        rss += r * r;
    }
    const double dof = static_cast<double>(x.size()) - 1.0;
    fit.params = {slope};
    fit.std_errors = {dof > 0 ? std::sqrt(rss / dof / sxx) : 0.0};
    fit.residual_norm = std::sqrt(rss);
    fit.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    fit.ok = true;
    return fit;
}

FitResult fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    std::vector<double> lx, ly;
    std::vector<bool> mask(x.size(), false);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
            mask[i] = true;
        }
    }
    FitResult line = fit_line(lx, ly);
    FitResult fit;
    fit.model = "power_law";
    fit.names = {"prefactor", "exponent"};
    const double c = std::exp(line.params[0]);
    fit.params = {c, line.params[1]};
    fit.std_errors = {c * line.std_errors[0], line.std_errors[1]};
    fit.residual_norm = line.residual_norm;
    fit.r_squared = line.r_squared;
    fit.mask = std::move(mask);
    fit.ok = line.ok;
    fit.note = line.note;
    return fit;
}

std::optional<double> log_linear_crossing(std::span<const double> x, std::span<const double> y,
                                          double target) {
    if (x.size() != y.size()) throw std::invalid_argument("log_linear_crossing: size mismatch");
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (y[i] >= target && y[i + 1] < target) {
            if (!(x[i] > 0.0) || !(x[i + 1] > 0.0)) {
                throw std::invalid_argument("log_linear_crossing: abscissae must be positive");
            }
            const double frac = (target - y[i]) / (y[i + 1] - y[i]);
            const double lx = std::log(x[i]) + frac * (std::log(x[i + 1]) - std::log(x[i]));
            return std::exp(lx);
        }
    }
    return std::nullopt;
}

ThresholdResult threshold_power_law(std::span<const double> sizes,
                                    const std::vector<std::vector<double>>& xs,
                                    const std::vector<std::vector<double>>& ys, double target) {
    if (xs.size() != sizes.size() || ys.size() != sizes.size()) {
        throw std::invalid_argument("threshold_power_law: one curve per size required");
    }
    ThresholdResult res;
    res.target = target;
    res.sizes.assign(sizes.begin(), sizes.end());
    std::vector<double> fx, fy;
    std::string missing;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        auto c = log_linear_crossing(xs[i], ys[i], target);
        res.crossings.push_back(c);
        if (c) {
            fx.push_back(sizes[i]);
            fy.push_back(*c);
        } else {
            missing += (missing.empty() ? "" : ",") + std::to_string(static_cast<long long>(sizes[i]));
        }
    }
    res.fit = fit_power_law(fx, fy);
    // Re-express the mask over all sizes, not just the crossing ones.
    std::vector<bool> mask(sizes.size(), false);
    for (std::size_t i = 0; i < sizes.size(); ++i) mask[i] = res.crossings[i].has_value();
    res.fit.mask = std::move(mask);
    if (fx.size() < 2) {
        res.fit.ok = false;
    }
    if (!missing.empty()) res.fit.note = "out of range (no crossing) for size " + missing;
    return res;
}

}  // namespace spinchain
