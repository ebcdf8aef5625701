#include "spinchain/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "spinchain/parallel.hpp"

namespace spinchain {

TrimmedSeries transient_trim(const FidelitySeries& series, double level) {
    if (series.size() == 0) throw std::invalid_argument("transient_trim: empty series");
    TrimmedSeries out;
    const auto it = std::find_if(series.fidelity.begin(), series.fidelity.end(), [&](double f) { return f <= level; });
    if (it == series.fidelity.end()) {
        out.series = series;
        return out;
    }
    const auto start = static_cast<std::size_t>(it - series.fidelity.begin());
    out.reached = true;
    out.dropped = start;
    out.series.dt = series.dt;
    out.series.times.assign(series.times.begin() + static_cast<std::ptrdiff_t>(start), series.times.end());
    out.series.amplitude.assign(series.amplitude.begin() + static_cast<std::ptrdiff_t>(start), series.amplitude.end());
    out.series.fidelity.assign(series.fidelity.begin() + static_cast<std::ptrdiff_t>(start), series.fidelity.end());
    return out;
}

bool BoxCountCurve::degenerate() const {
    return std::all_of(counts.begin(), counts.end(), [](double m) { return m == 0.0; });
}

std::vector<double> default_window_lengths(double dt, double duration) {
    if (!(dt > 0.0) || !(duration > 0.0)) {
        throw std::invalid_argument("default_window_lengths: dt and duration must be > 0");
    }
    const double ratio = std::pow(2.0, 0.25);
    const double top = duration / 8.0;
    std::vector<double> out;
    long long last = 0;
    for (double l = 4.0 * dt; l <= top * (1.0 + 1e-12); l *= ratio) {
        const long long m = std::llround(l / dt);
        if (m != last) {
            out.push_back(static_cast<double>(m) * dt);
            last = m;
        }
    }
    return out;
}

BoxCountCurve box_count(std::span<const double> values, double dt, std::span<const double> lengths) {
    if (!(dt > 0.0)) throw std::invalid_argument("box_count: dt must be > 0");
    if (values.size() < 2) throw std::invalid_argument("box_count: series needs at least two samples");
    const std::size_t last = values.size() - 1;
    BoxCountCurve curve;
    curve.dt = dt;
    double previous = 0.0;
    for (double l : lengths) {
        if (!(l > previous)) throw std::invalid_argument("box_count: lengths must be strictly increasing");
        previous = l;
        const double ratio = l / dt;
        const long long m = std::llround(ratio);
        if (m < 1 || ratio < 1.0 - 1e-9) {
            throw std::invalid_argument("box_count: window length " + std::to_string(l) + " is shorter than dt");
        }
        if (std::abs(ratio - static_cast<double>(m)) > 1e-6 * ratio) {
            throw std::invalid_argument("box_count: window length " + std::to_string(l) +
                                        " is not a multiple of dt");
        }
        const auto span = static_cast<std::size_t>(m);
        if (span > last) {
            throw std::invalid_argument("box_count: window length " + std::to_string(l) +
                                        " exceeds the series duration");
        }
        const std::size_t count = last / span;
        double total = 0.0;
        for (std::size_t w = 0; w < count; ++w) {
            const auto begin = values.begin() + static_cast<std::ptrdiff_t>(w * span);
            const auto [lo, hi] = std::minmax_element(begin, begin + static_cast<std::ptrdiff_t>(span) + 1);
            total += *hi - *lo;
        }
        const double length = static_cast<double>(m) * dt;
        curve.lengths.push_back(length);
        curve.counts.push_back(total / length);
        curve.windows.push_back(count);
    }
    return curve;
}

BoxCountCurve box_count(const FidelitySeries& series, std::span<const double> lengths) {
    return box_count(series.fidelity, series.dt, lengths);
}

BoxCountCurve box_count(const FidelitySeries& series) {
    const auto lengths = default_window_lengths(series.dt, series.duration());
    return box_count(series, lengths);
}

namespace {

struct LogPoints {
    std::vector<double> x, y;
    std::vector<bool> valid;
};

LogPoints log_points(const BoxCountCurve& c) {
    LogPoints p;
    p.x.resize(c.size());
    p.y.resize(c.size());
    p.valid.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        p.valid[i] = c.counts[i] > 0.0 && c.lengths[i] > 0.0;
        p.x[i] = std::log(c.lengths[i]);
        p.y[i] = p.valid[i] ? std::log(c.counts[i]) : 0.0;
    }
    return p;
}

bool all_valid(const LogPoints& p, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i <= hi; ++i) {
        if (!p.valid[i]) return false;
    }
    return true;
}

FitResult line_on(const LogPoints& p, std::size_t lo, std::size_t hi) {
    const std::span<const double> xs(p.x.data() + lo, hi - lo + 1);
    const std::span<const double> ys(p.y.data() + lo, hi - lo + 1);
    return fit_line(xs, ys);
}

FitResult dimension_result(const BoxCountCurve& c, const LogPoints& p, std::size_t lo, std::size_t hi) {
    FitResult line = line_on(p, lo, hi);
    FitResult fit;
    fit.model = "box_count_dimension";
    fit.names = {"intercept", "dimension"};
    fit.params = {line.params[0], -line.params[1]};
    fit.std_errors = line.std_errors;
    fit.residual_norm = line.residual_norm;
    fit.r_squared = line.r_squared;
    fit.mask.assign(c.size(), false);
    for (std::size_t i = lo; i <= hi; ++i) fit.mask[i] = true;
    fit.window_lo = c.lengths[lo];
    fit.window_hi = c.lengths[hi];
    fit.ok = line.ok;
    return fit;
}

}  // namespace

std::vector<double> local_dimensions(const BoxCountCurve& curve) {
    const LogPoints p = log_points(curve);
    const std::size_t n = curve.size();
    std::vector<double> d(n, std::numeric_limits<double>::quiet_NaN());
    if (n < 2) return d;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = std::min(n - 1, i + 2);
        if (!all_valid(p, lo, hi)) continue;
        d[i] = -line_on(p, lo, hi).params[1];
    }
    return d;
}

FitResult fit_dimension(const BoxCountCurve& curve, std::optional<std::pair<double, double>> window,
                        const DimensionFitOptions& opt) {
    const LogPoints p = log_points(curve);
    const std::size_t n = curve.size();

    if (window) {
        const double lo = window->first * (1.0 - 1e-12);
        const double hi = window->second * (1.0 + 1e-12);
        std::size_t first = n, last = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (curve.lengths[i] >= lo && curve.lengths[i] <= hi) {
                first = std::min(first, i);
                last = i;
            }
        }
        if (first == n || last + 1 - first < opt.min_points) {
            throw std::invalid_argument("fit_dimension: window holds fewer than " + std::to_string(opt.min_points) +
                                        " grid points");
        }
        if (!all_valid(p, first, last)) {
            FitResult fit;
            fit.model = "box_count_dimension";
            fit.names = {"intercept", "dimension"};
            fit.params = {0.0, 0.0};
            fit.std_errors = {0.0, 0.0};
            fit.mask.assign(n, false);
            fit.note = "zero excursions inside the window (constant signal)";
            return fit;
        }
        FitResult fit = dimension_result(curve, p, first, last);
        fit.note = "manual window";
        return fit;
    }

    FitResult refused;
    refused.model = "box_count_dimension";
    refused.names = {"intercept", "dimension"};
    refused.params = {0.0, 0.0};
    refused.std_errors = {0.0, 0.0};
    refused.mask.assign(n, false);
    if (curve.degenerate()) {
        refused.note = "degenerate: constant signal, all excursions vanish";
        return refused;
    }
    if (n < opt.min_points + 2) {
        refused.note = "grid too short for an automatic window";
        return refused;
    }

    // Search [1, limit] (interior points only), first below saturation.
    // Returns {lo, hi}; hi == 0 means nothing qualified.
    auto search = [&](std::size_t limit) -> std::pair<std::size_t, std::size_t> {
        std::pair<std::size_t, std::size_t> best{0, 0};
        std::size_t best_len = 0, best_margin = 0;
        for (std::size_t lo = 1; lo <= limit; ++lo) {
            for (std::size_t hi = lo + opt.min_points - 1; hi <= limit; ++hi) {
                if (std::log10(curve.lengths[hi] / curve.lengths[lo]) < opt.min_decades - 1e-9) continue;
                if (!all_valid(p, lo, hi)) break;
                const FitResult line = line_on(p, lo, hi);
                if (!line.ok || line.r_squared < opt.min_r_squared) continue;
                const std::size_t len = hi - lo + 1;
                const std::size_t margin = std::min(lo, n - 1 - hi);
                if (len > best_len || (len == best_len && margin > best_margin)) {
                    best = {lo, hi};
                    best_len = len;
                    best_margin = margin;
                }
            }
        }
        return best;
    };

    const std::vector<double> local = local_dimensions(curve);
    std::size_t saturation = n - 1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (std::isfinite(local[i]) && local[i] >= opt.saturation_level) {
            saturation = i;
            break;
        }
    }

    auto chosen = saturation > 1 ? search(saturation - 1) : std::pair<std::size_t, std::size_t>{0, 0};
    std::string regime = "below saturation";
    if (chosen.second == 0) {
        chosen = search(n - 2);
        regime = "full grid";
    }
    if (chosen.second == 0) {
        refused.note = "no window spanning " + std::to_string(opt.min_decades) + " decade(s) with R^2 >= " +
                       std::to_string(opt.min_r_squared);
        return refused;
    }
    FitResult fit = dimension_result(curve, p, chosen.first, chosen.second);
    fit.note = "automatic window (" + regime + ")";
    return fit;
}

void apply_fit(BoxCountCurve& curve, const FitResult& fit) {
    curve.fitted = fit.ok;
    if (!fit.ok) return;
    curve.fit_lo = fit.window_lo;
    curve.fit_hi = fit.window_hi;
    curve.dimension = fit.param("dimension");
    curve.dimension_error = fit.error("dimension");
}

SeriesDimension series_dimension(const FidelitySeries& series, const DimensionFitOptions& options) {
    SeriesDimension out;
    TrimmedSeries trimmed = transient_trim(series);
    out.trimmed = trimmed.dropped;
    out.curve = box_count(trimmed.series);
    out.fit = fit_dimension(out.curve, std::nullopt, options);
    apply_fit(out.curve, out.fit);
    return out;
}

std::vector<DimensionPoint> dimension_curve(const ChainSpec& base, std::span<const double> eps_j_grid,
                                            std::size_t n_real, std::uint64_t master_seed, double t_max,
                                            double dt, const DimensionFitOptions& options) {
    if (n_real == 0) throw std::invalid_argument("dimension_curve: n_real must be >= 1");
    const std::size_t cells = eps_j_grid.size() * n_real;
    std::vector<double> dims(cells, std::numeric_limits<double>::quiet_NaN());
    parallel_for(cells, [&](std::size_t cell) {
        ChainSpec spec = base;
        spec.eps_j = eps_j_grid[cell / n_real];
        const std::size_t r = cell % n_real;
        const auto series = fidelity_series(spec, sample_disorder(spec, master_seed, r), t_max, dt);
        const auto sd = series_dimension(series, options);
        if (sd.fit.ok) dims[cell] = sd.fit.param("dimension");
    });
    std::vector<DimensionPoint> out;
    for (std::size_t e = 0; e < eps_j_grid.size(); ++e) {
        DimensionPoint pt;
        pt.eps_j = eps_j_grid[e];
        pt.attempted = n_real;
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t r = 0; r < n_real; ++r) {
            const double d = dims[e * n_real + r];
            if (std::isfinite(d)) {
                sum += d;
                sum2 += d * d;
                ++pt.fitted;
            }
        }
        if (pt.fitted == 0) {
            pt.mean_dimension = std::numeric_limits<double>::quiet_NaN();
        } else {
            const double k = static_cast<double>(pt.fitted);
            pt.mean_dimension = sum / k;
            if (pt.fitted > 1) {
                const double var = std::max(0.0, (sum2 - k * pt.mean_dimension * pt.mean_dimension) / (k - 1.0));
                pt.std_error = std::sqrt(var / k);
            }
        }
        out.push_back(pt);
    }
    return out;
}

ThresholdResult dimension_threshold(std::span<const double> sizes, const std::vector<std::vector<double>>& eps_grids,
                                    const std::vector<std::vector<double>>& dimensions, double d_target) {
    if (eps_grids.size() != dimensions.size()) {
        throw std::invalid_argument("dimension_threshold: grid / value count mismatch");
    }
    std::vector<std::vector<double>> xs(eps_grids.size()), ys(eps_grids.size());
    for (std::size_t i = 0; i < eps_grids.size(); ++i) {
        for (std::size_t k = 0; k < eps_grids[i].size(); ++k) {
            if (std::isfinite(dimensions[i][k])) {
                xs[i].push_back(eps_grids[i][k]);
                ys[i].push_back(dimensions[i][k]);
            }
        }
    }
    ThresholdResult r = threshold_power_law(sizes, xs, ys, d_target);
    r.fit.model = "dimension_threshold_power_law";
    return r;
}

}  // namespace spinchain
