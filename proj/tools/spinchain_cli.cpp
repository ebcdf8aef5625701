// spinchain: command-line driver for the transfer, disorder-scan, spectral,
// fractal and perturbation experiments. Every command writes a CSV table
// (header row, %.17g numbers) and, when --out is given, a JSON sidecar with
// the full configuration next to it.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spinchain/chain_model.hpp"
#include "spinchain/experiments.hpp"
#include "spinchain/fit.hpp"
#include "spinchain/fractal.hpp"
#include "spinchain/io.hpp"
#include "spinchain/parallel.hpp"
#include "spinchain/propagator.hpp"
#include "spinchain/spectral_stats.hpp"

using namespace spinchain;
using nlohmann::json;

namespace {

struct Common {
    std::vector<std::string> n;
    double j = 1.0;
    std::vector<std::string> eps_j;
    std::vector<std::string> eps_b;
    std::vector<std::string> corr_p{"0.5"};
    std::size_t n_real = 0;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_max;
    std::optional<double> dt;
    std::string out;
    std::size_t threads = 0;
};

// "0.1,0.2" or "log:1e-3:1:31" (31 log-spaced points) or "lin:0:1:11".
std::vector<double> parse_grid(const std::vector<std::string>& tokens, const std::string& what) {
    std::vector<double> out;
    for (const std::string& tok : tokens) {
        if (tok.rfind("log:", 0) == 0 || tok.rfind("lin:", 0) == 0) {
            std::vector<std::string> parts;
            std::stringstream ss(tok);
            std::string p;
            while (std::getline(ss, p, ':')) parts.push_back(p);
            if (parts.size() != 4) throw std::invalid_argument(what + ": expected " + parts[0] + ":start:stop:count");
            const double a = std::stod(parts[1]);
            const double b = std::stod(parts[2]);
            const int k = std::stoi(parts[3]);
            if (k < 1) throw std::invalid_argument(what + ": grid count must be >= 1");
            const bool log = parts[0] == "log";
            if (log && !(a > 0.0 && b > 0.0)) throw std::invalid_argument(what + ": log grid needs positive ends");
            for (int i = 0; i < k; ++i) {
                const double f = k == 1 ? 0.0 : static_cast<double>(i) / (k - 1);
                out.push_back(log ? std::exp(std::log(a) + f * (std::log(b) - std::log(a))) : a + f * (b - a));
            }
        } else {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(what + ": cannot parse '" + tok + "'");
            out.push_back(v);
        }
    }
    return out;
}

std::vector<int> parse_sizes(const std::vector<std::string>& tokens) {
    std::vector<int> out;
    for (double v : parse_grid(tokens, "--n")) {
        if (v != std::floor(v) || v < 2) throw std::invalid_argument("--n: chain lengths must be integers >= 2");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

int single_size(const Common& c, int fallback) {
    if (c.n.empty()) return fallback;
    const auto s = parse_sizes(c.n);
    if (s.size() != 1) throw std::invalid_argument("--n: this command takes a single chain length");
    return s.front();
}

double single_value(const std::vector<std::string>& tokens, const std::string& what, double fallback) {
    if (tokens.empty()) return fallback;
    const auto v = parse_grid(tokens, what);
    if (v.size() != 1) throw std::invalid_argument(what + ": this command takes a single value");
    return v.front();
}

std::uint64_t require_seed(const Common& c) {
    if (!c.seed) throw std::invalid_argument("--seed is required");
    return *c.seed;
}

json common_json(const Common& c) {
    json j;
    j["n"] = c.n;
    j["j"] = c.j;
    j["eps_j"] = c.eps_j;
    j["eps_b"] = c.eps_b;
    j["corr_p"] = c.corr_p;
    j["n_real"] = c.n_real;
    if (c.seed) j["seed"] = *c.seed;
    if (c.t_max) j["t_max"] = *c.t_max;
    if (c.dt) j["dt"] = *c.dt;
    return j;
}

json fit_json(const FitResult& f) {
    json j;
    j["model"] = f.model;
    j["ok"] = f.ok;
    j["note"] = f.note;
    for (std::size_t i = 0; i < f.names.size(); ++i) {
        const double v = f.params[i];
        const double e = f.std_errors.size() > i ? f.std_errors[i] : 0.0;
        j["params"][f.names[i]] = std::isfinite(v) ? json(v) : json(nullptr);
        j["std_errors"][f.names[i]] = std::isfinite(e) ? json(e) : json(nullptr);
    }
    j["r_squared"] = f.r_squared;
    j["residual_norm"] = f.residual_norm;
    j["rows_used"] = f.used();
    std::vector<int> mask;
    for (bool b : f.mask) mask.push_back(b ? 1 : 0);
    j["mask"] = mask;
    return j;
}

json threshold_json(const ThresholdResult& t) {
    json j;
    j["target"] = t.target;
    j["sizes"] = t.sizes;
    std::vector<json> c;
    for (const auto& x : t.crossings) c.push_back(x ? json(*x) : json(nullptr));
    j["crossings"] = c;
    j["fit"] = fit_json(t.fit);
    return j;
}

// Writes the table (to stdout without --out) and the sidecar.
void emit(const Common& c, const std::string& command, const CsvTable& table, const json& config,
          const json& summary) {
    if (c.out.empty()) {
        std::cout << table.str();
        if (!summary.is_null()) std::cerr << summary.dump(2) << "\n";
        return;
    }
    write_csv(c.out, table);
    json meta = run_metadata(command, config);
    meta["columns"] = table.columns();
    meta["rows"] = table.rows();
    if (!summary.is_null()) meta["summary"] = summary;
    write_json(sidecar_path(c.out), meta);
}

ChainSpec spec_from(const Common& c, int n) {
    ChainSpec s;
    s.n_sites = n;
    s.base_coupling = c.j;
    s.eps_j = single_value(c.eps_j, "--eps-j", 0.0);
    s.eps_b = single_value(c.eps_b, "--eps-b", 0.0);
    s.corr_p = single_value(c.corr_p, "--corr-p", 0.5);
    s.validate();
    return s;
}

ScanConfig scan_config(const Common& c, std::size_t default_real) {
    ScanConfig cfg;
    if (!c.n.empty()) cfg.sizes = parse_sizes(c.n);
    if (!c.eps_j.empty()) cfg.eps_j_grid = parse_grid(c.eps_j, "--eps-j");
    if (!c.eps_b.empty()) cfg.eps_b_grid = parse_grid(c.eps_b, "--eps-b");
    cfg.corr_p = parse_grid(c.corr_p, "--corr-p");
    cfg.base_coupling = c.j;
    cfg.n_real = c.n_real ? c.n_real : default_real;
    cfg.seed = require_seed(c);
    return cfg;
}

CsvTable scan_table(const std::vector<ScanRow>& rows) {
    CsvTable t({"n", "corr_p", "eps_j", "eps_b", "t", "mean_fidelity", "std_error", "n_real"});
    for (const auto& r : rows) {
        t.add_row({static_cast<long long>(r.n_sites), r.corr_p, r.eps_j, r.eps_b, r.time, r.mean_fidelity,
                   r.std_error, static_cast<long long>(r.n_real)});
    }
    return t;
}

// Reads a table written by `scan` / `corr-scan`.
std::vector<ScanRow> read_scan_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    std::map<std::string, std::size_t> col;
    {
        std::stringstream ss(line);
        std::string name;
        for (std::size_t i = 0; std::getline(ss, name, ','); ++i) col[name] = i;
    }
    for (const char* need : {"n", "eps_j", "eps_b", "mean_fidelity"}) {
        if (!col.count(need)) throw std::runtime_error(path + ": missing column '" + need + "'");
    }
    std::vector<ScanRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        auto get = [&](const std::string& name, double fallback) {
            auto it = col.find(name);
            if (it == col.end()) return fallback;
            if (it->second >= cells.size()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": short row");
            return std::stod(cells[it->second]);
        };
        ScanRow r;
        r.n_sites = static_cast<int>(get("n", 0));
        r.corr_p = get("corr_p", 0.5);
        r.eps_j = get("eps_j", 0);
        r.eps_b = get("eps_b", 0);
        r.time = get("t", 0);
        r.mean_fidelity = get("mean_fidelity", 0);
        r.std_error = get("std_error", 0);
        r.n_real = static_cast<std::size_t>(get("n_real", 0));
        rows.push_back(r);
    }
    return rows;
}

// Scan rows for fit-scaling / threshold: from --in or computed on the spot
// along both disorder axes.
std::vector<ScanRow> scan_rows_for_fit(const Common& c, const std::string& in) {
    if (!in.empty()) return read_scan_csv(in);
    ScanConfig cfg = scan_config(c, 1000);
    if (c.n.empty()) cfg.sizes = {10, 20, 50, 100, 200};
    if (c.eps_j.empty()) cfg.eps_j_grid = parse_grid({"log:1e-3:1:31"}, "--eps-j");
    if (c.eps_b.empty()) cfg.eps_b_grid = parse_grid({"log:1e-2:10:31"}, "--eps-b");
    cfg.mode = ScanMode::Axes;
    return scan_fidelity(cfg);
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--n", c.n, "chain length(s); comma list or log:/lin: grid")->delimiter(',');
    sub->add_option("--j", c.j, "base coupling J")->capture_default_str();
    sub->add_option("--eps-j", c.eps_j, "coupling disorder amplitude(s)")->delimiter(',');
    sub->add_option("--eps-b", c.eps_b, "field disorder amplitude(s), units of J")->delimiter(',');
    sub->add_option("--corr-p", c.corr_p, "sign-correlation probability(ies)")->delimiter(',');
    sub->add_option("--n-real", c.n_real, "disorder realizations");
    sub->add_option("--seed", c.seed, "master seed (required for sampling commands)");
    sub->add_option("--t-max", c.t_max, "end of the time window");
    sub->add_option("--dt", c.dt, "time step");
    sub->add_option("--out", c.out, "output CSV path (JSON sidecar written alongside)");
    sub->add_option("--threads", c.threads, "worker threads (default: hardware / SPINCHAIN_THREADS)");
}

// Config files hold key = value lines using long option names without the
// dashes. Keys already given on the command line are skipped so flags win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty()) return rest;
    auto given = [&](const std::string& key) {
        for (const auto& a : rest) {
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
        }
        return false;
    };
    std::vector<std::string> injected;
    for (const auto& [key, value] : read_key_value_file(path)) {
        if (given(key)) continue;
        injected.push_back("--" + key);
        injected.push_back(value);
    }
    // After the subcommand name (first non-option argument).
    std::size_t at = 0;
    while (at < rest.size() && rest[at].rfind("-", 0) == 0) ++at;
    if (at < rest.size()) ++at;
    rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(), injected.end());
    return rest;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum state transfer through disordered modulated spin chains", "spinchain"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());
    std::string config_path;  // consumed by merge_config, listed here for --help
    app.add_option("--config", config_path, "key = value file; command-line flags take precedence");

    Common c;

    // transfer -------------------------------------------------------------
    auto* transfer = app.add_subcommand("transfer", "F(t) for one disorder realization");
    add_common(transfer, c);
    std::uint64_t realization = 0;
    transfer->add_option("--realization", realization, "realization index")->capture_default_str();
    transfer->callback([&] {
        const ChainSpec spec = spec_from(c, single_size(c, 10));
        const double dt = c.dt.value_or(0.01);
        const double t_max = c.t_max.value_or(10.0 * transfer_time(spec));
        const DisorderRealization real =
            spec.is_clean() ? zero_disorder(spec) : sample_disorder(spec, require_seed(c), realization);
        const auto series = fidelity_series(spec, real, t_max, dt);
        CsvTable t({"t", "re_f", "im_f", "abs_f", "fidelity"});
        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto a = series.amplitude[i];
            t.add_row({series.times[i], a.real(), a.imag(), std::abs(a), series.fidelity[i]});
        }
        const auto es = endpoint_spectrum(build_hamiltonian(spec, real));
        json summary;
        summary["t1"] = transfer_time(spec);
        summary["fidelity_t1"] = fidelity_of_amplitude(transfer_amplitude(es, transfer_time(spec)));
        json cfg = common_json(c);
        cfg["realization"] = realization;
        cfg["t_max"] = t_max;
        cfg["dt"] = dt;
        emit(c, "transfer", t, cfg, summary);
    });

    // scan ------------------------------------------------------------------
    auto* scan = app.add_subcommand("scan", "disorder-averaged F(t_n) over N x eps grids");
    add_common(scan, c);
    std::string scan_mode = "grid";
    int transfer_index = 0;
    scan->add_option("--mode", scan_mode, "grid (eps_j x eps_b) or axes (each axis alone)")
        ->check(CLI::IsMember({"grid", "axes"}))
        ->capture_default_str();
    scan->add_option("--transfer-index", transfer_index, "evaluate at t_n")->capture_default_str();
    scan->callback([&] {
        ScanConfig cfg = scan_config(c, 1000);
        cfg.mode = scan_mode == "axes" ? ScanMode::Axes : ScanMode::Grid;
        cfg.transfer_index = transfer_index;
        json j = common_json(c);
        j["mode"] = scan_mode;
        j["transfer_index"] = transfer_index;
        j["sizes"] = cfg.sizes;
        j["n_real"] = cfg.n_real;
        emit(c, "scan", scan_table(scan_fidelity(cfg)), j, nullptr);
    });

    // corr-scan -------------------------------------------------------------
    auto* corr = app.add_subcommand("corr-scan", "F(t_1) vs eps_j for several sign correlations");
    add_common(corr, c);
    corr->callback([&] {
        ScanConfig cfg = scan_config(c, 1000);
        if (c.corr_p.size() == 1 && c.corr_p.front() == "0.5") cfg.corr_p = {0.1, 0.25, 0.5, 0.75, 0.9};
        if (c.n.empty()) cfg.sizes = {100};
        json j = common_json(c);
        j["corr_p"] = cfg.corr_p;
        j["sizes"] = cfg.sizes;
        j["n_real"] = cfg.n_real;
        emit(c, "corr-scan", scan_table(run_correlated_scan(cfg)), j, nullptr);
    });

    // fit-scaling ------------------------------------------------------------
    auto* fit = app.add_subcommand("fit-scaling", "fit the kappa_J, kappa_B scaling law");
    add_common(fit, c);
    std::string fit_in;
    ScalingFitOptions fit_opt;
    fit->add_option("--in", fit_in, "scan CSV to fit (otherwise a scan is run)");
    fit->add_option("--min-signal", fit_opt.min_signal, "rows enter only if 2F - 1 exceeds this")->capture_default_str();
    fit->callback([&] {
        const auto rows = scan_rows_for_fit(c, fit_in);
        const FitResult r = fit_scaling(rows, fit_opt);
        CsvTable t({"n", "eps_j", "eps_b", "mean_fidelity", "log_signal", "used"});
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double s = 2.0 * rows[i].mean_fidelity - 1.0;
            t.add_row({static_cast<long long>(rows[i].n_sites), rows[i].eps_j, rows[i].eps_b, rows[i].mean_fidelity,
                       s > 0.0 ? std::log(s) : std::numeric_limits<double>::quiet_NaN(),
                       static_cast<long long>(r.mask[i] ? 1 : 0)});
        }
        json j = common_json(c);
        j["in"] = fit_in;
        j["min_signal"] = fit_opt.min_signal;
        emit(c, "fit-scaling", t, j, fit_json(r));
    });

    // threshold -------------------------------------------------------------
    auto* thr = app.add_subcommand("threshold", "critical disorder eps_c(N) and its power law");
    add_common(thr, c);
    std::string thr_in, thr_axis = "j";
    std::vector<double> thr_targets;
    thr->add_option("--in", thr_in, "scan CSV (otherwise a scan is run)");
    thr->add_option("--axis", thr_axis, "j (coupling) or b (field)")->check(CLI::IsMember({"j", "b"}))->capture_default_str();
    thr->add_option("--targets", thr_targets, "fidelity targets (default 0.9,0.7 for j; 0.9,0.95 for b)")->delimiter(',');
    thr->callback([&] {
        const auto rows = scan_rows_for_fit(c, thr_in);
        const DisorderAxis axis = thr_axis == "b" ? DisorderAxis::Field : DisorderAxis::Coupling;
        std::vector<double> targets = thr_targets;
        if (targets.empty()) targets = axis == DisorderAxis::Field ? std::vector{0.9, 0.95} : std::vector{0.9, 0.7};
        CsvTable t({"axis", "target", "n", "eps_c"});
        json summary = json::array();
        for (double f : targets) {
            const ThresholdResult r = threshold_extract(rows, f, axis);
            for (std::size_t i = 0; i < r.sizes.size(); ++i) {
                t.add_row({thr_axis, f, static_cast<long long>(r.sizes[i]),
                           r.crossings[i] ? *r.crossings[i] : std::numeric_limits<double>::quiet_NaN()});
            }
            summary.push_back(threshold_json(r));
        }
        json j = common_json(c);
        j["in"] = thr_in;
        j["axis"] = thr_axis;
        j["targets"] = targets;
        emit(c, "threshold", t, j, summary);
    });

    // spectrum --------------------------------------------------------------
    auto* spec_cmd = app.add_subcommand("spectrum", "level-spacing histogram and eta");
    add_common(spec_cmd, c);
    double width = 0.05;
    std::string spacings_out;
    spec_cmd->add_option("--bin-width", width, "histogram bin width")->capture_default_str();
    spec_cmd->add_option("--spacings-out", spacings_out, "also write the raw normalized spacings here");
    spec_cmd->callback([&] {
        const ChainSpec spec = spec_from(c, single_size(c, 100));
        const std::size_t n_real = c.n_real ? c.n_real : 1000;
        const SpacingSample sample = collect_spacings(spec, n_real, require_seed(c));
        const SpacingHistogram h = spacing_histogram(sample.spacings, width);
        CsvTable t({"lower", "upper", "center", "density", "poisson"});
        for (std::size_t k = 0; k < h.density.size(); ++k) {
            const double poisson = (std::exp(-h.lower[k]) - std::exp(-h.upper[k])) / (h.upper[k] - h.lower[k]);
            t.add_row({h.lower[k], h.upper[k], h.center(k), h.density[k], poisson});
        }
        if (!spacings_out.empty()) {
            CsvTable s({"realization", "index", "spacing"});
            const std::size_t per = static_cast<std::size_t>(spec.n_sites) - 1;
            for (std::size_t i = 0; i < sample.spacings.size(); ++i) {
                s.add_row({static_cast<long long>(i / per), static_cast<long long>(i % per), sample.spacings[i]});
            }
            write_csv(spacings_out, s);
        }
        json summary;
        summary["eta"] = eta(sample, width);
        summary["spacings"] = sample.spacings.size();
        json j = common_json(c);
        j["n_real"] = n_real;
        j["bin_width"] = width;
        emit(c, "spectrum", t, j, summary);
    });

    // eta-scan --------------------------------------------------------------
    auto* eta_cmd = app.add_subcommand("eta-scan", "eta vs eps_j for several N, with thresholds");
    add_common(eta_cmd, c);
    std::vector<double> eta_targets{0.5, 0.8};
    eta_cmd->add_option("--bin-width", width, "histogram bin width")->capture_default_str();
    eta_cmd->add_option("--targets", eta_targets, "eta levels for eps_c(N)")->delimiter(',')->capture_default_str();
    eta_cmd->callback([&] {
        const std::vector<int> sizes = c.n.empty() ? std::vector<int>{50, 100, 200, 500} : parse_sizes(c.n);
        const std::vector<double> grid =
            c.eps_j.empty() ? parse_grid({"log:1e-3:1:31"}, "--eps-j") : parse_grid(c.eps_j, "--eps-j");
        const std::size_t n_real = c.n_real ? c.n_real : 1000;
        const std::uint64_t seed = require_seed(c);
        CsvTable t({"n", "eps_j", "eta"});
        std::vector<double> nd;
        std::vector<std::vector<double>> grids, values;
        for (int n : sizes) {
            ChainSpec base;
            base.n_sites = n;
            base.base_coupling = c.j;
            base.eps_b = single_value(c.eps_b, "--eps-b", 0.0);
            base.corr_p = single_value(c.corr_p, "--corr-p", 0.5);
            const auto curve = eta_curve(base, grid, n_real, seed, width);
            for (std::size_t k = 0; k < grid.size(); ++k) t.add_row({static_cast<long long>(n), grid[k], curve[k]});
            nd.push_back(n);
            grids.push_back(grid);
            values.push_back(curve);
        }
        json summary = json::array();
        for (double target : eta_targets) summary.push_back(threshold_json(eta_threshold(nd, grids, values, target)));
        json j = common_json(c);
        j["sizes"] = sizes;
        j["eps_j"] = grid;
        j["n_real"] = n_real;
        j["bin_width"] = width;
        j["targets"] = eta_targets;
        emit(c, "eta-scan", t, j, summary);
    });

    // fractal ---------------------------------------------------------------
    auto* frac = app.add_subcommand("fractal", "box-counting dimension of one F(t) series");
    add_common(frac, c);
    std::optional<double> fit_lo, fit_hi;
    frac->add_option("--realization", realization, "realization index")->capture_default_str();
    frac->add_option("--fit-lo", fit_lo, "manual fit window start (with --fit-hi)");
    frac->add_option("--fit-hi", fit_hi, "manual fit window end");
    frac->callback([&] {
        const ChainSpec spec = spec_from(c, single_size(c, 500));
        const double dt = c.dt.value_or(0.05);
        const double t_max = c.t_max.value_or(1e4 / spec.base_coupling);
        const DisorderRealization real =
            spec.is_clean() ? zero_disorder(spec) : sample_disorder(spec, require_seed(c), realization);
        const auto series = fidelity_series(spec, real, t_max, dt);
        SeriesDimension sd = series_dimension(series);
        if (fit_lo || fit_hi) {
            if (!fit_lo || !fit_hi) throw std::invalid_argument("--fit-lo and --fit-hi go together");
            sd.fit = fit_dimension(sd.curve, std::pair{*fit_lo, *fit_hi});
            apply_fit(sd.curve, sd.fit);
        }
        const auto local = local_dimensions(sd.curve);
        CsvTable t({"length", "count", "windows", "local_dimension", "in_fit"});
        for (std::size_t i = 0; i < sd.curve.size(); ++i) {
            t.add_row({sd.curve.lengths[i], sd.curve.counts[i], static_cast<long long>(sd.curve.windows[i]), local[i],
                       static_cast<long long>(sd.fit.mask.size() > i && sd.fit.mask[i] ? 1 : 0)});
        }
        json summary = fit_json(sd.fit);
        summary["dimension"] = sd.fit.ok ? json(sd.fit.param("dimension")) : json(nullptr);
        summary["window"] = {sd.fit.window_lo, sd.fit.window_hi};
        summary["trimmed_samples"] = sd.trimmed;
        json j = common_json(c);
        j["realization"] = realization;
        j["t_max"] = t_max;
        j["dt"] = dt;
        emit(c, "fractal", t, j, summary);
    });

    // dimension-scan --------------------------------------------------------
    auto* dscan = app.add_subcommand("dimension-scan", "realization-averaged D vs eps_j, with thresholds");
    add_common(dscan, c);
    std::vector<double> d_targets{1.76, 1.6, 1.4};
    dscan->add_option("--targets", d_targets, "D levels for eps_c(N)")->delimiter(',')->capture_default_str();
    dscan->callback([&] {
        const std::vector<int> sizes = c.n.empty() ? std::vector<int>{100, 200, 500} : parse_sizes(c.n);
        const std::vector<double> grid =
            c.eps_j.empty() ? parse_grid({"log:0.05:1:14"}, "--eps-j") : parse_grid(c.eps_j, "--eps-j");
        const std::size_t n_real = c.n_real ? c.n_real : 4;
        const double dt = c.dt.value_or(0.05);
        const double t_max = c.t_max.value_or(1e4 / c.j);
        const std::uint64_t seed = require_seed(c);
        CsvTable t({"n", "eps_j", "dimension", "std_error", "fitted", "attempted"});
        std::vector<double> nd;
        std::vector<std::vector<double>> grids, values;
        for (int n : sizes) {
            ChainSpec base;
            base.n_sites = n;
            base.base_coupling = c.j;
            base.corr_p = single_value(c.corr_p, "--corr-p", 0.5);
            const auto pts = dimension_curve(base, grid, n_real, seed, t_max, dt);
            std::vector<double> d;
            for (const auto& p : pts) {
                t.add_row({static_cast<long long>(n), p.eps_j, p.mean_dimension, p.std_error,
                           static_cast<long long>(p.fitted), static_cast<long long>(p.attempted)});
                d.push_back(p.mean_dimension);
            }
            nd.push_back(n);
            grids.push_back(grid);
            values.push_back(d);
        }
        json summary = json::array();
        for (double target : d_targets) summary.push_back(threshold_json(dimension_threshold(nd, grids, values, target)));
        json j = common_json(c);
        j["sizes"] = sizes;
        j["eps_j"] = grid;
        j["n_real"] = n_real;
        j["t_max"] = t_max;
        j["dt"] = dt;
        j["targets"] = d_targets;
        emit(c, "dimension-scan", t, j, summary);
    });

    // perturbation ----------------------------------------------------------
    auto* pert = app.add_subcommand("perturbation", "Monte-Carlo infidelity against second-order theory");
    add_common(pert, c);
    pert->add_option("--transfer-index", transfer_index, "evaluate at t_n")->capture_default_str();
    pert->callback([&] {
        const int n = single_size(c, 20);
        const std::vector<double> grid =
            c.eps_j.empty() ? std::vector<double>{1e-3, 2e-3, 3e-3, 5e-3, 1e-2} : parse_grid(c.eps_j, "--eps-j");
        const std::size_t n_real = c.n_real ? c.n_real : 10000;
        const auto cmp = compare_perturbation(n, c.j, grid, n_real, require_seed(c), transfer_index);
        CsvTable t({"kind", "eps_j", "eps_b", "mc_fidelity", "mc_std_error", "formula_fidelity", "ratio"});
        for (const auto& r : cmp.rows) {
            t.add_row({r.kind, r.eps_j, r.eps_b, r.mc_fidelity, r.mc_std_error, r.formula_fidelity, r.ratio()});
        }
        json summary;
        summary["time"] = cmp.time;
        summary["field_sum"] = cmp.field_sum;
        summary["coupling_sum"] = cmp.coupling_sum;
        summary["richardson_change"] = cmp.richardson_change;
        summary["coupling_slope"] = fit_json(cmp.coupling_slope);
        summary["field_slope"] = fit_json(cmp.field_slope);
        summary["additivity"] = {{"eps", cmp.additivity_eps},
                                 {"excess", cmp.additivity_excess},
                                 {"sigma", cmp.additivity_sigma}};
        json j = common_json(c);
        j["n"] = n;
        j["eps"] = grid;
        j["n_real"] = n_real;
        j["transfer_index"] = transfer_index;
        emit(c, "perturbation", t, j, summary);
    });

    for (auto* sub : {transfer, scan, corr, fit, thr, spec_cmd, eta_cmd, frac, dscan, pert}) {
        sub->parse_complete_callback([&] { set_worker_count(c.threads); });
    }

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config(args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "spinchain: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
