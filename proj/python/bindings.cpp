#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spinchain/chain_model.hpp"
#include "spinchain/experiments.hpp"
#include "spinchain/fit.hpp"
#include "spinchain/fractal.hpp"
#include "spinchain/io.hpp"
#include "spinchain/parallel.hpp"
#include "spinchain/perturbation.hpp"
#include "spinchain/propagator.hpp"
#include "spinchain/spectral_stats.hpp"

namespace py = pybind11;
using namespace spinchain;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict fit_dict(const FitResult& f) {
    py::dict d;
    d["model"] = f.model;
    d["ok"] = f.ok;
    d["note"] = f.note;
    py::dict params, errors;
    for (std::size_t i = 0; i < f.names.size(); ++i) {
        params[py::str(f.names[i])] = f.params[i];
        errors[py::str(f.names[i])] = i < f.std_errors.size() ? f.std_errors[i] : 0.0;
    }
    d["params"] = params;
    d["std_errors"] = errors;
    d["r_squared"] = f.r_squared;
    d["mask"] = f.mask;
    d["window"] = py::make_tuple(f.window_lo, f.window_hi);
    return d;
}

ChainSpec make_spec(int n, double j, double eps_j, double eps_b, double corr_p) {
    ChainSpec s;
    s.n_sites = n;
    s.base_coupling = j;
    s.eps_j = eps_j;
    s.eps_b = eps_b;
    s.corr_p = corr_p;
    s.validate();
    return s;
}

}  // namespace

PYBIND11_MODULE(_spinchain, m) {
    m.doc() = "Quantum state transfer through disordered modulated XY spin chains";
    m.attr("__version__") = version_string();

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const CoarseQuadratureError& e) {
            PyErr_SetString(PyExc_ArithmeticError, e.what());
        }
    });

    py::class_<ChainSpec>(m, "ChainSpec")
        .def(py::init(&make_spec), py::arg("n_sites"), py::arg("j") = 1.0, py::arg("eps_j") = 0.0,
             py::arg("eps_b") = 0.0, py::arg("corr_p") = 0.5)
        .def_readwrite("n_sites", &ChainSpec::n_sites)
        .def_readwrite("j", &ChainSpec::base_coupling)
        .def_readwrite("eps_j", &ChainSpec::eps_j)
        .def_readwrite("eps_b", &ChainSpec::eps_b)
        .def_readwrite("corr_p", &ChainSpec::corr_p)
        .def("validate", &ChainSpec::validate)
        .def("__repr__", [](const ChainSpec& s) {
            return "ChainSpec(n_sites=" + std::to_string(s.n_sites) + ", j=" + format_double(s.base_coupling) +
                   ", eps_j=" + format_double(s.eps_j) + ", eps_b=" + format_double(s.eps_b) +
                   ", corr_p=" + format_double(s.corr_p) + ")";
        });

    m.def("transfer_time", &transfer_time, py::arg("spec"), py::arg("n") = 0);

    m.def(
        "sample_disorder",
        [](const ChainSpec& s, std::uint64_t seed, std::uint64_t r) {
            const auto d = sample_disorder(s, seed, r);
            return py::make_tuple(to_array(d.delta), to_array(d.field_err));
        },
        py::arg("spec"), py::arg("seed"), py::arg("realization") = 0,
        "(delta, field) arrays of one disorder realization");

    m.def(
        "hamiltonian",
        [](const ChainSpec& s, std::optional<std::uint64_t> seed, std::uint64_t r) {
            const auto real = seed ? sample_disorder(s, *seed, r) : zero_disorder(s);
            const auto h = build_hamiltonian(s, real);
            return py::make_tuple(to_array(h.diag), to_array(h.offdiag));
        },
        py::arg("spec"), py::arg("seed") = py::none(), py::arg("realization") = 0,
        "(diagonal, off-diagonal) of the single-excitation Hamiltonian");

    m.def(
        "eigenvalues",
        [](const std::vector<double>& d, const std::vector<double>& e) { return to_array(tridiagonal_eigenvalues(d, e)); },
        py::arg("diag"), py::arg("offdiag"));

    m.def(
        "fidelity_series",
        [](const ChainSpec& s, double t_max, double dt, std::optional<std::uint64_t> seed, std::uint64_t r) {
            const auto real = seed ? sample_disorder(s, *seed, r) : zero_disorder(s);
            const auto fs = fidelity_series(s, real, t_max, dt);
            return py::make_tuple(to_array(fs.times), to_array(fs.amplitude), to_array(fs.fidelity));
        },
        py::arg("spec"), py::arg("t_max"), py::arg("dt"), py::arg("seed") = py::none(), py::arg("realization") = 0,
        "(t, f_N(t), F(t)) for one realization (clean chain without a seed)");

    m.def(
        "ensemble_fidelity",
        [](const ChainSpec& s, const std::vector<double>& times, std::size_t n_real, std::uint64_t seed) {
            const auto e = ensemble_average(s, n_real, seed, times);
            return py::make_tuple(to_array(e.mean), to_array(e.std_error));
        },
        py::arg("spec"), py::arg("times"), py::arg("n_real"), py::arg("seed"),
        "(mean, standard error) of F(t) over realizations");

    m.def(
        "scan_fidelity",
        [](const std::vector<int>& sizes, const std::vector<double>& eps_j, const std::vector<double>& eps_b,
           std::size_t n_real, std::uint64_t seed, double j, double corr_p, bool axes) {
            ScanConfig c;
            c.sizes = sizes;
            c.eps_j_grid = eps_j;
            c.eps_b_grid = eps_b;
            c.n_real = n_real;
            c.seed = seed;
            c.base_coupling = j;
            c.corr_p = {corr_p};
            c.mode = axes ? ScanMode::Axes : ScanMode::Grid;
            py::list out;
            for (const auto& r : scan_fidelity(c)) {
                out.append(py::dict(py::arg("n") = r.n_sites, py::arg("eps_j") = r.eps_j, py::arg("eps_b") = r.eps_b,
                                    py::arg("t") = r.time, py::arg("mean_fidelity") = r.mean_fidelity,
                                    py::arg("std_error") = r.std_error));
            }
            return out;
        },
        py::arg("sizes"), py::arg("eps_j"), py::arg("eps_b") = std::vector<double>{0.0}, py::arg("n_real") = 1000,
        py::arg("seed"), py::arg("j") = 1.0, py::arg("corr_p") = 0.5, py::arg("axes") = false);

    m.def(
        "fit_scaling",
        [](const py::list& rows, double min_signal) {
            std::vector<ScanRow> v;
            for (const auto& item : rows) {
                const auto d = item.cast<py::dict>();
                ScanRow r;
                r.n_sites = d["n"].cast<int>();
                r.eps_j = d["eps_j"].cast<double>();
                r.eps_b = d["eps_b"].cast<double>();
                r.mean_fidelity = d["mean_fidelity"].cast<double>();
                v.push_back(r);
            }
            ScalingFitOptions opt;
            opt.min_signal = min_signal;
            return fit_dict(fit_scaling(v, opt));
        },
        py::arg("rows"), py::arg("min_signal") = 0.4);

    m.def(
        "spacings",
        [](const ChainSpec& s, std::size_t n_real, std::uint64_t seed) {
            return to_array(collect_spacings(s, n_real, seed).spacings);
        },
        py::arg("spec"), py::arg("n_real"), py::arg("seed"));

    m.def(
        "eta", [](const std::vector<double>& s, double w) { return eta(s, w); }, py::arg("spacings"),
        py::arg("width") = 0.05);

    m.def(
        "box_count",
        [](const std::vector<double>& values, double dt, std::optional<std::vector<double>> lengths) {
            const auto l = lengths ? *lengths : default_window_lengths(dt, dt * static_cast<double>(values.size() - 1));
            const auto c = box_count(values, dt, l);
            return py::make_tuple(to_array(c.lengths), to_array(c.counts));
        },
        py::arg("values"), py::arg("dt"), py::arg("lengths") = py::none(), "(L, M(L))");

    m.def(
        "fractal_dimension",
        [](const std::vector<double>& values, double dt, std::optional<std::pair<double, double>> window) {
            const auto c = box_count(values, dt, default_window_lengths(dt, dt * static_cast<double>(values.size() - 1)));
            return fit_dict(fit_dimension(c, window));
        },
        py::arg("values"), py::arg("dt"), py::arg("window") = py::none());

    m.def(
        "perturbation_coefficients",
        [](const ChainSpec& s, double t) {
            const auto pc = compute_coefficients_converged(make_propagator_table(s), t);
            py::dict d;
            d["c"] = to_array(pc.c);
            d["d"] = to_array(pc.d_diag);
            d["e"] = to_array(pc.e);
            d["f"] = to_array(pc.f_diag);
            d["field_sum"] = pc.field_sum();
            d["coupling_sum"] = pc.coupling_sum();
            d["richardson_change"] = pc.richardson_change;
            return d;
        },
        py::arg("spec"), py::arg("t"));

    m.def(
        "compare_perturbation",
        [](int n, const std::vector<double>& eps, std::size_t n_real, std::uint64_t seed, double j) {
            const auto cmp = compare_perturbation(n, j, eps, n_real, seed);
            py::list rows;
            for (const auto& r : cmp.rows) {
                rows.append(py::dict(py::arg("kind") = r.kind, py::arg("eps_j") = r.eps_j, py::arg("eps_b") = r.eps_b,
                                     py::arg("mc_fidelity") = r.mc_fidelity, py::arg("mc_std_error") = r.mc_std_error,
                                     py::arg("formula_fidelity") = r.formula_fidelity));
            }
            py::dict d;
            d["rows"] = rows;
            d["coupling_slope"] = fit_dict(cmp.coupling_slope);
            d["field_slope"] = fit_dict(cmp.field_slope);
            d["additivity_excess"] = cmp.additivity_excess;
            d["additivity_sigma"] = cmp.additivity_sigma;
            return d;
        },
        py::arg("n_sites"), py::arg("eps"), py::arg("n_real"), py::arg("seed"), py::arg("j") = 1.0);

    m.def("set_threads", &set_worker_count, py::arg("n"), "worker threads; 0 restores the default");
}
