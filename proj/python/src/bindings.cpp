#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ptomit/analysis.hpp"
#include "ptomit/errors.hpp"
#include "ptomit/linear_response.hpp"
#include "ptomit/oracle.hpp"
#include "ptomit/params.hpp"
#include "ptomit/stability.hpp"
#include "ptomit/steady_state.hpp"
#include "ptomit/version.hpp"

namespace py = pybind11;
using namespace ptomit;

namespace
{

std::vector<double> as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a)
{
    if (a.ndim() != 1)
    {
        throw ConfigError("expected a one-dimensional array");
    }
    return {a.data(), a.data() + a.size()};
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v)
{
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict band_dict(const BandMetrics& b)
{
    py::dict d;
    d["band"] = to_string(b.band);
    d["status"] = to_string(b.status);
    d["peak_omega"] = b.peak_omega;
    d["peak_value"] = b.peak_value;
    d["hwhm"] = b.hwhm;
    d["product"] = b.product;
    d["asymmetric_truncation"] = b.asymmetric_truncation;
    d["note"] = b.note;
    return d;
}

py::list sweep_rows(const SweepTable& t)
{
    py::list rows;
    for (const auto& r : t.rows)
    {
        py::dict d;
        d["phi2"] = r.axis_value;
        py::list bands;
        for (const auto& b : r.bands)
        {
            bands.append(band_dict(b));
        }
        d["bands"] = bands;
        d["total"] = r.total;
        rows.append(d);
    }
    return rows;
}

BandMode parse_mode(const std::string& s)
{
    if (s == "auto")
    {
        return BandMode::automatic;
    }
    if (s == "split")
    {
        return BandMode::split;
    }
    if (s == "single")
    {
        return BandMode::single;
    }
    throw ConfigError("band mode must be auto, split or single");
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Closed-contour three-mode optomechanics: steady state, probe response, stability.";
    m.attr("__version__") = kVersion;
    m.attr("HBAR") = kHbar;

    auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    auto physics_error = py::register_exception<PhysicsError>(m, "PhysicsError", PyExc_RuntimeError);
    py::register_exception<UnstableError>(m, "UnstableError", physics_error.ptr());
    py::register_exception<SingularityError>(m, "SingularityError", physics_error.ptr());
    py::register_exception<BracketError>(m, "BracketError", physics_error.ptr());
    py::register_exception<InconclusiveError>(m, "InconclusiveError", physics_error.ptr());
    (void)config_error;

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("omega_m", &SystemParams::omega_m)
        .def_readwrite("kappa", &SystemParams::kappa)
        .def_readwrite("gamma1", &SystemParams::gamma1)
        .def_readwrite("gamma2", &SystemParams::gamma2)
        .def_readwrite("g1_mag", &SystemParams::g1_mag)
        .def_readwrite("g1_phase", &SystemParams::g1_phase)
        .def_readwrite("g2_mag", &SystemParams::g2_mag)
        .def_readwrite("g2_phase", &SystemParams::g2_phase)
        .def_readwrite("mu_mag", &SystemParams::mu_mag)
        .def_readwrite("mu_phase", &SystemParams::mu_phase)
        .def_readwrite("delta", &SystemParams::delta)
        .def_readwrite("eta", &SystemParams::eta)
        .def_readwrite("pump_power", &SystemParams::pump_power)
        .def_readwrite("probe_power", &SystemParams::probe_power)
        .def_readwrite("pump_wavelength", &SystemParams::pump_wavelength)
        .def_property_readonly("gamma_span", &SystemParams::gamma_span)
        .def_property_readonly("loop_phase", &SystemParams::loop_phase)
        .def("copy", [](const SystemParams& p) { return p; })
        .def("__eq__", [](const SystemParams& a, const SystemParams& b) { return a == b; })
        .def("__repr__", [](const SystemParams& p) { return "SystemParams(" + serialize(p).dump() + ")"; });

    m.def("default_params", &default_params);
    m.def("validate", &validate);
    m.def("params_from_json", &from_config_text, py::arg("text"));
    m.def("params_to_json", [](const SystemParams& p) { return serialize(p).dump(); });
    m.def("params_to_normalized_json", [](const SystemParams& p) { return serialize_normalized(p).dump(); });
    m.def("fingerprint", &fingerprint);
    m.def("drive_amplitude", &drive_amplitude, py::arg("power"), py::arg("wavelength"));

    py::class_<SteadyState>(m, "SteadyState")
        .def_readonly("a_bar", &SteadyState::a_bar)
        .def_readonly("b1_bar", &SteadyState::b1_bar)
        .def_readonly("b2_bar", &SteadyState::b2_bar)
        .def_readonly("n_cav", &SteadyState::n_cav);

    m.def("solve_steady_state", [](const SystemParams& p) {
        const auto sol = solve_steady_state(p);
        py::dict diag;
        diag["cubic_roots"] = sol.diagnostics.cubic_roots;
        diag["selected_index"] = sol.diagnostics.selected_index;
        diag["multistable"] = sol.diagnostics.multistable;
        return py::make_tuple(sol.state, diag);
    });
    m.def("effective_shift_coefficient", &effective_shift_coefficient);

    m.def(
        "transmission",
        [](const SystemParams& p, double omega) {
            return transmission(p, solve_steady_state(p).state, omega).t_p;
        },
        py::arg("params"), py::arg("omega"));

    m.def(
        "spectrum",
        [](const SystemParams& p, const py::array_t<double, py::array::c_style | py::array::forcecast>& omegas,
           double delay_step, unsigned threads) {
            const auto grid = as_vector(omegas);
            Spectrum s;
            {
                py::gil_scoped_release release;
                s = spectrum(p, grid, {.delay_step = delay_step, .threads = threads});
            }
            std::vector<cplx> t(s.responses.size());
            std::vector<double> psi(t.size()), tau(t.size());
            for (std::size_t i = 0; i < t.size(); ++i)
            {
                t[i] = s.responses[i].t_p;
                psi[i] = s.responses[i].psi;
                tau[i] = s.responses[i].tau_g;
            }
            py::dict d;
            d["omega"] = to_array(s.omegas);
            d["t_p"] = to_array(t);
            d["psi"] = to_array(psi);
            d["tau_g"] = to_array(tau);
            d["n_cav"] = s.state.n_cav;
            return d;
        },
        py::arg("params"), py::arg("omegas"), py::arg("delay_step") = 0.0, py::arg("threads") = 1u);

    m.def("stability", [](const SystemParams& p) {
        const auto r = stability_at(p);
        return py::make_tuple(r.stable, r.margin, std::vector<cplx>(r.eigenvalues.begin(), r.eigenvalues.end()));
    });
    m.def("mechanical_pair", [](const SystemParams& p) {
        const auto pr = mechanical_pair(p);
        return py::make_tuple(pr[0], pr[1]);
    });
    m.def(
        "locate_ep",
        [](const SystemParams& p, double lo, double hi) {
            const auto r = locate_ep(p, lo, hi);
            py::dict d;
            d["mu_ep"] = r.mu_ep;
            d["gap_at_ep"] = r.gap_at_ep;
            d["coalesced"] = r.coalesced;
            return d;
        },
        py::arg("params"), py::arg("mu_lo"), py::arg("mu_hi"));
    m.def(
        "stability_map",
        [](const SystemParams& p, const py::array_t<double>& g2, const py::array_t<double>& phi2, double mu_mag,
           unsigned threads) {
            const auto gg = as_vector(g2);
            const auto pp = as_vector(phi2);
            StabilityMap sm;
            {
                py::gil_scoped_release release;
                sm = stability_map(p, gg, pp, mu_mag, threads);
            }
            py::array_t<double> margins({gg.size(), pp.size()});
            std::copy(sm.margins.begin(), sm.margins.end(), margins.mutable_data());
            py::array_t<bool> stable({gg.size(), pp.size()});
            for (std::size_t i = 0; i < sm.cells.size(); ++i)
            {
                stable.mutable_data()[i] = sm.cells[i] == CellStatus::stable;
            }
            return py::make_tuple(stable, margins);
        },
        py::arg("params"), py::arg("g2_mags"), py::arg("phi2s"), py::arg("mu_mag"), py::arg("threads") = 1u);

    auto sweep = [](bool delay) {
        return [delay](const SystemParams& p, const py::array_t<double>& phi2, const std::string& mode, unsigned threads) {
            const auto grid = as_vector(phi2);
            SweepTable t;
            {
                py::gil_scoped_release release;
                const SweepOptions opt{.omega_grid = {}, .mode = parse_mode(mode), .threads = threads};
                t = delay ? delay_bandwidth_sweep(p, grid, opt) : gain_bandwidth_sweep(p, grid, opt);
            }
            return sweep_rows(t);
        };
    };
    m.def("gain_bandwidth_sweep", sweep(false), py::arg("params"), py::arg("phi2s"), py::arg("mode") = "auto",
          py::arg("threads") = 1u);
    m.def("delay_bandwidth_sweep", sweep(true), py::arg("params"), py::arg("phi2s"), py::arg("mode") = "auto",
          py::arg("threads") = 1u);

    m.def(
        "oracle_compare",
        [](const SystemParams& p, const py::array_t<double>& omegas, double rel_tol, unsigned threads) {
            const auto grid = as_vector(omegas);
            OracleComparison c;
            {
                py::gil_scoped_release release;
                OracleOptions opt;
                opt.rel_tol = rel_tol;
                c = oracle_compare(p, grid, opt, threads);
            }
            std::vector<cplx> formula, measured;
            for (const auto& pt : c.points)
            {
                formula.push_back(pt.formula);
                measured.push_back(pt.measured);
            }
            py::dict d;
            d["formula"] = to_array(formula);
            d["measured"] = to_array(measured);
            d["max_rel_error"] = c.max_rel_error;
            return d;
        },
        py::arg("params"), py::arg("omegas"), py::arg("rel_tol") = OracleOptions{}.rel_tol, py::arg("threads") = 1u);
}
