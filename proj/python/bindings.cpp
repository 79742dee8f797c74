// Python bindings for the main library operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ringtrio/dynamics.hpp"
#include "ringtrio/model.hpp"
#include "ringtrio/orbits.hpp"
#include "ringtrio/poincare.hpp"

namespace py = pybind11;
using namespace ringtrio;

namespace {

const char* class_label(OrbitClass k) {
    switch (k) {
        case OrbitClass::Regular: return "regular";
        case OrbitClass::Chaotic: return "chaotic";
        default: return "indeterminate";
    }
}

py::dict classification_dict(const OrbitClassification& c) {
    py::dict d;
    d["kind"] = class_label(c.kind);
    d["lyapunov"] = c.lambda;
    d["t_char"] = c.t_char;
    d["box_dimension"] = c.box_dimension;
    return d;
}

std::vector<SectionPoint> as_points(
    const std::vector<std::pair<double, double>>& yp) {
    std::vector<SectionPoint> pts;
    pts.reserve(yp.size());
    for (std::size_t i = 0; i < yp.size(); ++i)
        pts.push_back({yp[i].first, yp[i].second, (double)i, 0});
    return pts;
}

}  // namespace

PYBIND11_MODULE(_ringtrio, m) {
    m.doc() = "three repulsive bosons in a circular trap: classical, "
              "semiclassical and quantum toolkit";

    py::class_<PhasePoint>(m, "PhasePoint")
        .def(py::init<>())
        .def(py::init([](double x, double y, double px, double py) {
                 return PhasePoint{x, y, px, py};
             }),
             py::arg("x"), py::arg("y"), py::arg("px"), py::arg("py"))
        .def_readwrite("x", &PhasePoint::x)
        .def_readwrite("y", &PhasePoint::y)
        .def_readwrite("px", &PhasePoint::px)
        .def_readwrite("py", &PhasePoint::py)
        .def("__repr__", [](const PhasePoint& p) {
            return "PhasePoint(x=" + std::to_string(p.x) +
                   ", y=" + std::to_string(p.y) +
                   ", px=" + std::to_string(p.px) +
                   ", py=" + std::to_string(p.py) + ")";
        });

    py::class_<OdeOptions>(m, "OdeOptions")
        .def(py::init<>())
        .def_readwrite("rtol", &OdeOptions::rtol)
        .def_readwrite("atol", &OdeOptions::atol)
        .def_readwrite("h_max", &OdeOptions::h_max)
        .def_readwrite("h_init", &OdeOptions::h_init)
        .def_readwrite("max_steps", &OdeOptions::max_steps);

    m.def("potential", &potential, py::arg("x"), py::arg("y"));
    m.def("grad_potential",
          [](double x, double y) {
              const Vec2 g = grad_potential(x, y);
              return std::make_pair(g.x(), g.y());
          },
          py::arg("x"), py::arg("y"));
    m.def("hessian_potential",
          [](double x, double y) {
              const Mat2 h = hessian_potential(x, y);
              return std::make_tuple(h(0, 0), h(0, 1), h(1, 1));
          },
          py::arg("x"), py::arg("y"));
    m.def("in_domain", &in_domain, py::arg("x"), py::arg("y"));
    m.def("energy", &energy, py::arg("state"));
    m.def("triangle_area", &triangle_area);

    m.def(
        "integrate",
        [](const PhasePoint& z0, double t_final, double dt_sample) {
            const Trajectory tr = integrate(z0, t_final, dt_sample);
            std::vector<std::tuple<double, double, double, double, double>> out;
            out.reserve(tr.samples.size());
            for (const auto& s : tr.samples)
                out.emplace_back(s.t, s.z.x, s.z.y, s.z.px, s.z.py);
            return py::make_tuple(out, tr.max_energy_drift);
        },
        py::arg("state"), py::arg("t_final"), py::arg("dt_sample"),
        "Sample the trajectory at uniform times; returns (samples, max "
        "energy drift)");
    m.def("flow", &flow, py::arg("state"), py::arg("t"),
          py::arg("options") = default_ode_options());
    m.def("lyapunov_exponent", &lyapunov_exponent, py::arg("state"),
          py::arg("t_total"), py::arg("t_renorm") = 10.0,
          py::arg("options") = default_ode_options(),
          py::arg("seed") = 12345u);

    // ---- surface of section ------------------------------------------------
    m.def(
        "section_crossings",
        [](const PhasePoint& z0, int n, double t_max, const OdeOptions& opt) {
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& r : section_crossings(z0, n, t_max, SectionSpec{}, opt))
                out.emplace_back(r.t, r.z.y, r.z.py);
            return out;
        },
        py::arg("state"), py::arg("n_crossings"), py::arg("t_max") = 40000.0,
        py::arg("options") = default_ode_options(),
        "Oriented crossings of the x = 0, px > 0 section plane as (t, y, py)");
    m.def(
        "section_boundary",
        [](double eps, int n) {
            std::vector<std::pair<double, double>> out;
            for (const auto& q : section_boundary(eps, n))
                out.emplace_back(q[0], q[1]);
            return out;
        },
        py::arg("energy"), py::arg("n_points") = 256,
        "Energetically allowed boundary of the section as (y, py) pairs");
    m.def(
        "classify_orbit",
        [](const PhasePoint& z0) {
            return classification_dict(classify_orbit(z0, ClassifyOptions{}));
        },
        py::arg("state"),
        "Regular / chaotic / indeterminate vote for the orbit through state");
    m.def(
        "box_counting_dimension",
        [](const std::vector<std::pair<double, double>>& yp) {
            return box_counting_dimension(as_points(yp));
        },
        py::arg("points"), "Box-counting dimension of a (y, py) point cloud");
    m.def(
        "chaotic_overlap",
        [](const std::vector<std::pair<double, double>>& a,
           const std::vector<std::pair<double, double>>& b, int grid) {
            return chaotic_overlap(as_points(a), as_points(b), grid);
        },
        py::arg("a"), py::arg("b"), py::arg("grid") = 24,
        "Pairwise coverage overlap of two section point clouds");
    m.def(
        "regular_fraction",
        [](double eps, int n_samples, std::uint64_t seed) {
            const auto r = regular_fraction(eps, n_samples, seed);
            py::dict d;
            d["rho1"] = r.rho1;
            d["ci_low"] = r.ci_low;
            d["ci_high"] = r.ci_high;
            d["rho1_liouville"] = r.rho1_liouville;
            d["n_regular"] = r.n_regular;
            d["n_chaotic"] = r.n_chaotic;
            d["n_indeterminate"] = r.n_indeterminate;
            d["n_total"] = r.n_total;
            return d;
        },
        py::arg("energy"), py::arg("n_samples"), py::arg("seed"),
        "Regular fraction of the energy surface from uniform section sampling");

    // ---- periodic orbits ---------------------------------------------------
    py::class_<PeriodicOrbit>(m, "PeriodicOrbit")
        .def_property_readonly(
            "family", [](const PeriodicOrbit& o) { return family_name(o.family); })
        .def_readonly("energy", &PeriodicOrbit::energy)
        .def_readonly("period", &PeriodicOrbit::period)
        .def_readonly("trace", &PeriodicOrbit::trace)
        .def_readonly("stable", &PeriodicOrbit::stable)
        .def_readonly("lyapunov", &PeriodicOrbit::lyapunov)
        .def_readonly("residual", &PeriodicOrbit::residual)
        .def_readonly("start", &PeriodicOrbit::start)
        .def("__repr__", [](const PeriodicOrbit& o) {
            return "PeriodicOrbit(" + family_name(o.family) +
                   ", energy=" + std::to_string(o.energy) +
                   ", period=" + std::to_string(o.period) + ")";
        });
    m.def("period_A_quadrature", &period_A_quadrature, py::arg("energy"),
          py::arg("n_nodes") = 256,
          "Median-libration period by turning-point quadrature");
    m.def(
        "orbit_A_quadrature",
        [](double eps) { return orbit_A_quadrature(eps); }, py::arg("energy"),
        "Full record of the x = 0 median libration");
    m.def(
        "find_periodic",
        [](const PhasePoint& guess, double eps) {
            return find_periodic(guess, eps);
        },
        py::arg("guess"), py::arg("energy"),
        "Newton-polished periodic orbit from a section-plane guess");
    m.def(
        "seed_C", [](double eps, bool acl) { return seed_C(eps, acl); },
        py::arg("energy"), py::arg("anticlockwise") = true,
        "Low-energy rotating-family seed for find_periodic");
    m.def(
        "continue_family",
        [](const PeriodicOrbit& seed, double emin, double emax, int steps) {
            return continue_family(seed, emin, emax, steps);
        },
        py::arg("seed"), py::arg("energy_min"), py::arg("energy_max"),
        py::arg("steps"),
        "Pseudo-arclength continuation across an energy range");
    m.def(
        "discover_section_orbits",
        [](double eps, int grid) { return discover_section_orbits(eps, grid); },
        py::arg("energy"), py::arg("grid") = 40,
        "Census of the section's return-map fixed points at one energy");

    py::enum_<UnitKind>(m, "UnitKind")
        .value("EnergyHz", UnitKind::EnergyHz)
        .value("TimeSeconds", UnitKind::TimeSeconds)
        .value("SplittingPeriodSeconds", UnitKind::SplittingPeriodSeconds)
        .value("ActionJs", UnitKind::ActionJs);
    m.def("to_physical_units", &to_physical_units, py::arg("value"),
          py::arg("kind"), py::arg("C6_over_h"), py::arg("R"), py::arg("mass"));
}
