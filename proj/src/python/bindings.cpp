#include <pybind11/functional.h>
#include <pybind11/iostream.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "birot/diagnostics.hpp"
#include "birot/lorentz.hpp"
#include "birot/scenario.hpp"
#include "birot/tensor.hpp"
#include "birot/velocity.hpp"
#include "birot/verify.hpp"

namespace py = pybind11;
using namespace birot;

namespace {

ScalarField field_from_array(const GridSpec& g, py::array_t<double> values) {
    ScalarField f(g);
    auto buf = values.unchecked<2>();
    if (buf.shape(0) != g.count_s() || buf.shape(1) != g.count_r())
        throw std::invalid_argument("values must have shape (count_s, count_r)");
    for (int j = 0; j < g.count_s(); ++j)
        for (int i = 0; i < g.count_r(); ++i) f.at(i, j) = buf(j, i);
    return f;
}

py::array_t<double> field_to_array(const ScalarField& f) {
    const GridSpec& g = f.grid();
    py::array_t<double> out({g.count_s(), g.count_r()});
    auto buf = out.mutable_unchecked<2>();
    for (int j = 0; j < g.count_s(); ++j)
        for (int i = 0; i < g.count_r(); ++i) buf(j, i) = f.at(i, j);
    return out;
}

std::vector<QuadrantPoint> points_from_array(py::array_t<double> pts) {
    auto buf = pts.unchecked<2>();
    if (buf.shape(1) != 2) throw std::invalid_argument("targets must have shape (n, 2)");
    std::vector<QuadrantPoint> out(buf.shape(0));
    for (py::ssize_t k = 0; k < buf.shape(0); ++k) out[k] = {buf(k, 0), buf(k, 1)};
    return out;
}

}  // namespace

PYBIND11_MODULE(_birot, m) {
    m.doc() = "Swirl-free bi-rotational Euler simulator on the quadrant";

    py::enum_<Stagger>(m, "Stagger")
        .value("cell_centered", Stagger::cell_centered)
        .value("node_centered", Stagger::node_centered);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](double r_max, double s_max, int n_r, int n_s, Stagger st) {
                 return GridSpec{r_max, s_max, n_r, n_s, st};
             }),
             py::arg("r_max"), py::arg("s_max"), py::arg("n_r"), py::arg("n_s"),
             py::arg("stagger") = Stagger::cell_centered)
        .def_readonly("r_max", &GridSpec::r_max)
        .def_readonly("s_max", &GridSpec::s_max)
        .def_readonly("n_r", &GridSpec::n_r)
        .def_readonly("n_s", &GridSpec::n_s)
        .def("r", &GridSpec::r)
        .def("s", &GridSpec::s)
        .def("dr", &GridSpec::dr)
        .def("ds", &GridSpec::ds);

    py::class_<QuadratureSpec>(m, "QuadratureSpec")
        .def(py::init([](int n_theta, int n_phi, bool split, double threshold,
                         int max_levels, const std::string& rule) {
                 QuadratureSpec q;
                 q.n_theta = n_theta;
                 q.n_phi = n_phi;
                 q.near_singular_split = split;
                 q.split_threshold = threshold;
                 q.max_refine_levels = max_levels;
                 q.rule = rule == "clenshaw_curtis" ? QuadRule::clenshaw_curtis
                                                    : QuadRule::gauss_legendre;
                 q.validate();
                 return q;
             }),
             py::arg("n_theta") = 64, py::arg("n_phi") = 64,
             py::arg("near_singular_split") = true, py::arg("split_threshold") = 1.0,
             py::arg("max_refine_levels") = 20, py::arg("rule") = "gauss_legendre");

    m.def("measure_weight",
          [](double r, double s, double hr, double hs) {
              return measure_weight({r, s}, hr, hs);
          },
          py::arg("r"), py::arg("s"), py::arg("h_r"), py::arg("h_s"));

    m.def("w_from_zeta", [](const GridSpec& g, py::array_t<double> zeta) {
        return field_to_array(w_from_zeta(field_from_array(g, zeta)));
    });
    m.def("zeta_from_w", [](const GridSpec& g, py::array_t<double> w) {
        return field_to_array(zeta_from_w(field_from_array(g, w)));
    });
    m.def("lp_norm", [](const GridSpec& g, py::array_t<double> f, double p) {
        return lp_norm(field_from_array(g, f), p);
    });
    m.def("lorentz_norm",
          [](const GridSpec& g, py::array_t<double> f, double p, double q) {
              return lorentz_norm(field_from_array(g, f), p, q);
          });
    m.def("rearrange", [](const GridSpec& g, py::array_t<double> f) {
        const auto prof = rearrange(field_from_array(g, f));
        std::vector<std::pair<double, double>> out;
        for (const auto& pl : prof.plateaus) out.emplace_back(pl.value, pl.measure);
        return out;
    });

    m.def("x_minus_minus",
          [](double r, double s, double rb, double sb, double tb, double pb) {
              return x_minus_minus({{r, s}, {rb, sb}}, tb, pb);
          });
    m.def("f_a", [](double tau, double a, const QuadratureSpec& q) { return f_a(tau, a, q); },
          py::arg("tau"), py::arg("a"), py::arg("quad") = QuadratureSpec{});
    m.def("eval_Fr",
          [](double r, double s, double rb, double sb, const QuadratureSpec& q) {
              return eval_Fr({{r, s}, {rb, sb}}, q);
          },
          py::arg("r"), py::arg("s"), py::arg("r_bar"), py::arg("s_bar"),
          py::arg("quad") = QuadratureSpec{});
    m.def("eval_Fs",
          [](double r, double s, double rb, double sb, const QuadratureSpec& q) {
              return eval_Fs({{r, s}, {rb, sb}}, q);
          },
          py::arg("r"), py::arg("s"), py::arg("r_bar"), py::arg("s_bar"),
          py::arg("quad") = QuadratureSpec{});

    m.def("biot_savart",
          [](const GridSpec& g, py::array_t<double> w, py::array_t<double> targets,
             const QuadratureSpec& q) {
              const auto pts = points_from_array(targets);
              const auto vel = biot_savart(field_from_array(g, w), pts, q);
              py::array_t<double> out({static_cast<py::ssize_t>(vel.size()),
                                       static_cast<py::ssize_t>(2)});
              auto buf = out.mutable_unchecked<2>();
              for (std::size_t k = 0; k < vel.size(); ++k) {
                  buf(k, 0) = vel[k].u_r;
                  buf(k, 1) = vel[k].u_s;
              }
              return out;
          },
          py::arg("grid"), py::arg("w"), py::arg("targets"),
          py::arg("quad") = QuadratureSpec{});

    m.def("brute_force_velocity_4d",
          [](const GridSpec& g, py::array_t<double> w, std::array<double, 4> x,
             int n_angle) {
              const Velocity4 v = brute_force_velocity_4d(field_from_array(g, w), x, n_angle);
              py::dict out;
              out["u"] = v.u;
              out["u_r"] = v.u_r;
              out["u_s"] = v.u_s;
              out["u_theta"] = v.u_theta;
              out["u_phi"] = v.u_phi;
              return out;
          },
          py::arg("grid"), py::arg("w"), py::arg("x"), py::arg("n_angle") = 48);

    m.def("solve_stream", [](const GridSpec& g, py::array_t<double> w) {
        const StreamField psi = solve_stream(field_from_array(g, w));
        ScalarField tmp(g);
        tmp.values() = psi.psi;
        return field_to_array(tmp);
    });
    m.def("velocity_from_stream", [](const GridSpec& g, py::array_t<double> psi_arr) {
        StreamField psi{g, field_from_array(g, psi_arr).values()};
        auto [ur, us] = velocity_from_stream(psi);
        return py::make_tuple(field_to_array(ur), field_to_array(us));
    });
    m.def("divergence_residual",
          [](const GridSpec& g, py::array_t<double> ur, py::array_t<double> us) {
              return divergence_residual(field_from_array(g, ur), field_from_array(g, us));
          });

    m.def("assemble_tensor", [](double w, double theta, double phi) {
        const auto t = assemble_tensor(w, theta, phi);
        py::array_t<double> out({4, 4});
        auto buf = out.mutable_unchecked<2>();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) buf(i, j) = t.omega[i][j];
        return out;
    });
    m.def("axis_regularity_estimate", [](const GridSpec& g, py::array_t<double> w) {
        const auto est = axis_regularity_estimate(field_from_array(g, w));
        return py::make_tuple(est.value, est.reliable);
    });

    m.def("run_scenario", [](const std::string& config_path) {
        const RunResult res = run(load_config(config_path));
        py::dict out;
        out["exit_code"] = res.exit_code;
        out["error"] = res.error;
        out["final_time"] = res.final_time;
        out["n_particles"] = res.n_particles;
        return out;
    });
    m.def("verify", [](const std::string& suite, const std::string& out_dir) {
        py::scoped_ostream_redirect redirect;
        const auto results = verify_suite(suite, std::cout, out_dir);
        py::list out;
        for (const auto& r : results) {
            py::dict d;
            d["id"] = r.id;
            d["name"] = r.name;
            d["pass"] = r.pass;
            d["detail"] = r.detail;
            out.append(d);
        }
        return out;
    }, py::arg("suite") = "kernel", py::arg("out_dir") = "verify_out");
}
