#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fluxrec/adapt.hpp"
#include "fluxrec/weights.hpp"

namespace py = pybind11;
using namespace fluxrec;

namespace {

py::tuple to_tuple(Vec2 v) { return py::make_tuple(v.x, v.y); }

Vec2 to_vec(const std::pair<double, double> &p) { return {p.first, p.second}; }

py::dict norms_dict(const ErrorNorms &n) {
    py::dict d;
    d["l2"] = n.l2;
    d["h1_semi"] = n.h1_semi;
    d["energy"] = n.energy;
    d["supg"] = n.supg;
    d["eps_triple"] = n.eps_triple;
    return d;
}

py::dict constants_dict(const RobustnessConstants &c) {
    py::dict d;
    d["c52"] = c.explicit_flux;
    d["c54"] = c.boundary_trace;
    d["c55"] = c.residual;
    return d;
}

py::dict row_dict(const IterationRecord &r) {
    py::dict d;
    d["iter"] = r.iter;
    d["n_elements"] = r.n_elements;
    d["dof"] = r.dof;
    d["h_max"] = r.h_max;
    d["h_min"] = r.h_min;
    d["eta"] = r.eta;
    d["phi"] = r.phi;
    d["osc"] = r.osc;
    d["jump_estimator"] = r.jump_estimator;
    d["err_supg"] = r.err_supg();
    d["err_eps_triple"] = r.err_eps_triple();
    d["eff1"] = r.eff1();
    d["eff2"] = r.eff2();
    d["flags"] = r.flags();
    d["constants"] = constants_dict(r.constants);
    d["marked"] = r.marked;
    return d;
}

py::dict history_dict(const RunHistory &h) {
    py::list rows;
    for (const auto &r : h.rows) rows.append(row_dict(r));
    py::dict d;
    d["rows"] = rows;
    d["stop"] = to_string(h.stop);
    d["final_mesh"] = std::const_pointer_cast<Mesh>(h.final_mesh);
    d["wall_seconds"] = h.wall_seconds;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adaptive SUPG solver with flux-recovery error estimators";

    py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
        .def_property_readonly("num_vertices", &Mesh::num_vertices)
        .def_property_readonly("num_triangles", &Mesh::num_triangles)
        .def_property_readonly("num_edges", &Mesh::num_edges)
        .def("vertices",
             [](const Mesh &mesh) {
                 py::list out;
                 for (Vec2 v : mesh.vertices()) out.append(to_tuple(v));
                 return out;
             })
        .def("triangles", [](const Mesh &mesh) { return mesh.triangles(); })
        .def("total_area", &Mesh::total_area)
        .def("h_max", [](const Mesh &mesh) { return max_diameter(mesh); })
        .def("h_min", [](const Mesh &mesh) { return min_diameter(mesh); })
        .def("min_angle_degrees", [](const Mesh &mesh) { return min_angle_degrees(mesh); })
        .def("centroid", [](const Mesh &mesh, int t) { return to_tuple(mesh.centroid(t)); })
        .def(
            "refine",
            [](const Mesh &mesh, const std::vector<int> &marked, bool four_t) {
                return std::make_shared<Mesh>(longest_edge_refine(mesh, marked, four_t));
            },
            py::arg("marked"), py::arg("four_t") = false)
        .def("uniform_refine", [](const Mesh &mesh) { return std::make_shared<Mesh>(uniform_refine(mesh)); })
        .def("to_text", [](const Mesh &mesh) {
            std::ostringstream s;
            write_mesh_text(s, mesh);
            return s.str();
        });

    m.def(
        "square_mesh",
        [](std::pair<double, double> lo, std::pair<double, double> hi, int n) {
            return std::make_shared<Mesh>(build_initial_square_mesh(to_vec(lo), to_vec(hi), n));
        },
        py::arg("lo") = std::make_pair(0.0, 0.0), py::arg("hi") = std::make_pair(1.0, 1.0), py::arg("n") = 2);
    m.def("mesh_from_text", [](const std::string &text) {
        std::istringstream s(text);
        return std::make_shared<Mesh>(read_mesh_text(s));
    });

    py::class_<BenchmarkProblem>(m, "Problem")
        .def_readonly("name", &BenchmarkProblem::name)
        .def_property_readonly("epsilon", [](const BenchmarkProblem &p) { return p.spec.epsilon; })
        .def_property_readonly("beta", [](const BenchmarkProblem &p) { return p.spec.beta; })
        .def_property_readonly("has_exact", [](const BenchmarkProblem &p) { return p.spec.has_exact(); })
        .def("initial_mesh", [](const BenchmarkProblem &p) { return std::make_shared<Mesh>(p.initial_mesh()); })
        .def("source", [](const BenchmarkProblem &p, double x, double y) { return p.spec.source({x, y}); })
        .def("exact", [](const BenchmarkProblem &p, double x, double y) {
            if (!p.spec.has_exact()) throw ProblemError("no exact solution attached");
            return (*p.spec.exact_solution)({x, y});
        });

    m.def("example1", &example1, py::arg("epsilon"));
    m.def("example2", &example2, py::arg("epsilon"));
    m.def("manufactured", &manufactured_smooth);
    m.def("problem_by_name", &problem_by_name, py::arg("name"), py::arg("epsilon") = 1.0);
    m.def("problem_names", &problem_names);
    m.def(
        "load_problem_file",
        [](const std::string &path, std::optional<double> eps) { return load_problem_file(path, eps); },
        py::arg("path"), py::arg("epsilon") = py::none());

    py::class_<P1Function>(m, "Solution")
        .def_property_readonly("values", &P1Function::values)
        .def_property_readonly("mesh", [](const P1Function &u) { return std::const_pointer_cast<Mesh>(u.mesh_ptr()); })
        .def(
            "error_norms",
            [](const P1Function &u, const BenchmarkProblem &p, double c_delta) {
                return norms_dict(exact_errors(u, p.spec, DeltaRule{c_delta}).norms);
            },
            py::arg("problem"), py::arg("c_delta"));

    m.def(
        "solve",
        [](const BenchmarkProblem &p, const std::shared_ptr<Mesh> &mesh, double c_delta) {
            validate_problem(p.spec, *mesh);
            return solve(mesh, p.spec, DeltaRule{c_delta});
        },
        py::arg("problem"), py::arg("mesh"), py::arg("c_delta") = 4.0);

    py::class_<FluxField>(m, "Flux")
        .def_property_readonly("coefficients", &FluxField::coefficients)
        .def_property_readonly("space", [](const FluxField &f) { return f.space() == FluxSpace::RT0 ? "rt0" : "bdm1"; })
        .def("at", [](const FluxField &f, int t, double x, double y) { return to_tuple(eval_flux(f, t, {x, y})); })
        .def("divergence", [](const FluxField &f, int t) {
            const auto d = div_flux(f, t);
            return py::make_tuple(d.c0, d.cx, d.cy);
        });

    m.def(
        "recover",
        [](const std::string &kind, const P1Function &u, const BenchmarkProblem &p, double c_stab, double scale) {
            return recover(parse_recovery_kind(kind), u, p.spec, GammaRule{c_stab, scale});
        },
        py::arg("kind"), py::arg("solution"), py::arg("problem"), py::arg("c_stab") = 1.0, py::arg("scale") = 1.0);
    m.def(
        "recovery_objective",
        [](const FluxField &f, const P1Function &u, const BenchmarkProblem &p) {
            return recovery_objective(f, u, p.spec.epsilon);
        },
        py::arg("flux"), py::arg("solution"), py::arg("problem"));

    m.def(
        "estimate",
        [](const P1Function &u, const FluxField &f, const BenchmarkProblem &p, const std::string &kind) {
            const auto rep = assemble_report(u, f, p.spec, parse_recovery_kind(kind));
            py::dict d;
            d["eta"] = rep.eta;
            d["phi"] = rep.phi;
            d["osc"] = rep.osc;
            d["jump_estimator"] = rep.jump_estimator;
            d["indicators"] = rep.indicators();
            d["constants"] = constants_dict(rep.constants);
            return d;
        },
        py::arg("solution"), py::arg("flux"), py::arg("problem"), py::arg("kind"));

    m.def("dorfler_mark", &dorfler_mark, py::arg("indicators"), py::arg("theta"));
    m.def("cumulative_mark", &cumulative_mark, py::arg("indicators"), py::arg("theta"));
    m.def("alpha_K", &alpha_K, py::arg("h"), py::arg("epsilon"), py::arg("beta"));
    m.def("alpha_e", &alpha_e, py::arg("h"), py::arg("epsilon"), py::arg("beta"));

    m.def(
        "adaptive_solve",
        [](const BenchmarkProblem &p, double theta, double c_delta, const std::string &recovery, double c_stab, double tol,
           int max_iterations, std::size_t max_elements, const std::string &marking, const std::string &refinement) {
            AdaptConfig c;
            c.theta = theta;
            c.c_delta = c_delta;
            c.recovery = parse_recovery_kind(recovery);
            c.c_stab = c_stab;
            c.tol = tol;
            c.max_iterations = max_iterations;
            c.max_elements = max_elements;
            c.marking = parse_marking_rule(marking);
            c.refinement = parse_refine_rule(refinement);
            RunHistory h;
            {
                py::gil_scoped_release release;
                h = adaptive_solve(p, c);
            }
            return history_dict(h);
        },
        py::arg("problem"), py::arg("theta") = 0.5, py::arg("c_delta") = 4.0, py::arg("recovery") = "l2-rt0",
        py::arg("c_stab") = 1.0, py::arg("tol") = 0.0, py::arg("max_iterations") = 8,
        py::arg("max_elements") = 2'000'000, py::arg("marking") = "minimal", py::arg("refinement") = "bisect");
}
