#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "srlab/frenet.hpp"
#include "srlab/kappa.hpp"
#include "srlab/martinet.hpp"
#include "srlab/runner.hpp"

namespace py = pybind11;
using namespace srlab;

namespace {

std::array<double, 3> as_point(const Eigen::Vector3d& q) { return {q[0], q[1], q[2]}; }

}  // namespace

PYBIND11_MODULE(_srlab, m) {
    m.doc() = "bindings for the sub-Riemannian laboratory core";

    m.def(
        "parse",
        [](const std::string& text) {
            ScalarExpr e = parse_expr(text, 3);
            return e.str();
        },
        py::arg("text"), "Parse a 3-variable scalar expression and return its canonical form.");

    m.def(
        "eval_expr",
        [](const std::string& text, double x1, double x2, double x3) {
            std::array<double, 3> q{x1, x2, x3};
            return parse_expr(text, 3).eval(q);
        },
        py::arg("text"), py::arg("x1"), py::arg("x2"), py::arg("x3"));

    m.def(
        "reeb",
        [](const std::string& structure, const Eigen::Vector3d& q) {
            auto s = catalog::by_name(structure);
            ReebField r = reeb_field(s.frame, s.A);
            return Eigen::Vector3d(r.e.eval(as_point(q)));
        },
        py::arg("structure"), py::arg("q"), "Reeb field of a catalog structure at a point.");

    m.def(
        "kappa",
        [](const std::string& structure, const Eigen::Vector3d& q) {
            auto s = catalog::by_name(structure);
            return kappa_estimate(s.frame, s.A, q);
        },
        py::arg("structure"), py::arg("q"), "Quotient-surface curvature of a catalog structure.");

    m.def(
        "martinet_distance",
        [](const Eigen::Vector3d& q1, std::uint64_t seed, int restarts) {
            BvpOptions opts;
            opts.seed = seed;
            opts.restarts = restarts;
            auto rep = cut_locus_probe(q1, opts);
            return py::make_tuple(rep.bvp.distance, rep.bvp.multiplicity);
        },
        py::arg("q1"), py::arg("seed") = 0, py::arg("restarts") = 64,
        "Flat-Martinet distance from the origin and minimizer multiplicity.");

    m.def(
        "closure_search",
        [](int n, int m_winding, std::uint64_t seed, int restarts) {
            ClosureOptions opts;
            opts.seed = seed;
            if (restarts > 0) opts.restarts = restarts;
            auto rep = closure_search(n, m_winding, opts);
            py::dict d;
            d["converged"] = rep.converged;
            d["defect"] = rep.defect;
            d["verified_defect"] = rep.verified_defect;
            d["frame_length"] = rep.frame_len;
            d["control_minima"] = rep.control_minima;
            d["restarts_used"] = rep.restarts_used;
            return d;
        },
        py::arg("n"), py::arg("m"), py::arg("seed") = 0, py::arg("restarts") = 0,
        "Search for a nondegenerate closed curve with positive controls.");

    m.def(
        "run",
        [](const std::string& command, const std::string& config_path, const std::string& out_dir,
           std::optional<std::uint64_t> seed) {
            RunRequest req;
            req.command = command;
            req.config_path = config_path;
            req.out_dir = out_dir;
            req.seed = seed;
            return run_command(req);
        },
        py::arg("command"), py::arg("config_path"), py::arg("out_dir") = ".",
        py::arg("seed") = py::none(), "Run a CLI command; returns the exit code.");

    m.def("commands", [] { return command_names(); });
}
