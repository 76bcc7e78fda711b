// Python bindings: thin typed wrappers over the core operations. Reports
// with nested structure cross the boundary as JSON text; the package
// __init__ decodes them into plain dicts.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gramforge/completion.hpp"
#include "gramforge/error.hpp"
#include "gramforge/graph.hpp"
#include "gramforge/json_io.hpp"
#include "gramforge/numerics.hpp"
#include "gramforge/oracle.hpp"
#include "gramforge/partial.hpp"
#include "gramforge/sdp.hpp"
#include "gramforge/treewidth.hpp"

namespace py = pybind11;
using namespace gramforge;

namespace {

FitOptions make_fit_options(int restarts, int iters, std::uint64_t seed, double tol,
                            const std::optional<Eigen::MatrixXd>& init) {
  FitOptions o;
  o.restarts = restarts;
  o.iters = iters;
  o.seed = seed;
  o.tol = tol;
  o.init = init;
  return o;
}

py::dict fit_dict(const FitResult& r) {
  py::dict d;
  d["points"] = r.points.points;
  d["residual"] = r.residual;
  d["converged"] = r.converged;
  d["restarts_used"] = r.restarts_used;
  return d;
}

py::dict completion_dict(const CompletionResult& r) {
  py::dict d;
  d["X"] = r.X.mat();
  d["rank"] = r.rank;
  d["residual"] = r.residual;
  d["method"] = r.method;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gramforge, m) {
  m.doc() = "Gram-dimension toolkit: certified bounds, low-rank psd completions, "
            "stretching duals, and the covariance correspondence";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Graph>(m, "Graph")
      .def(py::init<int, std::vector<Edge>>(), py::arg("n"), py::arg("edges"))
      .def_property_readonly("n", &Graph::node_count)
      .def_property_readonly("edges", [](const Graph& g) { return g.edges(); })
      .def("has_edge", &Graph::has_edge)
      .def("degree", &Graph::degree)
      .def("complement", &Graph::complement)
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "Graph(n=" + std::to_string(g.node_count()) +
               ", edges=" + std::to_string(g.edge_count()) + ")";
      });

  m.def("named_graph", &named_graph, py::arg("name"));
  m.def("suspension", &suspension, py::arg("g"));

  py::class_<PartialMatrix>(m, "PartialMatrix")
      .def(py::init<Graph, std::vector<double>, std::vector<double>>(), py::arg("graph"),
           py::arg("diag"), py::arg("edge_values"))
      .def_readonly("graph", &PartialMatrix::graph)
      .def_readonly("diag", &PartialMatrix::diag)
      .def_readonly("edge_values", &PartialMatrix::edge_values)
      .def("value", &PartialMatrix::value)
      .def("specifies", &PartialMatrix::specifies);

  py::class_<EdgeValues>(m, "EdgeValues")
      .def(py::init<Graph, std::vector<double>>(), py::arg("graph"), py::arg("values"))
      .def_readonly("graph", &EdgeValues::graph)
      .def_readonly("values", &EdgeValues::values)
      .def("value", &EdgeValues::value);

  m.def(
      "project_to_graph",
      [](const Eigen::MatrixXd& x, const Graph& g) {
        return project_to_graph(SymmetricMatrix(x), g);
      },
      py::arg("x"), py::arg("g"));
  m.def("phi", &phi, py::arg("x"));
  m.def("phi_inv", &phi_inv, py::arg("d"));
  m.def("zero_extend", &zero_extend, py::arg("x"));
  m.def(
      "gram_to_edm_points",
      [](const Eigen::MatrixXd& p) { return gram_to_edm_points(GramConfiguration{p}).points; },
      py::arg("points"));

  m.def(
      "treewidth",
      [](const Graph& g) {
        TreewidthResult r = treewidth(g);
        return py::make_tuple(r.width, r.exact);
      },
      py::arg("g"));

  m.def(
      "certify_json", [](const Graph& g) { return json_text(to_json(certify(g))); },
      py::arg("g"));
  m.def(
      "verify_certificate_json",
      [](const Graph& g, const std::string& text) {
        return verify_certificate(g, certificate_from_json(json::parse(text)));
      },
      py::arg("g"), py::arg("certificate"));
  m.def("k222_witness_json", [] { return json_text(witness_report_json(k222_witness())); });

  m.def(
      "ktree_complete",
      [](const Graph& g, const PartialMatrix& a, int k,
         const std::optional<Eigen::MatrixXd>& x0) {
        std::optional<SymmetricMatrix> start;
        if (x0) start = SymmetricMatrix(*x0);
        return completion_dict(ktree_complete(g, a, k, start));
      },
      py::arg("g"), py::arg("a"), py::arg("k"), py::arg("x0") = std::nullopt);

  m.def(
      "psd_completion_feasible",
      [](const PartialMatrix& a) {
        FeasibilityResult f = psd_completion_feasible(a);
        py::dict d;
        d["feasible"] = f.completion.has_value();
        d["min_eig"] = f.min_eig_value;
        d["boundary"] = f.boundary;
        d["X"] = f.completion ? py::cast(f.completion->mat()) : py::none();
        return d;
      },
      py::arg("a"));

  m.def(
      "lowrank_fit",
      [](const PartialMatrix& a, int k, int restarts, int iters, std::uint64_t seed, double tol,
         const std::optional<Eigen::MatrixXd>& init) {
        return fit_dict(lowrank_fit(a, k, make_fit_options(restarts, iters, seed, tol, init)));
      },
      py::arg("a"), py::arg("k"), py::arg("restarts") = 20, py::arg("iters") = 2000,
      py::arg("seed") = 0, py::arg("tol") = 1e-10, py::arg("init") = std::nullopt);
  m.def(
      "edm_fit",
      [](const EdgeValues& d, int k, int restarts, int iters, std::uint64_t seed, double tol,
         const std::optional<Eigen::MatrixXd>& init) {
        return fit_dict(edm_fit(d, k, make_fit_options(restarts, iters, seed, tol, init)));
      },
      py::arg("d"), py::arg("k"), py::arg("restarts") = 20, py::arg("iters") = 2000,
      py::arg("seed") = 0, py::arg("tol") = 1e-10, py::arg("init") = std::nullopt);

  m.def(
      "stretch_json",
      [](const Graph& g, const PartialMatrix& a, int i, int j) {
        return json_text(stretch_report_json(g, stretch(g, a, normalized(i, j))));
      },
      py::arg("g"), py::arg("a"), py::arg("i"), py::arg("j"));
  m.def(
      "suggest_stretch_pair",
      [](const Graph& g) -> py::object {
        auto e = suggest_stretch_pair(g);
        if (!e) return py::none();
        return py::make_tuple(e->first, e->second);
      },
      py::arg("g"));

  m.def(
      "maxcut_relaxation_json",
      [](const Graph& g) { return json_text(to_json(maxcut_relaxation(g))); }, py::arg("g"));
  m.def(
      "sdp_solve_json",
      [](const std::string& problem) {
        return json_text(to_json(sdp_solve(problem_from_json(json::parse(problem)))));
      },
      py::arg("problem"));
  m.def(
      "rank_reduce",
      [](const std::string& problem, const Eigen::MatrixXd& x, bool preserve_objective) {
        SdpProblem p = problem_from_json(json::parse(problem));
        RankReduceResult r = rank_reduce(p, SymmetricMatrix(x), preserve_objective);
        py::dict d;
        d["X"] = r.X.mat();
        d["rank"] = r.rank;
        d["rank_path"] = r.rank_path;
        d["stalled"] = r.stalled;
        return d;
      },
      py::arg("problem"), py::arg("x"), py::arg("preserve_objective") = false);

  m.def("clique_number", &clique_number_bf, py::arg("g"));
  m.def("chromatic_number", &chromatic_number_bf, py::arg("g"));
  m.def(
      "orthogonality_dimension_search",
      [](const Graph& g, int kmax) -> py::object {
        auto r = orthogonality_dimension_search(g, kmax);
        if (!r) return py::none();
        return py::int_(*r);
      },
      py::arg("g"), py::arg("kmax"));
}
