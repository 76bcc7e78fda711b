#include "gramforge/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gramforge/error.hpp"

namespace gramforge {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object()) fail(ErrorKind::ParseError, "expected an object with field '" + std::string(key) + "'");
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorKind::ParseError, "missing field '" + std::string(key) + "'");
  return *it;
}

int as_int(const json& v, const char* what) {
  if (!v.is_number_integer()) fail(ErrorKind::ParseError, std::string(what) + " must be an integer");
  return v.get<int>();
}

double as_number(const json& v, const char* what) {
  if (!v.is_number()) fail(ErrorKind::ParseError, std::string(what) + " must be a number");
  return v.get<double>();
}

bool as_bool(const json& v, const char* what) {
  if (!v.is_boolean()) fail(ErrorKind::ParseError, std::string(what) + " must be a boolean");
  return v.get<bool>();
}

const json& as_array(const json& v, const char* what) {
  if (!v.is_array()) fail(ErrorKind::ParseError, std::string(what) + " must be an array");
  return v;
}

json row_json(const Eigen::MatrixXd& m, int i) {
  json row = json::array();
  for (int j = 0; j < m.cols(); ++j) {
    if (!std::isfinite(m(i, j)))
      fail(ErrorKind::NumericalConsistency, "non-finite value would be emitted");
    row.push_back(m(i, j));
  }
  return row;
}

json rows_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) rows.push_back(row_json(m, i));
  return rows;
}

json vector_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorKind::NumericalConsistency, "non-finite value would be emitted");
    out.push_back(x);
  }
  return out;
}

/// Rectangular numeric array-of-arrays; column count taken from the first
/// row (or forced by `cols` >= 0).
Eigen::MatrixXd parse_rows(const json& v, const char* what, int cols = -1) {
  const json& rows = as_array(v, what);
  int n = static_cast<int>(rows.size());
  if (n == 0) fail(ErrorKind::ParseError, std::string(what) + " must be non-empty");
  int k = cols >= 0 ? cols : static_cast<int>(as_array(rows[0], what).size());
  if (k <= 0) fail(ErrorKind::ParseError, std::string(what) + " rows must be non-empty");
  Eigen::MatrixXd m(n, k);
  for (int i = 0; i < n; ++i) {
    const json& row = as_array(rows[i], what);
    if (static_cast<int>(row.size()) != k)
      fail(ErrorKind::ParseError, std::string(what) + " rows must all have length " + std::to_string(k));
    for (int j = 0; j < k; ++j) m(i, j) = as_number(row[j], what);
  }
  return m;
}

SymmetricMatrix parse_square(const json& v, const char* what, int n = -1) {
  Eigen::MatrixXd m = parse_rows(v, what, n);
  if (m.rows() != m.cols())
    fail(ErrorKind::ParseError, std::string(what) + " must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff()))
    fail(ErrorKind::ParseError, std::string(what) + " must be symmetric");
  return SymmetricMatrix(m);
}

json entry_json(int i, int j, double v) {
  json e;
  e["i"] = i;
  e["j"] = j;
  if (!std::isfinite(v)) fail(ErrorKind::NumericalConsistency, "non-finite value would be emitted");
  e["v"] = v;
  return e;
}

const char* status_name(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::MaxIterations: return "max-iterations";
    case SdpStatus::NumericalTrouble: return "numerical-trouble";
  }
  return "?";
}

}  // namespace

json to_json(const Graph& g) {
  json j;
  j["n"] = g.node_count();
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back(json::array({e.first, e.second}));
  j["edges"] = std::move(edges);
  return j;
}

json to_json(const SymmetricMatrix& x) {
  json j;
  j["n"] = x.n();
  j["rows"] = rows_json(x.mat());
  return j;
}

json to_json(const GramConfiguration& p) {
  json j;
  j["k"] = p.dim();
  j["points"] = rows_json(p.points);
  return j;
}

json to_json(const PartialMatrix& a) {
  json j;
  j["graph"] = to_json(a.graph);
  json entries = json::array();
  for (int i = 0; i < a.n(); ++i) entries.push_back(entry_json(i, i, a.diag[i]));
  for (int e = 0; e < a.graph.edge_count(); ++e) {
    const Edge& ij = a.graph.edges()[e];
    entries.push_back(entry_json(ij.first, ij.second, a.edge_values[e]));
  }
  j["entries"] = std::move(entries);
  return j;
}

json to_json(const EdgeValues& w) {
  json j;
  j["graph"] = to_json(w.graph);
  json entries = json::array();
  for (int e = 0; e < w.graph.edge_count(); ++e) {
    const Edge& ij = w.graph.edges()[e];
    entries.push_back(entry_json(ij.first, ij.second, w.values[e]));
  }
  j["entries"] = std::move(entries);
  return j;
}

json to_json(const MinorModel& m) {
  json j;
  j["branch_sets"] = m.branch_sets;
  return j;
}

json to_json(const CompletionResult& r) {
  json j;
  j["rank"] = r.rank;
  j["residual"] = r.residual;
  j["method"] = r.method;
  j["X"] = rows_json(r.X.mat());
  return j;
}

json to_json(const Certificate& c) {
  json j;
  j["lower"] = c.lower;
  j["upper"] = c.upper;
  j["lower_witness"] = c.lower_tag;
  j["upper_witness"] = upper_rule_name(c.upper_rule);
  if (c.lower_model) j["lower_model"] = to_json(*c.lower_model);
  json tw;
  tw["width"] = c.tw.width;
  tw["exact"] = c.tw.exact;
  tw["bags"] = c.tw.decomposition.bags;
  json tree_edges = json::array();
  for (const auto& [a, b] : c.tw.decomposition.tree_edges)
    tree_edges.push_back(json::array({a, b}));
  tw["tree_edges"] = std::move(tree_edges);
  j["treewidth"] = std::move(tw);
  json barv;
  barv["m"] = c.barvinok_m;
  barv["bound"] = c.barvinok_bound;
  j["spectrahedron"] = std::move(barv);
  json trace = json::array();
  trace.push_back("lower " + std::to_string(c.lower) + ": " +
                  (c.lower_tag.empty() ? std::string("trivial") : c.lower_tag));
  trace.push_back("upper " + std::to_string(c.upper) + ": rule " +
                  upper_rule_name(c.upper_rule));
  trace.push_back("treewidth " + std::to_string(c.tw.width) +
                  (c.tw.exact ? " (exact)" : " (upper bound)") + " -> bound " +
                  std::to_string(c.tw.width + 1));
  trace.push_back("spectrahedron: m = " + std::to_string(c.barvinok_m) +
                  " -> bound " + std::to_string(c.barvinok_bound));
  j["trace"] = std::move(trace);
  return j;
}

json to_json(const SdpProblem& p) {
  json j;
  j["n"] = p.n;
  j["objective"] = rows_json(p.objective.mat());
  json cons = json::array();
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    json c;
    c["A"] = rows_json(p.constraints[i].mat());
    c["b"] = p.rhs[i];
    cons.push_back(std::move(c));
  }
  j["constraints"] = std::move(cons);
  j["sense"] = p.sense == SdpSense::Max ? "max" : "min";
  return j;
}

json to_json(const SdpSolution& s) {
  json j;
  j["status"] = status_name(s.status);
  j["primal_objective"] = s.primal_objective;
  j["dual_objective"] = s.dual_objective;
  j["gap"] = s.gap;
  j["feas_p"] = s.feas_p;
  j["feas_d"] = s.feas_d;
  j["iterations"] = s.iterations;
  j["dropped_dependent_constraints"] = s.dropped_dependent_constraints;
  j["X"] = rows_json(s.X.mat());
  j["y"] = vector_json(s.y);
  j["S"] = rows_json(s.S.mat());
  return j;
}

json stretch_report_json(const Graph& g, const StretchResult& r) {
  json j;
  j["pair"] = json::array({r.certificate.e0.first, r.certificate.e0.second});
  j["optimum"] = r.optimum;
  j["regularized"] = r.regularized;
  if (r.regularized) j["regularize_eps"] = r.regularize_eps_used;
  j["dual_value"] = r.certificate.dual_value;
  j["complementarity"] = r.certificate.complementarity;
  j["w_diag"] = vector_json(r.certificate.w_diag);
  json wedges = json::array();
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ij = g.edges()[e];
    wedges.push_back(entry_json(ij.first, ij.second, r.certificate.w_edges[e]));
  }
  j["w_edges"] = std::move(wedges);
  j["omega"] = rows_json(r.certificate.omega.mat());
  j["solution"] = to_json(r.solution);
  return j;
}

json fit_report_json(const FitResult& r, std::uint64_t seed) {
  json j;
  j["points"] = to_json(r.points);
  j["residual"] = r.residual;
  j["converged"] = r.converged;
  j["restarts"] = r.restarts_used;
  j["seed"] = seed;
  return j;
}

json witness_report_json(const OctahedronWitness& w) {
  json j;
  j["graph"] = to_json(w.graph);
  j["x"] = to_json(w.x);
  j["X"] = rows_json(w.X.mat());
  j["singular_block"] = w.singular_block;
  j["kernel"] = json::array({w.kernel(0), w.kernel(1), w.kernel(2)});
  json forced = json::array();
  for (const auto& [i, jx, v] : w.forced) forced.push_back(entry_json(i, jx, v));
  j["forced"] = std::move(forced);
  return j;
}

json rank_reduce_report_json(const RankReduceResult& r) {
  json j;
  j["rank"] = r.rank;
  j["rank_path"] = r.rank_path;
  j["stalled"] = r.stalled;
  j["X"] = rows_json(r.X.mat());
  return j;
}

Graph graph_from_json(const json& j) {
  int n = as_int(require(j, "n"), "n");
  if (n < 1) fail(ErrorKind::ParseError, "n must be positive");
  const json& edges = as_array(require(j, "edges"), "edges");
  std::vector<Edge> es;
  es.reserve(edges.size());
  for (const json& e : edges) {
    const json& pair = as_array(e, "edge");
    if (pair.size() != 2) fail(ErrorKind::ParseError, "edges must be [i, j] pairs");
    es.push_back(normalized(as_int(pair[0], "edge endpoint"), as_int(pair[1], "edge endpoint")));
  }
  return Graph(n, std::move(es));
}

SymmetricMatrix matrix_from_json(const json& j) {
  int n = as_int(require(j, "n"), "n");
  if (n < 1) fail(ErrorKind::ParseError, "n must be positive");
  return parse_square(require(j, "rows"), "rows", n);
}

GramConfiguration configuration_from_json(const json& j) {
  int k = as_int(require(j, "k"), "k");
  if (k < 1) fail(ErrorKind::ParseError, "k must be positive");
  GramConfiguration p;
  p.points = parse_rows(require(j, "points"), "points", k);
  return p;
}

PartialMatrix partial_from_json(const json& j) {
  Graph g = graph_from_json(require(j, "graph"));
  const int n = g.node_count();
  std::vector<double> diag(n, 0.0), edge_values(g.edge_count(), 0.0);
  std::vector<char> seen_diag(n, 0), seen_edge(g.edge_count(), 0);
  for (const json& e : as_array(require(j, "entries"), "entries")) {
    int i = as_int(require(e, "i"), "i");
    int jj = as_int(require(e, "j"), "j");
    double v = as_number(require(e, "v"), "v");
    if (i < 0 || i >= n || jj < 0 || jj >= n)
      fail(ErrorKind::ParseError, "entry index out of range");
    if (i == jj) {
      if (seen_diag[i]++) fail(ErrorKind::ParseError, "duplicate diagonal entry " + std::to_string(i));
      diag[i] = v;
    } else {
      int idx = g.edge_index(i, jj);
      if (idx < 0)
        fail(ErrorKind::ParseError, "entry (" + std::to_string(i) + ", " + std::to_string(jj) +
                                        ") is not an edge of the graph");
      if (seen_edge[idx]++) fail(ErrorKind::ParseError, "duplicate edge entry");
      edge_values[idx] = v;
    }
  }
  for (int i = 0; i < n; ++i)
    if (!seen_diag[i]) fail(ErrorKind::ParseError, "missing diagonal entry " + std::to_string(i));
  for (int e = 0; e < g.edge_count(); ++e)
    if (!seen_edge[e])
      fail(ErrorKind::ParseError, "missing value for edge (" + std::to_string(g.edges()[e].first) +
                                      ", " + std::to_string(g.edges()[e].second) + ")");
  return PartialMatrix(std::move(g), std::move(diag), std::move(edge_values));
}

EdgeValues edge_values_from_json(const json& j) {
  Graph g = graph_from_json(require(j, "graph"));
  const int n = g.node_count();
  std::vector<double> values(g.edge_count(), 0.0);
  std::vector<char> seen(g.edge_count(), 0);
  for (const json& e : as_array(require(j, "entries"), "entries")) {
    int i = as_int(require(e, "i"), "i");
    int jj = as_int(require(e, "j"), "j");
    double v = as_number(require(e, "v"), "v");
    if (i < 0 || i >= n || jj < 0 || jj >= n)
      fail(ErrorKind::ParseError, "entry index out of range");
    int idx = i == jj ? -1 : g.edge_index(i, jj);
    if (idx < 0) fail(ErrorKind::ParseError, "edge values must sit on edges of the graph");
    if (seen[idx]++) fail(ErrorKind::ParseError, "duplicate edge entry");
    values[idx] = v;
  }
  for (int e = 0; e < g.edge_count(); ++e)
    if (!seen[e]) fail(ErrorKind::ParseError, "missing value for an edge");
  return EdgeValues(std::move(g), std::move(values));
}

MinorModel minor_model_from_json(const json& j) {
  MinorModel m;
  for (const json& bs : as_array(require(j, "branch_sets"), "branch_sets")) {
    std::vector<int> nodes;
    for (const json& v : as_array(bs, "branch set")) nodes.push_back(as_int(v, "branch set node"));
    m.branch_sets.push_back(std::move(nodes));
  }
  return m;
}

SdpProblem problem_from_json(const json& j) {
  SdpProblem p;
  p.n = as_int(require(j, "n"), "n");
  if (p.n < 1) fail(ErrorKind::ParseError, "n must be positive");
  p.objective = parse_square(require(j, "objective"), "objective", p.n);
  for (const json& c : as_array(require(j, "constraints"), "constraints"))
    p.add_constraint(parse_square(require(c, "A"), "A", p.n), as_number(require(c, "b"), "b"));
  if (j.contains("sense")) {
    const json& s = j.at("sense");
    if (s == "max")
      p.sense = SdpSense::Max;
    else if (s == "min")
      p.sense = SdpSense::Min;
    else
      fail(ErrorKind::ParseError, "sense must be \"max\" or \"min\"");
  }
  return p;
}

Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.lower = as_int(require(j, "lower"), "lower");
  c.upper = as_int(require(j, "upper"), "upper");
  c.lower_tag = require(j, "lower_witness").get<std::string>();
  const std::string rule = require(j, "upper_witness").get<std::string>();
  bool found = false;
  for (UpperRule r : {UpperRule::Edgeless, UpperRule::Forest, UpperRule::NoK4,
                      UpperRule::NoK5NoK222, UpperRule::TreewidthPlusOne, UpperRule::Barvinok}) {
    if (rule == upper_rule_name(r)) {
      c.upper_rule = r;
      found = true;
      break;
    }
  }
  if (!found) fail(ErrorKind::ParseError, "unknown upper witness rule '" + rule + "'");
  if (j.contains("lower_model")) c.lower_model = minor_model_from_json(j.at("lower_model"));
  const json& tw = require(j, "treewidth");
  c.tw.width = as_int(require(tw, "width"), "width");
  c.tw.exact = as_bool(require(tw, "exact"), "exact");
  for (const json& bag : as_array(require(tw, "bags"), "bags")) {
    std::vector<int> nodes;
    for (const json& v : as_array(bag, "bag")) nodes.push_back(as_int(v, "bag node"));
    c.tw.decomposition.bags.push_back(std::move(nodes));
  }
  for (const json& e : as_array(require(tw, "tree_edges"), "tree_edges")) {
    const json& pair = as_array(e, "tree edge");
    if (pair.size() != 2) fail(ErrorKind::ParseError, "tree_edges must be [a, b] pairs");
    c.tw.decomposition.tree_edges.emplace_back(as_int(pair[0], "tree edge"), as_int(pair[1], "tree edge"));
  }
  c.tw.decomposition.width = c.tw.width;
  const json& barv = require(j, "spectrahedron");
  c.barvinok_m = as_int(require(barv, "m"), "m");
  c.barvinok_bound = as_int(require(barv, "bound"), "bound");
  return c;
}

SymmetricMatrix solution_matrix_from_json(const json& j) {
  if (j.is_object() && j.contains("rows")) return matrix_from_json(j);
  if (j.is_object() && j.contains("X")) return parse_square(j.at("X"), "X");
  fail(ErrorKind::ParseError, "expected a matrix document ('rows') or a report with 'X'");
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const std::exception& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ParseError, "cannot write " + path);
  out << json_text(j);
  if (!out) fail(ErrorKind::ParseError, "write failed for " + path);
}

Graph load_graph_spec(const std::string& spec) {
  constexpr const char* prefix = "named:";
  if (spec.rfind(prefix, 0) == 0) return named_graph(spec.substr(6));
  return graph_from_json(load_json_file(spec));
}

}  // namespace gramforge
