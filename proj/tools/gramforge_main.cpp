#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gramforge/error.hpp"
#include "gramforge/json_io.hpp"
#include "gramforge/numerics.hpp"
#include "gramforge/oracle.hpp"

namespace gf = gramforge;
using gf::json;

namespace {

int exit_code_for(gf::ErrorKind k) {
  switch (k) {
    case gf::ErrorKind::ParseError:
    case gf::ErrorKind::UnknownName:
    case gf::ErrorKind::InvalidEdge:
    case gf::ErrorKind::DimensionMismatch:
    case gf::ErrorKind::InvalidEdmData:
    case gf::ErrorKind::SizeGuard:
      return 2;
    case gf::ErrorKind::InfeasibleData:
    case gf::ErrorKind::InfeasibleWidth:
    case gf::ErrorKind::NotPsd:
    case gf::ErrorKind::InconsistentOverlap:
    case gf::ErrorKind::AlignmentInfeasible:
    case gf::ErrorKind::RankStructure:
      return 3;
    case gf::ErrorKind::NumericalFailure:
    case gf::ErrorKind::NumericalConsistency:
      return 4;
  }
  return 1;
}

void emit(const json& j, const std::string& out) {
  if (out.empty())
    std::cout << gf::json_text(j);
  else
    gf::write_json_file(out, j);
}

gf::PartialMatrix load_partial_checked(const std::string& graph_spec,
                                       const std::string& partial_file) {
  gf::PartialMatrix a = gf::partial_from_json(gf::load_json_file(partial_file));
  gf::Graph g = gf::load_graph_spec(graph_spec);
  if (!(g == a.graph))
    gf::fail(gf::ErrorKind::DimensionMismatch,
             "the partial data in " + partial_file + " lives on a different graph than " + graph_spec);
  return a;
}

double inner(const gf::SymmetricMatrix& a, const gf::SymmetricMatrix& b) {
  return (a.mat().cwiseProduct(b.mat())).sum();
}

/// Worst |<A_j, x> - b_j| relative to max(1, max|b|).
double constraint_residual(const gf::SdpProblem& p, const gf::SymmetricMatrix& x) {
  double bscale = 1.0, worst = 0.0;
  for (double b : p.rhs) bscale = std::max(bscale, std::abs(b));
  for (std::size_t j = 0; j < p.constraints.size(); ++j)
    worst = std::max(worst, std::abs(inner(p.constraints[j], x) - p.rhs[j]));
  return worst / bscale;
}

void check_emitted_psd(const gf::SymmetricMatrix& x, double tol, const std::string& what) {
  if (!gf::is_psd(x, tol))
    gf::fail(gf::ErrorKind::NumericalConsistency, what + " failed the psd check");
}

json certify_one(const std::string& spec) {
  gf::Graph g = gf::load_graph_spec(spec);
  gf::Certificate cert = gf::certify(g);
  if (!verify_certificate(g, cert))
    gf::fail(gf::ErrorKind::NumericalConsistency,
             "certificate for '" + spec + "' failed re-verification");
  return to_json(cert);
}

void run_certify(const std::vector<std::string>& inputs, int jobs, const std::string& out) {
  if (inputs.size() == 1) {
    emit(certify_one(inputs[0]), out);
    return;
  }
  std::vector<json> results(inputs.size());
  std::vector<std::exception_ptr> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < inputs.size();) {
      try {
        results[i] = certify_one(inputs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int threads = std::clamp<int>(jobs, 1, static_cast<int>(inputs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  json arr = json::array();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    json row;
    row["input"] = inputs[i];
    row["certificate"] = std::move(results[i]);
    arr.push_back(std::move(row));
  }
  emit(arr, out);
}

void run_complete(const std::string& graph_spec, const std::string& partial_file, int k,
                  const std::string& x0_file, const std::string& out, const gf::RunConfig& cfg) {
  gf::PartialMatrix a = load_partial_checked(graph_spec, partial_file);
  std::optional<gf::SymmetricMatrix> x0;
  if (!x0_file.empty()) x0 = gf::solution_matrix_from_json(gf::load_json_file(x0_file));
  gf::CompletionResult r = gf::ktree_complete(a.graph, a, k, x0, cfg);
  gf::check_completion(r, a, cfg);
  emit(to_json(r), out);
}

void run_stretch(const std::string& graph_spec, const std::string& partial_file,
                 const std::vector<int>& pair, const std::string& out, const gf::RunConfig& cfg) {
  gf::PartialMatrix a = load_partial_checked(graph_spec, partial_file);
  gf::Edge e0;
  if (pair.size() == 2) {
    e0 = gf::normalized(pair[0], pair[1]);
  } else {
    auto suggestion = gf::suggest_stretch_pair(a.graph);
    if (!suggestion)
      gf::fail(gf::ErrorKind::InvalidEdge, "graph is complete; nothing to stretch");
    e0 = *suggestion;
  }
  gf::StretchResult r = gf::stretch(a.graph, a, e0, cfg);
  check_emitted_psd(r.certificate.omega, 10 * cfg.tol_feas, "stress matrix");
  check_emitted_psd(r.solution.X, 10 * cfg.tol_feas, "stretched completion");
  if (!r.regularized && a.residual_against(r.solution.X) > 100 * cfg.tol_feas * a.scale())
    gf::fail(gf::ErrorKind::NumericalConsistency, "stretched completion drifted off the data");
  emit(stretch_report_json(a.graph, r), out);
}

void run_reduce(const std::string& problem_file, const std::string& solution_file,
                bool preserve_objective, const std::string& out, const gf::RunConfig& cfg) {
  gf::SdpProblem p = gf::problem_from_json(gf::load_json_file(problem_file));
  gf::SymmetricMatrix x = gf::solution_matrix_from_json(gf::load_json_file(solution_file));
  if (x.n() != p.n)
    gf::fail(gf::ErrorKind::DimensionMismatch, "solution size does not match the problem");
  gf::RankReduceResult r = gf::rank_reduce(p, x, preserve_objective, cfg);
  check_emitted_psd(r.X, 10 * cfg.tol_feas, "reduced solution");
  if (constraint_residual(p, r.X) > 1e3 * cfg.tol_feas)
    gf::fail(gf::ErrorKind::NumericalConsistency, "reduced solution drifted off the constraints");
  if (preserve_objective) {
    double before = inner(p.objective, x), after = inner(p.objective, r.X);
    if (std::abs(after - before) > 1e3 * cfg.tol_feas * (1.0 + std::abs(before)))
      gf::fail(gf::ErrorKind::NumericalConsistency, "reduced solution drifted off the objective");
  }
  emit(rank_reduce_report_json(r), out);
}

void run_convert(const std::string& input_file, bool to_edm, const std::string& out) {
  json j = gf::load_json_file(input_file);
  if (j.is_object() && j.contains("points")) {
    gf::GramConfiguration p = gf::configuration_from_json(j);
    if (to_edm) {
      emit(to_json(gram_to_edm_points(p)), out);
    } else {
      if (p.n() < 2)
        gf::fail(gf::ErrorKind::InvalidEdmData, "need the apex plus at least one point");
      Eigen::MatrixXd q = p.points.topRows(p.n() - 1);
      q.rowwise() -= p.points.row(p.n() - 1);
      gf::GramConfiguration base;
      base.points = std::move(q);
      emit(to_json(base), out);
    }
    return;
  }
  if (to_edm)
    emit(to_json(phi(gf::partial_from_json(j))), out);
  else
    emit(to_json(phi_inv(gf::edge_values_from_json(j))), out);
}

void run_witness(const std::string& name, const std::string& out_dir, const std::string& out) {
  if (name != "k222")
    gf::fail(gf::ErrorKind::UnknownName, "unknown witness '" + name + "' (available: k222)");
  gf::OctahedronWitness w = gf::k222_witness();

  check_emitted_psd(w.X, 1e-10, "witness completion");
  int rank = gf::numeric_rank(w.X);
  double data_residual = w.x.residual_against(w.X);
  Eigen::Matrix3d block;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) block(i, j) = w.X(w.singular_block[i], w.singular_block[j]);
  double kernel_residual = (block * w.kernel).cwiseAbs().maxCoeff();
  double forced_residual = 0;
  for (const auto& [i, j, v] : w.forced)
    forced_residual = std::max(forced_residual, std::abs(w.X(i, j) - v));
  if (rank != 5 || data_residual > 1e-10 || kernel_residual > 1e-10 || forced_residual > 1e-10)
    gf::fail(gf::ErrorKind::NumericalConsistency, "witness self-checks failed");

  json bundle = witness_report_json(w);
  json checks;
  checks["rank"] = rank;
  checks["data_residual"] = data_residual;
  checks["kernel_residual"] = kernel_residual;
  checks["forced_residual"] = forced_residual;
  bundle["checks"] = std::move(checks);

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto path = [&](const char* f) { return (fs::path(out_dir) / f).string(); };
    gf::write_json_file(path("graph.json"), to_json(w.graph));
    gf::write_json_file(path("partial.json"), to_json(w.x));
    gf::write_json_file(path("completion.json"), to_json(w.X));
    gf::write_json_file(path("forced.json"), bundle["forced"]);
    gf::write_json_file(path("witness.json"), bundle);
  }
  emit(bundle, out);
}

void run_oracle(const std::string& graph_spec, const std::string& data_file, int k, int restarts,
                bool use_edm, const std::string& out, const gf::RunConfig& cfg) {
  gf::FitOptions opt;
  opt.restarts = restarts;
  opt.seed = cfg.seed;
  opt.tol = cfg.tol_fit;
  gf::FitResult r;
  if (use_edm) {
    gf::EdgeValues d = gf::edge_values_from_json(gf::load_json_file(data_file));
    gf::Graph g = gf::load_graph_spec(graph_spec);
    if (!(g == d.graph))
      gf::fail(gf::ErrorKind::DimensionMismatch,
               "the distance data lives on a different graph than " + graph_spec);
    r = gf::edm_fit(d, k, opt);
  } else {
    gf::PartialMatrix a = load_partial_checked(graph_spec, data_file);
    r = gf::lowrank_fit(a, k, opt);
  }
  emit(fit_report_json(r, cfg.seed), out);
}

void run_maxcut(const std::string& graph_spec, const std::string& out, const gf::RunConfig& cfg) {
  gf::Graph g = gf::load_graph_spec(graph_spec);
  gf::SdpProblem p = gf::maxcut_relaxation(g);
  gf::SdpSolution s = gf::sdp_solve(p, cfg);
  if (s.status == gf::SdpStatus::NumericalTrouble)
    gf::fail(gf::ErrorKind::NumericalFailure, "max-cut relaxation did not converge");
  gf::RankReduceResult r = gf::rank_reduce(p, s.X, /*preserve_objective=*/true, cfg);
  check_emitted_psd(r.X, 10 * cfg.tol_feas, "reduced max-cut solution");
  for (int i = 0; i < r.X.n(); ++i)
    if (std::abs(r.X(i, i) - 1.0) > 1e3 * cfg.tol_feas)
      gf::fail(gf::ErrorKind::NumericalConsistency, "reduced max-cut solution left the unit diagonal");
  if (std::abs(inner(p.objective, r.X) - s.primal_objective) >
      1e3 * cfg.tol_feas * (1.0 + std::abs(s.primal_objective)))
    gf::fail(gf::ErrorKind::NumericalConsistency, "rank reduction drifted off the max-cut value");
  json j;
  j["value"] = s.primal_objective;
  j["gap"] = s.gap;
  j["iterations"] = s.iterations;
  j["status"] = s.status == gf::SdpStatus::Optimal ? "optimal" : "max-iterations";
  j["reduction"] = rank_reduce_report_json(r);
  emit(j, out);
}

void run_solve(const std::string& problem_file, const std::string& out, const gf::RunConfig& cfg) {
  gf::SdpProblem p = gf::problem_from_json(gf::load_json_file(problem_file));
  gf::SdpSolution s = gf::sdp_solve(p, cfg);
  if (s.status == gf::SdpStatus::NumericalTrouble)
    gf::fail(gf::ErrorKind::NumericalFailure, "solver reported numerical trouble");
  if (constraint_residual(p, s.X) > 1e3 * cfg.tol_feas)
    gf::fail(gf::ErrorKind::NumericalConsistency, "solution fails the independent feasibility check");
  emit(to_json(s), out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gramforge: certified Gram-dimension bounds, low-rank psd completions, and stretching duals"};
  app.require_subcommand(1);

  gf::RunConfig cfg;
  app.add_option("--tol-rank", cfg.tol_rank, "Relative eigenvalue cutoff for numeric rank")
      ->envname("GRAMFORGE_TOL_RANK");
  app.add_option("--tol-feas", cfg.tol_feas, "Entry agreement tolerance")->envname("GRAMFORGE_TOL_FEAS");
  app.add_option("--tol-gap", cfg.tol_gap, "SDP duality gap tolerance")->envname("GRAMFORGE_TOL_GAP");
  app.add_option("--tol-comp", cfg.tol_comp, "Complementarity tolerance")->envname("GRAMFORGE_TOL_COMP");
  app.add_option("--tol-fit", cfg.tol_fit, "Fit oracle convergence threshold")->envname("GRAMFORGE_TOL_FIT");
  app.add_option("--regularize-eps", cfg.regularize_eps, "Diagonal regularization for boundary data")
      ->envname("GRAMFORGE_REGULARIZE_EPS");
  app.add_option("--seed", cfg.seed, "Random seed")->envname("GRAMFORGE_SEED");
  app.add_option("--max-iters", cfg.max_iters, "SDP iteration cap")->envname("GRAMFORGE_MAX_ITERS");

  std::vector<std::string> certify_inputs;
  int jobs = 1;
  std::string certify_out;
  auto* certify = app.add_subcommand("certify", "Certified bounds on the Gram dimension of graphs");
  certify->add_option("graph", certify_inputs, "Graph JSON files or named:<name>")->required();
  certify->add_option("--jobs", jobs, "Concurrent inputs in batch mode");
  certify->add_option("-o,--out", certify_out, "Output file (stdout when omitted)");
  certify->fallthrough();
  certify->callback([&] { run_certify(certify_inputs, jobs, certify_out); });

  std::string complete_graph, complete_partial, complete_x0, complete_out;
  int complete_k = 0;
  auto* complete = app.add_subcommand("complete", "Rank <= k+1 psd completion of partial k-tree data");
  complete->add_option("graph", complete_graph, "Graph JSON file or named:<name>")->required();
  complete->add_option("partial", complete_partial, "Partial matrix JSON file")->required();
  complete->add_option("-k,--k", complete_k, "Tree width bound")->required();
  complete->add_option("--x0", complete_x0, "Optional psd completion to factor instead of solving");
  complete->add_option("-o,--out", complete_out, "Output file (stdout when omitted)");
  complete->fallthrough();
  complete->callback(
      [&] { run_complete(complete_graph, complete_partial, complete_k, complete_x0, complete_out, cfg); });

  std::string stretch_graph, stretch_partial, stretch_out;
  std::vector<int> stretch_pair;
  auto* stretchc = app.add_subcommand("stretch", "Maximize one unspecified entry; report the dual stress");
  stretchc->add_option("graph", stretch_graph, "Graph JSON file or named:<name>")->required();
  stretchc->add_option("partial", stretch_partial, "Partial matrix JSON file")->required();
  stretchc->add_option("--pair", stretch_pair, "Non-edge i j to stretch (suggested when omitted)")
      ->expected(2);
  stretchc->add_option("-o,--out", stretch_out, "Output file (stdout when omitted)");
  stretchc->fallthrough();
  stretchc->callback([&] { run_stretch(stretch_graph, stretch_partial, stretch_pair, stretch_out, cfg); });

  std::string reduce_problem, reduce_solution, reduce_out;
  bool reduce_preserve = false;
  auto* reduce = app.add_subcommand("reduce", "Move a feasible solution to low rank along null directions");
  reduce->add_option("problem", reduce_problem, "Problem JSON file")->required();
  reduce->add_option("solution", reduce_solution, "Solution or matrix JSON file")->required();
  reduce->add_flag("--preserve-objective", reduce_preserve, "Keep the objective value fixed");
  reduce->add_option("-o,--out", reduce_out, "Output file (stdout when omitted)");
  reduce->fallthrough();
  reduce->callback([&] { run_reduce(reduce_problem, reduce_solution, reduce_preserve, reduce_out, cfg); });

  std::string convert_input, convert_out;
  bool gram_to_edm = false, edm_to_gram = false;
  auto* convert = app.add_subcommand("convert", "Translate between Gram data and squared-distance data");
  convert->add_option("input", convert_input, "Partial matrix, edge values, or configuration JSON file")
      ->required();
  auto* flag_ge = convert->add_flag("--gram-to-edm", gram_to_edm, "Gram data on G to distances on its suspension");
  auto* flag_eg = convert->add_flag("--edm-to-gram", edm_to_gram, "Distances on a suspension back to Gram data");
  flag_ge->excludes(flag_eg);
  convert->fallthrough();
  convert->callback([&] {
    if (!gram_to_edm && !edm_to_gram)
      gf::fail(gf::ErrorKind::ParseError, "pick one of --gram-to-edm / --edm-to-gram");
    run_convert(convert_input, gram_to_edm, convert_out);
  });
  convert->add_option("-o,--out", convert_out, "Output file (stdout when omitted)");

  std::string witness_name, witness_dir, witness_out;
  auto* witness = app.add_subcommand("witness", "Emit a self-checking separation bundle");
  witness->add_option("name", witness_name, "Witness name (k222)")->required();
  witness->add_option("--out-dir", witness_dir, "Also write the bundle as separate files");
  witness->add_option("-o,--out", witness_out, "Output file (stdout when omitted)");
  witness->fallthrough();
  witness->callback([&] { run_witness(witness_name, witness_dir, witness_out); });

  std::string oracle_graph, oracle_data, oracle_out;
  int oracle_k = 0, oracle_restarts = 20;
  bool oracle_edm = false;
  auto* oracle = app.add_subcommand("oracle", "Nonconvex low-rank fit of Gram or distance data");
  oracle->add_option("graph", oracle_graph, "Graph JSON file or named:<name>")->required();
  oracle->add_option("data", oracle_data, "Partial matrix (or, with --edm, edge values) JSON file")
      ->required();
  oracle->add_option("-k,--k", oracle_k, "Target embedding dimension")->required();
  oracle->add_option("--restarts", oracle_restarts, "Random restarts");
  oracle->add_flag("--edm", oracle_edm, "Fit squared distances instead of inner products");
  oracle->add_option("-o,--out", oracle_out, "Output file (stdout when omitted)");
  oracle->fallthrough();
  oracle->callback(
      [&] { run_oracle(oracle_graph, oracle_data, oracle_k, oracle_restarts, oracle_edm, oracle_out, cfg); });

  std::string maxcut_graph, maxcut_out;
  auto* maxcut = app.add_subcommand("maxcut", "Max-cut relaxation value with a rank-reduced solution");
  maxcut->add_option("graph", maxcut_graph, "Graph JSON file or named:<name>")->required();
  maxcut->add_option("-o,--out", maxcut_out, "Output file (stdout when omitted)");
  maxcut->fallthrough();
  maxcut->callback([&] { run_maxcut(maxcut_graph, maxcut_out, cfg); });

  std::string solve_problem, solve_out;
  auto* solve = app.add_subcommand("solve", "Solve a problem file with the interior-point method");
  solve->add_option("problem", solve_problem, "Problem JSON file")->required();
  solve->add_option("-o,--out", solve_out, "Output file (stdout when omitted)");
  solve->fallthrough();
  solve->callback([&] { run_solve(solve_problem, solve_out, cfg); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const gf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
