// Command-line front end: graph generation, weight synthesis, worst-case
// evaluation, step-size and weight tuning, and the heuristic comparison
// table. Artifacts are JSON (tables additionally CSV) and every file embeds
// the resolved configuration that produced it.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wopt/graph.hpp"
#include "wopt/heuristics.hpp"
#include "wopt/pep.hpp"
#include "wopt/spectral.hpp"
#include "wopt/tuner.hpp"

using nlohmann::json;

namespace {

/// Bad flags, unreadable files, schema violations. Exits with code 2,
/// as opposed to DomainError (a well-posed but unanswerable request),
/// which exits with 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// JSON helpers

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

/// JSON has no infinities; non-finite numbers are emitted as strings.
json number_or_label(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "infinity" : "-infinity";
  return v;
}

json graph_to_json(const wopt::Graph& g) {
  json j;
  j["n"] = g.n;
  json edges = json::array();
  for (const auto& [a, b] : g.edges) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  j["name"] = g.name;
  if (g.supplied_orbits) j["orbits"] = g.supplied_orbits->orbit_of_edge;
  return j;
}

wopt::Graph graph_from_json(const json& j, const std::string& origin) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges")) {
    throw UsageError(origin + ": graph JSON needs at least {\"n\": ..., \"edges\": [[i,j],...]}");
  }
  std::vector<wopt::Edge> edges;
  for (const json& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) {
      throw UsageError(origin + ": each edge must be a two-element array");
    }
    edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  wopt::Graph g;
  try {
    g = wopt::make_graph(j.at("n").get<int>(), std::move(edges),
                         j.value("name", std::string{}));
  } catch (const std::invalid_argument& e) {
    throw UsageError(origin + ": " + e.what());
  }
  if (j.contains("orbits")) {
    const std::vector<int> labels = j.at("orbits").get<std::vector<int>>();
    if (static_cast<int>(labels.size()) != g.edge_count()) {
      throw UsageError(origin + ": orbits must list one label per edge");
    }
    int count = 0;
    for (int v : labels) {
      if (v < 0) throw UsageError(origin + ": orbit labels must be non-negative");
      count = std::max(count, v + 1);
    }
    g.supplied_orbits = wopt::OrbitPartition{labels, count};
  }
  return g;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

wopt::Graph load_graph(const std::string& path) {
  return graph_from_json(load_json_file(path), path);
}

Eigen::VectorXd load_weights(const std::string& path, const wopt::Graph& g) {
  const json j = load_json_file(path);
  if (!j.is_object() || !j.contains("w")) {
    throw UsageError(path + ": weights JSON needs {\"w\": [...]} with one value per edge");
  }
  const std::vector<double> w = j.at("w").get<std::vector<double>>();
  if (static_cast<int>(w.size()) != g.edge_count()) {
    throw UsageError(path + ": has " + std::to_string(w.size()) + " weights but the graph has " +
                     std::to_string(g.edge_count()) + " edges");
  }
  const std::string bound_to = j.value("graph", std::string{});
  if (!bound_to.empty() && !g.name.empty() && bound_to != g.name) {
    throw UsageError(path + ": weights were computed for graph '" + bound_to +
                     "' but the supplied graph is '" + g.name + "'");
  }
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << content;
  if (!out) throw UsageError("write failed for " + path);
}

/// Writes pretty-printed JSON to the path, or to stdout when path is empty.
void emit_json(const std::string& path, const json& j) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text(path, j.dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
  }
}

// ---------------------------------------------------------------------------
// Shared flag groups

struct ProblemFlags {
  std::string algorithm = "diging";
  std::string criterion = "rate";
  int horizon = 1;
  double mu = 0.1;
  double L = 1.0;
  std::string init = "mean-square";
  double bound = 1.0;
};

void add_problem_flags(CLI::App* cmd, ProblemFlags& f) {
  cmd->add_option("--algorithm", f.algorithm, "diging, atc-diging, or extra");
  cmd->add_option("--criterion", f.criterion, "rate or fmean");
  cmd->add_option("-K,--K", f.horizon, "number of iterations in the worst-case model");
  cmd->add_option("--mu", f.mu, "strong convexity modulus of the local functions");
  cmd->add_option("--L", f.L, "smoothness constant of the local functions");
  cmd->add_option("--init", f.init, "initial condition: mean-square or ball");
  cmd->add_option("--bound", f.bound, "initial condition radius");
}

wopt::PepSetting to_setting(const ProblemFlags& f) {
  wopt::PepSetting s;
  s.algorithm = wopt::algorithm_from_string(f.algorithm);
  s.criterion = wopt::criterion_from_string(f.criterion);
  s.horizon = f.horizon;
  s.fclass = {f.mu, f.L};
  s.init = wopt::init_from_string(f.init);
  s.init_bound = f.bound;
  return s;
}

struct SolverFlags {
  double tol = 1e-6;
  int max_iter = 200000;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--tol", f.tol, "conic solver residual tolerance");
  cmd->add_option("--max-iter", f.max_iter, "conic solver iteration cap");
}

wopt::SolveOptions to_solve_options(const SolverFlags& f) {
  wopt::SolveOptions o = wopt::default_pep_solve_options();
  o.tol = f.tol;
  o.max_iter = f.max_iter;
  return o;
}

struct SearchFlags {
  int budget = 2000;
  double mesh_tol = 1e-4;
  int jobs = 1;
};

void add_search_flags(CLI::App* cmd, SearchFlags& f) {
  cmd->add_option("--budget", f.budget, "evaluation budget per search");
  cmd->add_option("--mesh-tol", f.mesh_tol, "pattern search stops below this mesh size");
  cmd->add_option("--jobs", f.jobs, "concurrent worst-case evaluations while polling");
}

wopt::SearchOptions to_search_options(const SearchFlags& f, const SolverFlags& s) {
  wopt::SearchOptions o;
  o.max_evals = f.budget;
  o.mesh_tol = f.mesh_tol;
  o.jobs = f.jobs;
  o.solver = to_solve_options(s);
  return o;
}

json config_base(const std::string& subcommand, std::uint64_t seed) {
  json c;
  c["subcommand"] = subcommand;
  c["seed"] = seed;
  return c;
}

void config_add(json& c, const ProblemFlags& f) {
  c["algorithm"] = f.algorithm;
  c["criterion"] = f.criterion;
  c["K"] = f.horizon;
  c["mu"] = f.mu;
  c["L"] = f.L;
  c["init"] = f.init;
  c["bound"] = f.bound;
}

void config_add(json& c, const SolverFlags& f) {
  c["tol"] = f.tol;
  c["max_iter"] = f.max_iter;
}

void config_add(json& c, const SearchFlags& f) {
  c["budget"] = f.budget;
  c["mesh_tol"] = f.mesh_tol;
  c["jobs"] = f.jobs;
}

/// rho and tau describe per-iteration contraction; they are defined for the
/// rate criterion of the gradient-tracking algorithms.
bool has_rate(const wopt::PepSetting& s) {
  return s.criterion == wopt::Criterion::RateIterates &&
         s.algorithm != wopt::AlgorithmId::Extra;
}

void add_rate_fields(json& j, const wopt::PepSetting& s, double value) {
  if (!has_rate(s)) return;
  const double r2 = s.init_bound * s.init_bound;
  const double rho = std::pow(std::max(value, 0.0) / r2, 1.0 / (2.0 * s.horizon));
  j["rho"] = number_or_label(rho);
  j["tau"] = number_or_label(rho >= 1.0 ? std::numeric_limits<double>::infinity()
                             : rho <= 0.0 ? 0.0
                                          : 1.0 / std::log(1.0 / rho));
}

json pep_result_json(const wopt::PepResult& r) {
  json j;
  j["value"] = number_or_label(r.value);
  j["status"] = wopt::to_string(r.status);
  j["iterations"] = r.iterations;
  j["residuals"] = {{"primal", number_or_label(r.residuals.primal)},
                    {"dual", number_or_label(r.residuals.dual)},
                    {"gap", number_or_label(r.residuals.gap)}};
  return j;
}

// ---------------------------------------------------------------------------
// Subcommand state and actions

struct GraphArgs {
  std::string topology;
  int n = 0;
  double p = 0.5;
  std::string in_path;
  std::string out_path;
};

void run_graph(const GraphArgs& a, std::uint64_t seed) {
  if (a.topology.empty() == a.in_path.empty()) {
    throw UsageError("graph needs exactly one of --topology or --in");
  }
  wopt::Graph g;
  if (!a.in_path.empty()) {
    g = load_graph(a.in_path);
  } else if (a.topology == "erdos-renyi") {
    if (a.n <= 0) throw UsageError("--topology requires --n");
    g = wopt::erdos_renyi(a.n, a.p, seed);
  } else {
    if (a.n <= 0) throw UsageError("--topology requires --n");
    wopt::Topology kind;
    try {
      kind = wopt::topology_from_string(a.topology);
    } catch (const std::invalid_argument&) {
      throw UsageError("unknown topology '" + a.topology +
                       "'; expected complete, star, cycle, grid, or erdos-renyi");
    }
    g = wopt::make_topology(kind, a.n);
  }
  json j = graph_to_json(g);
  json c = config_base("graph", seed);
  c["topology"] = a.topology;
  c["n"] = g.n;
  if (a.topology == "erdos-renyi") c["p"] = a.p;
  if (!a.in_path.empty()) c["in"] = a.in_path;
  j["config"] = std::move(c);
  emit_json(a.out_path, j);
}

struct WeightsArgs {
  std::string heuristic;
  std::string graph_path;
  std::vector<double> gamma;
  double eps = 0.0;
  bool orbit_tied = false;
  std::string out_path;
};

void run_weights(const WeightsArgs& a, const SolverFlags& sf, std::uint64_t seed) {
  const wopt::Graph g = load_graph(a.graph_path);
  wopt::HeuristicId id;
  try {
    id = wopt::heuristic_from_string(a.heuristic);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  wopt::HeuristicOptions opts;
  opts.solver = to_solve_options(sf);
  opts.eps = a.eps;
  if (!a.gamma.empty()) {
    opts.gamma = Eigen::Map<const Eigen::VectorXd>(a.gamma.data(),
                                                   static_cast<Eigen::Index>(a.gamma.size()));
  }
  if (a.orbit_tied) opts.orbit_tied = true;

  const wopt::HeuristicResult res = wopt::run_heuristic(id, g, opts);
  const wopt::Spectrum sp = wopt::spectrum(res.M);

  json j;
  j["graph"] = g.name;
  j["heuristic"] = a.heuristic;
  j["w"] = to_json(*res.M.w);
  j["value"] = number_or_label(res.value);
  j["slem"] = number_or_label(wopt::slem(res.M));
  j["spectrum"] = to_json(sp.eigenvalues);
  json c = config_base("weights", seed);
  c["heuristic"] = a.heuristic;
  c["graph"] = a.graph_path;
  c["gamma"] = a.gamma;
  c["eps"] = a.eps;
  c["orbit_tied"] = a.orbit_tied ? json(true) : json("auto");
  config_add(c, sf);
  j["config"] = std::move(c);
  emit_json(a.out_path, j);
}

struct EvaluateArgs {
  std::string graph_path;
  std::string weights_path;
  double alpha = 0.0;
  std::string out_path;
};

void run_evaluate(const EvaluateArgs& a, const ProblemFlags& pf, const SolverFlags& sf,
                  std::uint64_t seed) {
  const wopt::Graph g = load_graph(a.graph_path);
  const Eigen::VectorXd w = load_weights(a.weights_path, g);
  const wopt::PepSetting setting = to_setting(pf);
  const wopt::AveragingMatrix W = wopt::averaging_from_weights(g, w);
  const wopt::PepResult res = wopt::evaluate(setting, W, a.alpha, to_solve_options(sf));

  json j = pep_result_json(res);
  add_rate_fields(j, setting, res.value);
  json c = config_base("evaluate", seed);
  c["graph"] = a.graph_path;
  c["weights"] = a.weights_path;
  c["alpha"] = a.alpha;
  config_add(c, pf);
  config_add(c, sf);
  j["config"] = std::move(c);
  emit_json(a.out_path, j);
}

struct TuneAlphaArgs {
  std::string graph_path;
  std::string weights_path;
  double lo = 1e-3;
  double hi = 2.0;
  int grid = 25;
  std::string out_path;
};

void run_tune_alpha(const TuneAlphaArgs& a, const ProblemFlags& pf, const SolverFlags& sf,
                    const SearchFlags& gf, std::uint64_t seed) {
  const wopt::Graph g = load_graph(a.graph_path);
  const Eigen::VectorXd w = load_weights(a.weights_path, g);
  const wopt::PepSetting setting = to_setting(pf);
  const wopt::AveragingMatrix W = wopt::averaging_from_weights(g, w);
  const wopt::AlphaResult res =
      wopt::tune_alpha(setting, W, a.lo, a.hi, a.grid, to_search_options(gf, sf));

  json j;
  j["alpha"] = res.alpha;
  j["value"] = number_or_label(res.value);
  j["evaluations"] = res.evaluations;
  j["status"] = wopt::to_string(res.pep.status);
  add_rate_fields(j, setting, res.value);
  json c = config_base("tune-alpha", seed);
  c["graph"] = a.graph_path;
  c["weights"] = a.weights_path;
  c["lo"] = a.lo;
  c["hi"] = a.hi;
  c["grid"] = a.grid;
  config_add(c, pf);
  config_add(c, sf);
  config_add(c, gf);
  j["config"] = std::move(c);
  emit_json(a.out_path, j);
}

struct TuneArgs {
  std::string graph_path;
  bool per_edge = false;
  std::string out_path;
};

void run_tune(const TuneArgs& a, const ProblemFlags& pf, const SolverFlags& sf,
              const SearchFlags& gf, std::uint64_t seed) {
  const wopt::Graph g = load_graph(a.graph_path);
  const wopt::PepSetting setting = to_setting(pf);
  const wopt::TuneResult res =
      wopt::tune_weights(setting, g, to_search_options(gf, sf), !a.per_edge);

  json j;
  j["graph"] = g.name;
  j["w"] = to_json(res.w);
  j["alpha"] = res.alpha;
  j["value"] = number_or_label(res.value);
  j["evaluations"] = res.evaluations;
  j["status"] = wopt::to_string(res.pep.status);
  add_rate_fields(j, setting, res.value);
  json trace = json::array();
  for (const wopt::SearchStep& s : res.trace) {
    trace.push_back({{"point", to_json(s.point)},
                     {"value", number_or_label(s.value)},
                     {"mesh", s.mesh}});
  }
  j["trace"] = std::move(trace);
  json c = config_base("tune", seed);
  c["graph"] = a.graph_path;
  c["per_edge"] = a.per_edge;
  config_add(c, pf);
  config_add(c, sf);
  config_add(c, gf);
  j["config"] = std::move(c);
  emit_json(a.out_path, j);
}

struct CompareArgs {
  std::string graph_path;
  std::string out_path;
};

json compare_json(const wopt::CompareResult& res) {
  json rows = json::array();
  for (const wopt::CompareRow& row : res.rows) {
    json r;
    r["heuristic"] = row.name;
    r["ok"] = row.ok;
    if (row.ok) {
      r["alpha"] = row.alpha;
      r["E"] = number_or_label(row.value);
      if (!std::isnan(row.rho)) {
        r["rho"] = number_or_label(row.rho);
        r["tau"] = number_or_label(row.tau);
      }
      r["w"] = to_json(row.w);
      r["spectrum"] = to_json(row.eigs);
    } else {
      r["note"] = row.note;
    }
    rows.push_back(std::move(r));
  }
  json j;
  j["graph"] = res.graph.name;
  j["rows"] = std::move(rows);
  return j;
}

void run_compare(const CompareArgs& a, const ProblemFlags& pf, const SolverFlags& sf,
                 const SearchFlags& gf, std::uint64_t seed) {
  const wopt::Graph g = load_graph(a.graph_path);
  const wopt::PepSetting setting = to_setting(pf);
  const wopt::CompareResult res = wopt::compare(setting, g, to_search_options(gf, sf));
  const std::string csv = wopt::to_csv(res);

  json j = compare_json(res);
  json c = config_base("compare", seed);
  c["graph"] = a.graph_path;
  config_add(c, pf);
  config_add(c, sf);
  config_add(c, gf);
  j["config"] = std::move(c);

  if (a.out_path.empty()) {
    std::cout << csv;
    std::cout << j.dump(2) << "\n";
    return;
  }
  write_text(a.out_path, csv);
  std::cout << "wrote " << a.out_path << "\n";
  std::string json_path = a.out_path;
  const std::size_t dot = json_path.find_last_of('.');
  if (dot != std::string::npos && json_path.find('/', dot) == std::string::npos) {
    json_path.resize(dot);
  }
  json_path += ".json";
  emit_json(json_path, j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"worst-case toolkit for decentralized averaging and optimization"};
  app.require_subcommand(1);
  app.fallthrough();  // lets --seed appear after the subcommand name
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "seed for all randomized steps")->capture_default_str();

  GraphArgs ga;
  CLI::App* graph = app.add_subcommand("graph", "generate or re-emit a graph as JSON");
  graph->add_option("--topology", ga.topology, "complete, star, cycle, grid, or erdos-renyi");
  graph->add_option("--n", ga.n, "number of nodes");
  graph->add_option("--p", ga.p, "edge probability for erdos-renyi");
  graph->add_option("--in", ga.in_path, "load this graph file instead of generating");
  graph->add_option("--out", ga.out_path, "output path (stdout when omitted)");

  WeightsArgs wa;
  SolverFlags wa_solver;
  CLI::App* weights = app.add_subcommand("weights", "compute heuristic edge weights");
  weights->add_option("--heuristic", wa.heuristic, "weight rule, e.g. metropolis or min-slem")
      ->required();
  weights->add_option("--graph", wa.graph_path, "graph JSON file")->required();
  weights->add_option("--gamma", wa.gamma, "spectral weights for min-nuclear");
  weights->add_option("--eps", wa.eps, "per-node slack for min-rtot");
  weights->add_flag("--orbit-tied", wa.orbit_tied, "force orbit-tied SDP variables");
  weights->add_option("--out", wa.out_path, "output path (stdout when omitted)");
  add_solver_flags(weights, wa_solver);

  EvaluateArgs ea;
  ProblemFlags ea_problem;
  SolverFlags ea_solver;
  CLI::App* evaluate = app.add_subcommand("evaluate", "worst-case performance at fixed weights");
  evaluate->add_option("--graph", ea.graph_path, "graph JSON file")->required();
  evaluate->add_option("--weights", ea.weights_path, "weights JSON file")->required();
  evaluate->add_option("--alpha", ea.alpha, "step-size")->required();
  evaluate->add_option("--out", ea.out_path, "output path (stdout when omitted)");
  add_problem_flags(evaluate, ea_problem);
  add_solver_flags(evaluate, ea_solver);

  TuneAlphaArgs ta;
  ProblemFlags ta_problem;
  SolverFlags ta_solver;
  SearchFlags ta_search;
  CLI::App* tune_alpha = app.add_subcommand("tune-alpha", "tune the step-size for fixed weights");
  tune_alpha->add_option("--graph", ta.graph_path, "graph JSON file")->required();
  tune_alpha->add_option("--weights", ta.weights_path, "weights JSON file")->required();
  tune_alpha->add_option("--lo", ta.lo, "scan lower end, in units of 1/L");
  tune_alpha->add_option("--hi", ta.hi, "scan upper end, in units of 1/L");
  tune_alpha->add_option("--grid", ta.grid, "number of scan points");
  tune_alpha->add_option("--out", ta.out_path, "output path (stdout when omitted)");
  add_problem_flags(tune_alpha, ta_problem);
  add_solver_flags(tune_alpha, ta_solver);
  add_search_flags(tune_alpha, ta_search);

  TuneArgs tu;
  ProblemFlags tu_problem;
  SolverFlags tu_solver;
  SearchFlags tu_search;
  CLI::App* tune = app.add_subcommand("tune", "jointly tune edge weights and step-size");
  tune->add_option("--graph", tu.graph_path, "graph JSON file")->required();
  tune->add_flag("--per-edge", tu.per_edge, "search one weight per edge instead of per orbit");
  tune->add_option("--out", tu.out_path, "output path (stdout when omitted)");
  add_problem_flags(tune, tu_problem);
  add_solver_flags(tune, tu_solver);
  add_search_flags(tune, tu_search);

  CompareArgs ca;
  ProblemFlags ca_problem;
  SolverFlags ca_solver;
  SearchFlags ca_search;
  CLI::App* compare = app.add_subcommand("compare", "heuristic table plus the tuned-weights row");
  compare->add_option("--graph", ca.graph_path, "graph JSON file")->required();
  compare->add_option("--out", ca.out_path, "CSV path; a JSON twin is written alongside");
  add_problem_flags(compare, ca_problem);
  add_solver_flags(compare, ca_solver);
  add_search_flags(compare, ca_search);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (graph->parsed()) {
      run_graph(ga, seed);
    } else if (weights->parsed()) {
      run_weights(wa, wa_solver, seed);
    } else if (evaluate->parsed()) {
      run_evaluate(ea, ea_problem, ea_solver, seed);
    } else if (tune_alpha->parsed()) {
      run_tune_alpha(ta, ta_problem, ta_solver, ta_search, seed);
    } else if (tune->parsed()) {
      run_tune(tu, tu_problem, tu_solver, tu_search, seed);
    } else if (compare->parsed()) {
      run_compare(ca, ca_problem, ca_solver, ca_search, seed);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const wopt::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
