// Acceptance gate: six end-to-end checks covering the weight heuristics,
// the worst-case solver, and the tuner, against hand-computed optima,
// simulated lower bounds, and the toolkit's own structural invariants.
// Prints one PASS/FAIL line per check; exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "support/quadratic.hpp"
#include "wopt/graph.hpp"
#include "wopt/heuristics.hpp"
#include "wopt/pep.hpp"
#include "wopt/spectral.hpp"
#include "wopt/tuner.hpp"

namespace {

using namespace wopt;

const double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct Tally {
  bool ok = true;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      std::printf("  FAIL %s\n", what.c_str());
      std::fflush(stdout);
    }
  }

  void near(double got, double want, double tol, const std::string& what) {
    require(std::isfinite(got) && std::abs(got - want) <= tol,
            what + ": got " + fmt(got) + ", want " + fmt(want) + " +- " + fmt(tol));
  }
};

PepSetting diging_rate(int horizon) {
  PepSetting s;
  s.algorithm = AlgorithmId::DIGing;
  s.horizon = horizon;
  s.criterion = Criterion::RateIterates;
  s.init = InitCondition::MeanSquare;
  return s;
}

PepSetting extra_fmean(int horizon) {
  PepSetting s;
  s.algorithm = AlgorithmId::Extra;
  s.horizon = horizon;
  s.criterion = Criterion::FunctionalAtMean;
  s.init = InitCondition::PerAgentBall;
  return s;
}

// Restart for tune_weights: one weight per edge orbit, then the step-size.
// Heuristic outputs are orbit-averaged, so any representative edge works.
Eigen::VectorXd restart_point(const Graph& g, const Eigen::VectorXd& per_edge, double alpha) {
  const OrbitPartition orbits = edge_orbits(g);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(orbits.orbit_count + 1);
  for (int e = 0; e < g.edge_count(); ++e) z[orbits.orbit_of_edge[e]] = per_edge[e];
  z[orbits.orbit_count] = alpha;
  return z;
}

// ---------------------------------------------------------------------------
// Check 1: closed-form weight heuristics.

bool closed_form_heuristics() {
  Tally t;
  auto uniform_weight = [&](Topology kind) {
    const Graph g = make_topology(kind, 9);
    const HeuristicResult r = uniform_optimal(g);
    const Eigen::VectorXd& w = *r.M.w;
    t.require((w.array() - w[0]).abs().maxCoeff() <= 1e-12,
              "uniform-optimal weights differ across edges on " + g.name);
    return w[0];
  };
  t.near(uniform_weight(Topology::Complete), 1.0 / 9.0, 1e-6, "uniform-optimal q on complete(9)");
  t.near(uniform_weight(Topology::Star), 0.2, 1e-6, "uniform-optimal q on star(9)");
  t.near(uniform_weight(Topology::Cycle), 0.460057, 1e-6, "uniform-optimal q on cycle(9)");

  const Eigen::VectorXd wg = *metropolis(make_topology(Topology::Grid, 9)).M.w;
  bool quarter = false, fifth = false;
  for (int e = 0; e < wg.size(); ++e) {
    if (std::abs(wg[e] - 0.25) <= 1e-12)
      quarter = true;
    else if (std::abs(wg[e] - 0.2) <= 1e-12)
      fifth = true;
    else
      t.require(false, "metropolis weight on grid(9) outside {1/4, 1/5}: " + fmt(wg[e]));
  }
  t.require(quarter && fifth, "metropolis on grid(9) should use both 1/4 and 1/5");

  const Eigen::VectorXd wd = *max_degree(make_topology(Topology::Star, 9)).M.w;
  t.near(wd.minCoeff(), 1.0 / 9.0, 1e-12, "max-degree weight on star(9), smallest");
  t.near(wd.maxCoeff(), 1.0 / 9.0, 1e-12, "max-degree weight on star(9), largest");
  return t.ok;
}

// ---------------------------------------------------------------------------
// Check 2: optimization-based weight heuristics against analytic optima.

bool heuristic_solver_oracles() {
  Tally t;
  const Graph complete = make_topology(Topology::Complete, 9);
  const Graph star = make_topology(Topology::Star, 9);

  t.near(min_slem(star).value, 0.8, 1e-4, "min-slem value on star(9)");
  t.near(min_slem(complete).value, 0.0, 1e-4, "min-slem value on complete(9)");
  t.near(min_rtot(complete).value, 64.0, 1e-3, "min-rtot value on complete(9)");

  const HeuristicResult ds = min_delta_ss(complete);
  const Eigen::VectorXd& wds = *ds.M.w;
  t.near(wds.minCoeff(), 1.0 / 9.0, 1e-4, "min-delta-ss weight on complete(9), smallest");
  t.near(wds.maxCoeff(), 1.0 / 9.0, 1e-4, "min-delta-ss weight on complete(9), largest");
  t.near(ds.value, 8.0, 1e-4, "min-delta-ss value on complete(9)");

  // The complete graph has a uniform optimizer, so a dense scan over the
  // single shared weight brackets the true minimum of the nuclear norm.
  const Eigen::VectorXd gamma = Eigen::VectorXd::Ones(9);
  double scanned = kInf;
  for (double q = 1e-5; q <= 0.25; q += 1e-5) {
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(complete.edge_count(), q);
    scanned = std::min(scanned, weighted_nuclear_norm(averaging_from_weights(complete, w), gamma));
  }
  t.near(min_nuclear(complete).value, scanned, 1e-3, "min-nuclear value on complete(9) vs scan");
  return t.ok;
}

// ---------------------------------------------------------------------------
// Check 3: single-agent worst cases against the gradient-descent rate.

bool single_agent_anchor() {
  Tally t;
  const AveragingMatrix W = averaging_from_weights(make_graph(1, {}), Eigen::VectorXd::Zero(0));
  const PepSetting s = diging_rate(1);
  SolveOptions tight;
  tight.tol = 1e-8;
  tight.max_iter = 1000000;
  for (double alpha : {0.5, 1.0, 1.818, 2.2}) {
    const double contraction = std::max(std::abs(1.0 - 0.1 * alpha), std::abs(1.0 - alpha));
    const PepResult r = evaluate(s, W, alpha, tight);
    t.require(r.status == PepStatus::Optimal,
              "single-agent solve at step " + fmt(alpha) + ": " + to_string(r.status));
    t.near(r.value, contraction * contraction, 1e-4, "single-agent worst case at step " + fmt(alpha));
  }

  const AlphaResult tuned = tune_alpha(s, W);
  t.near(tuned.alpha, 2.0 / 1.1, 1e-2, "tuned single-agent step-size");
  t.near(std::sqrt(tuned.value), 0.9 / 1.1, 1e-2, "tuned single-agent contraction factor");
  std::printf("  tuned step %.4f, contraction %.4f\n", tuned.alpha, std::sqrt(tuned.value));
  return t.ok;
}

// ---------------------------------------------------------------------------
// Check 4: worst-case values dominate simulated quadratic instances.

bool dominates_simulation() {
  Tally t;
  const double alpha = 0.1;
  const int runs = 500;
  SolveOptions opts = default_pep_solve_options();
  opts.max_iter = 1000000;  // the five-step solves need more than the default cap
  struct Mode {
    PepSetting s;
    const char* label;
  };
  const Mode modes[2] = {{diging_rate(1), "diging one-step distance"},
                         {extra_fmean(5), "extra five-step function gap"}};
  int seed = 1000;
  for (Topology kind : {Topology::Complete, Topology::Star, Topology::Cycle, Topology::Grid}) {
    const Graph g = make_topology(kind, 9);
    const AveragingMatrix W = metropolis(g).M;
    for (const Mode& mode : modes) {
      const PepResult r = evaluate(mode.s, W, alpha, opts);
      t.require(r.status == PepStatus::Optimal,
                std::string(mode.label) + " on " + g.name + ": " + to_string(r.status));
      std::mt19937_64 rng(seed++);
      double best = 0.0;
      for (int k = 0; k < runs; ++k) {
        const int dim = 1 + k % 3;
        const testsupport::QuadraticInstance inst =
            testsupport::random_instance(g.n, dim, mode.s.fclass.mu, mode.s.fclass.L, rng);
        const Eigen::MatrixXd X0 = testsupport::random_start(inst, mode.s.init, rng);
        const std::vector<Eigen::MatrixXd> xs =
            testsupport::simulate(inst, mode.s.algorithm, W.W, alpha, mode.s.horizon, X0);
        const double v = mode.s.criterion == Criterion::RateIterates
                             ? testsupport::rate_value(inst, xs)
                             : testsupport::fmean_value(inst, xs);
        best = std::max(best, v);
      }
      t.require(r.value >= best - 1e-6,
                std::string(mode.label) + " on " + g.name + ": worst case " + fmt(r.value) +
                    " below simulated " + fmt(best));
      std::printf("  %s, %s: worst case %.6f, best of %d runs %.6f\n", g.name.c_str(), mode.label,
                  r.value, runs, best);
      std::fflush(stdout);
    }
  }
  return t.ok;
}

// ---------------------------------------------------------------------------
// Check 5: jointly tuned weights dominate the tuned slem-optimal weights,
// with a required measurable gap on the star.

bool tuned_weights_dominate() {
  Tally t;
  SolveOptions fast = default_pep_solve_options();
  fast.tol = 1e-5;  // search accuracy; final figures are re-solved tighter
  const SolveOptions tight = default_pep_solve_options();
  SearchOptions alpha_opts;
  alpha_opts.solver = fast;

  // One-step dominance on every topology. The joint search restarts from
  // both tuned heuristics, and pattern search never accepts a worse point,
  // so equality is the worst admissible outcome.
  const PepSetting one = diging_rate(1);
  for (Topology kind : {Topology::Complete, Topology::Star, Topology::Cycle, Topology::Grid}) {
    const Graph g = make_topology(kind, 9);
    const HeuristicResult ms = min_slem(g);
    const HeuristicResult mt = metropolis(g);
    const AlphaResult a_ms = tune_alpha(one, ms.M, 1e-3, 2.0, 25, alpha_opts);
    const AlphaResult a_mt = tune_alpha(one, mt.M, 1e-3, 2.0, 25, alpha_opts);
    SearchOptions joint;
    joint.solver = fast;
    joint.max_evals = 60;
    joint.initial_mesh = 0.125;
    joint.restarts = {restart_point(g, *ms.M.w, a_ms.alpha),
                      restart_point(g, *mt.M.w, a_mt.alpha)};
    const TuneResult tw = tune_weights(one, g, joint);
    t.require(tw.value <= a_ms.value + 1e-8, g.name + ": tuned weights lost to slem-optimal");
    t.require(tw.value <= a_mt.value + 1e-8, g.name + ": tuned weights lost to metropolis");
    std::printf("  %s one-step: slem-optimal %.6f, metropolis %.6f, tuned %.6f\n", g.name.c_str(),
                a_ms.value, a_mt.value, tw.value);
    std::fflush(stdout);
  }

  // Star, three-step window: the slem-optimal weight balances the two
  // spectrum tails at +-0.8, but the worst case prefers a slightly smaller
  // weight whose negative tail is shorter than the positive one. Demand at
  // least a 0.5% smaller worst case from the joint search.
  const Graph star = make_topology(Topology::Star, 9);
  const PepSetting three = diging_rate(3);
  const HeuristicResult ms = min_slem(star);
  const AlphaResult a_ms = tune_alpha(three, ms.M, 5e-3, 0.5, 13, alpha_opts);

  // Coarse sweep over the weight range below the slem-optimal point seeds
  // the second restart of the joint search.
  Eigen::VectorXd sweep_best = restart_point(star, *ms.M.w, a_ms.alpha);
  double sweep_value = a_ms.value;
  for (double q : {0.15, 0.1625, 0.175, 0.1875}) {
    for (double al : {0.035, 0.04, 0.045, 0.05}) {
      const AveragingMatrix Wq =
          averaging_from_weights(star, Eigen::VectorXd::Constant(star.edge_count(), q));
      const double v = evaluate(three, Wq, al, fast).value;
      if (v < sweep_value) {
        sweep_value = v;
        sweep_best << q, al;
      }
    }
  }
  SearchOptions joint;
  joint.solver = fast;
  joint.max_evals = 90;
  joint.initial_mesh = 0.0625;
  joint.restarts = {restart_point(star, *ms.M.w, a_ms.alpha), sweep_best};
  const TuneResult tw = tune_weights(three, star, joint);

  const double e_ms = evaluate(three, ms.M, a_ms.alpha, tight).value;
  const double e_opt = evaluate(three, averaging_from_weights(star, tw.w), tw.alpha, tight).value;
  const double gain = (e_ms - e_opt) / e_ms;
  std::printf("  star(9) three-step: slem-optimal %.6f, tuned %.6f (weight %.4f, step %.4f)\n",
              e_ms, e_opt, tw.w[0], tw.alpha);
  std::printf("  improvement %.2f%%, per-step factors %.6f vs %.6f\n", 100.0 * gain,
              std::pow(e_ms, 1.0 / 6.0), std::pow(e_opt, 1.0 / 6.0));
  std::fflush(stdout);
  t.require(gain >= 0.005, "tuned weights should beat tuned slem-optimal weights by >= 0.5%");

  // Grid, three-step window: Metropolis is expected to beat the
  // slem-optimal weights here, but the ordering can flip with the curvature
  // bounds mu and L, so a reversal is reported rather than failed.
  const Graph grid = make_topology(Topology::Grid, 9);
  const HeuristicResult gms = min_slem(grid);
  const HeuristicResult gmt = metropolis(grid);
  const AlphaResult ga_ms = tune_alpha(three, gms.M, 5e-3, 0.5, 13, alpha_opts);
  const AlphaResult ga_mt = tune_alpha(three, gmt.M, 5e-3, 0.5, 13, alpha_opts);
  const double e_grid_mt = evaluate(three, gmt.M, ga_mt.alpha, tight).value;
  const double e_grid_ms = evaluate(three, gms.M, ga_ms.alpha, tight).value;
  if (e_grid_mt <= e_grid_ms + 1e-6)
    std::printf("  grid(9) three-step: metropolis %.6f <= slem-optimal %.6f, as expected\n",
                e_grid_mt, e_grid_ms);
  else
    std::printf(
        "  grid(9) three-step: metropolis %.6f > slem-optimal %.6f; noted, not failed: "
        "the ordering depends on the curvature bounds\n",
        e_grid_mt, e_grid_ms);
  return t.ok;
}

// ---------------------------------------------------------------------------
// Check 6: structural invariants.

double interpolation_residual(const WorstCaseInstance& inst, double mu, double L) {
  const double beta = 1.0 / (2.0 * (1.0 - mu / L));
  const int n = static_cast<int>(inst.f_star.size());
  const int steps = static_cast<int>(inst.iterates.size());
  double worst = -kInf;
  for (int i = 0; i < n; ++i) {
    std::vector<Eigen::VectorXd> x, gr;
    std::vector<double> f;
    for (int k = 0; k < steps; ++k) {
      x.push_back(inst.iterates[k].row(i).transpose());
      gr.push_back(inst.gradients[k].row(i).transpose());
      f.push_back(inst.f_iterates(k, i));
    }
    if (inst.mean_point.size() > 0) {
      x.push_back(inst.mean_point.transpose());
      gr.push_back(inst.mean_gradients.row(i).transpose());
      f.push_back(inst.f_mean(i));
    }
    x.push_back(Eigen::VectorXd::Zero(inst.dim));
    gr.push_back(inst.star_gradients.row(i).transpose());
    f.push_back(inst.f_star(i));

    for (std::size_t u = 0; u < x.size(); ++u) {
      for (std::size_t v = 0; v < x.size(); ++v) {
        if (u == v) continue;
        const Eigen::VectorXd du = x[u] - x[v];
        const Eigen::VectorXd dg = gr[u] - gr[v];
        const double lhs = f[v] - f[u] + gr[v].dot(du) +
                           beta * (dg.squaredNorm() / L + mu * du.squaredNorm() -
                                   (2.0 * mu / L) * dg.dot(du));
        worst = std::max(worst, lhs);
      }
    }
  }
  return worst;
}

bool structural_invariants() {
  Tally t;

  // Averaging invariants and orbit-equal weights for every heuristic output.
  std::vector<Graph> graphs;
  for (Topology kind : {Topology::Complete, Topology::Star, Topology::Cycle, Topology::Grid})
    graphs.push_back(make_topology(kind, 9));
  graphs.push_back(erdos_renyi(9, 0.4, 1));
  for (const Graph& g : graphs) {
    const OrbitPartition orbits = edge_orbits(g);
    Eigen::MatrixXi adjacent = Eigen::MatrixXi::Zero(g.n, g.n);
    for (const Edge& e : g.edges) adjacent(e.first, e.second) = adjacent(e.second, e.first) = 1;
    for (HeuristicId id : all_heuristics()) {
      const HeuristicResult r = run_heuristic(id, g);
      const std::string tag = std::string(to_string(id)) + " on " + g.name;
      const Eigen::MatrixXd& W = r.M.W;
      t.require((W - W.transpose()).cwiseAbs().maxCoeff() <= 1e-12, tag + ": not symmetric");
      t.require((W.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9,
                tag + ": rows do not sum to one");
      t.require(slem(r.M) < 1.0, tag + ": no spectral contraction");
      double off = 0.0;
      for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
          if (i != j && adjacent(i, j) == 0) off = std::max(off, std::abs(W(i, j)));
      t.require(off <= 1e-12, tag + ": weight off the edge set");
      const Eigen::VectorXd& w = *r.M.w;
      for (int o = 0; o < orbits.orbit_count; ++o) {
        double lo = kInf, hi = -kInf;
        for (int e = 0; e < g.edge_count(); ++e) {
          if (orbits.orbit_of_edge[e] != o) continue;
          lo = std::min(lo, w[e]);
          hi = std::max(hi, w[e]);
        }
        t.require(hi - lo <= 1e-8, tag + ": unequal weights inside an edge orbit");
      }
    }
  }
  std::printf("  averaging invariants hold for %d heuristics on %d graphs\n",
              static_cast<int>(all_heuristics().size()), static_cast<int>(graphs.size()));
  std::fflush(stdout);

  // Analytic delta_ss gradient against central differences.
  {
    const Graph g = make_topology(Topology::Grid, 9);
    std::mt19937_64 rng(11);
    Eigen::VectorXd w(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e)
      w[e] = 0.12 + 0.1 * static_cast<double>(rng() % 1000) / 1000.0;
    const Eigen::VectorXd grad = delta_ss_gradient(g, w);
    const double h = 1e-6;
    for (int e = 0; e < g.edge_count(); ++e) {
      Eigen::VectorXd up = w, dn = w;
      up[e] += h;
      dn[e] -= h;
      const double fd = (delta_ss(averaging_from_weights(g, up)) -
                         delta_ss(averaging_from_weights(g, dn))) /
                        (2.0 * h);
      t.require(std::abs(grad[e] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)),
                "delta_ss gradient vs differences at edge " + std::to_string(e));
    }
  }

  // Recovered worst-case instances satisfy the interpolation constraints.
  {
    SolveOptions tight = default_pep_solve_options();
    tight.tol = 1e-7;
    tight.max_iter = 600000;
    const Graph cycle5 = make_topology(Topology::Cycle, 5);
    const PepResult r1 = evaluate(diging_rate(1), metropolis(cycle5).M, 0.8, tight);
    t.require(r1.status == PepStatus::Optimal, "cycle(5) recovery solve");
    const double res1 = interpolation_residual(recover_worst_case(r1), 0.1, 1.0);
    t.require(res1 <= 1e-6, "recovered cycle(5) instance violates interpolation by " + fmt(res1));

    const Graph cycle3 = make_topology(Topology::Cycle, 3);
    const PepResult r2 = evaluate(extra_fmean(2), metropolis(cycle3).M, 0.4, tight);
    t.require(r2.status == PepStatus::Optimal, "cycle(3) recovery solve");
    const double res2 = interpolation_residual(recover_worst_case(r2), 0.1, 1.0);
    t.require(res2 <= 1e-6, "recovered cycle(3) instance violates interpolation by " + fmt(res2));
    std::printf("  interpolation residuals %.2e and %.2e\n", res1, res2);
  }

  // A non-contracting matrix yields an infinite worst case, not a number.
  {
    const Graph cycle5 = make_topology(Topology::Cycle, 5);
    const AveragingMatrix identity =
        averaging_from_weights(cycle5, Eigen::VectorXd::Zero(cycle5.edge_count()));
    const PepResult r = evaluate(diging_rate(1), identity, 0.5);
    t.require(r.status == PepStatus::Divergent && r.value == kInf,
              "identity averaging should report an infinite worst case");
  }

  // The joint tuner never returns a value above any of its restarts.
  SearchOptions joint;
  {
    const Graph cycle3 = make_topology(Topology::Cycle, 3);
    const PepSetting one = diging_rate(1);
    SolveOptions fast = default_pep_solve_options();
    fast.tol = 1e-5;
    joint.solver = fast;
    joint.max_evals = 50;
    Eigen::VectorXd r1(2), r2(2);
    r1 << 1.0 / 3.0, 0.1;
    r2 << 0.25, 0.3;
    joint.restarts = {r1, r2};
    const TuneResult tw = tune_weights(one, cycle3, joint);
    for (const Eigen::VectorXd& z : joint.restarts) {
      const AveragingMatrix W =
          averaging_from_weights(cycle3, Eigen::VectorXd::Constant(cycle3.edge_count(), z[0]));
      const double started = evaluate(one, W, z[1], fast).value;
      t.require(tw.value <= started + 1e-9,
                "tuner finished above its restart at weight " + fmt(z[0]));
    }
  }

  // Reruns with identical inputs are bit-identical.
  {
    const Graph star = make_topology(Topology::Star, 9);
    const Eigen::VectorXd w1 = *min_slem(star).M.w;
    const Eigen::VectorXd w2 = *min_slem(star).M.w;
    t.require(w1.size() == w2.size() && (w1.array() == w2.array()).all(),
              "min-slem weights changed between reruns");

    const Graph cycle5 = make_topology(Topology::Cycle, 5);
    const PepResult e1 = evaluate(diging_rate(1), metropolis(cycle5).M, 0.8);
    const PepResult e2 = evaluate(diging_rate(1), metropolis(cycle5).M, 0.8);
    t.require(e1.value == e2.value && e1.iterations == e2.iterations,
              "worst-case solve changed between reruns");

    const Graph cycle3 = make_topology(Topology::Cycle, 3);
    const TuneResult t1 = tune_weights(diging_rate(1), cycle3, joint);
    const TuneResult t2 = tune_weights(diging_rate(1), cycle3, joint);
    t.require((t1.w.array() == t2.w.array()).all() && t1.alpha == t2.alpha &&
                  t1.value == t2.value,
              "joint tuning changed between reruns");

    const Graph g1 = erdos_renyi(9, 0.4, 7);
    const Graph g2 = erdos_renyi(9, 0.4, 7);
    t.require(g1.edges == g2.edges, "random graph changed between reruns");
  }
  return t.ok;
}

struct Check {
  const char* label;
  bool (*fn)();
};

}  // namespace

int main() {
  const Check checks[] = {
      {"closed-form weight heuristics match hand-computed optima", &closed_form_heuristics},
      {"solver-based weight heuristics match analytic optima", &heuristic_solver_oracles},
      {"single-agent worst cases reduce to the gradient-descent rate", &single_agent_anchor},
      {"worst-case values dominate simulated quadratic instances", &dominates_simulation},
      {"jointly tuned weights dominate tuned slem-optimal weights", &tuned_weights_dominate},
      {"structural invariants hold across the toolkit", &structural_invariants},
  };
  int failed = 0;
  for (std::size_t i = 0; i < sizeof checks / sizeof checks[0]; ++i) {
    std::printf("check %zu: %s\n", i + 1, checks[i].label);
    std::fflush(stdout);
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = checks[i].fn();
    } catch (const std::exception& e) {
      std::printf("  unexpected exception: %s\n", e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("check %zu: %s (%.1f s)\n", i + 1, ok ? "PASS" : "FAIL", seconds);
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  if (failed == 0)
    std::printf("acceptance: all %d checks passed\n",
                static_cast<int>(sizeof checks / sizeof checks[0]));
  else
    std::printf("acceptance: %d of %d checks failed\n", failed,
                static_cast<int>(sizeof checks / sizeof checks[0]));
  return failed == 0 ? 0 : 1;
}
