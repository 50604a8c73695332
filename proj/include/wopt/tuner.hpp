#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

#include "wopt/graph.hpp"
#include "wopt/heuristics.hpp"
#include "wopt/pep.hpp"
#include "wopt/spectral.hpp"

namespace wopt {

struct SearchOptions {
  /// Initial poll step, in the coordinates handed to pattern_search.
  double initial_mesh = 0.25;
  /// Mesh multiplier after a failed poll; must lie in (0, 1).
  double contraction = 0.5;
  /// Mesh multiplier after a successful poll; must be >= 1.
  double expansion = 2.0;
  /// The search stops once the mesh falls below this.
  double mesh_tol = 1e-4;
  /// Hard cap on objective evaluations per search.
  int max_evals = 2000;
  /// Poll points evaluated concurrently when > 1. The reduction order is
  /// fixed, so the outcome is identical for any job count.
  int jobs = 1;
  /// Starting points for tune_weights, each [per-edge-variable weights,
  /// step-size]. When empty, tuned heuristic seeds are used instead.
  std::vector<Eigen::VectorXd> restarts;
  /// Conic solver settings for every performance evaluation.
  SolveOptions solver = default_pep_solve_options();
};

struct SearchStep {
  Eigen::VectorXd point;
  double value = 0.0;
  /// Mesh size in effect when this incumbent was recorded.
  double mesh = 0.0;
};

struct SearchResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  /// Accepted incumbents in order, starting with the initial point.
  std::vector<SearchStep> trace;
};

/// Derivative-free coordinate pattern search.
///
/// Each iteration polls all 2d points x +- mesh * e_i, accepts the best
/// strict improvement (ties broken by direction index) and expands the mesh,
/// or contracts the mesh when no poll point improves. Stops when the mesh
/// drops below mesh_tol or the evaluation budget runs out. NaN objective
/// values are treated as +infinity. Throws DomainError when the starting
/// point itself evaluates to +infinity.
SearchResult pattern_search(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x0,
                            const SearchOptions& opts = {});

struct AlphaResult {
  double alpha = 0.0;
  /// Worst-case performance at the returned step-size.
  double value = 0.0;
  /// Fresh evaluation at the returned step-size.
  PepResult pep;
  int evaluations = 0;
};

/// Tunes the step-size for a fixed averaging matrix.
///
/// Scans a log-spaced grid of grid_points step-sizes over [lo, hi] / L,
/// then refines the best grid point with a 1-D pattern search in log(alpha).
/// The result is never worse than any grid value. Throws DomainError when
/// slem(W) >= 1, when every grid point evaluates to +infinity, or, for the
/// iterate-contraction criterion, when no grid point is contractive.
AlphaResult tune_alpha(const PepSetting& setting, const AveragingMatrix& W,
                       double lo = 1e-3, double hi = 2.0, int grid_points = 25,
                       const SearchOptions& opts = {});

struct TuneResult {
  /// Tuned per-edge weights.
  Eigen::VectorXd w;
  double alpha = 0.0;
  /// Worst-case performance at (w, alpha), from a fresh evaluation.
  double value = 0.0;
  PepResult pep;
  /// Total evaluations across restarts, including step-size tuning.
  int evaluations = 0;
  /// Incumbent trace of the winning restart, points stored as
  /// [weights, alpha] with alpha in its natural units.
  std::vector<SearchStep> trace;
};

/// Jointly tunes edge weights and step-size by pattern search.
///
/// The search variables are one weight per edge orbit (or per edge when
/// orbit_tied is false) plus log(alpha). Weight vectors whose averaging
/// matrix fails to contract evaluate to +infinity, which keeps the search
/// inside the usable region without explicit bounds. Starting points come
/// from opts.restarts when non-empty; otherwise the min-slem and Metropolis
/// weights, each with a tuned step-size, are used. Throws DomainError when
/// no starting point yields a finite objective.
TuneResult tune_weights(const PepSetting& setting, const Graph& g,
                        const SearchOptions& opts = {}, bool orbit_tied = true);

struct CompareRow {
  std::string name;
  /// False when this row's weights or step-size tuning failed; note then
  /// carries the reason and the numeric fields are unset.
  bool ok = false;
  std::string note;
  Eigen::VectorXd w;
  double alpha = 0.0;
  /// Worst-case performance at (w, alpha).
  double value = 0.0;
  /// Per-iteration contraction factor and asymptotic time constant; NaN
  /// for criteria other than iterate contraction.
  double rho = 0.0;
  double tau = 0.0;
  /// Averaging matrix spectrum with the leading eigenvalue 1 dropped,
  /// descending.
  Eigen::VectorXd eigs;
};

struct CompareResult {
  PepSetting setting;
  Graph graph;
  /// One row per heuristic, in enum order, then a final "optimal" row from
  /// tune_weights restarted at every successful heuristic's weights.
  std::vector<CompareRow> rows;
};

/// Tunes the step-size for every weight heuristic on the graph and appends
/// a jointly tuned row. Per-row failures are recorded in the row rather
/// than thrown, so one infeasible heuristic does not abort the table.
CompareResult compare(const PepSetting& setting, const Graph& g,
                      const SearchOptions& opts = {});

/// Renders a comparison as CSV with columns
/// heuristic,alpha,E,rho,tau,eig_2..eig_n. Failed rows leave the numeric
/// cells empty.
std::string to_csv(const CompareResult& result);

}  // namespace wopt
