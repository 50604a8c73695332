#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wopt/conic.hpp"
#include "wopt/spectral.hpp"

namespace wopt {

enum class HeuristicId {
  MinSlem,
  UniformOptimal,
  MaxDegree,
  Metropolis,
  LazyMetropolis,
  MinNuclear,
  MinRtot,
  MinDeltaSs,
};

/// Parses "min-slem", "uniform", "max-degree", "metropolis",
/// "lazy-metropolis", "min-nuclear", "min-rtot", "min-delta-ss".
HeuristicId heuristic_from_string(const std::string& s);
const char* to_string(HeuristicId id);
std::vector<HeuristicId> all_heuristics();

struct HeuristicOptions {
  /// Spectral weights for MinNuclear; empty means all-ones (plain nuclear
  /// norm). Must be non-negative and non-increasing.
  Eigen::VectorXd gamma;
  /// Per-node slack in MinRtot's degree-sum constraint sum_e w_e <= 1 - eps.
  double eps = 0.0;
  /// Tie SDP variables to edge orbits. Defaults to n > 12 when unset.
  std::optional<bool> orbit_tied;
  SolveOptions solver;
};

struct HeuristicResult {
  HeuristicId id;
  AveragingMatrix M;
  /// The heuristic's own objective evaluated at the returned weights:
  /// slem for the four consensus-rate heuristics and MinSlem, the weighted
  /// nuclear norm for MinNuclear, R_tot for MinRtot, delta_ss for
  /// MinDeltaSs. Always recomputed from the final weights.
  double value = 0.0;
};

// All heuristics require a connected graph (DomainError otherwise). Outputs
// are orbit-averaged whenever the orbit partition is computable: the
// objectives are convex and invariant under graph automorphisms, so
// averaging an optimizer over its orbit keeps it optimal and makes
// equivalent edges carry exactly equal weights.

/// Uniform weight q = 2 / (mu_2(L) + mu_n(L)) with mu ascending Laplacian
/// eigenvalues; the slem-optimal single weight.
HeuristicResult uniform_optimal(const Graph& g);

/// Uniform weight q = 1 / (d_max + 1).
HeuristicResult max_degree(const Graph& g);

/// Per-edge w_e = 1 / (max(d_i, d_j) + 1).
HeuristicResult metropolis(const Graph& g);

/// (I + metropolis) / 2; its spectrum is non-negative.
HeuristicResult lazy_metropolis(const Graph& g);

/// Minimizes slem(W(w)) = ||W(w) - 11'/n||_2 over edge weights via the
/// spectral-norm epigraph SDP.
HeuristicResult min_slem(const Graph& g, const HeuristicOptions& opts = {});

/// Minimizes the gamma-weighted nuclear norm of W(w). gamma = all-ones uses
/// the split W = P - N, P, N >= 0 with objective tr(P) + tr(N); general
/// non-increasing gamma telescopes into sum-of-k-largest epigraphs on P + N.
/// gamma = 0 short-circuits to w = 0 (minimum-norm optimizer of a flat
/// objective).
HeuristicResult min_nuclear(const Graph& g, const HeuristicOptions& opts = {});

/// Minimizes R_tot = n tr((I - W + 11'/n)^{-1}) - n subject to the per-node
/// constraint sum_{e at i} w_e <= 1 - eps, via a Schur-complement epigraph.
HeuristicResult min_rtot(const Graph& g, const HeuristicOptions& opts = {});

/// Minimizes delta_ss = (1/2)[tr(M1^{-1}) + tr(M2^{-1})] - 1 with
/// M1 = I - W + 11'/n and M2 = I + W - 11'/n, by damped Newton from the
/// Metropolis weights (always strictly feasible on connected graphs).
/// Stops at gradient sup-norm 1e-7.
HeuristicResult min_delta_ss(const Graph& g, const HeuristicOptions& opts = {});

HeuristicResult run_heuristic(HeuristicId id, const Graph& g, const HeuristicOptions& opts = {});

/// Analytic gradient of w -> delta_ss(W(w)), the objective minimized by
/// min_delta_ss; exposed for derivative verification. Throws DomainError at
/// infeasible w (some |eigenvalue| >= 1).
Eigen::VectorXd delta_ss_gradient(const Graph& g, const Eigen::VectorXd& w);

}  // namespace wopt
