#include "wopt/heuristics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "wopt/sdp_builder.hpp"

namespace wopt {

HeuristicId heuristic_from_string(const std::string& s) {
  for (HeuristicId id : all_heuristics())
    if (s == to_string(id)) return id;
  throw std::invalid_argument("unknown heuristic: " + s);
}

const char* to_string(HeuristicId id) {
  switch (id) {
    case HeuristicId::MinSlem: return "min-slem";
    case HeuristicId::UniformOptimal: return "uniform";
    case HeuristicId::MaxDegree: return "max-degree";
    case HeuristicId::Metropolis: return "metropolis";
    case HeuristicId::LazyMetropolis: return "lazy-metropolis";
    case HeuristicId::MinNuclear: return "min-nuclear";
    case HeuristicId::MinRtot: return "min-rtot";
    case HeuristicId::MinDeltaSs: return "min-delta-ss";
  }
  return "?";
}

std::vector<HeuristicId> all_heuristics() {
  return {HeuristicId::MinSlem,        HeuristicId::UniformOptimal, HeuristicId::MaxDegree,
          HeuristicId::Metropolis,     HeuristicId::LazyMetropolis, HeuristicId::MinNuclear,
          HeuristicId::MinRtot,        HeuristicId::MinDeltaSs};
}

namespace {

void require_connected(const Graph& g) {
  if (!is_connected(g)) throw DomainError("graph '" + g.name + "' is not connected");
}

/// Variable layout for the SDP heuristics: one free scalar per edge, or one
/// per orbit when tied.
struct EdgeVars {
  std::vector<int> var_of_edge;
  int count = 0;
};

EdgeVars make_edge_vars(const Graph& g, const HeuristicOptions& opts) {
  const bool tied = opts.orbit_tied.value_or(g.n > 12);
  EdgeVars ev;
  if (tied) {
    const OrbitPartition p = edge_orbits(g);
    ev.var_of_edge = p.orbit_of_edge;
    ev.count = p.orbit_count;
  } else {
    ev.var_of_edge.resize(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) ev.var_of_edge[e] = e;
    ev.count = g.edge_count();
  }
  return ev;
}

/// Averages a per-edge weight vector over edge orbits. The heuristic
/// objectives are convex and automorphism-invariant, so this projection
/// keeps optimizers optimal while making equivalent edges exactly equal.
/// Left unchanged when the orbit partition is unavailable.
Eigen::VectorXd orbit_average(const Graph& g, Eigen::VectorXd w) {
  OrbitPartition p;
  try {
    p = edge_orbits(g);
  } catch (const DomainError&) {
    return w;
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(p.orbit_count);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(p.orbit_count);
  for (int e = 0; e < g.edge_count(); ++e) {
    sum[p.orbit_of_edge[e]] += w[e];
    count[p.orbit_of_edge[e]] += 1.0;
  }
  for (int e = 0; e < g.edge_count(); ++e)
    w[e] = sum[p.orbit_of_edge[e]] / count[p.orbit_of_edge[e]];
  return w;
}

/// W(w) = I - B diag(w) B' as a matrix of affine expressions, optionally
/// with the consensus projector 11'/n subtracted.
MatExpr averaging_expr(const Graph& g, const EdgeVars& ev, int var_base, bool subtract_consensus) {
  const int n = g.n;
  const double c = subtract_consensus ? 1.0 / n : 0.0;
  MatExpr W(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) W.at(i, j) = LinExpr::constant_of((i == j ? 1.0 : 0.0) - c);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& [i, j] = g.edges[e];
    const int k = var_base + ev.var_of_edge[e];
    W.at(i, j) += LinExpr::free_var(k, 1.0);
    W.at(i, i) += LinExpr::free_var(k, -1.0);
    W.at(j, j) += LinExpr::free_var(k, -1.0);
  }
  return W;
}

Eigen::VectorXd extract_weights(const Graph& g, const EdgeVars& ev, int var_base,
                                const Eigen::VectorXd& y) {
  Eigen::VectorXd w(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) w[e] = y[var_base + ev.var_of_edge[e]];
  return w;
}

void require_optimal(const SdpSolution& s, const char* what) {
  if (s.status != SolveStatus::Optimal)
    throw DomainError(std::string(what) + ": solver returned " + to_string(s.status) +
                      " (residual " + std::to_string(s.residuals.max()) + ")");
}

HeuristicResult finish(HeuristicId id, const Graph& g, Eigen::VectorXd w, double value) {
  HeuristicResult r;
  r.id = id;
  r.M = averaging_from_weights(g, std::move(w));
  r.value = value;
  return r;
}

Eigen::VectorXd metropolis_weights(const Graph& g) {
  const std::vector<int> deg = degrees(g);
  Eigen::VectorXd w(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& [i, j] = g.edges[e];
    w[e] = 1.0 / (std::max(deg[i], deg[j]) + 1);
  }
  return w;
}

Eigen::VectorXd validated_gamma(const Graph& g, const Eigen::VectorXd& gamma) {
  if (gamma.size() == 0) return Eigen::VectorXd::Ones(g.n);
  if (gamma.size() != g.n)
    throw std::invalid_argument("gamma must have one entry per node");
  for (int i = 0; i < gamma.size(); ++i) {
    if (gamma[i] < 0.0) throw std::invalid_argument("gamma must be non-negative");
    if (i > 0 && gamma[i] > gamma[i - 1] + 1e-14)
      throw std::invalid_argument("gamma must be non-increasing");
  }
  return gamma;
}

}  // namespace

HeuristicResult uniform_optimal(const Graph& g) {
  require_connected(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian(g), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd mu = es.eigenvalues();  // ascending, mu[0] ~ 0
  const double q = 2.0 / (mu[1] + mu[g.n - 1]);
  HeuristicResult r = finish(HeuristicId::UniformOptimal, g,
                             Eigen::VectorXd::Constant(g.edge_count(), q), 0.0);
  r.value = slem(r.M);
  return r;
}

HeuristicResult max_degree(const Graph& g) {
  require_connected(g);
  const double q = 1.0 / (maximum_degree(g) + 1);
  HeuristicResult r =
      finish(HeuristicId::MaxDegree, g, Eigen::VectorXd::Constant(g.edge_count(), q), 0.0);
  r.value = slem(r.M);
  return r;
}

HeuristicResult metropolis(const Graph& g) {
  require_connected(g);
  HeuristicResult r = finish(HeuristicId::Metropolis, g, metropolis_weights(g), 0.0);
  r.value = slem(r.M);
  return r;
}

HeuristicResult lazy_metropolis(const Graph& g) {
  require_connected(g);
  HeuristicResult r = finish(HeuristicId::LazyMetropolis, g, 0.5 * metropolis_weights(g), 0.0);
  r.value = slem(r.M);
  return r;
}

HeuristicResult min_slem(const Graph& g, const HeuristicOptions& opts) {
  require_connected(g);
  const EdgeVars ev = make_edge_vars(g, opts);

  SdpBuilder bld;
  for (int k = 0; k < ev.count; ++k) bld.add_free();
  const int t = bld.add_free();
  bld.spectral_norm_epigraph(averaging_expr(g, ev, 0, true), t);
  bld.set_objective(ObjectiveSense::Min, LinExpr::free_var(t));

  const SdpSolution s = solve(bld.build(), opts.solver);
  require_optimal(s, "min-slem");
  Eigen::VectorXd w = orbit_average(g, extract_weights(g, ev, 0, s.y));
  HeuristicResult r = finish(HeuristicId::MinSlem, g, std::move(w), 0.0);
  r.value = slem(r.M);
  return r;
}

HeuristicResult min_nuclear(const Graph& g, const HeuristicOptions& opts) {
  require_connected(g);
  const int n = g.n;
  const Eigen::VectorXd gamma = validated_gamma(g, opts.gamma);
  if (gamma.maxCoeff() == 0.0) {
    // Flat objective; every w is optimal. Return the minimum-norm one.
    return finish(HeuristicId::MinNuclear, g, Eigen::VectorXd::Zero(g.edge_count()), 0.0);
  }
  const bool plain = (gamma.minCoeff() == 1.0 && gamma.maxCoeff() == 1.0);

  const EdgeVars ev = make_edge_vars(g, opts);
  SdpBuilder bld;
  for (int k = 0; k < ev.count; ++k) bld.add_free();
  const MatExpr W = averaging_expr(g, ev, 0, false);
  const int P = bld.add_psd_block(n);
  const int N = bld.add_psd_block(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      bld.add_eq(bld.block_entry(P, i, j) + (-1.0) * bld.block_entry(N, i, j) +
                 (-1.0) * W.at(i, j));

  LinExpr obj;
  if (plain) {
    for (int i = 0; i < n; ++i) obj += bld.block_entry(P, i, i) + bld.block_entry(N, i, i);
  } else {
    // gamma-weighted sum of |eigenvalues| telescoped over Ky Fan norms:
    // sum_i gamma_i |l|_(i) = sum_k (gamma_k - gamma_{k+1}) * (sum of k
    // largest eigenvalues of P + N), each epigraph k z + tr(Z),
    // Z >= P + N - z I, Z >= 0.
    for (int k = 1; k <= n; ++k) {
      const double step = gamma[k - 1] - (k < n ? gamma[k] : 0.0);
      if (step <= 0.0) continue;
      const int z = bld.add_free();
      const int Z = bld.add_psd_block(n);
      MatExpr slack(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          slack.at(i, j) = bld.block_entry(Z, i, j) + (-1.0) * bld.block_entry(P, i, j) +
                           (-1.0) * bld.block_entry(N, i, j);
          if (i == j) slack.at(i, j) += LinExpr::free_var(z);
        }
      bld.pin_psd_block(slack);
      LinExpr term = LinExpr::free_var(z, static_cast<double>(k));
      for (int i = 0; i < n; ++i) term += bld.block_entry(Z, i, i);
      obj += step * term;
    }
  }
  bld.set_objective(ObjectiveSense::Min, obj);

  const SdpSolution s = solve(bld.build(), opts.solver);
  require_optimal(s, "min-nuclear");
  Eigen::VectorXd w = orbit_average(g, extract_weights(g, ev, 0, s.y));
  HeuristicResult r = finish(HeuristicId::MinNuclear, g, std::move(w), 0.0);
  r.value = weighted_nuclear_norm(r.M, gamma);
  return r;
}

HeuristicResult min_rtot(const Graph& g, const HeuristicOptions& opts) {
  require_connected(g);
  if (opts.eps < 0.0 || opts.eps >= 1.0)
    throw std::invalid_argument("eps must lie in [0, 1)");
  const int n = g.n;
  const EdgeVars ev = make_edge_vars(g, opts);

  SdpBuilder bld;
  for (int k = 0; k < ev.count; ++k) bld.add_free();
  // S = I - W(w) + 11'/n = B diag(w) B' + 11'/n; R_tot = n tr(S^{-1}) - n.
  MatExpr S(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) S.at(i, j) = LinExpr::constant_of(1.0 / n);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& [i, j] = g.edges[e];
    const int k = ev.var_of_edge[e];
    S.at(i, j) += LinExpr::free_var(k, -1.0);
    S.at(i, i) += LinExpr::free_var(k, 1.0);
    S.at(j, j) += LinExpr::free_var(k, 1.0);
  }
  const int Y = bld.add_psd_block(n);
  bld.schur_block(S, bld.block_expr(Y, n));
  for (int i = 0; i < n; ++i) {
    LinExpr row;
    for (int e = 0; e < g.edge_count(); ++e)
      if (g.edges[e].first == i || g.edges[e].second == i)
        row += LinExpr::free_var(ev.var_of_edge[e]);
    bld.add_le(row, 1.0 - opts.eps);
  }
  LinExpr obj;
  for (int i = 0; i < n; ++i) obj += bld.block_entry(Y, i, i);
  obj *= static_cast<double>(n);
  bld.set_objective(ObjectiveSense::Min, obj);

  const SdpSolution s = solve(bld.build(), opts.solver);
  require_optimal(s, "min-rtot");
  Eigen::VectorXd w = orbit_average(g, extract_weights(g, ev, 0, s.y));
  HeuristicResult r = finish(HeuristicId::MinRtot, g, std::move(w), 0.0);
  r.value = rtot(r.M);
  return r;
}

HeuristicResult min_delta_ss(const Graph& g, const HeuristicOptions&) {
  require_connected(g);
  const int n = g.n;
  const int m = g.edge_count();
  const Eigen::MatrixXd B = incidence(g);
  const Eigen::MatrixXd J = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  // delta_ss(w) = (1/2)[tr(M1^{-1}) + tr(M2^{-1})] - 1 with
  // M1 = B diag(w) B' + J, M2 = 2I - B diag(w) B' - J; smooth and strictly
  // convex on the open set where both are positive definite.
  struct Eval {
    bool feasible = false;
    double f = 0.0;
    Eigen::MatrixXd inv1, inv2;
  };
  auto evaluate = [&](const Eigen::VectorXd& w) {
    Eval ev;
    const Eigen::MatrixXd G = B * w.asDiagonal() * B.transpose();
    const Eigen::LLT<Eigen::MatrixXd> llt1(G + J);
    const Eigen::LLT<Eigen::MatrixXd> llt2(2.0 * I - G - J);
    if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success) return ev;
    ev.inv1 = llt1.solve(I);
    ev.inv2 = llt2.solve(I);
    ev.f = 0.5 * (ev.inv1.trace() + ev.inv2.trace()) - 1.0;
    ev.feasible = true;
    return ev;
  };

  Eigen::VectorXd w = metropolis_weights(g);
  Eval cur = evaluate(w);
  if (!cur.feasible) throw DomainError("min-delta-ss: no strictly feasible start");

  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::MatrixXd inv1sq = cur.inv1 * cur.inv1;
    const Eigen::MatrixXd inv2sq = cur.inv2 * cur.inv2;
    const Eigen::MatrixXd B1 = B.transpose() * cur.inv1 * B;
    const Eigen::MatrixXd B2 = B.transpose() * cur.inv2 * B;
    const Eigen::MatrixXd C1 = B.transpose() * inv1sq * B;
    const Eigen::MatrixXd C2 = B.transpose() * inv2sq * B;

    const Eigen::VectorXd grad = 0.5 * (C2.diagonal() - C1.diagonal());
    if (grad.cwiseAbs().maxCoeff() <= 1e-7) break;

    Eigen::MatrixXd H = B1.cwiseProduct(C1) + B2.cwiseProduct(C2);
    H.diagonal().array() += 1e-12 * std::max(1.0, H.diagonal().maxCoeff());
    Eigen::VectorXd d = Eigen::LDLT<Eigen::MatrixXd>(H).solve(-grad);
    if (grad.dot(d) >= 0.0) d = -grad;  // fall back to steepest descent

    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half < 60; ++half, t *= 0.5) {
      const Eval trial = evaluate(w + t * d);
      if (trial.feasible && trial.f <= cur.f + 1e-4 * t * grad.dot(d)) {
        w += t * d;
        cur = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // step underflow: gradient is at numerical noise level
  }

  w = orbit_average(g, w);
  HeuristicResult r = finish(HeuristicId::MinDeltaSs, g, std::move(w), 0.0);
  r.value = delta_ss(r.M);
  return r;
}

Eigen::VectorXd delta_ss_gradient(const Graph& g, const Eigen::VectorXd& w) {
  if (w.size() != g.edge_count()) throw std::invalid_argument("weight vector length mismatch");
  const int n = g.n;
  const Eigen::MatrixXd B = incidence(g);
  const Eigen::MatrixXd J = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd G = B * w.asDiagonal() * B.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt1(G + J);
  const Eigen::LLT<Eigen::MatrixXd> llt2(2.0 * I - G - J);
  if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success)
    throw DomainError("delta_ss_gradient: spectrum not strictly inside the unit interval");
  const Eigen::MatrixXd inv1 = llt1.solve(I);
  const Eigen::MatrixXd inv2 = llt2.solve(I);
  const Eigen::MatrixXd C1 = B.transpose() * inv1 * inv1 * B;
  const Eigen::MatrixXd C2 = B.transpose() * inv2 * inv2 * B;
  return 0.5 * (C2.diagonal() - C1.diagonal());
}

HeuristicResult run_heuristic(HeuristicId id, const Graph& g, const HeuristicOptions& opts) {
  switch (id) {
    case HeuristicId::MinSlem: return min_slem(g, opts);
    case HeuristicId::UniformOptimal: return uniform_optimal(g);
    case HeuristicId::MaxDegree: return max_degree(g);
    case HeuristicId::Metropolis: return metropolis(g);
    case HeuristicId::LazyMetropolis: return lazy_metropolis(g);
    case HeuristicId::MinNuclear: return min_nuclear(g, opts);
    case HeuristicId::MinRtot: return min_rtot(g, opts);
    case HeuristicId::MinDeltaSs: return min_delta_ss(g, opts);
  }
  throw std::invalid_argument("unknown heuristic id");
}

}  // namespace wopt
