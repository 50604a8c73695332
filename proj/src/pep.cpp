#include "wopt/pep.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "wopt/graph.hpp"

namespace wopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Indices of the free function-value variables: f_i(x_i^k) iterate-major,
// then f_i at the mean point (fmean only), then f_i at the optimum.
struct ValueLayout {
  int n = 0;
  int K = 0;
  bool with_mean = false;

  int count() const { return n * (K + 1) + (with_mean ? n : 0) + n; }
  int at_iterate(int k, int i) const { return k * n + i; }
  int at_mean(int i) const { return n * (K + 1) + i; }
  int at_star(int i) const { return n * (K + 1) + (with_mean ? n : 0) + i; }
};

// One evaluation point of one agent: basis coefficients of the point, the
// basis index of its gradient symbol, and the index of its value variable.
struct EvalPoint {
  Eigen::VectorXd x;
  int g = 0;
  int f = 0;
};

Eigen::VectorXd unit(int size, int index) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(size);
  e(index) = 1.0;
  return e;
}

}  // namespace

AlgorithmId algorithm_from_string(const std::string& s) {
  if (s == "diging") return AlgorithmId::DIGing;
  if (s == "atc-diging") return AlgorithmId::AtcDIGing;
  if (s == "extra") return AlgorithmId::Extra;
  throw std::invalid_argument("unknown algorithm '" + s +
                              "' (expected diging, atc-diging, or extra)");
}

const char* to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::DIGing: return "diging";
    case AlgorithmId::AtcDIGing: return "atc-diging";
    case AlgorithmId::Extra: return "extra";
  }
  return "?";
}

Criterion criterion_from_string(const std::string& s) {
  if (s == "rate") return Criterion::RateIterates;
  if (s == "fmean") return Criterion::FunctionalAtMean;
  throw std::invalid_argument("unknown criterion '" + s + "' (expected rate or fmean)");
}

const char* to_string(Criterion c) {
  return c == Criterion::RateIterates ? "rate" : "fmean";
}

InitCondition init_from_string(const std::string& s) {
  if (s == "ball") return InitCondition::PerAgentBall;
  if (s == "mean-square") return InitCondition::MeanSquare;
  throw std::invalid_argument("unknown initial condition '" + s +
                              "' (expected ball or mean-square)");
}

const char* to_string(InitCondition c) {
  return c == InitCondition::PerAgentBall ? "ball" : "mean-square";
}

const char* to_string(PepStatus s) {
  switch (s) {
    case PepStatus::Divergent: return "divergent";
    case PepStatus::Optimal: return "optimal";
    case PepStatus::LowAccuracy: return "low-accuracy";
    case PepStatus::Error: return "error";
  }
  return "?";
}

CompiledAlgorithm compile_algorithm(const PepSetting& setting, const AveragingMatrix& W,
                                    double alpha) {
  if (setting.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("step-size must be positive");
  const int n = W.n();
  const int K = setting.horizon;

  CompiledAlgorithm c;
  c.n = n;
  c.K = K;
  c.with_mean = setting.criterion == Criterion::FunctionalAtMean;
  c.basis = n * (K + 3) + (c.with_mean ? n : 0);

  auto grads = [&](int k) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, c.basis);
    for (int i = 0; i < n; ++i) G(i, c.grad_index(k, i)) = 1.0;
    return G;
  };

  Eigen::MatrixXd X0 = Eigen::MatrixXd::Zero(n, c.basis);
  for (int i = 0; i < n; ++i) X0(i, c.x0_index(i)) = 1.0;
  c.X.reserve(K + 1);
  c.X.push_back(std::move(X0));

  const Eigen::MatrixXd& M = W.W;
  switch (setting.algorithm) {
    case AlgorithmId::DIGing: {
      c.S.push_back(grads(0));
      for (int k = 0; k < K; ++k) {
        c.X.push_back(M * c.X[k] - alpha * c.S[k]);
        c.S.push_back(M * c.S[k] + grads(k + 1) - grads(k));
      }
      break;
    }
    case AlgorithmId::AtcDIGing: {
      c.S.push_back(grads(0));
      for (int k = 0; k < K; ++k) {
        c.X.push_back(M * (c.X[k] - alpha * c.S[k]));
        c.S.push_back(M * (c.S[k] + grads(k + 1) - grads(k)));
      }
      break;
    }
    case AlgorithmId::Extra: {
      c.X.push_back(M * c.X[0] - alpha * grads(0));
      const Eigen::MatrixXd IplusW =
          Eigen::MatrixXd::Identity(n, n) + M;
      const Eigen::MatrixXd Wtilde = 0.5 * IplusW;
      for (int k = 0; k + 2 <= K; ++k)
        c.X.push_back(IplusW * c.X[k + 1] - Wtilde * c.X[k] -
                      alpha * (grads(k + 1) - grads(k)));
      break;
    }
  }

  c.mean = c.X[K].colwise().mean();
  return c;
}

SdpProblem build_pep(const PepSetting& setting, const AveragingMatrix& W, double alpha,
                     PepBuildInfo* info) {
  if (setting.criterion == Criterion::RateIterates &&
      setting.init != InitCondition::MeanSquare)
    throw std::invalid_argument(
        "rate criterion requires the mean-square initial condition");
  const double mu = setting.fclass.mu;
  const double L = setting.fclass.L;
  if (!(mu > 0.0) || !(L > mu))
    throw std::invalid_argument("function class needs 0 < mu < L");
  if (!(setting.init_bound > 0.0))
    throw std::invalid_argument("initial bound must be positive");

  const CompiledAlgorithm alg = compile_algorithm(setting, W, alpha);
  const int n = alg.n;
  const int K = alg.K;
  const int B = alg.basis;
  const ValueLayout vals{n, K, alg.with_mean};

  SdpProblem p;
  p.psd_dim = B;
  p.free_dim = vals.count();

  // Interpolation: each agent's evaluation points must be consistent with
  // some mu-strongly convex L-smooth function. For every ordered pair (u, v),
  //   f_u >= f_v + <g_v, x_u - x_v>
  //        + beta * ( ||g_u - g_v||^2 / L + mu ||x_u - x_v||^2
  //                   - (2 mu / L) <g_u - g_v, x_u - x_v> ),
  // with beta = 1 / (2 (1 - mu/L)), written here as a <= 0 row.
  const double beta = 1.0 / (2.0 * (1.0 - mu / L));
  int interp = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<EvalPoint> pts;
    for (int k = 0; k <= K; ++k)
      pts.push_back({alg.X[k].row(i).transpose(), alg.grad_index(k, i),
                     vals.at_iterate(k, i)});
    if (alg.with_mean)
      pts.push_back({alg.mean.transpose(), alg.mean_grad_index(i), vals.at_mean(i)});
    pts.push_back({Eigen::VectorXd::Zero(B), alg.star_grad_index(i), vals.at_star(i)});

    for (const EvalPoint& u : pts) {
      for (const EvalPoint& v : pts) {
        if (&u == &v) continue;
        const Eigen::VectorXd du = u.x - v.x;
        const Eigen::VectorXd dg = unit(B, u.g) - unit(B, v.g);
        const Eigen::VectorXd qv = unit(B, v.g);
        Eigen::MatrixXd A = 0.5 * (qv * du.transpose() + du * qv.transpose());
        A += (beta / L) * dg * dg.transpose();
        A += (beta * mu) * du * du.transpose();
        A -= (beta * mu / L) * (dg * du.transpose() + du * dg.transpose());
        Eigen::VectorXd a = Eigen::VectorXd::Zero(vals.count());
        a(v.f) += 1.0;
        a(u.f) -= 1.0;
        p.add_constraint(A, a, 0.0, ConstraintSense::Le);
        ++interp;
      }
    }
  }

  // The origin is the minimizer of the average function: sum_i g_i* = 0.
  // For a positive semidefinite Gram matrix this is equivalent to G u = 0
  // with u the indicator of the star gradients; imposing that row by row
  // keeps the splitting solver away from the single tangent hyperplane
  // u'Gu = 0, on which it stalls.
  {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(B);
    for (int i = 0; i < n; ++i) u(alg.star_grad_index(i)) = 1.0;
    for (int j = 0; j < B; ++j) {
      Eigen::MatrixXd A = 0.5 * (u * Eigen::RowVectorXd::Unit(B, j) +
                                 Eigen::VectorXd::Unit(B, j) * u.transpose());
      p.add_constraint(A, Eigen::VectorXd::Zero(vals.count()), 0.0,
                       ConstraintSense::Eq);
    }
  }

  // Initial conditions: the starting distances and, separately, the gradient
  // spread at the optimum, both in the flavor selected by `init`. Without the
  // gradient bound the worst case is infinite for every n >= 2 (take
  // far-apart local minimizers), so it acts as the heterogeneity budget of
  // the problem class.
  const double r2 = setting.init_bound * setting.init_bound;
  const Eigen::VectorXd no_vals = Eigen::VectorXd::Zero(vals.count());
  auto bound_indices = [&](auto index_of) {
    if (setting.init == InitCondition::MeanSquare) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(B, B);
      for (int i = 0; i < n; ++i) A(index_of(i), index_of(i)) = 1.0 / n;
      p.add_constraint(A, no_vals, r2, ConstraintSense::Le);
    } else {
      for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(B, B);
        A(index_of(i), index_of(i)) = 1.0;
        p.add_constraint(A, no_vals, r2, ConstraintSense::Le);
      }
    }
  };
  bound_indices([&](int i) { return alg.x0_index(i); });
  bound_indices([&](int i) { return alg.star_grad_index(i); });

  if (setting.criterion == Criterion::RateIterates) {
    Eigen::MatrixXd cX = Eigen::MatrixXd::Zero(B, B);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd xi = alg.X[K].row(i).transpose();
      cX += (1.0 / n) * xi * xi.transpose();
    }
    p.set_objective(ObjectiveSense::Max, cX, Eigen::VectorXd::Zero(vals.count()));
  } else {
    Eigen::VectorXd cy = Eigen::VectorXd::Zero(vals.count());
    for (int i = 0; i < n; ++i) {
      cy(vals.at_mean(i)) = 1.0 / n;
      cy(vals.at_star(i)) = -1.0 / n;
    }
    p.set_objective(ObjectiveSense::Max, Eigen::MatrixXd::Zero(B, B), cy);
  }

  if (info != nullptr) {
    info->basis_size = B;
    info->value_count = vals.count();
    info->interpolation_rows = interp;
  }
  return p;
}

SolveOptions default_pep_solve_options() {
  SolveOptions o;
  o.tol = 1e-6;
  return o;
}

PepResult evaluate(const PepSetting& setting, const AveragingMatrix& W, double alpha,
                   const SolveOptions& opts) {
  PepResult r;
  r.setting = setting;
  r.alpha = alpha;
  r.W = W;
  if (!(alpha > 0.0) || slem(W) >= 1.0 - 1e-9) {
    r.value = kInf;
    r.status = PepStatus::Divergent;
    return r;
  }

  const SdpProblem p = build_pep(setting, W, alpha);
  SdpSolution s = solve(p, opts);
  r.solver_status = s.status;
  r.residuals = s.residuals;
  r.iterations = s.iterations;
  switch (s.status) {
    case SolveStatus::Optimal:
      r.value = s.objective;
      r.status = PepStatus::Optimal;
      break;
    case SolveStatus::MaxIter:
      r.value = s.objective;
      r.status = PepStatus::LowAccuracy;
      break;
    default:
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.status = PepStatus::Error;
      break;
  }
  r.solution = std::move(s);
  return r;
}

RateResult rate(const PepSetting& setting, const AveragingMatrix& W, double alpha,
                const SolveOptions& opts) {
  if (setting.criterion != Criterion::RateIterates)
    throw std::invalid_argument("rate needs the rate criterion");
  if (setting.algorithm == AlgorithmId::Extra)
    throw std::invalid_argument(
        "one-step rates need a gradient-tracking algorithm (diging or atc-diging)");
  RateResult out;
  out.pep = evaluate(setting, W, alpha, opts);
  if (!std::isfinite(out.pep.value)) {
    out.rho = kInf;
    out.tau = kInf;
    return out;
  }
  const double r2 = setting.init_bound * setting.init_bound;
  const double ratio = std::max(out.pep.value, 0.0) / r2;
  out.rho = std::pow(ratio, 1.0 / (2.0 * setting.horizon));
  if (out.rho >= 1.0)
    out.tau = kInf;
  else if (out.rho == 0.0)
    out.tau = 0.0;
  else
    out.tau = 1.0 / std::log(1.0 / out.rho);
  return out;
}

WorstCaseInstance recover_worst_case(const PepResult& result) {
  if (result.status != PepStatus::Optimal)
    throw DomainError(std::string("worst-case recovery needs an optimal certificate, got ") +
                      to_string(result.status));

  const CompiledAlgorithm alg =
      compile_algorithm(result.setting, result.W, result.alpha);
  const Eigen::MatrixXd& G = result.solution.X;

  // Low-rank factorization G ~= V' V keeping eigenvalues above a relative
  // threshold; column b of V is the recovered vector of basis symbol b.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double cutoff = 1e-7 * std::max(ev.cwiseMax(0.0).maxCoeff(), 1e-300);
  int rank = 0;
  for (int j = 0; j < ev.size(); ++j)
    if (ev(j) > cutoff) ++rank;
  const int dim = std::max(rank, 1);
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(dim, alg.basis);
  for (int j = ev.size() - rank, r = 0; j < ev.size(); ++j, ++r)
    V.row(r) = std::sqrt(ev(j)) * es.eigenvectors().col(j).transpose();

  WorstCaseInstance inst;
  inst.dim = dim;
  const int n = alg.n;
  const int K = alg.K;
  auto rows_for = [&](auto index_of) {
    Eigen::MatrixXd out(n, dim);
    for (int i = 0; i < n; ++i) out.row(i) = V.col(index_of(i)).transpose();
    return out;
  };

  for (int k = 0; k <= K; ++k) {
    inst.iterates.push_back(alg.X[k] * V.transpose());
    inst.gradients.push_back(rows_for([&](int i) { return alg.grad_index(k, i); }));
  }
  inst.star_gradients = rows_for([&](int i) { return alg.star_grad_index(i); });
  if (alg.with_mean) {
    inst.mean_point = alg.mean * V.transpose();
    inst.mean_gradients = rows_for([&](int i) { return alg.mean_grad_index(i); });
  }

  const ValueLayout vals{n, K, alg.with_mean};
  inst.f_iterates.resize(K + 1, n);
  for (int k = 0; k <= K; ++k)
    for (int i = 0; i < n; ++i)
      inst.f_iterates(k, i) = result.solution.y(vals.at_iterate(k, i));
  if (alg.with_mean) {
    inst.f_mean.resize(n);
    for (int i = 0; i < n; ++i) inst.f_mean(i) = result.solution.y(vals.at_mean(i));
  }
  inst.f_star.resize(n);
  for (int i = 0; i < n; ++i) inst.f_star(i) = result.solution.y(vals.at_star(i));

  // Replay the recursion on the recovered vectors; disagreement means the
  // factorization lost structure and the instance cannot be trusted.
  const Eigen::MatrixXd& M = result.W.W;
  const double a = result.alpha;
  std::vector<Eigen::MatrixXd> sim;
  sim.push_back(inst.iterates[0]);
  switch (result.setting.algorithm) {
    case AlgorithmId::DIGing: {
      Eigen::MatrixXd S = inst.gradients[0];
      for (int k = 0; k < K; ++k) {
        sim.push_back(M * sim[k] - a * S);
        S = M * S + inst.gradients[k + 1] - inst.gradients[k];
      }
      break;
    }
    case AlgorithmId::AtcDIGing: {
      Eigen::MatrixXd S = inst.gradients[0];
      for (int k = 0; k < K; ++k) {
        sim.push_back(M * (sim[k] - a * S));
        S = M * (S + inst.gradients[k + 1] - inst.gradients[k]);
      }
      break;
    }
    case AlgorithmId::Extra: {
      sim.push_back(M * sim[0] - a * inst.gradients[0]);
      const Eigen::MatrixXd IplusW = Eigen::MatrixXd::Identity(n, n) + M;
      for (int k = 0; k + 2 <= K; ++k)
        sim.push_back(IplusW * sim[k + 1] - 0.5 * IplusW * sim[k] -
                      a * (inst.gradients[k + 1] - inst.gradients[k]));
      break;
    }
  }
  for (int k = 0; k <= K; ++k) {
    const double err = (sim[k] - inst.iterates[k]).cwiseAbs().maxCoeff();
    if (err > 1e-6)
      throw DomainError("worst-case replay mismatch at iterate " + std::to_string(k) +
                        " (error " + std::to_string(err) + ")");
  }
  return inst;
}

}  // namespace wopt
