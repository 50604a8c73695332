#pragma once

#include <string>
#include <vector>

#include "wopt/conic.hpp"
#include "wopt/spectral.hpp"

namespace wopt {

enum class AlgorithmId { DIGing, AtcDIGing, Extra };
/// Parses "diging", "atc-diging", "extra".
AlgorithmId algorithm_from_string(const std::string& s);
const char* to_string(AlgorithmId id);

enum class Criterion { RateIterates, FunctionalAtMean };
/// Parses "rate", "fmean".
Criterion criterion_from_string(const std::string& s);
const char* to_string(Criterion c);

/// Normalization of the problem instances. Both flavors bound the starting
/// distances and, in the same flavor, the spread of the local gradients at
/// the optimum: without the latter the local functions could disagree
/// without limit and every multi-agent worst case would be infinite.
///   ball:        ||x_i0 - x*|| <= bound and ||grad f_i(x*)|| <= bound, each i
///   mean-square: (1/n) sum ||x_i0 - x*||^2 <= bound^2 and
///                (1/n) sum ||grad f_i(x*)||^2 <= bound^2
/// At n = 1 the optimality condition forces grad f(x*) = 0, so the gradient
/// part is inert there.
enum class InitCondition { PerAgentBall, MeanSquare };
/// Parses "ball", "mean-square".
InitCondition init_from_string(const std::string& s);
const char* to_string(InitCondition c);

/// mu-strongly convex, L-smooth local functions.
struct FunctionClass {
  double mu = 0.1;
  double L = 1.0;
};

/// Everything defining a worst-case question except the averaging matrix
/// and the step-size.
///
/// RateIterates measures (1/n) sum ||x_i^K - x*||^2, the same quantity the
/// initial condition bounds, so the K = 1 worst case is a one-step linear
/// rate estimate. Horizons K > 1 cross-check it: the tracking state of the
/// gradient-tracking algorithms starts exact (s_i^0 = grad f_i(x_i^0)) but
/// drifts, so chaining the one-step bound is a heuristic and value^(1/K)
/// over more steps is the sharper per-step figure. FunctionalAtMean
/// measures f(mean of x_i^K) - f(x*).
struct PepSetting {
  AlgorithmId algorithm = AlgorithmId::DIGing;
  int horizon = 1;
  Criterion criterion = Criterion::RateIterates;
  FunctionClass fclass;
  InitCondition init = InitCondition::MeanSquare;
  double init_bound = 1.0;
};

/// The algorithm recursion unrolled over symbols: iterate k of agent i is
/// the affine combination X[k].row(i) of the basis vectors. Basis layout:
/// n initial points, then n gradients per iterate 0..K, then (fmean only)
/// n gradients at the mean point, then n gradients at the optimum. The
/// optimum itself is pinned to the origin and needs no symbol.
struct CompiledAlgorithm {
  int n = 0;
  int K = 0;
  bool with_mean = false;
  int basis = 0;
  std::vector<Eigen::MatrixXd> X;  // K+1 matrices of size n x basis
  std::vector<Eigen::MatrixXd> S;  // tracking states; empty for EXTRA
  Eigen::RowVectorXd mean;         // coefficients of (1/n) sum_i x_i^K

  int x0_index(int i) const { return i; }
  int grad_index(int k, int i) const { return n + k * n + i; }
  int mean_grad_index(int i) const { return n * (K + 2) + i; }
  int star_grad_index(int i) const { return n * (K + 2) + (with_mean ? n : 0) + i; }
};

/// Unrolls the recursion of setting.algorithm for the given W and step-size.
CompiledAlgorithm compile_algorithm(const PepSetting& setting, const AveragingMatrix& W,
                                    double alpha);

struct PepBuildInfo {
  int basis_size = 0;
  int value_count = 0;         // free function-value variables
  int interpolation_rows = 0;  // ordered-pair constraints over all agents
};

/// Compiles the worst-case problem into a semidefinite program over the
/// Gram matrix of the basis symbols and the free function values:
/// maximize the criterion subject to per-agent smooth-strongly-convex
/// interpolation constraints, the optimality condition sum_i g_i* = 0, and
/// the initial condition. Throws std::invalid_argument for horizon < 1,
/// alpha <= 0, or RateIterates paired with a per-agent-ball init.
SdpProblem build_pep(const PepSetting& setting, const AveragingMatrix& W, double alpha,
                     PepBuildInfo* info = nullptr);

enum class PepStatus {
  Divergent,    // slem(W) >= 1 or alpha <= 0: worst case is +infinity
  Optimal,      // solver met its tolerance; value is the exact optimum
  LowAccuracy,  // iteration cap hit; value carries the residuals shown
  Error,        // solver reported infeasible/unbounded (not expected)
};
const char* to_string(PepStatus s);

struct PepResult {
  double value = 0.0;
  PepStatus status = PepStatus::Error;
  SolveStatus solver_status = SolveStatus::MaxIter;
  SdpResiduals residuals;
  int iterations = 0;
  PepSetting setting;
  double alpha = 0.0;
  AveragingMatrix W;
  SdpSolution solution;  // Gram block and function values, for recovery
};

SolveOptions default_pep_solve_options();

/// Worst-case value of the setting at (W, alpha). Returns +infinity with
/// status Divergent when slem(W) >= 1 - 1e-9 (the problem is unbounded or
/// numerically meaningless there) or alpha <= 0; never throws for those.
PepResult evaluate(const PepSetting& setting, const AveragingMatrix& W, double alpha,
                   const SolveOptions& opts = default_pep_solve_options());

/// RateIterates wrapper for the gradient-tracking algorithms (DIGing and
/// ATC-DIGing; throws std::invalid_argument for EXTRA, whose two-iterate
/// state admits no one-step contraction argument here): the worst case of
/// the mean-square distance after K steps against the same quantity bounded
/// at the start yields rho = (value / bound^2)^(1/(2K)) per iteration and
/// tau = 1/log(1/rho); tau = +infinity when rho >= 1 (non-contractive).
struct RateResult {
  PepResult pep;
  double rho = 0.0;
  double tau = 0.0;
};
RateResult rate(const PepSetting& setting, const AveragingMatrix& W, double alpha,
                const SolveOptions& opts = default_pep_solve_options());

/// A concrete run achieving the worst case: per-iterate agent points and
/// gradients (rows = agents), recovered from a rank-truncated factorization
/// of the Gram optimum and verified by replaying the recursion (1e-6).
struct WorstCaseInstance {
  int dim = 0;
  std::vector<Eigen::MatrixXd> iterates;   // K+1 of n x dim
  std::vector<Eigen::MatrixXd> gradients;  // K+1 of n x dim
  Eigen::MatrixXd star_gradients;          // n x dim
  Eigen::RowVectorXd mean_point;           // fmean only, else size 0
  Eigen::MatrixXd mean_gradients;          // fmean only, else 0 x 0
  Eigen::MatrixXd f_iterates;              // (K+1) x n
  Eigen::VectorXd f_mean;                  // fmean only, else size 0
  Eigen::VectorXd f_star;                  // n
};
WorstCaseInstance recover_worst_case(const PepResult& result);

}  // namespace wopt
