#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace wopt {

enum class ConstraintSense { Eq, Le };
enum class ObjectiveSense { Min, Max };
enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

const char* to_string(SolveStatus s);

// Scaled symmetric vectorization (svec): lower triangle, column-major, with
// off-diagonal entries multiplied by sqrt(2) so that <A,B> = svec(A).svec(B).
int svec_size(int s);
int svec_index(int s, int i, int j);  // i >= j
Eigen::VectorXd svec(const Eigen::MatrixXd& A);
Eigen::MatrixXd unsvec(const Eigen::VectorXd& v, int s);

/// Standard-form semidefinite program with one PSD block X (side psd_dim)
/// and a vector y of free scalars. Each row reads <A, X> + a.y {=, <=} b.
struct SdpProblem {
  struct Row {
    Eigen::VectorXd A_svec;  // svec of the symmetric coefficient matrix
    Eigen::VectorXd a;       // free-variable coefficients (may be empty = zero)
    double b = 0.0;
    ConstraintSense sense = ConstraintSense::Eq;
  };

  int psd_dim = 0;
  int free_dim = 0;
  ObjectiveSense sense = ObjectiveSense::Min;
  Eigen::VectorXd c_svec;  // objective coefficient on X (svec form)
  Eigen::VectorXd c_free;  // objective coefficient on y
  std::vector<Row> rows;

  /// Validates symmetry (1e-12) and dimensions, then appends a row.
  void add_constraint(const Eigen::MatrixXd& A, const Eigen::VectorXd& a, double b,
                      ConstraintSense sense);
  void add_constraint_svec(Eigen::VectorXd A_svec, Eigen::VectorXd a, double b,
                           ConstraintSense sense);
  void set_objective(ObjectiveSense s, const Eigen::MatrixXd& cX, const Eigen::VectorXd& cy);

  int num_rows() const { return static_cast<int>(rows.size()); }
};

struct SdpResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double max() const;
};

struct SdpSolution {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  double objective = 0.0;
  SolveStatus status = SolveStatus::MaxIter;
  SdpResiduals residuals;
  int iterations = 0;
};

struct SolveOptions {
  double tol = 1e-6;
  int max_iter = 200000;
  // ADMM knobs: penalty, over-relaxation, residual check cadence. The
  // defaults are tuned for the problem sizes in this project (psd_dim up to
  // ~100); everything is deterministic, so repeated solves are bit-identical.
  double rho = 1.0;
  double relaxation = 1.6;
  int check_every = 25;
  bool adaptive_rho = true;
};

/// First-order operator-splitting solve: alternating projection onto the
/// affine subspace of the constraints (prefactorized normal equations) and
/// onto the PSD cone (symmetric eigendecomposition), with over-relaxation
/// and row equilibration. Inequality rows get nonnegative slacks appended to
/// the cone. MaxIter is reported with residuals, not thrown.
SdpSolution solve(const SdpProblem& p, const SolveOptions& opts);
SdpSolution solve(const SdpProblem& p, double tol = 1e-6, int max_iter = 200000);

/// Plain-text sparse triplet dump (`row col value` per coefficient) for
/// cross-checking against external solvers.
void dump_triplets(const SdpProblem& p, std::ostream& os);

}  // namespace wopt
