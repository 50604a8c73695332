#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <optional>

#include "wopt/graph.hpp"

namespace wopt {

/// Symmetric averaging matrix tied to a graph: W' = W, W*1 = 1, and
/// W_ij = 0 off the edge set. Entries may be negative (double stochasticity
/// is not assumed). `w` holds the edge weights in canonical edge order;
/// W = I - B diag(w) B'.
struct AveragingMatrix {
  Eigen::MatrixXd W;
  std::optional<Eigen::VectorXd> w;
  Graph graph;

  int n() const { return graph.n; }
};

/// Builds W = I - B diag(w) B' entry by entry, so symmetry and the zero
/// pattern hold exactly. Throws std::invalid_argument on a length mismatch.
AveragingMatrix averaging_from_weights(const Graph& g, const Eigen::VectorXd& w);

/// Wraps a directly-given W after validating the averaging-matrix
/// invariants (tolerance 1e-12); stores it exactly symmetric with exact
/// zeros off the edge set and recovers the edge-weight vector.
AveragingMatrix averaging_from_matrix(const Graph& g, const Eigen::MatrixXd& W);

/// Full eigendecomposition, eigenvalues descending so lambda_1 = 1 leads.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // columns, matching order
};

Spectrum spectrum(const AveragingMatrix& M);

// Eigenvalue functionals. Each takes the descending eigenvalue vector with
// the consensus eigenvalue lambda_1 = 1 in front and sums over i >= 2.
// They are templated so Eigen expressions can be passed without
// materializing.

namespace detail {
// |lambda| >= 1 - kUnitCircleTol counts as "on the unit circle", which maps
// the diverging functionals to +infinity instead of an astronomically large
// finite number.
inline constexpr double kUnitCircleTol = 1e-12;
}  // namespace detail

template <typename Derived>
typename Derived::Scalar slem_from_eigs(const Eigen::DenseBase<Derived>& lam_desc) {
  using S = typename Derived::Scalar;
  const auto& v = lam_desc.derived();
  if (v.size() < 2) return S(0);
  using std::abs;
  return std::max<S>(abs(v[1]), abs(v[v.size() - 1]));
}

template <typename Derived>
typename Derived::Scalar delta_ss_from_eigs(const Eigen::DenseBase<Derived>& lam_desc) {
  using S = typename Derived::Scalar;
  const auto& v = lam_desc.derived();
  S sum(0);
  using std::abs;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (abs(v[i]) >= S(1) - S(detail::kUnitCircleTol))
      return std::numeric_limits<S>::infinity();
    sum += S(1) / (S(1) - v[i] * v[i]);
  }
  return sum;
}

template <typename Derived>
typename Derived::Scalar rtot_from_eigs(const Eigen::DenseBase<Derived>& lam_desc) {
  using S = typename Derived::Scalar;
  const auto& v = lam_desc.derived();
  const auto n = v.size();
  S sum(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    if (v[i] >= S(1) - S(detail::kUnitCircleTol)) return std::numeric_limits<S>::infinity();
    sum += S(1) / (S(1) - v[i]);
  }
  return S(static_cast<double>(n)) * sum;
}

/// max(|lambda_2|, |lambda_n|); equals ||W - 11'/n||_2 for symmetric W
/// with W*1 = 1.
double slem(const AveragingMatrix& M);

/// Steady-state mean-square deviation sum_{i>=2} 1/(1 - lambda_i^2);
/// +infinity when some |lambda_i| reaches 1.
double delta_ss(const AveragingMatrix& M);

/// Total effective resistance n * sum_{i>=2} 1/(1 - lambda_i); +infinity
/// when lambda_2 reaches 1 (disconnected).
double rtot(const AveragingMatrix& M);

/// sum_i gamma_i |lambda|_(i) with |lambda| sorted descending. gamma must be
/// non-negative and non-increasing (length n); anything else throws.
double weighted_nuclear_norm(const AveragingMatrix& M, const Eigen::VectorXd& gamma);

/// Lazy transform (I + W)/2; keeps the graph and halves the edge weights.
AveragingMatrix lazy_transform(const AveragingMatrix& M);

}  // namespace wopt
