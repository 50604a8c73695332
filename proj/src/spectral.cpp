#include "wopt/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>

namespace wopt {
namespace {

constexpr double kStructTol = 1e-12;

void check_structure(const Graph& g, const Eigen::MatrixXd& W) {
  if (W.rows() != g.n || W.cols() != g.n)
    throw std::invalid_argument("averaging matrix has wrong dimensions");
  if ((W - W.transpose()).cwiseAbs().maxCoeff() > kStructTol)
    throw std::invalid_argument("averaging matrix is not symmetric");
  const Eigen::VectorXd rs = W.rowwise().sum();
  if ((rs.array() - 1.0).abs().maxCoeff() > 1e-10)
    throw std::invalid_argument("averaging matrix row sums differ from 1");
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(g.n, g.n);
  for (const auto& [i, j] : g.edges) mask(i, j) = mask(j, i) = 1.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (i != j && mask(i, j) == 0.0 && std::abs(W(i, j)) > kStructTol)
        throw std::invalid_argument("averaging matrix has weight off the edge set");
}

}  // namespace

AveragingMatrix averaging_from_weights(const Graph& g, const Eigen::VectorXd& w) {
  if (w.size() != g.edge_count())
    throw std::invalid_argument("weight vector length does not match edge count");
  Eigen::MatrixXd W = Eigen::MatrixXd::Identity(g.n, g.n);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edges[e];
    W(i, i) -= w[e];
    W(j, j) -= w[e];
    W(i, j) += w[e];
    W(j, i) = W(i, j);
  }
  return AveragingMatrix{std::move(W), w, g};
}

AveragingMatrix averaging_from_matrix(const Graph& g, const Eigen::MatrixXd& W) {
  check_structure(g, W);
  // Recover the edge weights; rebuilding from them stores W exactly
  // symmetric with exact zeros off the edge set.
  Eigen::VectorXd w(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto [i, j] = g.edges[e];
    w[e] = 0.5 * (W(i, j) + W(j, i));
  }
  return averaging_from_weights(g, w);
}

Spectrum spectrum(const AveragingMatrix& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.W);
  if (es.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
  Spectrum s;
  s.eigenvalues = es.eigenvalues().reverse();
  s.eigenvectors = es.eigenvectors().rowwise().reverse();
  return s;
}

double slem(const AveragingMatrix& M) { return slem_from_eigs(spectrum(M).eigenvalues); }

double delta_ss(const AveragingMatrix& M) { return delta_ss_from_eigs(spectrum(M).eigenvalues); }

double rtot(const AveragingMatrix& M) { return rtot_from_eigs(spectrum(M).eigenvalues); }

double weighted_nuclear_norm(const AveragingMatrix& M, const Eigen::VectorXd& gamma) {
  if (gamma.size() != M.n())
    throw std::invalid_argument("gamma must have one entry per node");
  for (int i = 0; i < gamma.size(); ++i) {
    if (gamma[i] < 0.0) throw std::invalid_argument("gamma must be non-negative");
    if (i > 0 && gamma[i] > gamma[i - 1] + 1e-14)
      throw std::invalid_argument("gamma must be non-increasing");
  }
  Eigen::VectorXd a = spectrum(M).eigenvalues.cwiseAbs();
  std::sort(a.data(), a.data() + a.size(), std::greater<double>());
  return gamma.dot(a);
}

AveragingMatrix lazy_transform(const AveragingMatrix& M) {
  Eigen::VectorXd w = M.w ? *M.w : averaging_from_matrix(M.graph, M.W).w.value();
  return averaging_from_weights(M.graph, 0.5 * w);
}

}  // namespace wopt
