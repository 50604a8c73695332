#include "wopt/sdp_builder.hpp"

#include <cmath>
#include <stdexcept>

namespace wopt {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  constant += o.constant;
  x_terms.insert(x_terms.end(), o.x_terms.begin(), o.x_terms.end());
  y_terms.insert(y_terms.end(), o.y_terms.begin(), o.y_terms.end());
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  constant *= s;
  for (auto& t : x_terms) t.coef *= s;
  for (auto& t : y_terms) t.coef *= s;
  return *this;
}

LinExpr LinExpr::constant_of(double v) {
  LinExpr e;
  e.constant = v;
  return e;
}

LinExpr LinExpr::free_var(int k, double coef) {
  LinExpr e;
  e.y_terms.push_back({k, coef});
  return e;
}

LinExpr LinExpr::x_entry(int i, int j, double coef) {
  if (i < j) std::swap(i, j);
  LinExpr e;
  e.x_terms.push_back({i, j, coef});
  return e;
}

LinExpr& MatExpr::at(int i, int j) {
  if (i > j) std::swap(i, j);
  return upper[i * dim - i * (i - 1) / 2 + (j - i)];
}

const LinExpr& MatExpr::at(int i, int j) const {
  if (i > j) std::swap(i, j);
  return upper[i * dim - i * (i - 1) / 2 + (j - i)];
}

MatExpr MatExpr::identity(int k, double scale) {
  MatExpr m(k);
  for (int i = 0; i < k; ++i) m.at(i, i) = LinExpr::constant_of(scale);
  return m;
}

int SdpBuilder::add_free() { return free_dim_++; }

int SdpBuilder::add_psd_block(int k) {
  if (k <= 0) throw std::invalid_argument("add_psd_block: nonpositive size");
  const int offset = psd_dim_;
  psd_dim_ += k;
  return offset;
}

LinExpr SdpBuilder::block_entry(int offset, int i, int j) const {
  return LinExpr::x_entry(offset + i, offset + j);
}

MatExpr SdpBuilder::block_expr(int offset, int k) const {
  MatExpr m(k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) m.at(i, j) = block_entry(offset, i, j);
  return m;
}

void SdpBuilder::add_eq(const LinExpr& e, double rhs) { add_row(e, rhs, ConstraintSense::Eq); }
void SdpBuilder::add_le(const LinExpr& e, double rhs) { add_row(e, rhs, ConstraintSense::Le); }

void SdpBuilder::add_row(const LinExpr& e, double rhs, ConstraintSense sense) {
  rows_.push_back({e, rhs, sense});
}

int SdpBuilder::pin_psd_block(const MatExpr& M) {
  const int offset = add_psd_block(M.dim);
  for (int i = 0; i < M.dim; ++i)
    for (int j = i; j < M.dim; ++j) {
      LinExpr e = block_entry(offset, i, j) + (-1.0) * M.at(i, j);
      add_eq(e, 0.0);
    }
  return offset;
}

void SdpBuilder::schur_block(const MatExpr& M, const MatExpr& N) {
  if (M.dim != N.dim) throw std::invalid_argument("schur_block: dimension mismatch");
  const int k = M.dim;
  const int offset = add_psd_block(2 * k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      add_eq(block_entry(offset, i, j) + (-1.0) * M.at(i, j), 0.0);
      add_eq(block_entry(offset, k + i, k + j) + (-1.0) * N.at(i, j), 0.0);
    }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      add_eq(block_entry(offset, k + i, j), (i == j) ? 1.0 : 0.0);
}

void SdpBuilder::spectral_norm_epigraph(const MatExpr& M, int t_free) {
  const int k = M.dim;
  MatExpr minus(k), plus(k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      LinExpr diag = (i == j) ? LinExpr::free_var(t_free) : LinExpr{};
      minus.at(i, j) = diag + (-1.0) * M.at(i, j);
      plus.at(i, j) = diag + M.at(i, j);
    }
  pin_psd_block(minus);
  pin_psd_block(plus);
}

void SdpBuilder::set_objective(ObjectiveSense sense, const LinExpr& objective) {
  if (objective.constant != 0.0)
    throw std::invalid_argument("set_objective: constant offsets are not representable");
  sense_ = sense;
  objective_ = objective;
}

SdpProblem SdpBuilder::build() const {
  const double inv_r2 = 1.0 / std::sqrt(2.0);
  const int d = svec_size(psd_dim_);
  auto accumulate = [&](const LinExpr& e, Eigen::VectorXd& A_svec, Eigen::VectorXd& a) {
    for (const auto& t : e.x_terms) {
      if (t.i < 0 || t.i >= psd_dim_ || t.j < 0 || t.j > t.i)
        throw std::out_of_range("PSD entry index out of range");
      A_svec[svec_index(psd_dim_, t.i, t.j)] += (t.i == t.j) ? t.coef : inv_r2 * t.coef;
    }
    for (const auto& t : e.y_terms) {
      if (t.k < 0 || t.k >= free_dim_) throw std::out_of_range("free variable index out of range");
      a[t.k] += t.coef;
    }
  };

  SdpProblem p;
  p.psd_dim = psd_dim_;
  p.free_dim = free_dim_;
  p.sense = sense_;
  p.c_svec = Eigen::VectorXd::Zero(d);
  p.c_free = Eigen::VectorXd::Zero(free_dim_);
  accumulate(objective_, p.c_svec, p.c_free);
  for (const auto& row : rows_) {
    Eigen::VectorXd A_svec = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(free_dim_);
    accumulate(row.e, A_svec, a);
    p.add_constraint_svec(std::move(A_svec), std::move(a), row.rhs - row.e.constant, row.sense);
  }
  return p;
}

}  // namespace wopt
