#pragma once

#include <utility>
#include <vector>

#include "wopt/conic.hpp"

namespace wopt {

/// Affine scalar expression in the entries of the PSD block and the free
/// variables: constant + sum coef * X(i,j) + sum coef * y(k). X terms use
/// matrix-entry semantics with i >= j; an off-diagonal term means
/// coef * X(i,j) for the symmetric pair taken once.
struct LinExpr {
  struct XTerm {
    int i, j;
    double coef;
  };
  struct YTerm {
    int k;
    double coef;
  };
  double constant = 0.0;
  std::vector<XTerm> x_terms;
  std::vector<YTerm> y_terms;

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator*=(double s);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }

  static LinExpr constant_of(double v);
  static LinExpr free_var(int k, double coef = 1.0);
  static LinExpr x_entry(int i, int j, double coef = 1.0);
};

/// Symmetric matrix of affine expressions (upper triangle stored).
struct MatExpr {
  int dim = 0;
  std::vector<LinExpr> upper;  // row-major upper triangle, (i,j) with i <= j

  explicit MatExpr(int k = 0) : dim(k), upper(k * (k + 1) / 2) {}
  LinExpr& at(int i, int j);
  const LinExpr& at(int i, int j) const;
  static MatExpr identity(int k, double scale = 1.0);
};

/// Incrementally assembles an SdpProblem: free variables, PSD sub-blocks
/// laid out along the diagonal of the single PSD block, entry pins, and the
/// LMI helper constructions. Sub-blocks never share rows, so PSD-ness of the
/// whole block is exactly PSD-ness of each sub-block.
class SdpBuilder {
 public:
  int add_free();                              // index of a new free scalar
  int add_psd_block(int k);                    // offset of a new k x k sub-block
  LinExpr block_entry(int offset, int i, int j) const;
  MatExpr block_expr(int offset, int k) const;

  void add_eq(const LinExpr& e, double rhs = 0.0);   // e == rhs
  void add_le(const LinExpr& e, double rhs = 0.0);   // e <= rhs

  /// Pins every entry of a fresh k x k PSD sub-block to the given affine
  /// expression, i.e. adds the constraint M(x, y) is PSD. Returns the block
  /// offset.
  int pin_psd_block(const MatExpr& M);

  /// [[M, I], [I, N]] is PSD (Schur complement: N >= M^{-1} when M > 0).
  void schur_block(const MatExpr& M, const MatExpr& N);

  /// -t I <= M <= t I via the two pinned blocks t I - M and t I + M; with
  /// minimization of t this is the spectral-norm epigraph of M.
  void spectral_norm_epigraph(const MatExpr& M, int t_free);

  void set_objective(ObjectiveSense sense, const LinExpr& objective);

  SdpProblem build() const;

 private:
  void add_row(const LinExpr& e, double rhs, ConstraintSense sense);

  int psd_dim_ = 0;
  int free_dim_ = 0;
  ObjectiveSense sense_ = ObjectiveSense::Min;
  LinExpr objective_;
  struct PendingRow {
    LinExpr e;
    double rhs;
    ConstraintSense sense;
  };
  std::vector<PendingRow> rows_;
};

}  // namespace wopt
