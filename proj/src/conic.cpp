#include "wopt/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace wopt {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIter: return "max_iter";
  }
  return "?";
}

int svec_size(int s) { return s * (s + 1) / 2; }

int svec_index(int s, int i, int j) {
  // lower triangle, column-major: column j holds rows j..s-1
  return j * s - j * (j - 1) / 2 + (i - j);
}

Eigen::VectorXd svec(const Eigen::MatrixXd& A) {
  const int s = static_cast<int>(A.rows());
  const double r2 = std::sqrt(2.0);
  Eigen::VectorXd v(svec_size(s));
  int k = 0;
  for (int j = 0; j < s; ++j) {
    v[k++] = A(j, j);
    for (int i = j + 1; i < s; ++i) v[k++] = r2 * 0.5 * (A(i, j) + A(j, i));
  }
  return v;
}

Eigen::MatrixXd unsvec(const Eigen::VectorXd& v, int s) {
  const double inv_r2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd A(s, s);
  int k = 0;
  for (int j = 0; j < s; ++j) {
    A(j, j) = v[k++];
    for (int i = j + 1; i < s; ++i) {
      A(i, j) = inv_r2 * v[k++];
      A(j, i) = A(i, j);
    }
  }
  return A;
}

double SdpResiduals::max() const { return std::max(primal, std::max(dual, gap)); }

void SdpProblem::add_constraint(const Eigen::MatrixXd& A, const Eigen::VectorXd& a, double b_,
                                ConstraintSense s) {
  if (A.rows() != psd_dim || A.cols() != psd_dim)
    throw std::invalid_argument("constraint coefficient matrix has wrong dimensions");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("constraint coefficient matrix is not symmetric");
  if (a.size() != 0 && a.size() != free_dim)
    throw std::invalid_argument("free-variable coefficient vector has wrong length");
  rows.push_back(Row{svec(A), a, b_, s});
}

void SdpProblem::add_constraint_svec(Eigen::VectorXd A_svec, Eigen::VectorXd a, double b_,
                                     ConstraintSense s) {
  if (A_svec.size() != svec_size(psd_dim))
    throw std::invalid_argument("svec coefficient vector has wrong length");
  if (a.size() != 0 && a.size() != free_dim)
    throw std::invalid_argument("free-variable coefficient vector has wrong length");
  rows.push_back(Row{std::move(A_svec), std::move(a), b_, s});
}

void SdpProblem::set_objective(ObjectiveSense s, const Eigen::MatrixXd& cX,
                               const Eigen::VectorXd& cy) {
  if (cX.rows() != psd_dim || cX.cols() != psd_dim)
    throw std::invalid_argument("objective coefficient matrix has wrong dimensions");
  if ((cX - cX.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("objective coefficient matrix is not symmetric");
  if (cy.size() != free_dim) throw std::invalid_argument("objective free coefficients wrong length");
  sense = s;
  c_svec = svec(cX);
  c_free = cy;
}

namespace {

struct ConeLayout {
  int s = 0;       // PSD side
  int d_svec = 0;  // svec length
  int d_free = 0;
  int d_slack = 0;
  int total() const { return d_svec + d_free + d_slack; }
};

// Projection onto PSD(s) x R^free x R+^slack, in place.
void project_cone(Eigen::VectorXd& v, const ConeLayout& lay,
                  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es) {
  if (lay.s > 0) {
    Eigen::MatrixXd S = unsvec(v.head(lay.d_svec), lay.s);
    es.compute(S);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    S.noalias() = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    v.head(lay.d_svec) = svec(S);
  }
  v.tail(lay.d_slack) = v.tail(lay.d_slack).cwiseMax(0.0);
}

// Distance measure to the cone / dual cone along the PSD part: magnitude of
// the most negative eigenvalue (both cones are self-dual).
double psd_violation(const Eigen::VectorXd& v, const ConeLayout& lay,
                     Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es) {
  if (lay.s == 0) return 0.0;
  es.compute(unsvec(v.head(lay.d_svec), lay.s), Eigen::EigenvaluesOnly);
  return std::max(0.0, -es.eigenvalues().minCoeff());
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts) {
  if (p.psd_dim < 0 || p.free_dim < 0 || (p.psd_dim == 0 && p.free_dim == 0))
    throw std::invalid_argument("solve: empty problem");

  ConeLayout lay;
  lay.s = p.psd_dim;
  lay.d_svec = svec_size(p.psd_dim);
  lay.d_free = p.free_dim;
  for (const auto& row : p.rows)
    if (row.sense == ConstraintSense::Le) ++lay.d_slack;

  const int N = lay.total();
  const int r = p.num_rows();
  const double minimize_sign = (p.sense == ObjectiveSense::Max) ? -1.0 : 1.0;

  // Stack [svec(X); y; slacks] and make every row an equality.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(r, N);
  Eigen::VectorXd b(r);
  {
    int slack = 0;
    for (int i = 0; i < r; ++i) {
      const auto& row = p.rows[i];
      A.row(i).head(lay.d_svec) = row.A_svec.transpose();
      if (row.a.size() > 0) A.row(i).segment(lay.d_svec, lay.d_free) = row.a.transpose();
      if (row.sense == ConstraintSense::Le) A(i, lay.d_svec + lay.d_free + slack++) = 1.0;
      b[i] = row.b;
    }
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(N);
  if (p.c_svec.size() > 0) c.head(lay.d_svec) = minimize_sign * p.c_svec;
  if (p.c_free.size() > 0) c.segment(lay.d_svec, lay.d_free) = minimize_sign * p.c_free;

  // Row equilibration plus a scalar cost scaling.
  Eigen::VectorXd row_scale(r);
  for (int i = 0; i < r; ++i) {
    row_scale[i] = 1.0 / std::max(1e-8, A.row(i).norm());
    A.row(i) *= row_scale[i];
    b[i] *= row_scale[i];
  }
  const double cost_scale = 1.0 / std::max(1e-12, c.norm());
  Eigen::VectorXd chat = cost_scale * c;

  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  if (r > 0) {
    Eigen::MatrixXd AAt(r, r);
    AAt.noalias() = A * A.transpose();
    AAt.diagonal().array() += 1e-10;
    ldlt.compute(AAt);
  }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd z(N), uhat(N), nu(r), work(N);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;

  double rho = opts.rho;
  const double relax = opts.relaxation;
  const double b_nrm = (r > 0) ? b.cwiseAbs().maxCoeff() : 0.0;
  const double c_nrm = chat.cwiseAbs().maxCoeff();

  // Divergence-direction snapshots for infeasibility detection.
  Eigen::VectorXd mu_prev = Eigen::VectorXd::Zero(r);
  Eigen::VectorXd v_prev = Eigen::VectorXd::Zero(N);
  int infeas_hits = 0, unbdd_hits = 0;

  SdpSolution sol;
  sol.status = SolveStatus::MaxIter;

  int iter = 0;
  for (iter = 1; iter <= opts.max_iter; ++iter) {
    z = v - lam - chat / rho;
    if (r > 0) {
      nu.noalias() = A * z;
      nu -= b;
      nu = ldlt.solve(nu);
      u = z;
      u.noalias() -= A.transpose() * nu;
    } else {
      u = z;
    }
    uhat = relax * u + (1.0 - relax) * v;
    z = uhat + lam;  // reuse z as the pre-projection point
    v = z;
    project_cone(v, lay, es);
    lam += uhat - v;

    if (iter % opts.check_every != 0 && iter != opts.max_iter) continue;

    const Eigen::VectorXd mu = rho * nu;
    double r_prim = 0.0;
    if (r > 0) {
      work.noalias() = A.transpose() * mu;  // reuse below
      r_prim = (A * v - b).cwiseAbs().maxCoeff() / (1.0 + b_nrm);
    } else {
      work.setZero();
    }
    const double r_dual = (chat + work + rho * lam).cwiseAbs().maxCoeff() / (1.0 + c_nrm);
    const double pobj = chat.dot(v);
    const double dobj = (r > 0) ? -b.dot(mu) : 0.0;
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    sol.residuals = SdpResiduals{r_prim, r_dual, gap};
    if (std::max(r_prim, std::max(r_dual, gap)) <= opts.tol) {
      sol.status = SolveStatus::Optimal;
      break;
    }

    // Infeasibility: the per-window drift of the equality multipliers
    // converges to a Farkas direction when no feasible point exists; the
    // drift of the cone iterate converges to an unbounded ray when the
    // objective is unbounded below. Require two consecutive hits.
    if (r > 0 && iter >= 4 * opts.check_every) {
      const double eps = 1e-7;
      bool hit_infeas = false, hit_unbdd = false;

      Eigen::VectorXd dmu = mu - mu_prev;
      const double dn = dmu.norm();
      if (dn > 1e-12) {
        dmu /= dn;
        if (b.dot(dmu) < 0.0) dmu = -dmu;
        if (b.dot(dmu) > 1e-6) {
          Eigen::VectorXd w = -(A.transpose() * dmu);  // must lie in the dual cone
          const double psd_err = psd_violation(w, lay, es);
          const double free_err =
              (lay.d_free > 0) ? w.segment(lay.d_svec, lay.d_free).cwiseAbs().maxCoeff() : 0.0;
          const double slack_err =
              (lay.d_slack > 0) ? std::max(0.0, -w.tail(lay.d_slack).minCoeff()) : 0.0;
          hit_infeas = std::max(psd_err, std::max(free_err, slack_err)) <= eps;
        }
      }

      Eigen::VectorXd dv = v - v_prev;
      const double dvn = dv.norm();
      if (dvn > 1e-12 && chat.dot(dv) / dvn < -1e-6) {
        dv /= dvn;
        const double ray_err = (A * dv).cwiseAbs().maxCoeff();
        const double cone_err = psd_violation(dv, lay, es);
        const double slack_err =
            (lay.d_slack > 0) ? std::max(0.0, -dv.tail(lay.d_slack).minCoeff()) : 0.0;
        hit_unbdd = std::max(ray_err, std::max(cone_err, slack_err)) <= eps;
      }

      infeas_hits = hit_infeas ? infeas_hits + 1 : 0;
      unbdd_hits = hit_unbdd ? unbdd_hits + 1 : 0;
      mu_prev = mu;
      v_prev = v;
      if (infeas_hits >= 2) {
        sol.status = SolveStatus::Infeasible;
        break;
      }
      if (unbdd_hits >= 2) {
        sol.status = SolveStatus::Unbounded;
        break;
      }
    }

    if (opts.adaptive_rho && iter < opts.max_iter / 2) {
      if (r_prim > 10.0 * r_dual && rho < 1e6) {
        rho *= 2.0;
        lam *= 0.5;
      } else if (r_dual > 10.0 * r_prim && rho > 1e-6) {
        rho *= 0.5;
        lam *= 2.0;
      }
    }
  }

  sol.iterations = std::min(iter, opts.max_iter);
  sol.X = (lay.s > 0) ? unsvec(v.head(lay.d_svec), lay.s) : Eigen::MatrixXd(0, 0);
  sol.y = v.segment(lay.d_svec, lay.d_free);
  double obj = 0.0;
  if (p.c_svec.size() > 0) obj += p.c_svec.dot(v.head(lay.d_svec));
  if (p.c_free.size() > 0) obj += p.c_free.dot(sol.y);
  sol.objective = obj;
  return sol;
}

SdpSolution solve(const SdpProblem& p, double tol, int max_iter) {
  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve(p, opts);
}

void dump_triplets(const SdpProblem& p, std::ostream& os) {
  const double inv_r2 = 1.0 / std::sqrt(2.0);
  os << "psd_dim " << p.psd_dim << "\nfree_dim " << p.free_dim << "\nsense "
     << (p.sense == ObjectiveSense::Min ? "min" : "max") << "\n";
  auto emit_svec = [&](const Eigen::VectorXd& s) {
    int k = 0;
    for (int j = 0; j < p.psd_dim; ++j)
      for (int i = j; i < p.psd_dim; ++i, ++k) {
        const double val = (i == j) ? s[k] : inv_r2 * s[k];
        if (val != 0.0) os << i << " " << j << " " << val << "\n";
      }
  };
  os << "objective_X\n";
  if (p.c_svec.size() > 0) emit_svec(p.c_svec);
  os << "objective_free\n";
  for (int k = 0; k < p.c_free.size(); ++k)
    if (p.c_free[k] != 0.0) os << k << " " << p.c_free[k] << "\n";
  for (int rix = 0; rix < p.num_rows(); ++rix) {
    const auto& row = p.rows[rix];
    os << "constraint " << rix << " " << (row.sense == ConstraintSense::Eq ? "eq" : "le") << " "
       << row.b << "\n";
    emit_svec(row.A_svec);
    os << "free\n";
    for (int k = 0; k < row.a.size(); ++k)
      if (row.a[k] != 0.0) os << k << " " << row.a[k] << "\n";
  }
}

}  // namespace wopt
