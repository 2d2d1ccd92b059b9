#include "bmsdp/certificates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bmsdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix kron_identity_left(long p, const SymmetricMatrix& S) {
  // I_p (x) S acting on column-major vec(U) for U in R^{n x p}.
  const long n = S.rows();
  Matrix H = Matrix::Zero(n * p, n * p);
  for (long j = 0; j < p; ++j) H.block(j * n, j * n, n, n) = S;
  return H;
}

// Rows vec(A_i Y)^T, so G vec(U) = A(U Y^T).
Matrix slab_constraint_matrix(const ConstraintMap& map, const FactorPoint& Y) {
  const long n = map.n(), p = Y.cols(), m = map.m();
  Matrix G(m, n * p);
  for (long i = 0; i < m; ++i) {
    Matrix AY = map.matrix(i) * Y;
    G.row(i) = Eigen::Map<Vector>(AY.data(), n * p).transpose();
  }
  return G;
}

Matrix unvec(const Vector& v, long n, long p) {
  return Eigen::Map<const Matrix>(v.data(), n, p);
}

}  // namespace

std::string verdict_to_string(Verdict v) {
  switch (v) {
    case Verdict::kCertified: return "certified";
    case Verdict::kFalsified: return "falsified";
    case Verdict::kIndeterminate: return "indeterminate";
  }
  return "?";
}

SlabCheckResult check_quadratic_slab(const SymmetricMatrix& H, const Matrix& G, double eps2,
                                     double gamma, const SlabOptions& opts) {
  SlabCheckResult r;
  const long d = H.rows();
  auto [lam_min, v_min] = min_eigenpair(H);
  r.min_eig = lam_min;
  r.null_restricted_min = kInf;
  if (lam_min >= -eps2) {
    r.verdict = Verdict::kCertified;
    return r;
  }

  // The global minimizer itself may already lie in the slab.
  if ((G * v_min).norm() <= gamma) {
    r.verdict = Verdict::kFalsified;
    r.witness = v_min;
    r.witness_value = lam_min;
    return r;
  }

  // Exact null space of G: any unit vector there is inside the slab.
  Eigen::JacobiSVD<Matrix> svd(G, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = std::max(G.rows(), G.cols()) * 1e-14 * (sv.size() > 0 ? sv[0] : 0.0);
  long rank = 0;
  for (long i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++rank;
  const long null_dim = d - rank;
  Matrix N;
  if (null_dim > 0) {
    N = svd.matrixV().rightCols(null_dim);
    Matrix B = N.transpose() * H * N;
    auto [rmin, rvec] = min_eigenpair(symmetrize(B));
    r.null_restricted_min = rmin;
    if (rmin < -eps2) {
      Vector w = N * rvec;
      w.normalize();
      r.verdict = Verdict::kFalsified;
      r.witness = w;
      r.witness_value = w.dot(H * w);
      return r;
    }
    if (gamma == 0.0) {
      // The slab is exactly the null space, so the restricted eigensolve
      // decides the condition.
      r.verdict = Verdict::kCertified;
      return r;
    }
  } else if (gamma == 0.0) {
    // Trivial null space and zero slab width: the condition is vacuous.
    r.verdict = Verdict::kCertified;
    return r;
  }

  // Randomized search on the slab boundary.
  Rng rng(opts.seed);
  for (int s = 0; s < opts.samples; ++s) {
    Vector u = rng.gaussian_vector(d);
    if (u.norm() == 0.0) continue;
    Vector u_null = null_dim > 0 ? Vector(N * (N.transpose() * u)) : Vector(Vector::Zero(d));
    Vector u_perp = u - u_null;
    double gp = (G * u_perp).norm();
    double alpha = 1.0;
    const double nn = u_null.squaredNorm(), np2 = u_perp.squaredNorm();
    if (gp * gp > gamma * gamma * np2) {
      if (nn == 0.0) continue;  // direction cannot be brought inside the slab
      alpha = std::sqrt(gamma * gamma * nn / (gp * gp - gamma * gamma * np2));
      alpha = std::min(alpha, 1.0);
    }
    Vector cand = u_null + alpha * u_perp;
    double cn = cand.norm();
    if (cn == 0.0) continue;
    cand /= cn;
    if ((G * cand).norm() > gamma) continue;
    double val = cand.dot(H * cand);
    if (val < -eps2) {
      r.verdict = Verdict::kFalsified;
      r.witness = cand;
      r.witness_value = val;
      return r;
    }
  }

  r.verdict = Verdict::kIndeterminate;
  return r;
}

CertificateReport check_approx_optimal_sdp(const SdpInstance& inst, const SymmetricMatrix& X,
                                           const Vector& lambda, const ToleranceBundle& tol) {
  if (X.rows() != inst.n() || X.cols() != inst.n())
    throw std::invalid_argument("check_approx_optimal_sdp: dimension mismatch");
  CertificateReport rep;
  rep.tol = tol;
  rep.multiplier = lambda;

  const SymmetricMatrix S = inst.cost - inst.map.apply_adjoint(lambda);
  const double feas = (inst.map.apply(X) - inst.rhs).norm();
  const double stat = (S * X).norm();
  auto [min_eig_X, vX] = min_eigenpair(X);
  auto [min_eig_S, vS] = min_eigenpair(S);
  const double slack = psd_slack(X.norm());

  rep.residuals["feas_resid"] = feas;
  rep.residuals["stat_resid"] = stat;
  rep.residuals["min_eig_X"] = min_eig_X;
  rep.residuals["min_eig_S"] = min_eig_S;

  if (feas > tol.eps0) {
    rep.verdict = Verdict::kFalsified;
    rep.violated = "feas_resid";
    rep.witness = X;
  } else if (stat > tol.eps1) {
    rep.verdict = Verdict::kFalsified;
    rep.violated = "stat_resid";
    rep.witness = X;
  } else if (min_eig_X < -slack) {
    rep.verdict = Verdict::kFalsified;
    rep.violated = "min_eig_X";
    rep.witness = vX;
  } else if (min_eig_S < -tol.eps2) {
    rep.verdict = Verdict::kFalsified;
    rep.violated = "min_eig_S";
    rep.witness = vS;
  } else {
    rep.verdict = Verdict::kCertified;
  }
  return rep;
}

CertificateReport check_afac_bm(const SdpInstance& inst, const FactorPoint& Y,
                                const Vector& lambda, const ToleranceBundle& tol,
                                const SlabOptions& opts) {
  const long n = inst.n(), p = Y.cols();
  if (Y.rows() != n) throw std::invalid_argument("check_afac_bm: dimension mismatch");
  CertificateReport rep;
  rep.tol = tol;
  rep.multiplier = lambda;

  const SymmetricMatrix S = inst.cost - inst.map.apply_adjoint(lambda);
  const SymmetricMatrix X = Y * Y.transpose();
  const double feas = (inst.map.apply(X) - inst.rhs).norm();
  const double stat = (S * Y).norm();
  rep.residuals["feas_resid"] = feas;
  rep.residuals["stat_resid"] = stat;
  rep.residuals["sigma_p"] = sigma_p(Y);
  rep.residuals["min_eig_X"] = min_eigenvalue(X);

  if (feas > tol.eps0) {
    rep.verdict = Verdict::kFalsified;
    rep.violated = "feas_resid";
    rep.witness = Y;
    rep.residuals["min_eig_S"] = min_eigenvalue(S);
    return rep;
  }
  if (stat > tol.eps1) {
    rep.verdict = Verdict::kFalsified;
    rep.violated = "stat_resid";
    rep.witness = Y;
    rep.residuals["min_eig_S"] = min_eigenvalue(S);
    return rep;
  }

  const Matrix H = kron_identity_left(p, S);
  const Matrix G = slab_constraint_matrix(inst.map, Y);
  SlabCheckResult slab = check_quadratic_slab(H, G, tol.eps2, tol.gamma, opts);
  rep.residuals["min_eig_S"] = min_eigenvalue(S);
  rep.residuals["slab_min_eig"] = slab.min_eig;
  rep.residuals["slab_null_restricted_min"] = slab.null_restricted_min;
  rep.verdict = slab.verdict;
  if (slab.verdict == Verdict::kFalsified) {
    rep.violated = "second_order_slab";
    rep.witness = unvec(*slab.witness, n, p);
    rep.residuals["witness_value"] = slab.witness_value;
  }
  return rep;
}

CertificateReport check_ac_ls(const ConstraintMap& map, const Vector& b, const FactorPoint& Y,
                              double eps1, double eps2) {
  const long n = map.n(), p = Y.cols();
  if (Y.rows() != n || b.size() != map.m())
    throw std::invalid_argument("check_ac_ls: dimension mismatch");
  CertificateReport rep;
  rep.tol.eps1 = eps1;
  rep.tol.eps2 = eps2;

  const SymmetricMatrix X = Y * Y.transpose();
  const Vector resid = map.apply(X) - b;
  const SymmetricMatrix S = 2.0 * map.apply_adjoint(resid);
  const double stat = (S * Y).norm();
  const Matrix G = slab_constraint_matrix(map, Y);
  const Matrix Q = kron_identity_left(p, S) + 4.0 * G.transpose() * G;
  auto [qmin, qvec] = min_eigenpair(symmetrize(Q));

  rep.residuals["feas_resid"] = resid.norm();
  rep.residuals["stat_resid"] = stat;
  rep.residuals["min_eig_q"] = qmin;
  rep.residuals["min_eig_S"] = min_eigenvalue(S);
  rep.residuals["sigma_p"] = sigma_p(Y);

  if (stat > eps1) {
    rep.verdict = Verdict::kFalsified;
    rep.violated = "stat_resid";
    rep.witness = Y;
  } else if (qmin < -eps2) {
    rep.verdict = Verdict::kFalsified;
    rep.violated = "second_order_form";
    rep.witness = unvec(qvec, n, p);
    rep.residuals["witness_value"] = qmin;
  } else {
    rep.verdict = Verdict::kCertified;
  }
  return rep;
}

CertificateReport check_approx_optimal_ls(const ConstraintMap& map, const Vector& b,
                                          const SymmetricMatrix& X, const ToleranceBundle& tol) {
  if (X.rows() != map.n() || X.cols() != map.n() || b.size() != map.m())
    throw std::invalid_argument("check_approx_optimal_ls: dimension mismatch");
  CertificateReport rep;
  rep.tol = tol;

  const Vector resid = map.apply(X) - b;
  const SymmetricMatrix S = 2.0 * map.apply_adjoint(resid);
  const double feas = resid.norm();
  const double stat = (S * X).norm();
  auto [min_eig_X, vX] = min_eigenpair(X);
  auto [min_eig_S, vS] = min_eigenpair(S);
  const double slack = psd_slack(X.norm());

  rep.residuals["feas_resid"] = feas;
  rep.residuals["stat_resid"] = stat;
  rep.residuals["min_eig_X"] = min_eig_X;
  rep.residuals["min_eig_S"] = min_eig_S;

  if (min_eig_X < -slack) {
    rep.verdict = Verdict::kFalsified;
    rep.violated = "min_eig_X";
    rep.witness = vX;
    return rep;
  }
  if (feas <= tol.eps0) {
    rep.verdict = Verdict::kCertified;
    rep.residuals["branch"] = 0.0;
    return rep;
  }
  if (stat <= tol.eps1 && min_eig_S >= -tol.eps2) {
    rep.verdict = Verdict::kCertified;
    rep.residuals["branch"] = 1.0;
    return rep;
  }
  rep.verdict = Verdict::kFalsified;
  if (stat > tol.eps1) {
    rep.violated = "stat_resid";
    rep.witness = X;
  } else {
    rep.violated = "min_eig_S";
    rep.witness = vS;
  }
  return rep;
}

double gap_bound(const ToleranceBundle& eps, double lambda_norm, double x_norm, long n,
                 GapMode mode) {
  const double root_n = std::sqrt(static_cast<double>(n));
  double g = eps.eps1 * root_n + eps.eps2 * x_norm * root_n;
  if (mode == GapMode::kSdp) g += eps.eps0 * lambda_norm;
  return g;
}

double licq_margin(const ConstraintMap& map, const Vector& b, const FactorPoint& Y) {
  (void)b;
  const long n = map.n(), p = Y.cols(), m = map.m();
  if (Y.rows() != n) throw std::invalid_argument("licq_margin: dimension mismatch");
  if (n * p < m) return 0.0;  // Jacobian cannot have full row rank
  Matrix J(m, n * p);
  for (long i = 0; i < m; ++i) {
    Matrix row = 2.0 * map.matrix(i) * Y;
    J.row(i) = Eigen::Map<Vector>(row.data(), n * p).transpose();
  }
  return min_singular_value(J);
}

double multiplier_bound(double eps1, double rho, double grad_f_norm) {
  if (!(rho > 0.0)) throw std::invalid_argument("multiplier_bound: rho must be positive");
  return (eps1 + grad_f_norm) / rho;
}

ToleranceBundle unperturbed_transfer(const CertificateReport& report, double sigma, double x_norm,
                                     TransferMode mode,
                                     const std::map<std::string, double>& extras) {
  if (!report.certified())
    throw std::invalid_argument("unperturbed_transfer: report is not certified");
  ToleranceBundle out = report.tol;
  if (mode == TransferMode::kCost) {
    out.eps1 += sigma * x_norm;
    out.eps2 += sigma;
    return out;
  }
  // Constraint perturbation: branch-dependent.
  auto it = report.residuals.find("branch");
  const bool residual_branch = (it != report.residuals.end() && it->second == 0.0);
  if (residual_branch) {
    out.eps0 += sigma * x_norm;
    return out;
  }
  auto need = [&](const std::string& k) {
    auto e = extras.find(k);
    if (e == extras.end())
      throw std::invalid_argument("unperturbed_transfer: missing extra '" + k + "'");
    return e->second;
  };
  const double R_A = need("R_A");
  const double lambda_norm = need("lambda_norm");
  const double dS = R_A * 2.0 * sigma * x_norm + sigma * lambda_norm;
  out.eps1 += dS * x_norm;
  out.eps2 += dS;
  return out;
}

}  // namespace bmsdp
