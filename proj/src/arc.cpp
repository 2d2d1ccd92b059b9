#include "bmsdp/arc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bmsdp {

namespace {

double cubic_model(const Vector& g, const Matrix& H, double sigma, const Vector& s) {
  return g.dot(s) + 0.5 * s.dot(H * s) + (sigma / 3.0) * std::pow(s.norm(), 3);
}

}  // namespace

Vector solve_cubic_subproblem(const Vector& g, const SymmetricMatrix& H, double sigma_reg) {
  if (!(sigma_reg > 0.0)) throw std::invalid_argument("solve_cubic_subproblem: sigma_reg > 0");
  const long d = g.size();
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  const Vector lam = es.eigenvalues();
  const Matrix Q = es.eigenvectors();
  const Vector gh = Q.transpose() * g;
  const double lam1 = lam[0];
  const double r0 = std::max(0.0, -lam1 / sigma_reg);

  // Minimizer satisfies (H + sigma r I) s = -g with r = ||s||, H + sigma r I psd.
  // psi(r) = ||(H + sigma r I)^-1 g|| is decreasing on (r0, inf); the optimal
  // radius is the unique root of psi(r) = r, unless the hard case applies.
  const double eig_cluster = 1e-12 * (1.0 + std::abs(lam1));
  double g_min_space = 0.0;  // mass of g on the bottom eigenspace
  for (long i = 0; i < d; ++i)
    if (lam[i] - lam1 <= eig_cluster) g_min_space += gh[i] * gh[i];
  g_min_space = std::sqrt(g_min_space);

  auto psi = [&](double r) {
    double s2 = 0.0;
    for (long i = 0; i < d; ++i) {
      double den = lam[i] + sigma_reg * r;
      if (den <= 0.0) return std::numeric_limits<double>::infinity();
      s2 += (gh[i] / den) * (gh[i] / den);
    }
    return std::sqrt(s2);
  };

  if (g.norm() == 0.0 && lam1 >= 0.0) return Vector::Zero(d);

  bool hard_case = false;
  if (lam1 < 0.0 && g_min_space <= 1e-14 * (1.0 + g.norm())) {
    // g has (numerically) no component on the bottom eigenspace: check the
    // limit of psi at r0 using the remaining components.
    double s2 = 0.0;
    for (long i = 0; i < d; ++i) {
      if (lam[i] - lam1 <= eig_cluster) continue;
      double den = lam[i] + sigma_reg * r0;  // = lam[i] - lam1 > 0
      s2 += (gh[i] / den) * (gh[i] / den);
    }
    if (std::sqrt(s2) <= r0) hard_case = true;
  }

  Vector sh(d);
  if (hard_case) {
    double s2 = 0.0;
    for (long i = 0; i < d; ++i) {
      if (lam[i] - lam1 <= eig_cluster) {
        sh[i] = 0.0;
      } else {
        sh[i] = -gh[i] / (lam[i] + sigma_reg * r0);
        s2 += sh[i] * sh[i];
      }
    }
    const double alpha = std::sqrt(std::max(0.0, r0 * r0 - s2));
    // Either sign of the eigenvector component is optimal when g is exactly
    // orthogonal; pick the numerically better one.
    Vector sp = sh, sm = sh;
    sp[0] += alpha;
    sm[0] -= alpha;
    Vector cand_p = Q * sp, cand_m = Q * sm;
    return cubic_model(g, H, sigma_reg, cand_p) <= cubic_model(g, H, sigma_reg, cand_m) ? cand_p
                                                                                        : cand_m;
  }

  // Easy case: bracket then bisect psi(r) - r = 0 on (r0, hi].
  double lo = r0;
  double hi = std::max(r0, 1e-8) * 2.0 + 1e-8;
  for (int i = 0; i < 200 && psi(hi) > hi; ++i) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (psi(mid) > mid)
      lo = mid;
    else
      hi = mid;
  }
  const double r = 0.5 * (lo + hi);
  for (long i = 0; i < d; ++i) {
    double den = lam[i] + sigma_reg * r;
    sh[i] = den > 0.0 ? -gh[i] / den : 0.0;
  }
  return Q * sh;
}

ArcResult arc_minimize(const SmoothObjective& obj, const Vector& y0, const ArcSettings& st) {
  if (!(st.eps1 > 0.0) || !(st.eps2 > 0.0))
    throw std::invalid_argument("arc_minimize: eps1, eps2 must be positive");
  if (!(0.0 < st.eta1 && st.eta1 <= st.eta2 && st.eta2 < 1.0))
    throw std::invalid_argument("arc_minimize: need 0 < eta1 <= eta2 < 1");
  if (!(st.gamma_dec < 1.0 && 1.0 < st.gamma_inc))
    throw std::invalid_argument("arc_minimize: need gamma_dec < 1 < gamma_inc");

  ArcResult res;
  res.y = y0;
  res.value = obj.value(y0);
  if (!std::isfinite(res.value)) {
    res.status = ArcStatus::kNonFinite;
    return res;
  }

  double sigma = st.sigma0;
  constexpr double kSigmaMin = 1e-16, kSigmaMax = 1e16;

  for (long it = 0; it < st.max_iters; ++it) {
    Vector g = obj.gradient(res.y);
    if (!g.allFinite()) {
      res.status = ArcStatus::kNonFinite;
      return res;
    }
    res.grad_norm = g.norm();
    Matrix H = obj.hessian(res.y);
    if (!H.allFinite()) {
      res.status = ArcStatus::kNonFinite;
      return res;
    }

    if (res.grad_norm <= st.eps1) {
      res.hess_min_eig = min_eigenvalue(H);
      if (res.hess_min_eig >= -st.eps2) {
        res.status = ArcStatus::kConverged;
        return res;
      }
    }

    Vector s = solve_cubic_subproblem(g, H, sigma);
    const double model_dec = -cubic_model(g, H, sigma, s);
    double new_value = obj.value(res.y + s);
    if (!std::isfinite(new_value)) {
      // Treat as a failed step; heavier regularization shortens it.
      sigma = std::min(sigma * st.gamma_inc, kSigmaMax);
      ++res.iterations;
      continue;
    }

    bool accepted = false;
    if (model_dec > 0.0) {
      const double rho = (res.value - new_value) / model_dec;
      if (rho >= st.eta1) {
        accepted = true;
        res.y += s;
        res.value = new_value;
        if (rho >= st.eta2) sigma = std::max(sigma * st.gamma_dec, kSigmaMin);
      } else {
        sigma = std::min(sigma * st.gamma_inc, kSigmaMax);
      }
    } else {
      sigma = std::min(sigma * st.gamma_inc, kSigmaMax);
    }
    ++res.iterations;
    if (st.record_trace)
      res.trace.push_back({res.value, res.grad_norm, sigma, model_dec, accepted});
  }

  res.status = ArcStatus::kBudgetExhausted;
  Vector g = obj.gradient(res.y);
  res.grad_norm = g.allFinite() ? g.norm() : std::numeric_limits<double>::quiet_NaN();
  res.hess_min_eig = min_eigenvalue(obj.hessian(res.y));
  return res;
}

}  // namespace bmsdp
