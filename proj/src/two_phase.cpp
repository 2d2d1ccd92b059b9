#include "bmsdp/two_phase.hpp"

#include <cmath>
#include <sstream>

namespace bmsdp {

namespace {

double clamp_nonneg(double x) { return x < 0.0 ? 0.0 : x; }

void check(bool ok, const char* what, double lhs, double rhs) {
  if (!ok) {
    std::ostringstream os;
    os << "trace invariant violated: " << what << " (lhs=" << lhs << ", rhs=" << rhs << ")";
    throw TraceInvariantViolation(os.str());
  }
}

}  // namespace

std::string phase_case_to_string(PhaseCase c) {
  switch (c) {
    case PhaseCase::kPhase1: return "phase1";
    case PhaseCase::kA: return "a";
    case PhaseCase::kB: return "b";
    case PhaseCase::kC: return "c";
  }
  return "?";
}

SmoothObjective make_nu_oracle(const NlpProblem& problem) {
  SmoothObjective nu;
  nu.dim = problem.dim;
  const auto* p = &problem;
  nu.value = [p](const Vector& y) { return p->h.value(y).squaredNorm(); };
  nu.gradient = [p](const Vector& y) {
    return Vector(2.0 * p->h.jacobian(y).transpose() * p->h.value(y));
  };
  nu.hessian = [p](const Vector& y) {
    const Matrix J = p->h.jacobian(y);
    const Vector h = p->h.value(y);
    return Matrix(2.0 * J.transpose() * J + 2.0 * p->h.weighted_hessian(y, h));
  };
  return nu;
}

SmoothObjective make_mu_oracle(const NlpProblem& problem, double t) {
  SmoothObjective mu;
  mu.dim = problem.dim;
  const auto* p = &problem;
  mu.value = [p, t](const Vector& y) {
    const double d = p->f.value(y) - t;
    return d * d + p->h.value(y).squaredNorm();
  };
  mu.gradient = [p, t](const Vector& y) {
    const double d = p->f.value(y) - t;
    return Vector(2.0 * d * p->f.gradient(y) + 2.0 * p->h.jacobian(y).transpose() * p->h.value(y));
  };
  mu.hessian = [p, t](const Vector& y) {
    const double d = p->f.value(y) - t;
    const Vector g = p->f.gradient(y);
    const Matrix J = p->h.jacobian(y);
    const Vector h = p->h.value(y);
    return Matrix(2.0 * g * g.transpose() + 2.0 * d * p->f.hessian(y) +
                  2.0 * J.transpose() * J + 2.0 * p->h.weighted_hessian(y, h));
  };
  return mu;
}

TwoPhaseResult two_phase_solve(const NlpProblem& problem, const Vector& y0, double eps0,
                               const TwoPhaseSettings& st) {
  if (!(st.delta > 0.0 && st.delta < 1.0))
    throw std::invalid_argument("two_phase_solve: delta must be in (0,1)");
  if (!(eps0 > 0.0)) throw std::invalid_argument("two_phase_solve: eps0 must be positive");

  TwoPhaseResult res;
  const double gate = (st.delta * eps0) * (st.delta * eps0);  // (delta eps0)^2
  const double eps0_sq = eps0 * eps0;
  // Absolute slack for the runtime identity checks; they hold to rounding.
  const double slack = 1e-9 * (1.0 + eps0_sq);

  // Phase I: drive the constraint residual down.
  SmoothObjective nu = make_nu_oracle(problem);
  ArcResult inner = arc_minimize(nu, y0, st.inner);
  res.total_inner_iters += inner.iterations;
  Vector y = inner.y;
  double t_prev = problem.f.value(y);  // t_0 = f(y_1)
  const double nu1 = nu.value(y);

  if (inner.status == ArcStatus::kNonFinite) {
    res.outcome = TwoPhaseOutcome::kBudgetExhausted;
    res.y = y;
    res.t = t_prev;
    return res;
  }

  if (nu1 > gate) {
    PhaseTraceRow row;
    row.k = 1;
    row.label = PhaseCase::kPhase1;
    row.t = t_prev;
    row.mu_prev = nu1;
    row.nu = nu1;
    row.inner_iters = inner.iterations;
    row.grad_norm = nu.gradient(y).norm();
    row.min_eig = min_eigenvalue(nu.hessian(y));
    res.trace.push_back(row);
    res.outcome = TwoPhaseOutcome::kInfeasibleStall;
    res.y = y;
    res.t = t_prev;
    return res;
  }

  // Phase II setup: t_1 = f(y_1) - sqrt(eps0^2 - nu(y_1)).
  double t_cur = t_prev - std::sqrt(clamp_nonneg(eps0_sq - nu1));
  {
    SmoothObjective mu1 = make_mu_oracle(problem, t_cur);
    PhaseTraceRow row;
    row.k = 1;
    row.label = PhaseCase::kPhase1;
    row.t = t_cur;
    row.mu_prev = nu1;  // mu(t_0, y_1) = nu(y_1) since t_0 = f(y_1)
    row.nu = nu1;
    row.inner_iters = inner.iterations;
    row.grad_norm = mu1.gradient(y).norm();
    row.min_eig = min_eigenvalue(mu1.hessian(y));
    // k = 1 behaves as a case-(a) step: mu(t_1, y_1) = eps0^2 and the target
    // dropped by at least (1 - delta) eps0.
    check(std::abs(mu1.value(y) - eps0_sq) <= slack, "mu(t_k, y_k) == eps0^2 (k=1)",
          mu1.value(y), eps0_sq);
    check(t_prev - t_cur >= (1.0 - st.delta) * eps0 - slack, "t_{k-1} - t_k >= (1-delta) eps0",
          t_prev - t_cur, (1.0 - st.delta) * eps0);
    res.trace.push_back(row);
  }

  for (long k = 2; k <= st.max_outer + 1; ++k) {
    SmoothObjective mu_prev_oracle = make_mu_oracle(problem, t_cur);
    inner = arc_minimize(mu_prev_oracle, y, st.inner);
    res.total_inner_iters += inner.iterations;
    if (inner.status == ArcStatus::kNonFinite) {
      res.outcome = TwoPhaseOutcome::kBudgetExhausted;
      res.y = y;
      res.t = t_cur;
      return res;
    }
    y = inner.y;
    const double t_km1 = t_cur;
    const double mu_at_prev = mu_prev_oracle.value(y);
    const double fy = problem.f.value(y);
    const double nuy = problem.h.value(y).squaredNorm();

    PhaseTraceRow row;
    row.k = k;
    row.mu_prev = mu_at_prev;
    row.nu = nuy;
    row.inner_iters = inner.iterations;

    bool check_exit = false;
    if (mu_at_prev < gate) {  // case (a)
      row.label = PhaseCase::kA;
      t_cur = fy - std::sqrt(clamp_nonneg(eps0_sq - nuy));
      check_exit = true;
    } else if (fy < t_km1) {  // case (b)
      row.label = PhaseCase::kB;
      t_cur = 2.0 * fy - t_km1;
      check_exit = true;
    } else {  // case (c)
      row.label = PhaseCase::kC;
      // t_cur unchanged
    }
    row.t = t_cur;

    SmoothObjective mu_new = make_mu_oracle(problem, t_cur);
    const double mu_new_val = mu_new.value(y);
    row.grad_norm = mu_new.gradient(y).norm();
    row.min_eig = min_eigenvalue(mu_new.hessian(y));

    // Per-iteration identities.
    check(nuy <= mu_new_val + slack, "nu(y_k) <= mu(t_k, y_k)", nuy, mu_new_val);
    check(mu_new_val <= eps0_sq + slack, "mu(t_k, y_k) <= eps0^2", mu_new_val, eps0_sq);
    check(fy - t_cur >= -slack, "0 <= f(y_k) - t_k", fy - t_cur, 0.0);
    check(fy - t_cur <= eps0 + slack, "f(y_k) - t_k <= eps0", fy - t_cur, eps0);
    if (row.label == PhaseCase::kA) {
      check(std::abs(mu_new_val - eps0_sq) <= slack, "mu(t_k, y_k) == eps0^2 (case a)",
            mu_new_val, eps0_sq);
      check(t_km1 - t_cur >= (1.0 - st.delta) * eps0 - slack,
            "t_{k-1} - t_k >= (1-delta) eps0", t_km1 - t_cur, (1.0 - st.delta) * eps0);
    }
    if (row.label == PhaseCase::kB) {
      check(std::abs(mu_new_val - mu_at_prev) <= slack, "mu(t_k, y_k) == mu(t_{k-1}, y_k)",
            mu_new_val, mu_at_prev);
      check(t_km1 > t_cur, "t_{k-1} > t_k (case b)", t_km1, t_cur);
    }
    res.trace.push_back(row);

    const bool chi_ok = row.grad_norm <= st.inner.eps1 && row.min_eig >= -st.inner.eps2;
    bool done = false;
    if (check_exit) {
      done = chi_ok;
    } else {
      done = true;  // case (c) always exits; the inner solve certifies chi at t_k = t_{k-1}
    }
    if (done) {
      // Exit identities (the final iterate keeps mu above the gate).
      check(mu_new_val >= gate - slack, "mu(t_K, y_K) >= (delta eps0)^2", mu_new_val, gate);
      res.y = y;
      res.t = t_cur;
      res.outcome = (fy - t_cur > 1e-14 * (1.0 + std::abs(fy)))
                        ? TwoPhaseOutcome::kCritical
                        : TwoPhaseOutcome::kInfeasibleStall;
      return res;
    }
  }

  res.outcome = TwoPhaseOutcome::kBudgetExhausted;
  res.y = y;
  res.t = t_cur;
  return res;
}

MappedTolerances tolerance_mapping(const ToleranceBundle& eps, double R_lambda, double beta) {
  MappedTolerances out;
  if (!(R_lambda > 0.0) || !(eps.eps0 > 0.0) || !(eps.eps1 > 0.0) || !(eps.eps2 > 0.0)) {
    out.valid = false;
    return out;
  }
  out.eps0 = eps.eps0;
  out.eps1 = eps.eps0 * eps.eps1 / R_lambda;
  out.eps2 = 0.5 * eps.eps0 * eps.eps2 / R_lambda;
  out.delta = 0.5;
  const bool c_beta = eps.eps0 <= beta;
  const bool c_eps1 = eps.eps1 <= 1.0;
  const bool c_eps1_sq = eps.eps1 * eps.eps1 <= eps.eps0 * eps.eps2 / (16.0 * R_lambda);
  const bool c_gamma =
      eps.gamma * eps.gamma <= eps.eps0 * eps.eps2 / (16.0 * R_lambda * R_lambda * R_lambda);
  out.valid = c_beta && c_eps1 && c_eps1_sq && c_gamma;
  return out;
}

AfacExtraction extract_afac(const Vector& y, double t, const NlpProblem& problem,
                            const ToleranceBundle& targets, double rho, double L_f,
                            const SlabOptions& slab_opts) {
  const double fy = problem.f.value(y);
  if (!(fy - t > 0.0))
    throw std::domain_error("extract_afac: f(y) = t (infeasible-stall output has no multiplier)");

  AfacExtraction out;
  const double alpha = 1.0 / (fy - t);
  const Vector h = problem.h.value(y);
  out.lambda = alpha * h;
  out.alpha = alpha;
  out.R_lambda = 2.0 + 2.0 * L_f / rho;

  const Matrix J = problem.h.jacobian(y);
  const Vector grad_f = problem.f.gradient(y);

  // Lagrangian derivatives through the mu identities.
  SmoothObjective mu = make_mu_oracle(problem, t);
  const Vector grad_mu = mu.gradient(y);
  const Matrix hess_mu = mu.hessian(y);
  const Vector grad_L = alpha * 0.5 * grad_mu;
  Matrix Jt(J.rows() + 1, J.cols());  // augmented Jacobian
  Jt.row(0) = grad_f.transpose();
  Jt.bottomRows(J.rows()) = J;
  const Matrix hess_L = alpha * (0.5 * hess_mu - Jt.transpose() * Jt);

  CertificateReport rep;
  rep.tol = targets;
  rep.multiplier = out.lambda;
  const double feas = h.norm();
  const double stat = grad_L.norm();
  const double norm_1lambda = std::sqrt(1.0 + out.lambda.squaredNorm());
  const double mu_val = mu.value(y);
  rep.residuals["feas_resid"] = feas;
  rep.residuals["stat_resid"] = stat;
  rep.residuals["norm_1_lambda"] = norm_1lambda;
  rep.residuals["mu_value"] = mu_val;
  rep.residuals["licq_margin"] = J.cols() < J.rows() ? 0.0 : min_singular_value(J);

  const MappedTolerances mapped = tolerance_mapping(targets, out.R_lambda);
  const double gate = 0.25 * targets.eps0 * targets.eps0;  // (delta eps0)^2, delta = 1/2

  const bool first_ok = feas <= targets.eps0 && stat <= targets.eps1;
  const bool mu_route = mapped.valid && feas <= targets.eps0 &&
                        grad_mu.norm() <= mapped.eps1 &&
                        min_eigenvalue(hess_mu) >= -mapped.eps2 && mu_val >= gate &&
                        norm_1lambda <= out.R_lambda;
  rep.residuals["min_eig_L"] = min_eigenvalue(hess_L);

  if (mu_route && first_ok) {
    rep.verdict = Verdict::kCertified;
    out.mu_route = true;
  } else if (!first_ok) {
    rep.verdict = Verdict::kFalsified;
    rep.violated = feas > targets.eps0 ? "feas_resid" : "stat_resid";
    rep.witness = y;
  } else {
    // Direct slab check of the second-order condition.
    SlabCheckResult slab = check_quadratic_slab(symmetrize(hess_L), J, targets.eps2,
                                                targets.gamma, slab_opts);
    rep.residuals["slab_min_eig"] = slab.min_eig;
    rep.residuals["slab_null_restricted_min"] = slab.null_restricted_min;
    rep.verdict = slab.verdict;
    if (slab.verdict == Verdict::kFalsified) {
      rep.violated = "second_order_slab";
      rep.witness = *slab.witness;
      rep.residuals["witness_value"] = slab.witness_value;
    }
  }
  out.report = rep;
  return out;
}

}  // namespace bmsdp
