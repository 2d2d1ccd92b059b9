#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmsdp/arc.hpp"
#include "bmsdp/certificates.hpp"

namespace bmsdp {

// Vector-valued equality constraint oracle h : R^dim -> R^m with first and
// second derivatives. weighted_hessian(y, w) = sum_i w_i hess(h_i)(y) is the
// primitive; per-component Hessians are recoverable with unit weights.
struct ConstraintOracle {
  long m = 0;
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;  // m x dim
  std::function<Matrix(const Vector&, const Vector&)> weighted_hessian;
};

// Equality-constrained program min f(y) s.t. h(y) = 0.
struct NlpProblem {
  long dim = 0;
  SmoothObjective f;
  ConstraintOracle h;
};

// The merit functions driving the two-phase method:
//   nu(y)    = ||h(y)||^2
//   mu(t, y) = (f(y) - t)^2 + ||h(y)||^2
SmoothObjective make_nu_oracle(const NlpProblem& problem);
SmoothObjective make_mu_oracle(const NlpProblem& problem, double t);

enum class PhaseCase { kPhase1, kA, kB, kC };
std::string phase_case_to_string(PhaseCase c);

struct PhaseTraceRow {
  long k = 0;
  PhaseCase label = PhaseCase::kPhase1;
  double t = 0.0;        // t_k
  double mu_prev = 0.0;  // mu(t_{k-1}, y_k), the inner-solve final value
  double nu = 0.0;       // nu(y_k)
  long inner_iters = 0;
  double grad_norm = 0.0;  // ||grad mu_{t_k}(y_k)||
  double min_eig = 0.0;    // lambda_min(hess mu_{t_k}(y_k))
};

enum class TwoPhaseOutcome { kCritical, kInfeasibleStall, kBudgetExhausted };

struct TwoPhaseSettings {
  double delta = 0.5;     // Phase-I gate constant, in (0,1)
  long max_outer = 500;   // outer iteration budget
  ArcSettings inner;      // eps1/eps2 here are the inner criticality targets
};

struct TwoPhaseResult {
  TwoPhaseOutcome outcome = TwoPhaseOutcome::kBudgetExhausted;
  Vector y;
  double t = 0.0;
  std::vector<PhaseTraceRow> trace;
  long total_inner_iters = 0;

  bool critical() const { return outcome == TwoPhaseOutcome::kCritical; }
};

// Thrown when one of the per-iteration trace identities fails at runtime.
class TraceInvariantViolation : public std::logic_error {
 public:
  explicit TraceInvariantViolation(const std::string& what) : std::logic_error(what) {}
};

// Two-phase target-following solve: Phase I minimizes nu from y0; Phase II
// minimizes mu(t_{k-1}, .) with the target updated by case until the
// criticality measure (||grad||, -lambda_min) of mu_{t_k} at y_k passes
// (inner.eps1, inner.eps2). Trace identities are asserted on every step.
TwoPhaseResult two_phase_solve(const NlpProblem& problem, const Vector& y0, double eps0,
                               const TwoPhaseSettings& settings);

// Inner tolerances of the outer method in terms of the AFAC targets:
// eps0 -> eps0, eps1 -> eps0 eps1 / R_lambda, eps2 -> eps0 eps2 / (2 R_lambda),
// with delta fixed to 1/2. valid reflects the tolerance inequalities the
// guarantee requires (the beta cap only when beta is finite).
struct MappedTolerances {
  double eps0 = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double delta = 0.5;
  bool valid = false;
};

MappedTolerances tolerance_mapping(const ToleranceBundle& eps, double R_lambda,
                                   double beta = std::numeric_limits<double>::infinity());

struct AfacExtraction {
  Vector lambda;
  CertificateReport report;
  double alpha = 0.0;  // 1 / (f(y) - t)
  double R_lambda = 0.0;
  bool mu_route = false;  // certificate established through the mu identities
};

// Multiplier extraction lambda = h(y) / (f(y) - t) and an AFAC certificate at
// the given targets. The second-order condition is certified through the
// identities grad L = alpha/2 grad mu_t and hess L = alpha (hess mu_t / 2 -
// Jt' Jt) whenever the mapped inner conditions hold; otherwise it falls back
// to the direct three-valued slab check. Throws std::domain_error when
// f(y) = t (the infeasible-stall path).
AfacExtraction extract_afac(const Vector& y, double t, const NlpProblem& problem,
                            const ToleranceBundle& targets, double rho, double L_f,
                            const SlabOptions& slab_opts = {});

}  // namespace bmsdp
