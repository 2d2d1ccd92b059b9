#pragma once

#include <optional>

#include "bmsdp/bm_problems.hpp"
#include "bmsdp/theory.hpp"

namespace bmsdp {

// Problem-dependent constants and budgets for the solve pipelines. Fields
// left at 0 are derived at solve time (measured LICQ margin, running L_f
// estimate, compactness-based R_Y, operator-norm-based R_A).
struct PipelineConfig {
  double eta = 1.0;            // exponent constant in the tau(p) bound
  double t_bound = 1.0;        // exponent t in the probability corollaries
  double rho_smoothing = 1.0;  // rho in (0,1]
  double sigma = 0.1;          // perturbation magnitude for bound reporting
  double rho_licq = 0.0;       // 0 -> measured at the start point
  double L_f = 0.0;            // 0 -> running max of ||grad f||
  double R_Y = 0.0;            // 0 -> psd-constraint trace bound or a cap
  double R_A = 0.0;            // 0 -> operator norm + sigma
  double epsilon = 0.0;        // schedule epsilon; 0 -> theoretical value
  ToleranceBundle targets;     // explicit AFAC targets; eps0 == 0 -> schedule
  ToleranceBundle ls_targets;  // explicit (eps1, eps2) for the feasibility solve
  bool gamma_auto = false;     // move gamma to its largest admissible value
  bool continuation = true;    // eps0 warm-up stages before the target solve
  long max_inner_iters = 500;
  long max_outer_iters = 200;
  SlabOptions slab;
};

// tau(p) >= (1 + eta) m + eta t, the rank condition the probability
// corollaries require. Recorded as a flag; solves run either way.
bool barvinok_pataki_ok(const PipelineConfig& cfg, long m, long p);

struct SdpSolveResult {
  TwoPhaseOutcome outcome = TwoPhaseOutcome::kBudgetExhausted;
  FactorPoint Y;
  Vector lambda;                 // slack-matrix convention: S = C - A*(lambda)
  CertificateReport afac;        // AFAC certificate at `targets`
  CertificateReport optimality;  // approximate optimality of (Y Y^T, lambda)
  ToleranceBundle targets;       // AFAC targets (Lagrangian convention)
  ToleranceBundle bm_targets;    // factored-problem tolerances (factor-2 map)
  BoundResult failure_bound;     // cost-corollary failure probability
  bool bp_ok = false;
  double R_lambda = 0.0, R_Y = 0.0, L_f = 0.0, rho_licq = 0.0, beta = 0.0;
  std::vector<PhaseTraceRow> trace;  // concatenated across stages
  long total_inner_iters = 0;
  long stages = 0;

  bool certified() const {
    return outcome == TwoPhaseOutcome::kCritical && afac.certified() && optimality.certified();
  }
};

struct FeasibilityResult {
  ArcStatus status = ArcStatus::kBudgetExhausted;
  FactorPoint Y;
  CertificateReport ac;          // approximate 2-criticality of Y
  CertificateReport optimality;  // approximate optimality of Y Y^T for (ls)
  double residual = 0.0;         // ||A(Y Y^T) - b||
  double epsilon = 0.0;          // schedule epsilon used
  BoundResult failure_bound;     // ls-corollary failure probability
  long iterations = 0;
};

struct EndToEndResult {
  FeasibilityResult feasibility;
  std::optional<SdpSolveResult> sdp;  // absent when feasibility already failed hard
};

// Two-phase solve of the factored SDP from an approximately feasible Y0,
// multiplier extraction, and an independent approximate-optimality check at
// (eps0, R_Y eps1, eps2). Throws std::invalid_argument when the tolerance
// schedule violates the mapping inequalities.
SdpSolveResult solve_sdp_bm(const SdpInstance& inst, long p, const FactorPoint& Y0,
                            const PipelineConfig& cfg);

// ARC on the least-squares oracle: the second-order target is doubled so the
// certified Hessian condition matches the factored-problem form q(U) =
// S . U U^T + 4||A(U Y^T)||^2 >= -eps2. Then approximate optimality at
// (rho sigma, eps1 R_Y, 5 eps2).
FeasibilityResult solve_feasibility(const ConstraintMap& map, const Vector& b, long p,
                                    const FactorPoint& Y0, const PipelineConfig& cfg);

// solve_feasibility from a random start, then solve_sdp_bm from its output.
EndToEndResult end_to_end(const SdpInstance& inst, long p, const PipelineConfig& cfg, Rng& rng);

}  // namespace bmsdp
