#include "bmsdp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bmsdp/certificates.hpp"

namespace bmsdp {

namespace {

// Trace bound from a psd constraint matrix: A_i . X = b_i with X psd gives
// tr(X) <= b_i / lambda_min(A_i), and ||Y||_F^2 = tr(Y Y^T).
double derive_R_Y(const SdpInstance& inst, const PipelineConfig& cfg, const FactorPoint& Y0) {
  if (cfg.R_Y > 0.0) return cfg.R_Y;
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < inst.m(); ++i) {
    const double lm = min_eigenvalue(inst.map.matrix(i));
    if (lm > 1e-12 && inst.rhs[i] > 0.0) best = std::min(best, inst.rhs[i] / lm);
  }
  if (std::isfinite(best)) return std::sqrt(best);
  return 2.0 * (1.0 + Y0.norm());
}

double clamp_exp(double log_v) { return std::exp(std::clamp(log_v, -690.0, 690.0)); }

// Thm-shape schedule epsilon for the optimality pipeline.
double theoretical_epsilon_sdp(const PipelineConfig& cfg, double norm_A, double R_lambda,
                               long n) {
  const double kappa = R_lambda * norm_A;
  const double log_K = std::log(norm_A) + std::log(3.0 * kappa) / cfg.eta;
  const double log_eps = -log_K + std::log(cfg.rho_smoothing) +
                         (1.0 + 1.0 / cfg.eta) *
                             (std::log(cfg.sigma) - std::log(2.0 * M_E) - 3.0 * std::log((double)n));
  return clamp_exp(log_eps);
}

// Thm-shape schedule epsilon for the feasibility pipeline.
double theoretical_epsilon_ls(const PipelineConfig& cfg, double R_A, double R_Y, double norm_b,
                              long n) {
  const double kappa = 2.0 * (R_A * R_Y * R_Y + norm_b) * R_A;
  const double log_K = std::log(R_A) + std::log(3.0 * kappa) / cfg.eta;
  const double log_eps =
      -log_K + (1.0 + 1.0 / cfg.eta) * (std::log(cfg.rho_smoothing) + 2.0 * std::log(cfg.sigma) -
                                        2.0 - 6.0 * std::log((double)n));
  return clamp_exp(log_eps);
}

}  // namespace

bool barvinok_pataki_ok(const PipelineConfig& cfg, long m, long p) {
  return triangular(p) >= (1.0 + cfg.eta) * m + cfg.eta * cfg.t_bound;
}

SdpSolveResult solve_sdp_bm(const SdpInstance& inst, long p, const FactorPoint& Y0,
                            const PipelineConfig& cfg) {
  BmOracleSet oracles = make_bm_oracles(inst, p);
  SdpSolveResult res;
  const Vector y0 = oracles.flatten(Y0);
  const double h0 = oracles.problem.h.value(y0).norm();

  res.rho_licq = cfg.rho_licq > 0.0
                     ? cfg.rho_licq
                     : std::max(0.5 * licq_margin(inst.map, inst.rhs, Y0), 1e-6);
  double L_f = cfg.L_f > 0.0 ? cfg.L_f : std::max((2.0 * inst.cost * Y0).norm(), 1e-12);
  double R_lambda = 2.0 + 2.0 * L_f / res.rho_licq;

  ToleranceBundle targets = cfg.targets;
  if (!(targets.eps0 > 0.0)) {
    const double eps =
        cfg.epsilon > 0.0 ? cfg.epsilon
                          : theoretical_epsilon_sdp(cfg, inst.map.operator_norm(), R_lambda,
                                                    inst.n());
    targets.eps0 = eps;
    targets.eps1 = eps * eps;
    targets.eps2 = 16.0 * R_lambda * R_lambda * R_lambda * eps;
    targets.gamma = eps;
  }
  if (cfg.gamma_auto) {
    targets.gamma =
        0.99 * std::sqrt(targets.eps0 * targets.eps2 /
                         (16.0 * R_lambda * R_lambda * R_lambda));
  }
  res.beta = std::max(1.1 * h0, targets.eps0);
  const MappedTolerances mapped = tolerance_mapping(targets, R_lambda, res.beta);
  if (!mapped.valid)
    throw std::invalid_argument(
        "solve_sdp_bm: tolerance schedule violates the mapping inequalities");
  res.targets = targets;
  res.bm_targets = {targets.eps0, 0.5 * targets.eps1, 0.5 * targets.eps2, 0.5 * targets.gamma};

  TwoPhaseSettings tps;
  tps.delta = mapped.delta;
  tps.max_outer = cfg.max_outer_iters;
  tps.inner.max_iters = cfg.max_inner_iters;
  tps.inner.record_trace = false;

  Vector y = y0;
  long k_offset = 0;
  auto append_trace = [&](const std::vector<PhaseTraceRow>& rows) {
    for (PhaseTraceRow row : rows) {
      row.k += k_offset;
      res.trace.push_back(row);
    }
    if (!rows.empty()) k_offset = res.trace.back().k;
  };

  if (cfg.continuation) {
    // Warm-up stages: the target update advances by O(eps0) per outer step,
    // so long descents are covered with large eps0 first.
    const double f0 = oracles.problem.f.value(y0);
    double eps_s = std::max(std::abs(f0), 1.0) / 8.0;
    while (eps_s > 4.0 * targets.eps0) {
      TwoPhaseSettings warm = tps;
      warm.inner.eps1 = std::max(mapped.eps1, 0.01 * eps_s);
      warm.inner.eps2 = std::max(mapped.eps2, 0.01 * eps_s);
      TwoPhaseResult stage = two_phase_solve(oracles.problem, y, eps_s, warm);
      res.total_inner_iters += stage.total_inner_iters;
      append_trace(stage.trace);
      ++res.stages;
      y = stage.y;
      if (stage.outcome == TwoPhaseOutcome::kBudgetExhausted) break;
      eps_s /= 4.0;
    }
  }

  tps.inner.eps1 = mapped.eps1;
  tps.inner.eps2 = mapped.eps2;
  TwoPhaseResult fin = two_phase_solve(oracles.problem, y, mapped.eps0, tps);
  res.total_inner_iters += fin.total_inner_iters;
  append_trace(fin.trace);
  ++res.stages;
  res.outcome = fin.outcome;
  res.Y = oracles.unflatten(fin.y);
  res.L_f = std::max(L_f, *oracles.grad_f_max);

  if (fin.outcome == TwoPhaseOutcome::kCritical) {
    AfacExtraction ex = extract_afac(fin.y, fin.t, oracles.problem, targets, res.rho_licq,
                                     res.L_f, cfg.slab);
    // The extraction uses the Lagrangian convention L = f + lambda . h; the
    // slack matrix S = C - A*(lambda) pairs with the opposite sign.
    res.lambda = -ex.lambda;
    res.afac = ex.report;
    res.R_lambda = ex.R_lambda;
  } else {
    res.lambda = Vector::Zero(inst.m());
    res.afac.verdict = Verdict::kIndeterminate;
    res.afac.tol = targets;
    res.R_lambda = R_lambda;
  }

  res.R_Y = std::max(derive_R_Y(inst, cfg, Y0), res.Y.norm());
  const SymmetricMatrix X = res.Y * res.Y.transpose();
  ToleranceBundle opt_tol{targets.eps0, res.R_Y * targets.eps1, targets.eps2, 0.0};
  res.optimality = check_approx_optimal_sdp(inst, X, res.lambda, opt_tol);

  BoundQuery q;
  q.variant = BoundVariant::kCostCorollary;
  q.params = {{"n", (double)inst.n()},   {"m", (double)inst.m()},
              {"p", (double)p},          {"eps1", targets.eps1},
              {"gamma", targets.gamma},  {"norm_A", inst.map.operator_norm()},
              {"R_lambda", res.R_lambda}, {"sigma", cfg.sigma},
              {"eta", cfg.eta},          {"t", cfg.t_bound}};
  res.failure_bound = probability_bound(q);
  res.bp_ok = barvinok_pataki_ok(cfg, inst.m(), p);
  return res;
}

FeasibilityResult solve_feasibility(const ConstraintMap& map, const Vector& b, long p,
                                    const FactorPoint& Y0, const PipelineConfig& cfg) {
  LsOracle oracle = make_ls_oracle(map, b, p);
  FeasibilityResult res;
  const double R_A = cfg.R_A > 0.0 ? cfg.R_A : map.operator_norm() + cfg.sigma;
  double R_Y = cfg.R_Y > 0.0 ? cfg.R_Y : 2.0 * (1.0 + Y0.norm());

  double eps1, eps2;
  if (cfg.ls_targets.eps1 > 0.0) {
    eps1 = cfg.ls_targets.eps1;
    eps2 = cfg.ls_targets.eps2;
    res.epsilon = eps2;
  } else {
    res.epsilon = cfg.epsilon > 0.0 ? cfg.epsilon
                                    : theoretical_epsilon_ls(cfg, R_A, R_Y, b.norm(), map.n());
    eps1 = std::pow(res.epsilon, 1.5);
    eps2 = res.epsilon;
  }

  ArcSettings as;
  as.eps1 = eps1;
  as.eps2 = 2.0 * eps2;  // hess g = 2 q-form, so this certifies q >= -eps2
  as.max_iters = cfg.max_inner_iters;
  as.record_trace = false;
  ArcResult arc = arc_minimize(oracle.objective, oracle.flatten(Y0), as);
  res.status = arc.status;
  res.iterations = arc.iterations;
  res.Y = oracle.unflatten(arc.y);
  const SymmetricMatrix X = res.Y * res.Y.transpose();
  res.residual = (map.apply(X) - b).norm();

  res.ac = check_ac_ls(map, b, res.Y, eps1, eps2);
  R_Y = std::max(R_Y, res.Y.norm());
  ToleranceBundle opt_tol{cfg.rho_smoothing * cfg.sigma, eps1 * R_Y, 5.0 * eps2, 0.0};
  res.optimality = check_approx_optimal_ls(map, b, X, opt_tol);

  BoundQuery q;
  q.variant = BoundVariant::kLsCorollary;
  q.params = {{"n", (double)map.n()}, {"m", (double)map.m()},
              {"p", (double)p},       {"eps0", cfg.rho_smoothing * cfg.sigma},
              {"eps1", eps1},         {"eps2", eps2},
              {"R_A", R_A},           {"R_Y", R_Y},
              {"norm_b", b.norm()},   {"sigma", cfg.sigma},
              {"eta", cfg.eta},       {"t", cfg.t_bound},
              {"rho", cfg.rho_smoothing}};
  res.failure_bound = probability_bound(q);
  return res;
}

EndToEndResult end_to_end(const SdpInstance& inst, long p, const PipelineConfig& cfg, Rng& rng) {
  EndToEndResult res;
  const FactorPoint Y0 = rng.gaussian_matrix(inst.n(), p);
  res.feasibility = solve_feasibility(inst.map, inst.rhs, p, Y0, cfg);
  if (res.feasibility.status == ArcStatus::kNonFinite) return res;
  res.sdp = solve_sdp_bm(inst, p, res.feasibility.Y, cfg);
  return res;
}

}  // namespace bmsdp
