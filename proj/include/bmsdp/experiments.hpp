#pragma once

#include <cstdint>
#include <vector>

#include "bmsdp/pipeline.hpp"
#include "bmsdp/planted.hpp"

namespace bmsdp {

// Settings for the planted-SDP experiments. All randomness derives from
// `seed` through split streams keyed by (cell, trial), so runs are
// bit-reproducible for any thread count.
struct ExperimentConfig {
  long n = 20;
  std::vector<long> r_list = {3};
  std::vector<long> p_list;          // empty -> 1..2r per r
  long trials = 50;
  std::vector<double> sigma_list = {0.0, 0.05, 0.1, 0.2};
  double success_tol = 1e-4;         // thresholds are success_tol * ||C||_F
  std::uint64_t seed = 1;
  int threads = 1;
  bool timing = false;               // wall-clock columns break bit-reproducibility
  bool normalize = true;             // rescale planted costs to unit Frobenius norm
  PipelineConfig pipeline;           // zero targets -> defaults from success_tol
  PerturbTarget perturb_target = PerturbTarget::kCost;
  long smoothing_pool = 8;           // candidate instances for bad-instance selection
  long smoothing_select_inits = 20;  // initializations used to rank candidates
};

// Fills solver tolerances from the success tolerance when the caller left
// them unset: AFAC targets an order of magnitude below the success level,
// with gamma at its admissible cap.
PipelineConfig experiment_pipeline(const PipelineConfig& base, double success_tol);

// Least-squares stationarity multiplier: argmin_lambda ||(C - A*(lambda)) Y||_F.
// The optimality definition is existential in lambda, so success checks may
// use this refinement instead of the solver's extracted multiplier.
Vector refine_multiplier(const SdpInstance& inst, const FactorPoint& Y);

struct PhaseTransitionRow {
  long r = 0, p = 0, trials = 0, successes = 0;
  double rate = 0.0, mean_runtime = 0.0, mean_inner_iters = 0.0;
};

// One row per (r, p) cell; instances are shared across the p sweep and
// initializations are fresh per cell.
std::vector<PhaseTransitionRow> run_phase_transition(const ExperimentConfig& cfg);

struct SmoothingRow {
  double sigma = 0.0;
  long trials = 0, successes = 0;
  double rate = 0.0, mean_runtime = 0.0, mean_inner_iters = 0.0;
};

struct SmoothingTraceStat {
  double sigma = 0.0;
  long iter = 0;
  double mean = 0.0, stddev = 0.0;
  long count = 0;
};

struct SmoothingResult {
  long selected_candidate = -1;
  double selected_rate = 0.0;  // unperturbed success rate of the selected instance
  std::vector<SmoothingRow> rows;
  std::vector<SmoothingTraceStat> trace_stats;  // per-outer-iteration residuals
};

// Selects the worst candidate instance over repeated initializations, then
// sweeps perturbation magnitudes with fresh (perturbation, initialization)
// pairs per trial. Success is judged against the perturbed instance.
SmoothingResult run_smoothing_experiment(const ExperimentConfig& cfg);

}  // namespace bmsdp
