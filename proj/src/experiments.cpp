#include "bmsdp/experiments.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "bmsdp/certificates.hpp"
#include "bmsdp/parallel.hpp"

namespace bmsdp {

namespace {

struct TrialOutcome {
  bool success = false;
  double runtime = 0.0;
  double inner_iters = 0.0;
  std::vector<double> crit_trace;  // per outer iteration grad norm
};

ToleranceBundle success_bundle(const SdpInstance& inst, double tol) {
  const double s = tol * std::max(inst.cost.norm(), 1e-300);
  return {s, s, s, 0.0};
}

TrialOutcome run_trial(const SdpInstance& inst, long p, const PipelineConfig& pl,
                       double success_tol, Rng init_rng, bool timing, bool keep_trace) {
  TrialOutcome out;
  const auto start = std::chrono::steady_clock::now();
  EndToEndResult r = end_to_end(inst, p, pl, init_rng);
  if (timing) {
    out.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  out.inner_iters = static_cast<double>(r.feasibility.iterations);
  if (r.sdp) {
    out.inner_iters += static_cast<double>(r.sdp->total_inner_iters);
    const FactorPoint& Y = r.sdp->Y;
    const Vector lambda = refine_multiplier(inst, Y);
    CertificateReport rep = check_approx_optimal_sdp(inst, Y * Y.transpose(), lambda,
                                                     success_bundle(inst, success_tol));
    out.success = rep.certified();
    if (keep_trace) {
      out.crit_trace.reserve(r.sdp->trace.size());
      for (const auto& row : r.sdp->trace) out.crit_trace.push_back(row.grad_norm);
    }
  }
  return out;
}

}  // namespace

PipelineConfig experiment_pipeline(const PipelineConfig& base, double success_tol) {
  PipelineConfig pl = base;
  if (!(pl.targets.eps0 > 0.0) && !(pl.epsilon > 0.0)) {
    pl.targets.eps0 = success_tol / 10.0;
    pl.targets.eps1 = success_tol / 10.0;
    pl.targets.eps2 = 0.5;
    pl.gamma_auto = true;
  }
  if (!(pl.ls_targets.eps1 > 0.0)) {
    pl.ls_targets.eps1 = success_tol / 10.0;
    pl.ls_targets.eps2 = 1e-3;
  }
  return pl;
}

Vector refine_multiplier(const SdpInstance& inst, const FactorPoint& Y) {
  const long n = inst.n(), m = inst.m(), p = Y.cols();
  Matrix M(n * p, m);
  for (long i = 0; i < m; ++i) {
    Matrix col = inst.map.matrix(i) * Y;
    M.col(i) = Eigen::Map<Vector>(col.data(), n * p);
  }
  Matrix CY = inst.cost * Y;
  const Vector rhs = Eigen::Map<Vector>(CY.data(), n * p);
  return M.colPivHouseholderQr().solve(rhs);
}

std::vector<PhaseTransitionRow> run_phase_transition(const ExperimentConfig& cfg) {
  if (cfg.trials < 0) throw std::invalid_argument("run_phase_transition: trials >= 0");
  const Rng master(cfg.seed);
  std::vector<PhaseTransitionRow> rows;

  for (std::size_t ri = 0; ri < cfg.r_list.size(); ++ri) {
    const long r = cfg.r_list[ri];
    std::vector<long> ps = cfg.p_list;
    if (ps.empty())
      for (long p = 1; p <= 2 * r; ++p) ps.push_back(p);

    // Instances are shared across the p sweep.
    std::vector<PlantedInstance> instances;
    instances.reserve(cfg.trials);
    for (long j = 0; j < cfg.trials; ++j) {
      Rng gen = master.split(1).split(ri).split(j);
      PlantedInstance planted = gen_planted_sdp(cfg.n, r, gen);
      if (cfg.normalize) planted = normalize_cost(planted);
      verify_planted(planted);
      instances.push_back(std::move(planted));
    }

    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      const long p = ps[pi];
      if (cfg.trials == 0) continue;  // no division by zero, row omitted
      const PipelineConfig pl = experiment_pipeline(cfg.pipeline, cfg.success_tol);
      std::vector<TrialOutcome> outcomes(cfg.trials);
      parallel_for(cfg.trials, cfg.threads, [&](long j) {
        Rng init = master.split(2).split(ri).split(pi).split(j);
        outcomes[j] =
            run_trial(instances[j].instance, p, pl, cfg.success_tol, init, cfg.timing, false);
      });
      PhaseTransitionRow row;
      row.r = r;
      row.p = p;
      row.trials = cfg.trials;
      for (const auto& o : outcomes) {
        row.successes += o.success ? 1 : 0;
        row.mean_runtime += o.runtime;
        row.mean_inner_iters += o.inner_iters;
      }
      row.rate = static_cast<double>(row.successes) / static_cast<double>(row.trials);
      row.mean_runtime /= static_cast<double>(row.trials);
      row.mean_inner_iters /= static_cast<double>(row.trials);
      rows.push_back(row);
    }
  }
  return rows;
}

SmoothingResult run_smoothing_experiment(const ExperimentConfig& cfg) {
  if (cfg.r_list.empty()) throw std::invalid_argument("run_smoothing_experiment: r_list empty");
  const long r = cfg.r_list.front();
  const long p = cfg.p_list.empty() ? r : cfg.p_list.front();
  const Rng master(cfg.seed);
  const PipelineConfig pl = experiment_pipeline(cfg.pipeline, cfg.success_tol);
  SmoothingResult res;

  // Bad-instance selection: lowest unperturbed success rate over repeated
  // initializations.
  std::vector<PlantedInstance> pool;
  pool.reserve(cfg.smoothing_pool);
  for (long i = 0; i < cfg.smoothing_pool; ++i) {
    Rng gen = master.split(3).split(i);
    PlantedInstance planted = gen_planted_sdp(cfg.n, r, gen);
    if (cfg.normalize) planted = normalize_cost(planted);
    verify_planted(planted);
    pool.push_back(std::move(planted));
  }
  std::vector<long> pool_hits(cfg.smoothing_pool, 0);
  for (long i = 0; i < cfg.smoothing_pool; ++i) {
    std::vector<int> hits(cfg.smoothing_select_inits, 0);
    parallel_for(cfg.smoothing_select_inits, cfg.threads, [&](long j) {
      Rng init = master.split(4).split(i).split(j);
      TrialOutcome o =
          run_trial(pool[i].instance, p, pl, cfg.success_tol, init, false, false);
      hits[j] = o.success ? 1 : 0;
    });
    for (int h : hits) pool_hits[i] += h;
  }
  long best = 0;
  for (long i = 1; i < cfg.smoothing_pool; ++i)
    if (pool_hits[i] < pool_hits[best]) best = i;
  res.selected_candidate = best;
  res.selected_rate =
      static_cast<double>(pool_hits[best]) / static_cast<double>(cfg.smoothing_select_inits);
  const SdpInstance& base = pool[best].instance;

  for (std::size_t si = 0; si < cfg.sigma_list.size(); ++si) {
    const double sigma = cfg.sigma_list[si];
    if (cfg.trials == 0) continue;
    std::vector<TrialOutcome> outcomes(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](long j) {
      Rng pert = master.split(5).split(si).split(j);
      Rng init = master.split(6).split(si).split(j);
      const SdpInstance inst = perturb_instance(base, sigma, cfg.perturb_target, pert);
      outcomes[j] = run_trial(inst, p, pl, cfg.success_tol, init, cfg.timing, true);
    });
    SmoothingRow row;
    row.sigma = sigma;
    row.trials = cfg.trials;
    std::size_t max_len = 0;
    for (const auto& o : outcomes) {
      row.successes += o.success ? 1 : 0;
      row.mean_runtime += o.runtime;
      row.mean_inner_iters += o.inner_iters;
      max_len = std::max(max_len, o.crit_trace.size());
    }
    row.rate = static_cast<double>(row.successes) / static_cast<double>(row.trials);
    row.mean_runtime /= static_cast<double>(row.trials);
    row.mean_inner_iters /= static_cast<double>(row.trials);
    res.rows.push_back(row);

    for (std::size_t it = 0; it < max_len; ++it) {
      SmoothingTraceStat stat;
      stat.sigma = sigma;
      stat.iter = static_cast<long>(it);
      double sum = 0.0, sum2 = 0.0;
      long count = 0;
      for (const auto& o : outcomes) {
        if (it < o.crit_trace.size()) {
          sum += o.crit_trace[it];
          sum2 += o.crit_trace[it] * o.crit_trace[it];
          ++count;
        }
      }
      stat.count = count;
      stat.mean = sum / static_cast<double>(count);
      const double var =
          std::max(0.0, sum2 / static_cast<double>(count) - stat.mean * stat.mean);
      stat.stddev = std::sqrt(var);
      res.trace_stats.push_back(stat);
    }
  }
  return res;
}

}  // namespace bmsdp
