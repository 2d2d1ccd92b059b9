#include "bmsdp/theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bmsdp/parallel.hpp"

namespace bmsdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog8e = 3.0794415416798357;  // log(8e)

double log_binomial(long k, long i) {
  return std::lgamma(static_cast<double>(k) + 1.0) - std::lgamma(static_cast<double>(i) + 1.0) -
         std::lgamma(static_cast<double>(k - i) + 1.0);
}

// log(sum exp(l)) with max-shift and Kahan-compensated accumulation.
double log_sum_exp(const std::vector<double>& logs) {
  double mx = -kInf;
  for (double l : logs) mx = std::max(mx, l);
  if (mx == -kInf) return -kInf;
  double sum = 0.0, comp = 0.0;
  for (double l : logs) {
    double term = std::exp(l - mx);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return mx + std::log(sum);
}

double require(const BoundQuery& q, const std::string& key) {
  if (!q.has(key)) throw std::invalid_argument("probability_bound: missing parameter '" + key + "'");
  return q.params.at(key);
}

double require_positive(const BoundQuery& q, const std::string& key) {
  double v = require(q, key);
  if (!(v > 0.0))
    throw std::invalid_argument("probability_bound: parameter '" + key + "' must be positive");
  return v;
}

double require_nonneg(const BoundQuery& q, const std::string& key) {
  double v = require(q, key);
  if (v < 0.0)
    throw std::invalid_argument("probability_bound: parameter '" + key + "' must be nonnegative");
  return v;
}

// (tau(p) - m) * log(delta) with the 0 * (-inf) corner resolved to 0.
double power_term(long exponent, double log_delta) {
  if (exponent == 0) return 0.0;
  return static_cast<double>(exponent) * log_delta;
}

void finish(BoundResult& r) { r.clipped = r.log_value > 0.0; }

}  // namespace

double BoundQuery::at(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end())
    throw std::invalid_argument("BoundQuery: missing parameter '" + key + "'");
  return it->second;
}

bool BoundResult::all_valid() const {
  for (const auto& [name, ok] : validity)
    if (!ok) return false;
  return true;
}

BoundVariant bound_variant_from_string(const std::string& name) {
  if (name == "cost") return BoundVariant::kCost;
  if (name == "cost_corollary") return BoundVariant::kCostCorollary;
  if (name == "ls") return BoundVariant::kLs;
  if (name == "ls_corollary") return BoundVariant::kLsCorollary;
  if (name == "constraints") return BoundVariant::kConstraints;
  if (name == "tube") return BoundVariant::kTube;
  throw std::invalid_argument("unknown bound variant: " + name);
}

std::string bound_variant_to_string(BoundVariant v) {
  switch (v) {
    case BoundVariant::kCost: return "cost";
    case BoundVariant::kCostCorollary: return "cost_corollary";
    case BoundVariant::kLs: return "ls";
    case BoundVariant::kLsCorollary: return "ls_corollary";
    case BoundVariant::kConstraints: return "constraints";
    case BoundVariant::kTube: return "tube";
  }
  return "?";
}

double dist_to_low_rank(const SymmetricMatrix& S, long p) {
  const long n = S.rows();
  if (p < 0 || p > n) throw std::invalid_argument("dist_to_low_rank: need 0 <= p <= n");
  if (p == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  // Singular values of a symmetric matrix are |eigenvalues|.
  std::vector<double> sq(n);
  for (long i = 0; i < n; ++i) sq[i] = es.eigenvalues()[i] * es.eigenvalues()[i];
  std::sort(sq.begin(), sq.end());
  double s = 0.0;
  for (long i = 0; i < p; ++i) s += sq[i];
  return std::sqrt(s);
}

SymmetricMatrix project_low_rank(const SymmetricMatrix& S, long max_rank) {
  const long n = S.rows();
  if (max_rank < 0 || max_rank > n)
    throw std::invalid_argument("project_low_rank: need 0 <= max_rank <= n");
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  // Keep the max_rank eigenvalues of largest magnitude.
  std::vector<long> idx(n);
  for (long i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](long a, long b) {
    return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
  });
  SymmetricMatrix out = SymmetricMatrix::Zero(n, n);
  for (long r = 0; r < max_rank; ++r) {
    long i = idx[r];
    out += es.eigenvalues()[i] * es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
  }
  return out;
}

BoundResult tube_bound(long k, long c, long D, double delta, double sigma) {
  if (c > k || c < 0 || k < 1 || D < 1) throw std::invalid_argument("tube_bound: need 0 <= c <= k, D >= 1");
  if (delta < 0.0 || !(sigma > 0.0)) throw std::invalid_argument("tube_bound: need delta >= 0, sigma > 0");
  BoundResult r;
  const double log_x = delta == 0.0 ? -kInf : std::log(2.0 * D * delta / sigma);
  const double log_y = std::log1p(delta / sigma);
  std::vector<double> terms;
  terms.reserve(k - c + 1);
  for (long i = c; i <= k; ++i) {
    double t = log_binomial(k, i) + (i == 0 ? 0.0 : i * log_x) + (k - i) * log_y;
    terms.push_back(t);
  }
  r.log_value = std::log(4.0) + log_sum_exp(terms);

  const double log_simple =
      delta == 0.0 ? -kInf
                   : kLog8e + c * (std::log(2.0 * M_E * k * D) + std::log(delta) -
                                   std::log(static_cast<double>(c)) - std::log(sigma));
  r.named["log_simple_form"] = log_simple;

  const double ratio1 = 4.0 * M_E * k * D * delta / (c * sigma);
  const double ratio2 = k * delta / sigma;
  r.validity.emplace_back("max(4ekD*delta/(c*sigma), k*delta/sigma) <= 1",
                          std::max(ratio1, ratio2) <= 1.0);
  finish(r);
  return r;
}

namespace {

BoundResult eval_cost(const BoundQuery& q) {
  const long n = static_cast<long>(require_positive(q, "n"));
  const long m = static_cast<long>(require_positive(q, "m"));
  const long p = static_cast<long>(require_positive(q, "p"));
  const double eps1 = require_nonneg(q, "eps1");
  const double gamma = require_positive(q, "gamma");
  const double norm_A = require_nonneg(q, "norm_A");
  const double R_lambda = require_nonneg(q, "R_lambda");
  const double sigma = require_positive(q, "sigma");

  const double delta = eps1 * norm_A / gamma;
  const double kappa = R_lambda * norm_A;
  const long T = triangular(p);

  BoundResult r;
  const double log_delta = delta == 0.0 ? -kInf : std::log(delta);
  const double log_kappa3 = kappa == 0.0 ? -kInf : std::log(3.0 * kappa);
  r.log_value = kLog8e + power_term(T - m, log_delta) + m * log_kappa3 +
                T * (std::log(2.0 * M_E) + 3.0 * std::log(static_cast<double>(n)) - std::log(sigma));
  r.named["delta"] = delta;
  r.named["kappa"] = kappa;
  r.validity.emplace_back("tau(p) > m", T > m);
  const double cap = sigma / (4.0 * M_E * n * n * n);
  r.validity.emplace_back("delta < sigma/(4 e n^3)", delta < cap);
  finish(r);
  return r;
}

BoundResult eval_cost_corollary(const BoundQuery& q) {
  const long n = static_cast<long>(require_positive(q, "n"));
  const long m = static_cast<long>(require_positive(q, "m"));
  const long p = static_cast<long>(require_positive(q, "p"));
  const double eps1 = require_nonneg(q, "eps1");
  const double gamma = require_positive(q, "gamma");
  const double norm_A = require_nonneg(q, "norm_A");
  const double R_lambda = require_nonneg(q, "R_lambda");
  const double sigma = require_positive(q, "sigma");
  const double eta = require_positive(q, "eta");
  const double t = require_positive(q, "t");

  const double delta = eps1 * norm_A / gamma;
  const double kappa = R_lambda * norm_A;
  const long T = triangular(p);

  BoundResult r;
  const double log_kappa3 = kappa == 0.0 ? -kInf : std::log(3.0 * kappa);
  // log(sigma / (6 kappa e n^3)) = log sigma - log(3 kappa) - log(2 e n^3)
  r.log_value = kLog8e + t * (std::log(sigma) - log_kappa3 -
                              (std::log(2.0 * M_E) + 3.0 * std::log(static_cast<double>(n))));
  r.named["delta"] = delta;
  r.named["kappa"] = kappa;
  r.validity.emplace_back("tau(p) >= (1+eta)m + eta*t", T >= (1.0 + eta) * m + eta * t);
  // delta cap compared in log space: delta <= (1/3kappa)^(1/eta) (sigma/2en^3)^(1+1/eta)
  const double log_delta = delta == 0.0 ? -kInf : std::log(delta);
  const double log_cap = -(1.0 / eta) * log_kappa3 +
                         (1.0 + 1.0 / eta) * (std::log(sigma) - std::log(2.0 * M_E) -
                                              3.0 * std::log(static_cast<double>(n)));
  r.validity.emplace_back("delta <= (1/3kappa)^(1/eta) (sigma/2en^3)^(1+1/eta)",
                          log_delta <= log_cap);
  finish(r);
  return r;
}

BoundResult eval_ls(const BoundQuery& q) {
  const long n = static_cast<long>(require_positive(q, "n"));
  const long m = static_cast<long>(require_positive(q, "m"));
  const long p = static_cast<long>(require_positive(q, "p"));
  const double eps0 = require_positive(q, "eps0");
  const double eps1 = require_nonneg(q, "eps1");
  const double eps2 = require_positive(q, "eps2");
  const double R_A = require_nonneg(q, "R_A");
  const double R_Y = require_nonneg(q, "R_Y");
  const double norm_b = require_nonneg(q, "norm_b");
  const double sigma = require_positive(q, "sigma");

  const double delta = eps1 * R_A / std::sqrt(eps2);
  const double kappa = 2.0 * (R_A * R_Y * R_Y + norm_b) * R_A;
  const long T = triangular(p);

  BoundResult r;
  const double log_delta = delta == 0.0 ? -kInf : std::log(delta);
  const double log_kappa3 = kappa == 0.0 ? -kInf : std::log(3.0 * kappa);
  r.log_value = kLog8e + power_term(T - m, log_delta) + m * log_kappa3 +
                T * (1.0 + 3.0 * std::log(static_cast<double>(n)) - std::log(sigma) - std::log(eps0));
  r.named["delta"] = delta;
  r.named["kappa"] = kappa;
  r.validity.emplace_back("tau(p) > m", T > m);
  const double cap = sigma * eps0 / (4.0 * M_E * n * n * n);
  r.validity.emplace_back("delta < sigma*eps0/(4 e n^3)", delta < cap);
  finish(r);
  return r;
}

BoundResult eval_ls_corollary(const BoundQuery& q) {
  const long n = static_cast<long>(require_positive(q, "n"));
  const long m = static_cast<long>(require_positive(q, "m"));
  const long p = static_cast<long>(require_positive(q, "p"));
  const double eps0 = require_positive(q, "eps0");
  const double eps1 = require_nonneg(q, "eps1");
  const double eps2 = require_positive(q, "eps2");
  const double R_A = require_nonneg(q, "R_A");
  const double R_Y = require_nonneg(q, "R_Y");
  const double norm_b = require_nonneg(q, "norm_b");
  const double sigma = require_positive(q, "sigma");
  const double eta = require_positive(q, "eta");
  const double t = require_positive(q, "t");
  const double rho = require_positive(q, "rho");

  const double delta = eps1 * R_A / std::sqrt(eps2);
  const double kappa = 2.0 * (R_A * R_Y * R_Y + norm_b) * R_A;
  const long T = triangular(p);

  BoundResult r;
  const double log_kappa3 = kappa == 0.0 ? -kInf : std::log(3.0 * kappa);
  // log(rho sigma^2 / (3 kappa e^2 n^6))
  r.log_value = kLog8e + t * (std::log(rho) + 2.0 * std::log(sigma) - log_kappa3 - 2.0 -
                              6.0 * std::log(static_cast<double>(n)));
  r.named["delta"] = delta;
  r.named["kappa"] = kappa;
  r.validity.emplace_back("tau(p) >= (1+eta)m + eta*t", T >= (1.0 + eta) * m + eta * t);
  const double log_delta = delta == 0.0 ? -kInf : std::log(delta);
  const double log_cap = -(1.0 / eta) * log_kappa3 +
                         (1.0 + 1.0 / eta) * (std::log(rho) + 2.0 * std::log(sigma) - 2.0 -
                                              6.0 * std::log(static_cast<double>(n)));
  r.validity.emplace_back("delta <= (1/3kappa)^(1/eta) (rho sigma^2/e^2 n^6)^(1+1/eta)",
                          log_delta <= log_cap);
  r.validity.emplace_back("eps0 >= rho*sigma", eps0 >= rho * sigma);
  finish(r);
  return r;
}

BoundResult eval_constraints(const BoundQuery& q) {
  const long n = static_cast<long>(require_positive(q, "n"));
  const long m = static_cast<long>(require_positive(q, "m"));
  const long p = static_cast<long>(require_positive(q, "p"));
  const double eps1 = require_nonneg(q, "eps1");
  const double gamma = require_positive(q, "gamma");
  const double norm_A = require_nonneg(q, "norm_A");
  const double R_lambda = require_nonneg(q, "R_lambda");
  const double R_A = require_positive(q, "R_A");
  const double Delta = require_positive(q, "Delta");
  const double sigma = require_positive(q, "sigma");

  const double delta = eps1 * norm_A / gamma;
  const double kappa = R_lambda * R_A;
  const double Delta_prime = Delta / (2.0 * R_A);
  const long T = triangular(p);

  BoundResult r;
  const double log_delta = delta == 0.0 ? -kInf : std::log(delta);
  const double log_kappa3 = kappa == 0.0 ? -kInf : std::log(3.0 * kappa);
  r.log_value = kLog8e + power_term(T - m, log_delta) + m * log_kappa3 +
                T * (std::log(2.0 * M_E) + 3.0 * std::log(static_cast<double>(n)) -
                     std::log(sigma) - std::log(Delta_prime));
  r.named["delta"] = delta;
  r.named["kappa"] = kappa;
  r.named["Delta_prime"] = Delta_prime;
  r.validity.emplace_back("tau(p) > m", T > m);
  r.validity.emplace_back("delta < sigma*Delta'/(4 e n^3)",
                          delta < sigma * Delta_prime / (4.0 * M_E * n * n * n));
  r.validity.emplace_back("delta < Delta/2", delta < Delta / 2.0);
  finish(r);
  return r;
}

}  // namespace

BoundResult probability_bound(const BoundQuery& q) {
  switch (q.variant) {
    case BoundVariant::kCost: return eval_cost(q);
    case BoundVariant::kCostCorollary: return eval_cost_corollary(q);
    case BoundVariant::kLs: return eval_ls(q);
    case BoundVariant::kLsCorollary: return eval_ls_corollary(q);
    case BoundVariant::kConstraints: return eval_constraints(q);
    case BoundVariant::kTube:
      return tube_bound(static_cast<long>(require_positive(q, "k")),
                        static_cast<long>(require_nonneg(q, "c")),
                        static_cast<long>(require_positive(q, "D")), require_nonneg(q, "delta"),
                        require_positive(q, "sigma"));
  }
  throw std::invalid_argument("probability_bound: unknown variant");
}

std::pair<double, double> wilson_interval(long successes, long trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double nT = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / nT;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nT;
  const double center = (phat + z2 / (2.0 * nT)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / nT + z2 / (4.0 * nT * nT)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TubeMcResult mc_tube_probability(long n, long p, const SymmetricMatrix& shift,
                                 const SymmetricMatrix& center, double sigma, double delta,
                                 long trials, const Rng& rng, int threads) {
  if (trials < 1) throw std::invalid_argument("mc_tube_probability: trials >= 1 required");
  const Vector c = svec(center);
  constexpr long kChunk = 8192;
  const long n_chunks = (trials + kChunk - 1) / kChunk;
  std::vector<long> chunk_hits(n_chunks, 0);
  parallel_for(n_chunks, threads, [&](long ci) {
    Rng local = rng.split(static_cast<std::uint64_t>(ci));
    const long lo = ci * kChunk;
    const long hi = std::min(trials, lo + kChunk);
    long hits = 0;
    for (long i = lo; i < hi; ++i) {
      Vector x = local.uniform_ball(c, sigma);
      if (dist_to_low_rank(smat(x) - shift, p) <= delta) ++hits;
    }
    chunk_hits[ci] = hits;
  });
  TubeMcResult r;
  r.trials = trials;
  for (long h : chunk_hits) r.hits += h;
  r.estimate = static_cast<double>(r.hits) / static_cast<double>(trials);
  auto [lo, hi] = wilson_interval(r.hits, trials);
  r.wilson_lo = lo;
  r.wilson_hi = hi;
  return r;
}

}  // namespace bmsdp
