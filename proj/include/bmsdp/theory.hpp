#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bmsdp/linalg.hpp"
#include "bmsdp/random.hpp"

namespace bmsdp {

// Frobenius distance from S to the variety of symmetric matrices of rank at
// most n-p: sqrt of the sum of the p smallest squared singular values.
double dist_to_low_rank(const SymmetricMatrix& S, long p);

// Nearest symmetric matrix of rank <= max_rank (Frobenius): zero out the
// n - max_rank eigenvalues of smallest magnitude.
SymmetricMatrix project_low_rank(const SymmetricMatrix& S, long max_rank);

// Which probability bound to evaluate.
enum class BoundVariant {
  kCost,            // perturbed cost matrix
  kCostCorollary,   // high-probability form of the above
  kLs,              // least-squares problem, perturbed constraints
  kLsCorollary,     // high-probability form of the above
  kConstraints,     // perturbed constraint map, fixed cost
  kTube,            // raw tube-volume bound
};

BoundVariant bound_variant_from_string(const std::string& name);
std::string bound_variant_to_string(BoundVariant v);

struct BoundQuery {
  BoundVariant variant = BoundVariant::kCost;
  // Named parameters; which keys are required depends on the variant.
  // Common: n, m, p, sigma. Cost: eps1, gamma, norm_A, R_lambda.
  // Ls: eps0, eps1, eps2, R_A, R_Y, norm_b. Constraints: eps1, gamma,
  // norm_A, R_lambda, R_A, Delta. Corollaries add eta, t (and rho for ls).
  // Tube: k, c, D, delta, sigma.
  std::map<std::string, double> params;

  double at(const std::string& key) const;
  bool has(const std::string& key) const { return params.count(key) > 0; }
};

struct BoundResult {
  // Natural log of the bound; -inf when the bound is exactly zero.
  double log_value = 0.0;
  // Hypothesis / validity conditions by name; all must hold for the value to
  // be a guarantee. The value is computed regardless.
  std::vector<std::pair<std::string, bool>> validity;
  // True when the bound exceeds 1 (vacuous as a probability).
  bool clipped = false;
  // Auxiliary named values (derived quantities such as delta, kappa, and the
  // simple-form tube bound).
  std::map<std::string, double> named;

  bool all_valid() const;
};

// Tube-volume bound for a variety of codimension c and degree <= D in R^k,
// sampled uniformly on a ball of radius sigma, tube width delta. Returns both
// the summation form (log_value) and the simple closed form
// (named["log_simple_form"]); the validity flag covers the simple form.
BoundResult tube_bound(long k, long c, long D, double delta, double sigma);

// Evaluates the selected probability bound in log space along with its
// hypothesis flags. Throws std::invalid_argument on missing parameters.
BoundResult probability_bound(const BoundQuery& q);

struct TubeMcResult {
  double estimate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  long hits = 0;
  long trials = 0;
};

// Monte-Carlo estimate of Pr[dist(X - shift, rank <= n-p variety) <= delta]
// for X uniform on the Frobenius ball of radius sigma around center.
// Trials are chunked over split RNG streams and merged deterministically.
TubeMcResult mc_tube_probability(long n, long p, const SymmetricMatrix& shift,
                                 const SymmetricMatrix& center, double sigma, double delta,
                                 long trials, const Rng& rng, int threads = 1);

// 95% Wilson score interval for s successes out of n trials.
std::pair<double, double> wilson_interval(long successes, long trials);

}  // namespace bmsdp
