#pragma once

#include "bmsdp/constraint_map.hpp"
#include "bmsdp/random.hpp"

namespace bmsdp {

// Random SDP with a known optimum: A(X0) = b exactly, S0 psd with S0 X0 = 0,
// C = A*(lambda0) + S0, so (X0, lambda0) satisfies exact KKT by construction.
struct PlantedInstance {
  SdpInstance instance;
  SymmetricMatrix X0;
  Vector lambda0;
  SymmetricMatrix S0;
  long r = 0;
};

// X0 = G G^T with G an n x r Gaussian draw, m = tau(r) GOE constraint
// matrices, b = A(X0), lambda0 Gaussian, and S0 built from a Gaussian-scaled
// orthonormal basis of ker(X0).
PlantedInstance gen_planted_sdp(long n, long r, Rng& rng);

// Checks the construction invariants (exact KKT at (X0, lambda0), rank r).
// Throws std::logic_error on violation.
void verify_planted(const PlantedInstance& planted);

// Rescales the cost to unit Frobenius norm (lambda0 and S0 follow), keeping
// the optimum and the KKT structure. Tolerances become scale-free.
PlantedInstance normalize_cost(const PlantedInstance& planted);

enum class PerturbTarget { kCost, kConstraints };

// Uniform smoothing perturbation: cost target redraws C on the Frobenius
// ball of radius sigma around the current cost; constraints target redraws
// the tuple (A_1..A_m) on the Euclidean ball of (S^n)^m. b is unchanged.
SdpInstance perturb_instance(const SdpInstance& inst, double sigma, PerturbTarget target,
                             Rng& rng);

}  // namespace bmsdp
