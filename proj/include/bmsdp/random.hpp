#pragma once

#include <cstdint>

#include "bmsdp/linalg.hpp"

namespace bmsdp {

// Splittable deterministic generator (SplitMix64 core). A child stream is a
// pure function of (parent seed, key), so parallel trials derived from one
// master seed reproduce bit-identically regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Derived independent stream; does not consume state from this stream.
  Rng split(std::uint64_t key) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform01();

  // Standard normal (Box-Muller, with cached spare).
  double normal();

  Vector gaussian_vector(long k);
  Matrix gaussian_matrix(long rows, long cols);

  // GOE-normalized random symmetric matrix (M + M^T)/sqrt(2), M iid N(0,1).
  SymmetricMatrix goe_matrix(long n);

  // Uniform sample on the Euclidean ball of the given radius around center:
  // direction from a normalized Gaussian, radius = R * U^(1/k).
  Vector uniform_ball(const Vector& center, double radius);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;   // immutable; identifies the stream
  std::uint64_t state_;  // advances as numbers are drawn
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bmsdp
