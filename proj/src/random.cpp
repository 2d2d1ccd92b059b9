#include "bmsdp/random.hpp"

#include <cmath>
#include <stdexcept>

namespace bmsdp {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), state_(mix64(seed + kGolden)) {}

Rng Rng::split(std::uint64_t key) const {
  // Two mixing rounds over (seed, key) decorrelate adjacent keys.
  std::uint64_t child = mix64(seed_ ^ mix64(key * kGolden + 0x1234567897531246ULL));
  return Rng(child);
}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 in (0,1] so the log is finite.
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

Vector Rng::gaussian_vector(long k) {
  Vector v(k);
  for (long i = 0; i < k; ++i) v[i] = normal();
  return v;
}

Matrix Rng::gaussian_matrix(long rows, long cols) {
  Matrix m(rows, cols);
  for (long j = 0; j < cols; ++j)
    for (long i = 0; i < rows; ++i) m(i, j) = normal();
  return m;
}

SymmetricMatrix Rng::goe_matrix(long n) {
  Matrix m = gaussian_matrix(n, n);
  return (m + m.transpose()) / std::sqrt(2.0);
}

Vector Rng::uniform_ball(const Vector& center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("uniform_ball: radius must be positive");
  const long k = center.size();
  Vector dir = gaussian_vector(k);
  double nrm = dir.norm();
  while (nrm == 0.0) {  // measure-zero, but keep the sampler total
    dir = gaussian_vector(k);
    nrm = dir.norm();
  }
  double u = uniform01();
  double r = radius * std::pow(u, 1.0 / static_cast<double>(k));
  return center + (r / nrm) * dir;
}

}  // namespace bmsdp
