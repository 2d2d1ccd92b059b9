#pragma once

#include <vector>

#include "bmsdp/linalg.hpp"

namespace bmsdp {

// Linear map A: S^n -> R^m, X -> (A_1 . X, ..., A_m . X), identified with the
// tuple (A_1, ..., A_m). Immutable after construction.
class ConstraintMap {
 public:
  ConstraintMap(long n, std::vector<SymmetricMatrix> matrices);

  long n() const { return n_; }
  long m() const { return static_cast<long>(matrices_.size()); }
  const SymmetricMatrix& matrix(long i) const { return matrices_[i]; }
  const std::vector<SymmetricMatrix>& matrices() const { return matrices_; }

  // A(X): component i is the Frobenius inner product A_i . X.
  Vector apply(const SymmetricMatrix& X) const;

  // Adjoint A*(lambda) = sum_i lambda_i A_i.
  SymmetricMatrix apply_adjoint(const Vector& lambda) const;

  // A(U Y^T + Y U^T)/2 contracted against one-sided products: component i is
  // A_i . (U Y^T)  (equal to A_i . (Y U^T) by symmetry of A_i).
  Vector apply_one_sided(const Matrix& U, const Matrix& Y) const;

  // Frobenius -> l2 operator norm: largest singular value of the m x tau(n)
  // matrix whose rows are svec(A_i). Cached after the first call.
  double operator_norm() const;

  // Euclidean tuple norm sqrt(sum_i ||A_i||_F^2); upper bound on the
  // operator norm.
  double tuple_norm() const;

  // The m x tau(n) matrix with rows svec(A_i).
  Matrix stacked_svec() const;

 private:
  long n_;
  std::vector<SymmetricMatrix> matrices_;
  mutable double op_norm_ = -1.0;
};

// An SDP instance: min C . X s.t. A(X) = b, X psd.
struct SdpInstance {
  SymmetricMatrix cost;
  ConstraintMap map;
  Vector rhs;

  SdpInstance(SymmetricMatrix C, ConstraintMap A, Vector b);

  long n() const { return map.n(); }
  long m() const { return map.m(); }
};

}  // namespace bmsdp
