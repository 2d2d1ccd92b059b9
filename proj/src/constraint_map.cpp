#include "bmsdp/constraint_map.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace bmsdp {

ConstraintMap::ConstraintMap(long n, std::vector<SymmetricMatrix> matrices)
    : n_(n), matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw std::invalid_argument("ConstraintMap: need m >= 1 matrices");
  for (const auto& A : matrices_) {
    if (A.rows() != n_ || A.cols() != n_)
      throw std::invalid_argument("ConstraintMap: matrix dimension mismatch");
    if (!A.allFinite()) throw std::invalid_argument("ConstraintMap: non-finite entries");
    if (!is_symmetric(A, 1e-10)) throw std::invalid_argument("ConstraintMap: matrix not symmetric");
  }
}

Vector ConstraintMap::apply(const SymmetricMatrix& X) const {
  if (X.rows() != n_ || X.cols() != n_)
    throw std::invalid_argument("ConstraintMap::apply: dimension mismatch");
  Vector out(m());
  for (long i = 0; i < m(); ++i) out[i] = matrices_[i].cwiseProduct(X).sum();
  return out;
}

SymmetricMatrix ConstraintMap::apply_adjoint(const Vector& lambda) const {
  if (lambda.size() != m())
    throw std::invalid_argument("ConstraintMap::apply_adjoint: length mismatch");
  SymmetricMatrix S = SymmetricMatrix::Zero(n_, n_);
  for (long i = 0; i < m(); ++i) S += lambda[i] * matrices_[i];
  return S;
}

Vector ConstraintMap::apply_one_sided(const Matrix& U, const Matrix& Y) const {
  if (U.rows() != n_ || Y.rows() != n_ || U.cols() != Y.cols())
    throw std::invalid_argument("ConstraintMap::apply_one_sided: dimension mismatch");
  Vector out(m());
  for (long i = 0; i < m(); ++i) out[i] = ((matrices_[i] * U).cwiseProduct(Y)).sum();
  return out;
}

double ConstraintMap::operator_norm() const {
  if (op_norm_ < 0.0) {
    Eigen::JacobiSVD<Matrix> svd(stacked_svec());
    op_norm_ = svd.singularValues()[0];
  }
  return op_norm_;
}

double ConstraintMap::tuple_norm() const {
  double s = 0.0;
  for (const auto& A : matrices_) s += A.squaredNorm();
  return std::sqrt(s);
}

Matrix ConstraintMap::stacked_svec() const {
  Matrix M(m(), triangular(n_));
  for (long i = 0; i < m(); ++i) M.row(i) = svec(matrices_[i]).transpose();
  return M;
}

SdpInstance::SdpInstance(SymmetricMatrix C, ConstraintMap A, Vector b)
    : cost(std::move(C)), map(std::move(A)), rhs(std::move(b)) {
  if (cost.rows() != map.n() || cost.cols() != map.n())
    throw std::invalid_argument("SdpInstance: cost dimension mismatch");
  if (rhs.size() != map.m()) throw std::invalid_argument("SdpInstance: rhs length mismatch");
}

}  // namespace bmsdp
