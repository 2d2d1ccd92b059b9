#include "bmsdp/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace bmsdp {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

long triangular_inverse(long len) {
  if (len < 0) return -1;
  // n = (sqrt(8 len + 1) - 1) / 2, verified exactly.
  long n = static_cast<long>((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0);
  for (long c = n - 1; c <= n + 1; ++c) {
    if (c >= 0 && triangular(c) == len) return c;
  }
  return -1;
}

bool is_symmetric(const Matrix& X, double tol) {
  if (X.rows() != X.cols()) return false;
  return (X - X.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + X.cwiseAbs().maxCoeff());
}

SymmetricMatrix symmetrize(const Matrix& X) {
  if (X.rows() != X.cols()) throw std::invalid_argument("symmetrize: matrix is not square");
  return 0.5 * (X + X.transpose());
}

Vector svec(const SymmetricMatrix& X) {
  const long n = X.rows();
  if (X.cols() != n) throw std::invalid_argument("svec: matrix is not square");
  Vector v(triangular(n));
  long k = 0;
  for (long i = 0; i < n; ++i) {
    v[k++] = X(i, i);
    for (long j = i + 1; j < n; ++j) v[k++] = kSqrt2 * X(i, j);
  }
  return v;
}

SymmetricMatrix smat(const Vector& v) {
  const long n = triangular_inverse(v.size());
  if (n < 0) throw std::invalid_argument("smat: length is not a triangular number");
  SymmetricMatrix X(n, n);
  long k = 0;
  for (long i = 0; i < n; ++i) {
    X(i, i) = v[k++];
    for (long j = i + 1; j < n; ++j) {
      X(i, j) = v[k] / kSqrt2;
      X(j, i) = X(i, j);
      ++k;
    }
  }
  return X;
}

double min_eigenvalue(const SymmetricMatrix& S) {
  if (S.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::pair<double, Vector> min_eigenpair(const SymmetricMatrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  // eigenvalues() is sorted ascending
  return {es.eigenvalues()[0], es.eigenvectors().col(0)};
}

double min_singular_value(const Matrix& J) {
  if (J.rows() == 0 || J.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(J);
  const auto& sv = svd.singularValues();
  // Singular values beyond min(rows, cols) are implicitly zero only when the
  // matrix cannot have full rank in the smaller dimension; JacobiSVD returns
  // min(rows, cols) values, which is what sigma_min means here.
  return sv[sv.size() - 1];
}

double sigma_p(const FactorPoint& Y) {
  const long p = Y.cols();
  if (p == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(Y);
  const auto& sv = svd.singularValues();
  if (sv.size() < p) return 0.0;  // n < p: rank cannot reach p
  return sv[p - 1];
}

}  // namespace bmsdp
