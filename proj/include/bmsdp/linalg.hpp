#pragma once

#include <Eigen/Dense>

namespace bmsdp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Dense n x n symmetric matrix. Kept as a plain Eigen matrix; construction
// helpers below enforce/check symmetry where it matters.
using SymmetricMatrix = Eigen::MatrixXd;

// n x p factor Y of the lifted variable X = Y Y^T.
using FactorPoint = Eigen::MatrixXd;

// k-th triangular number tau(k) = k(k+1)/2, the dimension of S^k.
inline long triangular(long k) { return k * (k + 1) / 2; }

// Inverse of triangular(); returns -1 if len is not a triangular number.
long triangular_inverse(long len);

bool is_symmetric(const Matrix& X, double tol = 1e-12);

// (X + X^T)/2
SymmetricMatrix symmetrize(const Matrix& X);

// Isometric vectorization of S^n: row-major upper triangle, off-diagonal
// entries scaled by sqrt(2) so that ||svec(X)||_2 = ||X||_F.
Vector svec(const SymmetricMatrix& X);

// Inverse of svec. Throws std::invalid_argument on non-triangular length.
SymmetricMatrix smat(const Vector& v);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const SymmetricMatrix& S);

// Smallest eigenvalue and a unit eigenvector attaining it.
std::pair<double, Vector> min_eigenpair(const SymmetricMatrix& S);

// Smallest singular value of a rectangular matrix (0 for wide/empty cases
// where the rank cannot reach min(rows, cols)).
double min_singular_value(const Matrix& J);

// p-th largest singular value of Y (sigma_p in the rank-deficiency bounds).
double sigma_p(const FactorPoint& Y);

}  // namespace bmsdp
