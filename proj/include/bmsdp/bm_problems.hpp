#pragma once

#include <memory>

#include "bmsdp/constraint_map.hpp"
#include "bmsdp/two_phase.hpp"

namespace bmsdp {

// Oracles for the factored problem min C . Y Y^T s.t. A(Y Y^T) = b, over the
// flattened variable y = vec(Y) (column-major, dimension n p):
//   f(Y) = C . Y Y^T          grad f = 2 C Y        hess f = 2 (I_p (x) C)
//   h_i(Y) = A_i . Y Y^T - b_i   J row i = vec(2 A_i Y)
//   sum_i w_i hess h_i = 2 (I_p (x) A*(w))
struct BmOracleSet {
  std::shared_ptr<const SdpInstance> instance;
  long p = 0;
  NlpProblem problem;
  // Largest ||grad f|| observed across oracle calls (the running L_f estimate).
  std::shared_ptr<double> grad_f_max;

  FactorPoint unflatten(const Vector& y) const;
  Vector flatten(const FactorPoint& Y) const;
};

BmOracleSet make_bm_oracles(const SdpInstance& inst, long p);

// Oracle for the least-squares factored problem g(Y) = ||A(Y Y^T) - b||^2:
//   grad g = 2 S(Y Y^T) Y with S(X) = 2 A*(A(X) - b)
//   hess g = 2 (I_p (x) S) + 8 G^T G with G row i = vec(A_i Y)
struct LsOracle {
  std::shared_ptr<const ConstraintMap> map;
  Vector rhs;
  long p = 0;
  SmoothObjective objective;

  FactorPoint unflatten(const Vector& y) const;
  Vector flatten(const FactorPoint& Y) const;
};

LsOracle make_ls_oracle(const ConstraintMap& map, const Vector& b, long p);

}  // namespace bmsdp
