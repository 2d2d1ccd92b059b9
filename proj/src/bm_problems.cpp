#include "bmsdp/bm_problems.hpp"

#include <stdexcept>

namespace bmsdp {

namespace {

Matrix kron_identity_left(long p, const SymmetricMatrix& S) {
  const long n = S.rows();
  Matrix H = Matrix::Zero(n * p, n * p);
  for (long j = 0; j < p; ++j) H.block(j * n, j * n, n, n) = S;
  return H;
}

FactorPoint unflatten_impl(const Vector& y, long n, long p) {
  if (y.size() != n * p) throw std::invalid_argument("unflatten: size mismatch");
  return Eigen::Map<const Matrix>(y.data(), n, p);
}

Vector flatten_impl(const FactorPoint& Y) {
  return Eigen::Map<const Vector>(Y.data(), Y.size());
}

}  // namespace

FactorPoint BmOracleSet::unflatten(const Vector& y) const {
  return unflatten_impl(y, instance->n(), p);
}
Vector BmOracleSet::flatten(const FactorPoint& Y) const { return flatten_impl(Y); }

BmOracleSet make_bm_oracles(const SdpInstance& inst, long p) {
  if (p < 1 || p > inst.n()) throw std::invalid_argument("make_bm_oracles: need 1 <= p <= n");
  BmOracleSet set;
  set.instance = std::make_shared<const SdpInstance>(inst);
  set.p = p;
  set.grad_f_max = std::make_shared<double>(0.0);
  const long n = inst.n(), m = inst.m();
  auto ptr = set.instance;
  auto gmax = set.grad_f_max;

  set.problem.dim = n * p;
  set.problem.f.dim = n * p;
  set.problem.f.value = [ptr, n, p](const Vector& y) {
    const FactorPoint Y = unflatten_impl(y, n, p);
    return (ptr->cost * Y).cwiseProduct(Y).sum();
  };
  set.problem.f.gradient = [ptr, gmax, n, p](const Vector& y) {
    const FactorPoint Y = unflatten_impl(y, n, p);
    Matrix G = 2.0 * ptr->cost * Y;
    Vector g = flatten_impl(G);
    if (g.norm() > *gmax) *gmax = g.norm();
    return g;
  };
  set.problem.f.hessian = [ptr, p](const Vector&) {
    return kron_identity_left(p, 2.0 * ptr->cost);
  };

  set.problem.h.m = m;
  set.problem.h.value = [ptr, n, p](const Vector& y) {
    const FactorPoint Y = unflatten_impl(y, n, p);
    return Vector(ptr->map.apply(Y * Y.transpose()) - ptr->rhs);
  };
  set.problem.h.jacobian = [ptr, n, p, m](const Vector& y) {
    const FactorPoint Y = unflatten_impl(y, n, p);
    Matrix J(m, n * p);
    for (long i = 0; i < m; ++i) {
      Matrix row = 2.0 * ptr->map.matrix(i) * Y;
      J.row(i) = flatten_impl(row).transpose();
    }
    return J;
  };
  set.problem.h.weighted_hessian = [ptr, p](const Vector&, const Vector& w) {
    return kron_identity_left(p, 2.0 * ptr->map.apply_adjoint(w));
  };
  return set;
}

FactorPoint LsOracle::unflatten(const Vector& y) const { return unflatten_impl(y, map->n(), p); }
Vector LsOracle::flatten(const FactorPoint& Y) const { return flatten_impl(Y); }

LsOracle make_ls_oracle(const ConstraintMap& map, const Vector& b, long p) {
  if (p < 1 || p > map.n()) throw std::invalid_argument("make_ls_oracle: need 1 <= p <= n");
  if (b.size() != map.m()) throw std::invalid_argument("make_ls_oracle: rhs length mismatch");
  LsOracle set;
  set.map = std::make_shared<const ConstraintMap>(map);
  set.rhs = b;
  set.p = p;
  const long n = map.n(), m = map.m();
  auto ptr = set.map;
  Vector rhs = set.rhs;

  set.objective.dim = n * p;
  set.objective.value = [ptr, rhs, n, p](const Vector& y) {
    const FactorPoint Y = unflatten_impl(y, n, p);
    return (ptr->apply(Y * Y.transpose()) - rhs).squaredNorm();
  };
  set.objective.gradient = [ptr, rhs, n, p](const Vector& y) {
    const FactorPoint Y = unflatten_impl(y, n, p);
    const Vector r = ptr->apply(Y * Y.transpose()) - rhs;
    const SymmetricMatrix S = 2.0 * ptr->apply_adjoint(r);
    Matrix G = 2.0 * S * Y;
    return flatten_impl(G);
  };
  set.objective.hessian = [ptr, rhs, n, p, m](const Vector& y) {
    const FactorPoint Y = unflatten_impl(y, n, p);
    const Vector r = ptr->apply(Y * Y.transpose()) - rhs;
    const SymmetricMatrix S = 2.0 * ptr->apply_adjoint(r);
    Matrix G(m, n * p);
    for (long i = 0; i < m; ++i) {
      Matrix row = ptr->matrix(i) * Y;
      G.row(i) = flatten_impl(row).transpose();
    }
    return Matrix(kron_identity_left(p, 2.0 * S) + 8.0 * G.transpose() * G);
  };
  return set;
}

}  // namespace bmsdp
