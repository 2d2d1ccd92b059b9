#include "bmsdp/planted.hpp"

#include <cmath>
#include <stdexcept>

#include "bmsdp/certificates.hpp"

namespace bmsdp {

PlantedInstance gen_planted_sdp(long n, long r, Rng& rng) {
  if (r < 1 || r > n) throw std::invalid_argument("gen_planted_sdp: need 1 <= r <= n");
  const long m = triangular(r);

  const Matrix G = rng.gaussian_matrix(n, r);
  const SymmetricMatrix X0 = G * G.transpose();

  std::vector<SymmetricMatrix> mats;
  mats.reserve(m);
  for (long i = 0; i < m; ++i) mats.push_back(rng.goe_matrix(n));
  ConstraintMap map(n, std::move(mats));
  const Vector b = map.apply(X0);

  const Vector lambda0 = rng.gaussian_vector(m);

  // Orthonormal basis of ker(X0) = complement of col(G), scaled by a
  // Gaussian factor; S0 = Q Q^T is psd and annihilates X0.
  Eigen::HouseholderQR<Matrix> qr(G);
  const Matrix Qfull = qr.householderQ() * Matrix::Identity(n, n);
  const double scale = rng.normal();
  const Matrix Q = scale * Qfull.rightCols(n - r);
  const SymmetricMatrix S0 = Q * Q.transpose();

  const SymmetricMatrix C = map.apply_adjoint(lambda0) + S0;

  PlantedInstance out{SdpInstance(C, std::move(map), b), X0, lambda0, S0, r};
  verify_planted(out);
  return out;
}

void verify_planted(const PlantedInstance& planted) {
  const auto& inst = planted.instance;
  const double scale = 1.0 + planted.X0.norm() + inst.cost.norm();
  if ((inst.map.apply(planted.X0) - inst.rhs).norm() > 1e-9 * scale)
    throw std::logic_error("planted instance: A(X0) != b");
  if ((planted.S0 * planted.X0).norm() > 1e-9 * scale * (1.0 + planted.S0.norm()))
    throw std::logic_error("planted instance: S0 X0 != 0");
  if (min_eigenvalue(planted.S0) < -1e-10 * (1.0 + planted.S0.norm()))
    throw std::logic_error("planted instance: S0 not psd");
  const SymmetricMatrix recon =
      inst.map.apply_adjoint(planted.lambda0) + planted.S0 - inst.cost;
  if (recon.norm() > 1e-9 * scale) throw std::logic_error("planted instance: C decomposition");
  // Numerical rank of X0 at a relative threshold.
  Eigen::SelfAdjointEigenSolver<Matrix> es(planted.X0, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  long rank = 0;
  for (long i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > 1e-8 * top) ++rank;
  if (rank != planted.r) throw std::logic_error("planted instance: rank(X0) != r");
}

PlantedInstance normalize_cost(const PlantedInstance& planted) {
  const double s = planted.instance.cost.norm();
  if (!(s > 0.0)) return planted;
  PlantedInstance out{SdpInstance(planted.instance.cost / s, planted.instance.map,
                                  planted.instance.rhs),
                      planted.X0, planted.lambda0 / s, planted.S0 / s, planted.r};
  return out;
}

SdpInstance perturb_instance(const SdpInstance& inst, double sigma, PerturbTarget target,
                             Rng& rng) {
  if (sigma < 0.0) throw std::invalid_argument("perturb_instance: sigma >= 0 required");
  if (sigma == 0.0) return inst;
  if (target == PerturbTarget::kCost) {
    const Vector c = rng.uniform_ball(svec(inst.cost), sigma);
    return SdpInstance(smat(c), inst.map, inst.rhs);
  }
  // Constraint tuple lives in (S^n)^m with the Euclidean (stacked-svec) norm.
  const long m = inst.m();
  const long tn = triangular(inst.n());
  Vector stacked(m * tn);
  for (long i = 0; i < m; ++i) stacked.segment(i * tn, tn) = svec(inst.map.matrix(i));
  const Vector drawn = rng.uniform_ball(stacked, sigma);
  std::vector<SymmetricMatrix> mats;
  mats.reserve(m);
  for (long i = 0; i < m; ++i) mats.push_back(smat(drawn.segment(i * tn, tn)));
  return SdpInstance(inst.cost, ConstraintMap(inst.n(), std::move(mats)), inst.rhs);
}

}  // namespace bmsdp
