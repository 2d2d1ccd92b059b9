#pragma once

#include <functional>
#include <vector>

#include "bmsdp/linalg.hpp"

namespace bmsdp {

// Twice-differentiable objective with dense derivatives.
struct SmoothObjective {
  long dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

// Adaptive regularization with cubics. eps1/eps2 are the approximate
// 2-criticality targets; the remaining constants are standard ARC knobs.
struct ArcSettings {
  double eps1 = 1e-8;
  double eps2 = 1e-6;
  long max_iters = 1000;
  double sigma0 = 1.0;
  double eta1 = 0.1;
  double eta2 = 0.9;
  double gamma_dec = 0.5;
  double gamma_inc = 2.0;
  bool record_trace = true;
};

enum class ArcStatus { kConverged, kBudgetExhausted, kNonFinite };

struct ArcIteration {
  double value = 0.0;        // objective before the step
  double grad_norm = 0.0;
  double sigma_reg = 0.0;
  double model_decrease = 0.0;
  bool accepted = false;
};

struct ArcResult {
  ArcStatus status = ArcStatus::kBudgetExhausted;
  Vector y;
  double value = 0.0;
  double grad_norm = 0.0;
  double hess_min_eig = 0.0;
  long iterations = 0;  // subproblem solves
  std::vector<ArcIteration> trace;

  bool converged() const { return status == ArcStatus::kConverged; }
};

// Global minimizer of m(s) = g's + s'Hs/2 + (sigma_reg/3)||s||^3, computed by
// eigendecomposition of H and root finding on the secular equation in ||s||.
// Handles the hard case (g orthogonal to the bottom eigenspace) by adding an
// eigenvector component.
Vector solve_cubic_subproblem(const Vector& g, const SymmetricMatrix& H, double sigma_reg);

// Minimizes obj from y0 until ||grad|| <= eps1 and lambda_min(hess) >= -eps2.
// The objective never increases across accepted steps. On budget exhaustion
// the best iterate is returned with the corresponding status.
ArcResult arc_minimize(const SmoothObjective& obj, const Vector& y0, const ArcSettings& settings);

}  // namespace bmsdp
