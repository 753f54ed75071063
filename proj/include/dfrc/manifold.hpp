#pragma once

#include <functional>

#include "dfrc/objective.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

// Complex circle manifold {theta in C^N : |theta_n| = 1}.
//
// Gradients follow the convention grad f = 2 df/d(conj theta), under which the
// directional derivative of f along any u is Re{grad^H u}.

/// A direction in the tangent space at `base`: Re{value_n conj(base_n)} = 0.
struct TangentVector {
  CVector value;
  CVector base;
};

struct AscentConfig {
  double step = 0.1;
  int max_inner_steps = 1;
  /// Halve the step until f1 does not decrease. Halving stops once the
  /// largest element displacement step * |d_n| drops below min_displacement,
  /// in which case theta is left unchanged.
  bool backtracking = false;
  double min_displacement = 1e-10;

  void validate() const;
};

using GradientFn = std::function<CVector(const CVector&, const ObjectiveBundle&)>;

/// True when every |theta_n| is within `tol` of one.
bool on_manifold(const CVector& theta, double tol = 1e-10);

/// Largest ||theta_n| - 1| over all elements.
double manifold_residual(const CVector& theta);

/// Points with unit modulus and uniformly random phases.
CVector random_phases(int size, std::uint64_t seed);

/// Euclidean gradient of f1.
CVector euclidean_gradient(const CVector& theta, const ObjectiveBundle& bundle);

/// Same, reusing precomputed h_ij = theta^T Z_ij theta.
CVector euclidean_gradient(const CVector& theta, const ObjectiveBundle& bundle,
                           const std::vector<Complex>& quartic);

/// g - Re{g o conj(theta)} o theta.
TangentVector project_tangent(const CVector& grad, const CVector& theta);

/// Elementwise normalization of theta + step * dir. Throws ZeroElement if an
/// element collapses below 1e-14 in magnitude.
CVector retract(const CVector& theta, const TangentVector& dir, double step);

struct AscentStepInfo {
  CVector theta;
  double riemannian_grad_norm = 0.0;
  double step_used = 0.0;
  int halvings = 0;
};

/// One inner update: gradient, projection, retraction.
AscentStepInfo ascent_step_detailed(const CVector& theta, const ObjectiveBundle& bundle,
                                    const AscentConfig& cfg,
                                    const GradientFn& gradient = nullptr);

CVector ascent_step(const CVector& theta, const ObjectiveBundle& bundle, const AscentConfig& cfg);

/// Central differences of eval_f1 over (Re theta_n, Im theta_n), assembled as
/// df/dRe + j df/dIm. Used to validate euclidean_gradient.
CVector finite_difference_gradient(const CVector& theta, const ObjectiveBundle& bundle, double h);

}  // namespace dfrc
