#include "dfrc/manifold.hpp"

#include <cmath>
#include <random>

namespace dfrc {

void AscentConfig::validate() const {
  if (!(step > 0.0)) throw InvalidArgument("ascent step must be > 0");
  if (max_inner_steps < 1) throw InvalidArgument("max_inner_steps must be >= 1");
  if (!(min_displacement > 0.0)) throw InvalidArgument("min_displacement must be > 0");
}

double manifold_residual(const CVector& theta) {
  double worst = 0.0;
  for (Eigen::Index n = 0; n < theta.size(); ++n)
    worst = std::max(worst, std::abs(std::abs(theta(n)) - 1.0));
  return worst;
}

bool on_manifold(const CVector& theta, double tol) { return manifold_residual(theta) <= tol; }

CVector random_phases(int size, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  CVector out(size);
  for (int n = 0; n < size; ++n) out(n) = std::polar(1.0, phase(engine));
  return out;
}

CVector euclidean_gradient(const CVector& theta, const ObjectiveBundle& bundle,
                           const std::vector<Complex>& quartic) {
  require_dims(theta.size() == bundle.num_irs_elements(), "theta length must equal N");
  require_dims(quartic.size() == bundle.Z.size(), "one quartic form per Z_ij");

  CVector grad = 2.0 * (bundle.D1 * theta) + 2.0 * bundle.v.conjugate();
  if (bundle.radar_scale != 0.0) {
    // sum_ij h_ij (Z_ij^* + Z_ij^H) conj(theta) = conj( sum_ij conj(h_ij) (Z_ij + Z_ij^T) theta )
    CVector acc = CVector::Zero(theta.size());
    for (std::size_t k = 0; k < bundle.Z.size(); ++k) {
      const CMatrix& z = bundle.Z[k];
      acc.noalias() += std::conj(quartic[k]) * (z * theta);
      acc.noalias() += std::conj(quartic[k]) * (z.transpose() * theta);
    }
    grad += 2.0 * bundle.radar_scale * acc.conjugate();
  }
  return grad;
}

CVector euclidean_gradient(const CVector& theta, const ObjectiveBundle& bundle) {
  if (bundle.radar_scale == 0.0) return euclidean_gradient(theta, bundle, std::vector<Complex>(bundle.Z.size()));
  return euclidean_gradient(theta, bundle, quartic_forms(theta, bundle));
}

TangentVector project_tangent(const CVector& grad, const CVector& theta) {
  require_dims(grad.size() == theta.size(), "gradient and point must have equal length");
  const RVector radial = grad.cwiseProduct(theta.conjugate()).real();
  return {grad - radial.cast<Complex>().cwiseProduct(theta), theta};
}

CVector retract(const CVector& theta, const TangentVector& dir, double step) {
  require_dims(dir.value.size() == theta.size(), "direction and point must have equal length");
  if (!(step >= 0.0)) throw InvalidArgument("retract: step must be >= 0");
  CVector out = theta + step * dir.value;
  for (Eigen::Index n = 0; n < out.size(); ++n) {
    const double mag = std::abs(out(n));
    if (mag < 1e-14)
      throw ZeroElement("retract: element " + std::to_string(n) + " vanished; shrink the step");
    out(n) /= mag;
  }
  return out;
}

AscentStepInfo ascent_step_detailed(const CVector& theta, const ObjectiveBundle& bundle,
                                    const AscentConfig& cfg, const GradientFn& gradient) {
  cfg.validate();
  const CVector euclid = gradient ? gradient(theta, bundle) : euclidean_gradient(theta, bundle);
  const TangentVector dir = project_tangent(euclid, theta);

  AscentStepInfo info;
  info.riemannian_grad_norm = dir.value.norm();
  info.step_used = cfg.step;
  info.theta = retract(theta, dir, cfg.step);
  if (!cfg.backtracking) return info;

  const double before = eval_f1(theta, bundle);
  const double largest = dir.value.cwiseAbs().maxCoeff();
  while (eval_f1(info.theta, bundle) < before && info.step_used * largest >= cfg.min_displacement) {
    info.step_used *= 0.5;
    ++info.halvings;
    info.theta = retract(theta, dir, info.step_used);
  }
  if (eval_f1(info.theta, bundle) < before) {
    info.theta = theta;
    info.step_used = 0.0;
  }
  return info;
}

CVector ascent_step(const CVector& theta, const ObjectiveBundle& bundle, const AscentConfig& cfg) {
  return ascent_step_detailed(theta, bundle, cfg).theta;
}

CVector finite_difference_gradient(const CVector& theta, const ObjectiveBundle& bundle, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite_difference_gradient: h must be > 0");
  CVector grad(theta.size());
  CVector probe = theta;
  for (Eigen::Index n = 0; n < theta.size(); ++n) {
    const Complex base = theta(n);
    probe(n) = base + h;
    const double re_plus = eval_f1(probe, bundle);
    probe(n) = base - h;
    const double re_minus = eval_f1(probe, bundle);
    probe(n) = base + Complex(0.0, h);
    const double im_plus = eval_f1(probe, bundle);
    probe(n) = base - Complex(0.0, h);
    const double im_minus = eval_f1(probe, bundle);
    probe(n) = base;
    grad(n) = Complex((re_plus - re_minus) / (2.0 * h), (im_plus - im_minus) / (2.0 * h));
  }
  return grad;
}

}  // namespace dfrc
