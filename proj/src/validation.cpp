#include "dfrc/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dfrc {

namespace {

CMatrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      out(r, c) = Complex(re, normal(rng));
    }
  return out;
}

double relative_error(const CVector& got, const CVector& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

Check make_check(std::string name, double tolerance, double measured, bool pass, std::string detail = {}) {
  return {std::move(name), tolerance, measured, pass, std::move(detail)};
}

}  // namespace

RandomInstance random_instance(std::mt19937_64& rng, int max_m, int max_n, int max_k) {
  std::uniform_int_distribution<int> pick_m(1, max_m);
  std::uniform_int_distribution<int> pick_k(1, max_k);
  const int side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(max_n))));
  std::uniform_int_distribution<int> pick_side(1, side);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);

  const int m = pick_m(rng);
  const int k = pick_k(rng);
  const int rows = pick_side(rng);
  const int cols = std::min(pick_side(rng), max_n / rows);
  const int n = rows * cols;

  RandomInstance inst;
  inst.channels.G = gaussian_matrix(rng, n, m);
  inst.channels.F = gaussian_matrix(rng, k, m);
  inst.channels.H = gaussian_matrix(rng, k, n);
  inst.channels.eta = std::polar(0.5 + unit(rng), angle(rng));
  inst.steering = upa_steering(rows, cols, 0.5, angle(rng), angle(rng));
  inst.precoder = gaussian_matrix(rng, m, m);
  inst.weights.alpha = unit(rng);
  inst.weights.noise_radar = 0.5 + 1.5 * unit(rng);
  inst.weights.noise_comm = 0.5 + 1.5 * unit(rng);
  inst.theta = CVector(n);
  for (int i = 0; i < n; ++i) inst.theta(i) = std::polar(1.0, angle(rng));
  return inst;
}

CMatrix random_psd(std::mt19937_64& rng, int size, int rank) {
  const CMatrix factor = gaussian_matrix(rng, size, rank);
  CMatrix out = factor * factor.adjoint();
  out = 0.5 * (out + out.adjoint());
  return out / out.norm();
}

double best_sampled_objective(std::mt19937_64& rng, const CMatrix& c, const BeampatternSpec& spec,
                              int samples) {
  const CMatrix& rd = spec.desired;
  const auto m = rd.rows();
  Eigen::SelfAdjointEigenSolver<CMatrix> rd_eig(rd);
  if (rd_eig.eigenvalues().minCoeff() <= 0.0)
    throw InvalidArgument("best_sampled_objective: R_d must be positive definite");
  const CMatrix rd_inv_sqrt = rd_eig.operatorInverseSqrt();

  const double base = (rd * c).trace().real();
  // Largest t keeping R_d + t D PSD, clipped to the Frobenius ball (|D| = 1).
  const auto reach = [&](const CMatrix& d) {
    const CMatrix whitened = -(rd_inv_sqrt * d * rd_inv_sqrt);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (whitened + whitened.adjoint()), Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().maxCoeff();
    return std::min(top > 0.0 ? 1.0 / top : std::numeric_limits<double>::infinity(), spec.threshold);
  };

  double best = base;
  for (int s = 0; s < samples; ++s) {
    CMatrix d = gaussian_matrix(rng, m, m);
    d = 0.5 * (d + d.adjoint());
    d -= (d.trace() / static_cast<double>(m)) * CMatrix::Identity(m, m);
    const double d_norm = d.norm();
    if (d_norm == 0.0) continue;
    d /= d_norm;
    // The objective is linear along the line, so only the uphill end matters.
    const double slope = (d * c).trace().real();
    if (slope < 0.0) d = -d;
    best = std::max(best, base + reach(d) * std::abs(slope));
  }
  return best;
}

std::vector<Check> validate_gradient(const ValidationOptions& options) {
  std::mt19937_64 rng(options.seed);
  const GradientFn gradient = options.gradient ? options.gradient
                                               : GradientFn([](const CVector& t, const ObjectiveBundle& b) {
                                                   return euclidean_gradient(t, b);
                                                 });
  std::vector<Check> checks;

  {
    double worst = 0.0;
    for (int i = 0; i < options.gradient_instances; ++i) {
      const RandomInstance inst = random_instance(rng);
      const ObjectiveBundle b = build_bundle(inst.channels, inst.steering, inst.precoder, inst.weights);
      worst = std::max(worst, relative_error(gradient(inst.theta, b), finite_difference_gradient(inst.theta, b, 1e-6)));
    }
    checks.push_back(make_check("gradient_vs_finite_difference", 1e-5, worst, worst < 1e-5,
                                std::to_string(options.gradient_instances) + " instances, h = 1e-6"));
  }

  {
    // Central differences on a quartic: the error should shrink ~100x per decade.
    RandomInstance inst = random_instance(rng, 4, 16, 4);
    inst.weights.alpha = 0.3;
    const ObjectiveBundle b = build_bundle(inst.channels, inst.steering, inst.precoder, inst.weights);
    const CVector g = gradient(inst.theta, b);
    const double coarse = relative_error(finite_difference_gradient(inst.theta, b, 1e-3), g);
    const double fine = relative_error(finite_difference_gradient(inst.theta, b, 1e-4), g);
    const double ratio = coarse / std::max(fine, 1e-300);
    checks.push_back(make_check("finite_difference_order", 25.0, ratio, ratio >= 25.0,
                                "error ratio between h = 1e-3 and 1e-4 (>= tolerance)"));
  }

  {
    double worst_ratio = 0.0;
    for (int i = 0; i < 10; ++i) {
      const RandomInstance inst = random_instance(rng);
      const ObjectiveBundle b = build_bundle(inst.channels, inst.steering, inst.precoder, inst.weights);
      CVector u = project_tangent(gaussian_matrix(rng, inst.theta.size(), 1).col(0), inst.theta).value;
      if (u.norm() == 0.0) continue;
      u /= u.norm();
      const TangentVector dir{u, inst.theta};
      const double f0 = eval_f1(inst.theta, b);
      const double slope = gradient(inst.theta, b).dot(u).real();
      const auto err = [&](double h) { return std::abs((eval_f1(retract(inst.theta, dir, h), b) - f0) / h - slope); };
      const double e1 = err(1e-5);
      const double e2 = err(1e-6);
      if (e1 > 1e-9 * std::max(1.0, std::abs(f0))) worst_ratio = std::max(worst_ratio, e2 / e1);
    }
    checks.push_back(make_check("directional_derivative", 0.2, worst_ratio, worst_ratio <= 0.2,
                                "error(h=1e-6) / error(h=1e-5) along a unit tangent"));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < options.pipeline_instances; ++i) {
      const RandomInstance inst = random_instance(rng);
      const ObjectiveBundle b = build_bundle(inst.channels, inst.steering, inst.precoder, inst.weights);
      const double direct = evaluate_snrs(inst.channels, inst.steering, inst.theta, inst.precoder, inst.weights).weighted;
      const double vector_form = eval_f1(inst.theta, b) + b.t0;
      worst = std::max(worst, std::abs(direct - vector_form) / std::max(1.0, std::abs(direct)));
    }
    checks.push_back(make_check("pipeline_equivalence", 1e-9, worst, worst <= 1e-9,
                                std::to_string(options.pipeline_instances) + " instances"));
  }

  {
    double idempotence = 0.0;
    double on_circle = 0.0;
    for (int i = 0; i < 50; ++i) {
      const RandomInstance inst = random_instance(rng);
      const CVector g = gaussian_matrix(rng, inst.theta.size(), 1).col(0) * 10.0;
      const TangentVector once = project_tangent(g, inst.theta);
      const TangentVector twice = project_tangent(once.value, inst.theta);
      idempotence = std::max(idempotence, (twice.value - once.value).cwiseAbs().maxCoeff() /
                                              std::max(1.0, once.value.cwiseAbs().maxCoeff()));
      on_circle = std::max(on_circle, manifold_residual(retract(inst.theta, once, 0.1)));
    }
    checks.push_back(make_check("tangent_projection_idempotent", 1e-12, idempotence, idempotence <= 1e-12));
    checks.push_back(make_check("retraction_on_manifold", 1e-12, on_circle, on_circle <= 1e-12));
  }
  return checks;
}

std::vector<Check> validate_solver(const ValidationOptions& options) {
  std::mt19937_64 rng(options.seed + 1);
  std::vector<Check> checks;

  {
    CMatrix c = CMatrix::Zero(2, 2);
    c(0, 0) = 1.0;
    const BeampatternSpec spec{CMatrix::Identity(2, 2), 2.0};
    const double solved = solve_covariance(c, 2.0, spec).objective;
    const double sampled = best_sampled_objective(rng, c, spec, options.solver_samples);
    const double gap = std::abs(solved - sampled) / std::abs(solved);
    checks.push_back(make_check("sampled_gap_M2_example", 1e-4, gap, gap <= 1e-4 && sampled <= solved + 1e-12,
                                "C = diag(1,0), R_d = I, P0 = 2, gamma = 2; optimum 2"));
    const double bound_gap = std::abs(solved - 2.0) / 2.0;
    checks.push_back(make_check("eigen_bound_M2_example", 1e-6, bound_gap, bound_gap <= 1e-6));
  }

  for (int m : {2, 3}) {
    double worst_shortfall = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 5; ++trial) {
      const double power = 1.0 + 4.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const CMatrix c = random_psd(rng, m, 1 + trial % m) * 3.0;
      const BeampatternSpec spec = BeampatternSpec::omnidirectional(m, power, 0.3 * power);
      const double solved = solve_covariance(c, power, spec).objective;
      const double sampled = best_sampled_objective(rng, c, spec, options.solver_samples / 5);
      worst_shortfall = std::max(worst_shortfall, (sampled - solved) / std::abs(solved));
    }
    checks.push_back(make_check("sampled_shortfall_M" + std::to_string(m), 1e-4, worst_shortfall,
                                worst_shortfall <= 1e-4,
                                "(best sample - solver) / solver over 5 instances; negative means solver is better"));
  }

  {
    double worst = 0.0;
    for (int m : {2, 3, 4}) {
      const double power = 3.0;
      const CMatrix c = random_psd(rng, m, m);
      const BeampatternSpec spec = BeampatternSpec::omnidirectional(m, power, 10.0 * power);
      const CovarianceSolution sol = solve_covariance(c, power, spec);
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(c, Eigen::EigenvaluesOnly);
      const double bound = power * eig.eigenvalues().maxCoeff();
      worst = std::max(worst, std::abs(sol.objective - bound) / bound);
    }
    checks.push_back(make_check("eigen_bound_inactive_ball", 1e-6, worst, worst <= 1e-6, "P0 * lambda_max(C)"));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const int m = 2 + i % 4;
      const double power = 2.0;
      const BeampatternSpec spec = BeampatternSpec::omnidirectional(m, power, 0.5);
      CMatrix x = gaussian_matrix(rng, m, m) * 3.0;
      x = 0.5 * (x + x.adjoint());
      const CMatrix r = project_feasible(x, power, spec);
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(r, Eigen::EigenvaluesOnly);
      const double residual = std::max({std::abs(r.trace().real() - power) / power,
                                        std::max(0.0, (r - spec.desired).norm() - spec.threshold),
                                        std::max(0.0, -eig.eigenvalues().minCoeff())});
      worst = std::max(worst, residual);
    }
    checks.push_back(make_check("projection_feasibility", 1e-8, worst, worst <= 1e-8,
                                "max of trace, ball and PSD residuals over 50 projections"));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const CMatrix r = random_psd(rng, 5, 1 + i % 5) * 7.0;
      const CMatrix w = matrix_sqrt(r);
      worst = std::max(worst, (w * w.adjoint() - r).norm() / r.norm());
    }
    checks.push_back(make_check("sqrt_reconstruction", 1e-10, worst, worst <= 1e-10));
  }
  return checks;
}

}  // namespace dfrc
