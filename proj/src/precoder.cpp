#include "dfrc/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace dfrc {

namespace {

constexpr double kTraceTol = 1e-8;
constexpr int kMaxSearchSteps = 1000;

CMatrix hermitian_part(const CMatrix& x) { return 0.5 * (x + x.adjoint()); }

// Euclidean projection of `values` onto {x >= 0, sum x = total}.
RVector project_simplex(const RVector& values, double total) {
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - total) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) shift = candidate;
  }
  return (values.array() - shift).max(0.0).matrix();
}

struct RayPoint {
  CMatrix point;
  double distance = 0.0;
};

// Walks P_S(R_d + t D) for t in [0, t_max] and returns the largest t whose
// image stays within `radius` of R_d. The distance is nondecreasing in t.
struct RaySearch {
  const CMatrix& center;
  const CMatrix& direction;
  double power;
  double radius;
  int evaluations = 0;

  RayPoint at(double t) {
    ++evaluations;
    RayPoint p;
    p.point = project_spectraplex(center + t * direction, power);
    p.distance = (p.point - center).norm();
    return p;
  }

  struct Result {
    RayPoint point;
    double t = 0.0;
    bool reached_limit = false;
  };

  Result run(double t_max) {
    const double dir_norm = direction.norm();
    if (dir_norm == 0.0) return {{center, 0.0}, t_max, true};

    RayPoint far = at(t_max);
    if (far.distance <= radius) return {std::move(far), t_max, true};

    // Nonexpansiveness of P_S: distance(t) <= t ||D||, so this t is inside.
    double lo = std::min(radius / dir_norm, t_max);
    RayPoint lo_point = at(lo);
    double hi = t_max;
    for (double t = 2.0 * lo; t < t_max; t *= 2.0) {
      RayPoint p = at(t);
      if (p.distance > radius) {
        hi = t;
        break;
      }
      lo = t;
      lo_point = std::move(p);
      if (evaluations > kMaxSearchSteps) throw NoConvergence("covariance search failed to bracket");
    }
    while (hi - lo > 1e-14 * hi) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      RayPoint p = at(mid);
      if (p.distance <= radius) {
        lo = mid;
        lo_point = std::move(p);
      } else {
        hi = mid;
      }
      if (evaluations > kMaxSearchSteps) throw NoConvergence("covariance bisection did not converge");
    }
    return {std::move(lo_point), lo, false};
  }
};

}  // namespace

BeampatternSpec BeampatternSpec::omnidirectional(int num_antennas, double power, double threshold) {
  if (num_antennas < 1) throw InvalidArgument("omnidirectional: M must be >= 1");
  return {CMatrix::Identity(num_antennas, num_antennas) * (power / num_antennas), threshold};
}

void check_beampattern(const BeampatternSpec& spec, double power) {
  if (!(power > 0.0)) throw InfeasibleSpec("transmit power must be > 0");
  if (!(spec.threshold >= 0.0)) throw InfeasibleSpec("beampattern threshold must be >= 0");
  const CMatrix& rd = spec.desired;
  if (rd.rows() != rd.cols() || rd.rows() == 0)
    throw InfeasibleSpec("desired covariance must be a nonempty square matrix");
  const double scale = std::max(1.0, rd.norm());
  if ((rd - rd.adjoint()).norm() > 1e-10 * scale)
    throw InfeasibleSpec("desired covariance is not Hermitian");
  const double trace = rd.trace().real();
  if (std::abs(trace - power) > kTraceTol * power)
    throw InfeasibleSpec("desired covariance trace " + std::to_string(trace) +
                         " differs from the power budget " + std::to_string(power));
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(rd), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kTraceTol * std::max(eig.eigenvalues().maxCoeff(), 0.0))
    throw InfeasibleSpec("desired covariance is not positive semidefinite");
}

CMatrix project_spectraplex(const CMatrix& x, double power) {
  require_dims(x.rows() == x.cols(), "spectraplex projection needs a square matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(x));
  const RVector lambda = project_simplex(eig.eigenvalues(), power);
  const CMatrix& u = eig.eigenvectors();
  return hermitian_part(u * lambda.cast<Complex>().asDiagonal() * u.adjoint());
}

CMatrix project_feasible(const CMatrix& x, double power, const BeampatternSpec& spec) {
  check_beampattern(spec, power);
  require_dims(x.rows() == spec.desired.rows() && x.cols() == spec.desired.cols(),
               "X must match the desired covariance size");
  if (spec.threshold == 0.0) return spec.desired;
  const CMatrix direction = hermitian_part(x) - spec.desired;
  RaySearch search{spec.desired, direction, power, spec.threshold};
  return search.run(1.0).point.point;
}

CMatrix projected_gradient_step(const CMatrix& covariance, const CMatrix& c, double step,
                                double power, const BeampatternSpec& spec) {
  require_dims(covariance.rows() == c.rows() && covariance.cols() == c.cols(),
               "covariance and C must have equal size");
  return project_feasible(covariance + step * c, power, spec);
}

CovarianceSolution solve_covariance(const CMatrix& c, double power, const BeampatternSpec& spec,
                                    const std::optional<CMatrix>& warm_start) {
  check_beampattern(spec, power);
  require_dims(c.rows() == c.cols() && c.rows() == spec.desired.rows(),
               "C must be M x M with M matching the desired covariance");
  const CMatrix ch = hermitian_part(c);

  CovarianceSolution out;
  CMatrix best;
  const double c_norm = ch.norm();
  if (spec.threshold == 0.0 || c_norm == 0.0) {
    best = spec.desired;
    out.ball_active = spec.threshold == 0.0;
  } else {
    // Past this t the unconstrained branch is within ~1e-12 relative of its limit.
    const double t_cap = 1e12 * (power + spec.desired.norm() + spec.threshold) / c_norm;
    RaySearch search{spec.desired, ch, power, spec.threshold};
    auto found = search.run(t_cap);
    best = std::move(found.point.point);
    out.ball_active = !found.reached_limit;
    out.multiplier = found.reached_limit ? std::numeric_limits<double>::infinity() : found.t;
    out.evaluations = search.evaluations;
  }

  double objective = (best * ch).trace().real();
  if (warm_start) {
    require_dims(warm_start->rows() == ch.rows() && warm_start->cols() == ch.cols(),
                 "warm start must be M x M");
    const double warm_objective = (*warm_start * ch).trace().real();
    if (warm_objective > objective) {
      best = *warm_start;
      objective = warm_objective;
    }
  }

  out.objective = objective;
  out.precoder.factor = matrix_sqrt(best);
  out.precoder.covariance = std::move(best);
  return out;
}

CMatrix matrix_sqrt(const CMatrix& covariance) {
  require_dims(covariance.rows() == covariance.cols(), "matrix_sqrt needs a square matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(covariance));
  RVector lambda = eig.eigenvalues();
  const double top = std::max(lambda.maxCoeff(), 0.0);
  if (lambda.minCoeff() < -1e-6 * top)
    throw NotPsd("matrix_sqrt: eigenvalue " + std::to_string(lambda.minCoeff()) +
                 " is too negative for a PSD input");
  lambda = lambda.cwiseMax(0.0).cwiseSqrt();
  const CMatrix& u = eig.eigenvectors();
  return u * lambda.cast<Complex>().asDiagonal() * u.adjoint();
}

}  // namespace dfrc
