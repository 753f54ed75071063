#include <doctest.h>

#include <cmath>

#include "dfrc/manifold.hpp"
#include "test_util.hpp"

using namespace dfrc;

namespace {

ObjectiveBundle random_bundle(std::mt19937_64& rng, int m, int n, int k, double alpha) {
  const ChannelSet ch = test::random_channels(rng, m, n, k);
  const CVector a = test::random_unit(rng, n);
  const CMatrix w = test::random_matrix(rng, m, m);
  DesignWeights dw;
  dw.alpha = alpha;
  return build_bundle(ch, a, w, dw);
}

// Independent forward-difference slope of f1 along u.
double directional_slope(const CVector& theta, const CVector& u, const ObjectiveBundle& b, double h) {
  return (eval_f1(theta + h * u, b) - eval_f1(theta - h * u, b)) / (2.0 * h);
}

}  // namespace

TEST_CASE("project_tangent: worked example and idempotence") {
  CVector g(1);
  g(0) = Complex(3.0, 4.0);
  const TangentVector t = project_tangent(g, CVector::Ones(1));
  CHECK(std::abs(t.value(0) - Complex(0.0, 4.0)) < 1e-15);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const CVector theta = test::random_unit(rng, 12);
    const CVector grad = test::random_matrix(rng, 12, 1);
    const TangentVector p = project_tangent(grad, theta);
    const TangentVector pp = project_tangent(p.value, theta);
    CHECK((p.value - pp.value).norm() < 1e-14 * (1.0 + p.value.norm()));
    CHECK((p.value.array() * theta.conjugate().array()).real().abs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("retract: worked example, zero step and zero element") {
  CVector theta(1);
  theta(0) = 1.0;
  TangentVector dir{CVector::Constant(1, kJ), theta};
  const CVector r = retract(theta, dir, 1.0);
  CHECK(std::abs(r(0) - Complex(1.0, 1.0) / std::sqrt(2.0)) < 1e-15);

  std::mt19937_64 rng(2);
  const CVector t = test::random_unit(rng, 8);
  TangentVector d = project_tangent(test::random_matrix(rng, 8, 1), t);
  CHECK(retract(t, d, 0.0) == t);
  CHECK(on_manifold(retract(t, d, 1e3), 1e-12));

  TangentVector collapse{-theta, theta};
  CHECK_THROWS_AS(retract(theta, collapse, 1.0), ZeroElement);
}

TEST_CASE("random_phases stays on the manifold and is seeded") {
  const CVector a = random_phases(64, 9);
  CHECK(on_manifold(a, 1e-14));
  CHECK(manifold_residual(a) < 1e-14);
  CHECK(random_phases(64, 9) == a);
  CHECK(random_phases(64, 10) != a);
}

TEST_CASE("euclidean_gradient matches an independent directional slope") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const ObjectiveBundle b = random_bundle(rng, 3, 7, 2, 0.4);
    const CVector theta = test::random_unit(rng, 7);
    const CVector u = test::random_matrix(rng, 7, 1);
    const CVector grad = euclidean_gradient(theta, b);
    const double analytic = grad.dot(u).real();
    const double numeric = directional_slope(theta, u, b, 1e-5);
    CHECK(analytic == doctest::Approx(numeric).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("euclidean_gradient agrees with the library finite differences") {
  std::mt19937_64 rng(4);
  const ObjectiveBundle b = random_bundle(rng, 2, 5, 3, 0.6);
  const CVector theta = test::random_unit(rng, 5);
  const CVector fd = finite_difference_gradient(theta, b, 1e-5);
  const CVector an = euclidean_gradient(theta, b);
  CHECK((fd - an).norm() < 1e-6 * an.norm());
  CHECK((euclidean_gradient(theta, b, quartic_forms(theta, b)) - an).norm() == 0.0);
}

TEST_CASE("small ascent steps do not decrease f1") {
  std::mt19937_64 rng(5);
  AscentConfig cfg;
  cfg.step = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const ObjectiveBundle b = random_bundle(rng, 3, 6, 2, 0.5);
    const CVector theta = test::random_unit(rng, 6);
    const AscentStepInfo info = ascent_step_detailed(theta, b, cfg);
    CHECK(eval_f1(info.theta, b) >= eval_f1(theta, b) - 1e-12 * std::abs(eval_f1(theta, b)));
    CHECK(on_manifold(info.theta));
  }
}

TEST_CASE("backtracking never accepts a decrease") {
  std::mt19937_64 rng(6);
  AscentConfig cfg;
  cfg.step = 10.0;
  cfg.backtracking = true;
  for (int trial = 0; trial < 50; ++trial) {
    const ObjectiveBundle b = random_bundle(rng, 3, 6, 2, 0.5);
    const CVector theta = test::random_unit(rng, 6);
    const AscentStepInfo info = ascent_step_detailed(theta, b, cfg);
    CHECK(eval_f1(info.theta, b) >= eval_f1(theta, b));
    CHECK(info.step_used <= cfg.step);
  }
}

TEST_CASE("a stationary point is left in place") {
  // f1 = theta^H D1 theta with D1 = I is constant on the manifold, so its
  // Riemannian gradient vanishes everywhere.
  ObjectiveBundle b;
  b.num_radar_antennas = 1;
  b.Z = {CMatrix::Zero(4, 4)};
  b.D1 = CMatrix::Identity(4, 4);
  b.v = CVector::Zero(4);
  std::mt19937_64 rng(7);
  const CVector theta = test::random_unit(rng, 4);
  const AscentStepInfo info = ascent_step_detailed(theta, b, {});
  CHECK(info.riemannian_grad_norm < 1e-14);
  CHECK((info.theta - theta).norm() < 1e-14);
}

TEST_CASE("ascent config validation") {
  AscentConfig cfg;
  cfg.step = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = AscentConfig{};
  cfg.max_inner_steps = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
