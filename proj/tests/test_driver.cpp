#include <doctest.h>

#include <cmath>

#include "dfrc/driver.hpp"
#include "test_util.hpp"

using namespace dfrc;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.geometry.num_radar_antennas = 3;
  cfg.geometry.irs_rows = 2;
  cfg.geometry.irs_cols = 3;
  cfg.geometry.target_azimuth = kPi / 6.0;
  cfg.geometry.target_elevation = kPi / 4.0;
  cfg.channel.num_users = 2;
  cfg.transmit_power = 10.0;
  cfg.beampattern_threshold = 2.0;
  cfg.max_iterations = 60;
  cfg.ascent.backtracking = true;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("mean_std uses the population deviation") {
  const auto [m, s] = mean_std({1.0, 2.0, 3.0});
  CHECK(m == doctest::Approx(2.0));
  CHECK(s == doctest::Approx(std::sqrt(2.0 / 3.0)));
  const auto [m1, s1] = mean_std({4.5});
  CHECK(m1 == 4.5);
  CHECK(s1 == 0.0);
}

TEST_CASE("communication-only objective without IRS path converges at once") {
  RunConfig cfg = small_config();
  cfg.weights.alpha = 1.0;
  std::mt19937_64 rng(2);
  ChannelSet ch = test::random_channels(rng, 3, 6, 2);
  ch.H.setZero();
  const AlternationResult res = alternate(cfg, ch);
  CHECK(res.trace.termination == Termination::Converged);
  CHECK(res.trace.iterations() <= 2);
  // Oracle: the best tr(R F^H F) on the feasible set, found by the
  // solver for the fixed matrix F^H F.
  const CMatrix c = ch.F.adjoint() * ch.F;
  const double best = solve_covariance(c, cfg.transmit_power, cfg.beampattern()).objective;
  CHECK(res.trace.final_objective() == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("objective trace is monotone with backtracking, phases stay unit modulus") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig cfg = small_config();
    cfg.seed = seed;
    cfg.weights.alpha = 0.3;
    const AlternationResult res = alternate(cfg);
    const auto& rec = res.trace.records;
    REQUIRE(rec.size() >= 2);
    for (std::size_t j = 1; j < rec.size(); ++j)
      CHECK(rec[j].objective >= rec[j - 1].objective * (1.0 - 1e-12));
    CHECK(res.worst_manifold_residual < 1e-12);
    CHECK(res.worst_w_step_loss <= 1e-9 * rec.back().objective);
    CHECK(res.trace.final_objective() >= res.trace.initial_objective());
    CHECK(on_manifold(res.theta));
    for (std::size_t j = 0; j < rec.size(); ++j) {
      CHECK(rec[j].iteration == static_cast<int>(j));
      const double w = (1.0 - cfg.weights.alpha) * rec[j].radar_snr + cfg.weights.alpha * rec[j].comm_snr;
      CHECK(rec[j].objective == doctest::Approx(w).epsilon(1e-12));
    }
  }
}

TEST_CASE("termination rule: converged runs stop at the first small relative change") {
  RunConfig cfg = small_config();
  cfg.epsilon = 1e-2;
  const AlternationResult res = alternate(cfg);
  const auto& rec = res.trace.records;
  if (res.trace.termination == Termination::Converged) {
    const double last = std::abs(rec.back().objective - rec[rec.size() - 2].objective) /
                        std::abs(rec[rec.size() - 2].objective);
    CHECK(last <= cfg.epsilon);
    for (std::size_t j = 1; j + 1 < rec.size(); ++j)
      CHECK(std::abs(rec[j].objective - rec[j - 1].objective) / std::abs(rec[j - 1].objective) > cfg.epsilon);
  } else {
    CHECK(res.trace.iterations() == cfg.max_iterations);
  }

  cfg.max_iterations = 1;
  cfg.epsilon = 1e-300;
  const AlternationResult capped = alternate(cfg);
  CHECK(capped.trace.iterations() == 1);
}

TEST_CASE("identical seeds give identical traces") {
  const RunConfig cfg = small_config();
  const AlternationResult a = alternate(cfg);
  const AlternationResult b = alternate(cfg);
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  for (std::size_t j = 0; j < a.trace.records.size(); ++j)
    CHECK(a.trace.records[j].objective == b.trace.records[j].objective);
  CHECK(a.theta == b.theta);
}

TEST_CASE("random phase initialization is seeded and on the manifold") {
  RunConfig cfg = small_config();
  cfg.theta_init = ThetaInit::RandomPhases;
  const CVector t = initial_theta(cfg);
  CHECK(on_manifold(t));
  CHECK(initial_theta(cfg) == t);
  cfg.theta_init = ThetaInit::AllOnes;
  CHECK(initial_theta(cfg) == CVector::Ones(6));
}

TEST_CASE("convergence experiment: labels, single realization, thread independence") {
  RunConfig cfg = small_config();
  cfg.max_iterations = 20;
  const ExperimentResult one = run_convergence_experiment(cfg, {0.1, 0.9}, 1, 1);
  CHECK(one.kind == "converge");
  REQUIRE(one.curves.size() == 2);
  CHECK(one.curves[0].label == "alpha_0.1");
  CHECK(one.curves[1].label == "alpha_0.9");
  for (const auto& p : one.curves[0].points) CHECK(p.stddev == 0.0);

  const ExperimentResult seq = run_convergence_experiment(cfg, {0.5}, 4, 1);
  const ExperimentResult par = run_convergence_experiment(cfg, {0.5}, 4, 3);
  REQUIRE(seq.curves[0].points.size() == par.curves[0].points.size());
  for (std::size_t i = 0; i < seq.curves[0].points.size(); ++i) {
    CHECK(seq.curves[0].points[i].mean == par.curves[0].points[i].mean);
    CHECK(seq.curves[0].points[i].stddev == par.curves[0].points[i].stddev);
  }

  // Early-stopped runs hold their last value, so the last point is the mean
  // of the final objectives.
  const Curve& c = seq.curves[0];
  std::size_t longest = 0;
  std::vector<double> finals;
  for (const auto& t : c.traces) {
    longest = std::max(longest, t.records.size());
    finals.push_back(t.final_objective());
  }
  CHECK(c.points.size() == longest);
  CHECK(c.points.back().mean == doctest::Approx(mean_std(finals).first).epsilon(1e-14));
}

TEST_CASE("power sweep: labels, parameter in dB and sample layout") {
  RunConfig cfg = small_config();
  cfg.max_iterations = 10;
  const ExperimentResult res = run_power_sweep(cfg, {1.0, 10.0}, {2}, {{2, 2}, {1, 3}}, 2, 1);
  CHECK(res.kind == "sweep");
  REQUIRE(res.curves.size() == 2);
  CHECK(res.curves[0].label == "M2_N4");
  CHECK(res.curves[1].label == "M2_N3");
  const Curve& c = res.curves[0];
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].param == doctest::Approx(0.0));
  CHECK(c.points[1].param == doctest::Approx(10.0));
  REQUIRE(c.samples.size() == 2);
  CHECK(c.samples[0].size() == 2);
  const auto [m, s] = mean_std(c.samples[1]);
  CHECK(c.points[1].mean == m);
  CHECK(c.points[1].stddev == s);
  // More power never hurts on the same channels.
  for (std::size_t r = 0; r < 2; ++r) CHECK(c.samples[1][r] > c.samples[0][r]);
}

TEST_CASE("run config validation") {
  RunConfig cfg = small_config();
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = small_config();
  cfg.channel.eta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = small_config();
  cfg.desired_covariance = CMatrix::Identity(3, 3);
  CHECK_THROWS_AS(cfg.validate(), InfeasibleSpec);
  cfg = small_config();
  cfg.weights.alpha = 1.2;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
