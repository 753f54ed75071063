#include "dfrc/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace dfrc {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kThetaSeedSalt = 0x9e3779b97f4a7c15ULL;

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception is rethrown after all workers finish.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::string format_param(double value) {
  std::ostringstream os;
  os << value;
  return os.str();
}

}  // namespace

BeampatternSpec RunConfig::beampattern() const {
  if (desired_covariance) return {*desired_covariance, beampattern_threshold};
  return BeampatternSpec::omnidirectional(geometry.num_radar_antennas, transmit_power,
                                          beampattern_threshold);
}

void RunConfig::validate() const {
  geometry.validate();
  channel.validate();
  weights.validate();
  ascent.validate();
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (!(transmit_power > 0.0)) throw InvalidArgument("transmit power must be > 0");
  if (!(beampattern_threshold >= 0.0)) throw InvalidArgument("beampattern threshold must be >= 0");
  if (weights.alpha < 1.0 && channel.eta == Complex(0.0, 0.0))
    throw InvalidArgument("eta must be nonzero when the radar weight (1 - alpha) is positive");
  check_beampattern(beampattern(), transmit_power);
}

CVector initial_theta(const RunConfig& cfg) {
  const int n = cfg.geometry.num_irs_elements();
  if (cfg.theta_init == ThetaInit::RandomPhases) return random_phases(n, cfg.seed ^ kThetaSeedSalt);
  return CVector::Ones(n);
}

AlternationResult alternate(const RunConfig& cfg, const ChannelSet& channels) {
  cfg.validate();
  channels.check_dims();
  require_dims(channels.num_radar_antennas() == cfg.geometry.num_radar_antennas &&
                   channels.num_irs_elements() == cfg.geometry.num_irs_elements(),
               "channels do not match the configured geometry");

  const auto start = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  const CVector steering = upa_steering(cfg.geometry);
  const BeampatternSpec spec = cfg.beampattern();

  AlternationResult out;
  out.theta = initial_theta(cfg);
  std::optional<CMatrix> covariance;

  const auto solve_precoder = [&](const CVector& theta) {
    const CMatrix c = build_C(composite_radar_channel(channels, theta, steering),
                              composite_comm_channel(channels, theta), cfg.weights);
    const double warm = covariance ? (*covariance * c).trace().real() : 0.0;
    CovarianceSolution sol = solve_covariance(c, cfg.transmit_power, spec, covariance);
    if (covariance) out.worst_w_step_loss = std::max(out.worst_w_step_loss, warm - sol.objective);
    covariance = sol.precoder.covariance;
    return std::move(sol.precoder);
  };

  const auto record = [&](int j, double grad_norm) {
    const SnrReport snr = evaluate_snrs(channels, steering, out.theta, out.precoder.factor, cfg.weights);
    out.trace.records.push_back({j, snr.weighted, snr.radar, snr.comm, grad_norm, elapsed()});
    out.worst_manifold_residual = std::max(out.worst_manifold_residual, manifold_residual(out.theta));
    return snr.weighted;
  };

  out.precoder = solve_precoder(out.theta);
  {
    const ObjectiveBundle bundle = build_bundle(channels, steering, out.precoder.factor, cfg.weights);
    const CVector grad = project_tangent(euclidean_gradient(out.theta, bundle), out.theta).value;
    record(0, grad.norm());
  }

  double previous = out.trace.records.front().objective;
  out.trace.termination = Termination::HitCap;
  for (int j = 1; j <= cfg.max_iterations; ++j) {
    out.precoder = solve_precoder(out.theta);
    const ObjectiveBundle bundle = build_bundle(channels, steering, out.precoder.factor, cfg.weights);
    double grad_norm = 0.0;
    for (int inner = 0; inner < cfg.ascent.max_inner_steps; ++inner) {
      AscentStepInfo step = ascent_step_detailed(out.theta, bundle, cfg.ascent);
      if (inner == 0) grad_norm = step.riemannian_grad_norm;
      out.theta = std::move(step.theta);
    }
    const double current = record(j, grad_norm);

    const double change = previous == 0.0 ? (current == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                          : std::abs((current - previous) / previous);
    previous = current;
    if (change <= cfg.epsilon) {
      out.trace.termination = Termination::Converged;
      break;
    }
  }
  return out;
}

AlternationResult alternate(const RunConfig& cfg) {
  cfg.validate();
  return alternate(cfg, synthesize_channels(cfg.geometry, cfg.channel, cfg.seed));
}

int realization_threads() {
  if (const char* env = std::getenv("DFRC_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value >= 1) return static_cast<int>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

ExperimentResult run_convergence_experiment(const RunConfig& cfg, const std::vector<double>& alphas,
                                            int num_realizations, int threads) {
  if (num_realizations < 1) throw InvalidArgument("num_realizations must be >= 1");
  if (threads <= 0) threads = realization_threads();

  ExperimentResult result;
  result.kind = "converge";
  for (double alpha : alphas) {
    RunConfig run_cfg = cfg;
    run_cfg.weights.alpha = alpha;
    run_cfg.validate();

    Curve curve;
    curve.label = "alpha_" + format_param(alpha);
    curve.param_name = "alpha";
    curve.traces.resize(static_cast<std::size_t>(num_realizations));
    parallel_for(num_realizations, threads, [&](int r) {
      RunConfig local = run_cfg;
      local.seed = cfg.seed + static_cast<std::uint64_t>(r);
      curve.traces[static_cast<std::size_t>(r)] = alternate(local).trace;
    });

    std::size_t length = 0;
    for (const auto& t : curve.traces) length = std::max(length, t.records.size());
    for (std::size_t j = 0; j < length; ++j) {
      std::vector<double> column;
      column.reserve(curve.traces.size());
      for (const auto& t : curve.traces)
        column.push_back(t.records[std::min(j, t.records.size() - 1)].objective);
      const auto [mean, sd] = mean_std(column);
      curve.points.push_back({alpha, static_cast<int>(j), mean, sd});
    }
    result.curves.push_back(std::move(curve));
  }
  return result;
}

ExperimentResult run_power_sweep(const RunConfig& cfg, const std::vector<double>& powers,
                                 const std::vector<int>& radar_sizes,
                                 const std::vector<std::pair<int, int>>& irs_sizes,
                                 int num_realizations, int threads) {
  if (num_realizations < 1) throw InvalidArgument("num_realizations must be >= 1");
  if (powers.empty() || radar_sizes.empty() || irs_sizes.empty())
    throw InvalidArgument("sweep lists must be nonempty");
  if (threads <= 0) threads = realization_threads();

  ExperimentResult result;
  result.kind = "sweep";
  for (int m : radar_sizes) {
    for (const auto& [rows, cols] : irs_sizes) {
      Curve curve;
      curve.label = "M" + std::to_string(m) + "_N" + std::to_string(rows * cols);
      curve.param_name = "transmit_snr_db";
      for (double power : powers) {
        RunConfig run_cfg = cfg;
        run_cfg.geometry.num_radar_antennas = m;
        run_cfg.geometry.irs_rows = rows;
        run_cfg.geometry.irs_cols = cols;
        run_cfg.transmit_power = power;
        if (run_cfg.desired_covariance) {
          require_dims(run_cfg.desired_covariance->rows() == m,
                       "explicit desired covariance does not match swept M");
          const double trace = run_cfg.desired_covariance->trace().real();
          *run_cfg.desired_covariance *= power / trace;
        }
        run_cfg.validate();

        std::vector<double> finals(static_cast<std::size_t>(num_realizations));
        std::vector<int> iterations(static_cast<std::size_t>(num_realizations));
        parallel_for(num_realizations, threads, [&](int r) {
          RunConfig local = run_cfg;
          local.seed = cfg.seed + static_cast<std::uint64_t>(r);
          const ConvergenceTrace trace = alternate(local).trace;
          finals[static_cast<std::size_t>(r)] = trace.final_objective();
          iterations[static_cast<std::size_t>(r)] = trace.iterations();
        });
        const auto [mean, sd] = mean_std(finals);
        const double snr_db = linear_to_db(power / cfg.weights.noise_radar);
        curve.points.push_back({snr_db, *std::max_element(iterations.begin(), iterations.end()), mean, sd});
        curve.samples.push_back(std::move(finals));
      }
      result.curves.push_back(std::move(curve));
    }
  }
  return result;
}

}  // namespace dfrc
