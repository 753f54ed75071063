#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dfrc/channel.hpp"
#include "dfrc/manifold.hpp"
#include "dfrc/objective.hpp"
#include "dfrc/precoder.hpp"

namespace dfrc {

enum class ThetaInit { AllOnes, RandomPhases };

struct RunConfig {
  SystemGeometry geometry;
  ChannelModel channel;
  DesignWeights weights;
  double transmit_power = 1000.0;        // P0, linear
  double beampattern_threshold = 10.0;   // gamma_bp, linear Frobenius radius
  /// Explicit R_d; when empty, (P0 / M) I is used.
  std::optional<CMatrix> desired_covariance;
  double epsilon = 1e-3;
  int max_iterations = 500;              // j_max
  AscentConfig ascent;
  std::uint64_t seed = 1;
  ThetaInit theta_init = ThetaInit::AllOnes;

  BeampatternSpec beampattern() const;
  void validate() const;
};

enum class Termination { Converged, HitCap };

struct TraceRecord {
  int iteration = 0;
  double objective = 0.0;  // f1 + t0, the weighted SNR
  double radar_snr = 0.0;
  double comm_snr = 0.0;
  double riemannian_grad_norm = 0.0;
  double elapsed_seconds = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  Termination termination = Termination::HitCap;

  /// Outer iterations performed (records minus the initial one).
  int iterations() const { return records.empty() ? 0 : static_cast<int>(records.size()) - 1; }
  double initial_objective() const { return records.front().objective; }
  double final_objective() const { return records.back().objective; }
};

struct AlternationResult {
  ConvergenceTrace trace;
  CVector theta;
  PrecoderCovariance precoder;
  /// Largest observed drop in tr(R_w C) between the warm start and the new
  /// solve for the same C; the W-step never loses objective.
  double worst_w_step_loss = 0.0;
  /// Largest ||theta_n| - 1| seen over all iterates.
  double worst_manifold_residual = 0.0;
};

CVector initial_theta(const RunConfig& cfg);

/// Alternates precoder solves and manifold ascent steps on the given channels.
///
/// Record 0 holds the objective at the initial phases with the precoder
/// solved for them. Each later record j performs one covariance solve, one or
/// more ascent steps, and stores the objective at the updated phases. The loop
/// stops once |f_j - f_{j-1}| / |f_{j-1}| <= epsilon or after max_iterations.
AlternationResult alternate(const RunConfig& cfg, const ChannelSet& channels);

/// Synthesizes channels from cfg.seed, then runs the alternation.
AlternationResult alternate(const RunConfig& cfg);

struct CurvePoint {
  double param = 0.0;
  int iteration = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct Curve {
  std::string label;  // file stem, e.g. "alpha_0.1"
  std::string param_name;
  std::vector<CurvePoint> points;
  /// Convergence experiments: one trace per realization.
  std::vector<ConvergenceTrace> traces;
  /// Sweeps: [point][realization] converged objective.
  std::vector<std::vector<double>> samples;
};

struct ExperimentResult {
  std::string kind;  // "converge" or "sweep"
  std::vector<Curve> curves;
};

/// Threads for parallel realizations: DFRC_THREADS if set, otherwise the
/// hardware concurrency.
int realization_threads();

/// For each alpha, runs realizations with seeds seed + r and
/// reports the per-iteration mean and population std of the objective. Runs
/// that stop early hold their last value.
ExperimentResult run_convergence_experiment(const RunConfig& cfg, const std::vector<double>& alphas,
                                            int num_realizations, int threads = 0);

/// One curve per (M, N_y x N_x) pair, points over transmit
/// powers (param = P0 / sigma_r^2 in dB). Alpha is taken from cfg.
ExperimentResult run_power_sweep(const RunConfig& cfg, const std::vector<double>& powers,
                                 const std::vector<int>& radar_sizes,
                                 const std::vector<std::pair<int, int>>& irs_sizes,
                                 int num_realizations, int threads = 0);

/// Mean and population standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& values);

}  // namespace dfrc
