#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dfrc/manifold.hpp"
#include "dfrc/objective.hpp"
#include "dfrc/precoder.hpp"

namespace dfrc {

// Oracle suites behind `dfrc validate-gradient` and `dfrc validate-solver`.
// These are independent checks of the library, not part of the solve path.

struct Check {
  std::string name;
  double tolerance = 0.0;
  double measured = 0.0;
  bool pass = false;
  std::string detail;
};

struct ValidationOptions {
  std::uint64_t seed = 20220601;
  int gradient_instances = 50;
  int pipeline_instances = 200;
  int solver_samples = 100000;
  /// Gradient under test; empty means euclidean_gradient.
  GradientFn gradient;
};

struct RandomInstance {
  ChannelSet channels;
  CVector steering;
  CMatrix precoder;
  DesignWeights weights;
  CVector theta;
};

/// Random channels (M <= max_m, N <= max_n, K <= max_k), precoder, weights
/// and unit-modulus point.
RandomInstance random_instance(std::mt19937_64& rng, int max_m = 4, int max_n = 16, int max_k = 4);

/// Random Hermitian PSD matrix of the given rank with unit Frobenius norm.
CMatrix random_psd(std::mt19937_64& rng, int size, int rank);

/// Feasible points of {R >= 0, tr R = P0, ||R - R_d||_F <= gamma} drawn by
/// walking from R_d along random trace-free directions to the boundary.
/// Requires R_d positive definite. Returns the best tr(R C) seen.
double best_sampled_objective(std::mt19937_64& rng, const CMatrix& c, const BeampatternSpec& spec,
                              int samples);

std::vector<Check> validate_gradient(const ValidationOptions& options = {});
std::vector<Check> validate_solver(const ValidationOptions& options = {});

}  // namespace dfrc
