#pragma once

#include <optional>

#include "dfrc/types.hpp"

namespace dfrc {

/// Desired transmit covariance and the Frobenius radius allowed around it.
struct BeampatternSpec {
  CMatrix desired;         // R_d, Hermitian PSD with trace P0
  double threshold = 0.0;  // gamma_bp, linear

  /// R_d = (P0 / M) I.
  static BeampatternSpec omnidirectional(int num_antennas, double power, double threshold);
};

struct PrecoderCovariance {
  CMatrix covariance;  // R_w
  CMatrix factor;      // W, Hermitian square root of R_w
};

struct CovarianceSolution {
  PrecoderCovariance precoder;
  double objective = 0.0;  // tr(R_w C)
  /// Step along R_d + t C at which the solution was found; +inf when the
  /// Frobenius ball is inactive.
  double multiplier = 0.0;
  bool ball_active = false;
  int evaluations = 0;  // spectraplex projections performed
};

/// Frobenius projection onto {R >= 0, tr R = power}.
CMatrix project_spectraplex(const CMatrix& x, double power);

/// Frobenius projection onto {R >= 0, tr R = power, ||R - R_d||_F <= gamma_bp}.
///
/// The ball multiplier mu enters as R = P_S(R_d + (X - R_d)/(1 + mu)); the
/// distance to R_d is monotone along that ray, so mu is found by bracketing
/// and bisection. Throws InfeasibleSpec if R_d itself is not feasible and
/// NoConvergence if the search fails to close.
CMatrix project_feasible(const CMatrix& x, double power, const BeampatternSpec& spec);

/// One projected-gradient step R <- P(R + step C). For a linear objective the
/// value tr(R C) never decreases along such steps.
CMatrix projected_gradient_step(const CMatrix& covariance, const CMatrix& c, double step,
                                double power, const BeampatternSpec& spec);

/// Maximizes tr(R C) over the feasible set above.
///
/// The maximizer is R(t) = P_S(R_d + t C) for the largest t that keeps
/// R(t) inside the ball (or t -> inf when the ball never binds). If
/// `warm_start` is given and scores higher (ties up to round-off), it is
/// returned instead so that successive solves never lose objective.
CovarianceSolution solve_covariance(const CMatrix& c, double power, const BeampatternSpec& spec,
                                    const std::optional<CMatrix>& warm_start = std::nullopt);

/// Hermitian PSD square root. Eigenvalues down to -1e-6 * max are clipped to
/// zero; anything more negative raises NotPsd.
CMatrix matrix_sqrt(const CMatrix& covariance);

/// Throws InfeasibleSpec unless R_d is Hermitian PSD with trace `power`.
void check_beampattern(const BeampatternSpec& spec, double power);

}  // namespace dfrc
