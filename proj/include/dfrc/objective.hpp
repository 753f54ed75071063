#pragma once

#include <vector>

#include "dfrc/channel.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

struct DesignWeights {
  double alpha = 0.5;       // weight of the communication SNR
  double noise_radar = 1.0; // sigma_r^2
  double noise_comm = 1.0;  // sigma_c^2

  void validate() const;
};

/// Coefficients of the objective written as a polynomial in the IRS phases:
///
///   f1(theta) = radar_scale * sum_ij |theta^T Z_ij theta|^2
///             + theta^H D1 theta + 2 Re{theta^T v}
///
/// and the full weighted SNR is f1(theta) + t0. Immutable once built.
struct ObjectiveBundle {
  int num_radar_antennas = 0;  // M
  std::vector<CMatrix> Z;      // M*M matrices, Z[i*M + j] = R o (G w_j g_i^T)^T
  CMatrix D1;                  // Hermitian N x N
  CVector v;                   // diag(D2)
  double t0 = 0.0;
  double radar_scale = 0.0;    // (1 - alpha) |eta|^2 / sigma_r^2

  int num_irs_elements() const { return static_cast<int>(D1.rows()); }
  const CMatrix& z(int i, int j) const { return Z[static_cast<std::size_t>(i * num_radar_antennas + j)]; }
};

struct ObjectiveTerms {
  double quartic = 0.0;
  double quadratic = 0.0;
  double linear = 0.0;
  /// Imaginary part of theta^H D1 theta before it is discarded.
  double quadratic_imag = 0.0;

  double f1() const { return quartic + quadratic + linear; }
};

struct SnrReport {
  double radar = 0.0;  // gamma_r
  double comm = 0.0;   // gamma_c
  double weighted = 0.0;
};

/// tr(F_r W W^H F_r^H) / sigma_r^2.
double radar_snr(const CMatrix& radar_channel, const CMatrix& precoder, double noise_power);

/// tr(F_c W W^H F_c^H) / sigma_c^2.
double comm_snr(const CMatrix& comm_channel, const CMatrix& precoder, double noise_power);

/// (1 - alpha) gamma_r + alpha gamma_c.
double weighted_objective(double gamma_r, double gamma_c, double alpha);

/// C = (1 - alpha) F_r^H F_r / sigma_r^2 + alpha F_c^H F_c / sigma_c^2, so that
/// tr(W W^H C) equals the weighted objective for every W.
CMatrix build_C(const CMatrix& radar_channel, const CMatrix& comm_channel,
                const DesignWeights& weights);

ObjectiveBundle build_bundle(const ChannelSet& channels, const CVector& irs_steering,
                             const CMatrix& precoder, const DesignWeights& weights);

/// h_ij = theta^T Z_ij theta in row-major (i, j) order.
std::vector<Complex> quartic_forms(const CVector& theta, const ObjectiveBundle& bundle);

ObjectiveTerms eval_terms(const CVector& theta, const ObjectiveBundle& bundle);

double eval_f1(const CVector& theta, const ObjectiveBundle& bundle);

/// Radar, comm and weighted SNR composed directly from the channel matrices.
SnrReport evaluate_snrs(const ChannelSet& channels, const CVector& irs_steering,
                        const CVector& theta, const CMatrix& precoder,
                        const DesignWeights& weights);

}  // namespace dfrc
