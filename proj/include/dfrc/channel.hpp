#pragma once

#include <cstdint>

#include "dfrc/types.hpp"

namespace dfrc {

/// Radar array, IRS grid and target direction. Spacings are in wavelengths.
struct SystemGeometry {
  int num_radar_antennas = 8;  // M
  int irs_rows = 8;            // N_y
  int irs_cols = 8;            // N_x
  double radar_spacing = 0.5;
  double irs_spacing = 0.5;
  double target_azimuth = 0.0;    // phi_h, radians
  double target_elevation = 0.0;  // phi_v, radians

  int num_irs_elements() const { return irs_rows * irs_cols; }
  void validate() const;
};

/// Propagation parameters that are not part of the array geometry.
struct ChannelModel {
  int num_users = 5;  // K
  /// Rician factor of the radar-IRS channel, linear scale. +inf gives pure LOS.
  double rician_factor = 1.0;
  /// Round-trip radar-IRS-target-IRS-radar coefficient.
  Complex eta{1.0, 0.0};
  /// Departure angle of the LOS ray at the radar ULA.
  double los_radar_angle = 0.0;
  /// Arrival azimuth/elevation of the LOS ray at the IRS.
  double los_irs_azimuth = 0.0;
  double los_irs_elevation = 0.0;
  /// Average power gains applied to G, F and H (linear).
  double gain_g = 1.0;
  double gain_f = 1.0;
  double gain_h = 1.0;

  void validate() const;
};

struct ChannelSet {
  CMatrix G;  // N x M, radar -> IRS
  CMatrix F;  // K x M, radar -> users
  CMatrix H;  // K x N, IRS -> users
  Complex eta{1.0, 0.0};

  int num_users() const { return static_cast<int>(F.rows()); }
  int num_radar_antennas() const { return static_cast<int>(G.cols()); }
  int num_irs_elements() const { return static_cast<int>(G.rows()); }

  /// Throws DimensionMismatch unless G is NxM, F is KxM and H is KxN.
  void check_dims() const;
};

/// Kronecker-factored UPA response a_y (x) a_x; the row (y) index is outer.
///
/// The y-axis factor has phase 2 pi d n cos(az) sin(el), the x-axis factor
/// 2 pi d n sin(az) sin(el), with d the IRS spacing in wavelengths.
CVector upa_steering(const SystemGeometry& geometry);

/// Same as above for an arbitrary direction.
CVector upa_steering(int rows, int cols, double spacing, double azimuth, double elevation);

/// ULA response with phase 2 pi d m sin(angle).
CVector ula_steering(int size, double spacing, double angle);

/// i.i.d. CN(0, 1) entries. Identical seeds give identical matrices.
CMatrix rayleigh_channel(int rows, int cols, std::uint64_t seed);

/// sqrt(K/(1+K)) los + sqrt(1/(1+K)) rayleigh. K = +inf returns los exactly.
CMatrix rician_channel(const CMatrix& los, double rician_factor, std::uint64_t seed);

/// Rank-one LOS component of the radar->IRS channel, N x M.
CMatrix radar_irs_los(const SystemGeometry& geometry, const ChannelModel& model);

/// Draws G (Rician), F and H (Rayleigh) from independent streams of `seed`.
ChannelSet synthesize_channels(const SystemGeometry& geometry, const ChannelModel& model,
                               std::uint64_t seed);

/// F_r = eta G^T diag(theta) a a^T diag(theta) G, an M x M rank-one matrix.
CMatrix composite_radar_channel(const ChannelSet& channels, const CVector& theta,
                                const CVector& irs_steering);

/// F_c = F + H diag(theta) G.
CMatrix composite_comm_channel(const ChannelSet& channels, const CVector& theta);

}  // namespace dfrc
