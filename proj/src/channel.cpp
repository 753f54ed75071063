#include "dfrc/channel.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace dfrc {

namespace {

// Stream tags keep the three fading draws independent for one seed.
enum class Stream : std::uint32_t { kG = 0x47, kF = 0x46, kH = 0x48 };

std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

CVector geometric_phases(int size, double phase_step) {
  CVector v(size);
  for (int n = 0; n < size; ++n) v(n) = std::polar(1.0, phase_step * n);
  return v;
}

}  // namespace

void SystemGeometry::validate() const {
  if (num_radar_antennas < 1 || irs_rows < 1 || irs_cols < 1)
    throw InvalidArgument("geometry: array sizes must be >= 1");
  if (!(radar_spacing > 0.0) || !(irs_spacing > 0.0))
    throw InvalidArgument("geometry: spacings must be > 0");
  if (!std::isfinite(target_azimuth) || !std::isfinite(target_elevation))
    throw InvalidArgument("geometry: target angles must be finite");
}

void ChannelModel::validate() const {
  if (num_users < 1) throw InvalidArgument("channel: num_users must be >= 1");
  if (std::isnan(rician_factor) || rician_factor < 0.0)
    throw InvalidArgument("channel: rician factor must be >= 0");
  if (!(gain_g > 0.0) || !(gain_f >= 0.0) || !(gain_h >= 0.0))
    throw InvalidArgument("channel: gains must be non-negative (gain_g > 0)");
}

void ChannelSet::check_dims() const {
  const auto n = G.rows();
  const auto m = G.cols();
  const auto k = F.rows();
  require_dims(F.cols() == m, "F must be K x M");
  require_dims(H.rows() == k && H.cols() == n, "H must be K x N");
}

CVector upa_steering(int rows, int cols, double spacing, double azimuth, double elevation) {
  const double sin_el = std::sin(elevation);
  const CVector a_y = geometric_phases(rows, 2.0 * kPi * spacing * std::cos(azimuth) * sin_el);
  const CVector a_x = geometric_phases(cols, 2.0 * kPi * spacing * std::sin(azimuth) * sin_el);
  CVector a(rows * cols);
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x) a(y * cols + x) = a_y(y) * a_x(x);
  return a;
}

CVector upa_steering(const SystemGeometry& geometry) {
  geometry.validate();
  return upa_steering(geometry.irs_rows, geometry.irs_cols, geometry.irs_spacing,
                      geometry.target_azimuth, geometry.target_elevation);
}

CVector ula_steering(int size, double spacing, double angle) {
  return geometric_phases(size, 2.0 * kPi * spacing * std::sin(angle));
}

CMatrix rayleigh_channel(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw InvalidArgument("rayleigh_channel: rows, cols must be >= 1");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix out(rows, cols);
  // Column-major fill so the draw order is fixed by the storage order.
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = normal(engine);
      const double im = normal(engine);
      out(r, c) = Complex(re, im);
    }
  return out;
}

CMatrix rician_channel(const CMatrix& los, double rician_factor, std::uint64_t seed) {
  if (std::isnan(rician_factor) || rician_factor < 0.0)
    throw InvalidArgument("rician_channel: rician factor must be >= 0");
  if (std::isinf(rician_factor)) return los;
  const double los_amp = std::sqrt(rician_factor / (1.0 + rician_factor));
  const double nlos_amp = std::sqrt(1.0 / (1.0 + rician_factor));
  return los_amp * los +
         nlos_amp * rayleigh_channel(static_cast<int>(los.rows()), static_cast<int>(los.cols()), seed);
}

CMatrix radar_irs_los(const SystemGeometry& geometry, const ChannelModel& model) {
  const CVector irs = upa_steering(geometry.irs_rows, geometry.irs_cols, geometry.irs_spacing,
                                   model.los_irs_azimuth, model.los_irs_elevation);
  const CVector radar =
      ula_steering(geometry.num_radar_antennas, geometry.radar_spacing, model.los_radar_angle);
  return irs * radar.transpose();
}

ChannelSet synthesize_channels(const SystemGeometry& geometry, const ChannelModel& model,
                               std::uint64_t seed) {
  geometry.validate();
  model.validate();
  const int m = geometry.num_radar_antennas;
  const int n = geometry.num_irs_elements();
  const int k = model.num_users;

  ChannelSet out;
  out.G = std::sqrt(model.gain_g) *
          rician_channel(radar_irs_los(geometry, model), model.rician_factor,
                         derive_seed(seed, Stream::kG));
  out.F = std::sqrt(model.gain_f) * rayleigh_channel(k, m, derive_seed(seed, Stream::kF));
  out.H = std::sqrt(model.gain_h) * rayleigh_channel(k, n, derive_seed(seed, Stream::kH));
  out.eta = model.eta;
  return out;
}

CMatrix composite_radar_channel(const ChannelSet& channels, const CVector& theta,
                                const CVector& irs_steering) {
  channels.check_dims();
  const auto n = channels.G.rows();
  require_dims(theta.size() == n, "theta length must equal N");
  require_dims(irs_steering.size() == n, "steering length must equal N");
  // u = G^T diag(theta) a, F_r = eta u u^T.
  const CVector u = channels.G.transpose() * theta.cwiseProduct(irs_steering);
  return channels.eta * (u * u.transpose());
}

CMatrix composite_comm_channel(const ChannelSet& channels, const CVector& theta) {
  channels.check_dims();
  require_dims(theta.size() == channels.G.rows(), "theta length must equal N");
  return channels.F + channels.H * theta.asDiagonal() * channels.G;
}

}  // namespace dfrc
