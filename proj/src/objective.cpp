#include "dfrc/objective.hpp"

#include <cmath>
#include <string>

namespace dfrc {

namespace {

double gram_trace(const CMatrix& channel, const CMatrix& precoder) {
  require_dims(channel.cols() == precoder.rows(), "channel columns must equal precoder rows");
  return (channel * precoder).squaredNorm();
}

}  // namespace

void DesignWeights::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidArgument("alpha must lie in [0, 1], got " + std::to_string(alpha));
  if (!(noise_radar > 0.0) || !(noise_comm > 0.0))
    throw InvalidArgument("noise powers must be > 0");
}

double radar_snr(const CMatrix& radar_channel, const CMatrix& precoder, double noise_power) {
  if (!(noise_power > 0.0)) throw InvalidArgument("radar_snr: noise power must be > 0");
  return gram_trace(radar_channel, precoder) / noise_power;
}

double comm_snr(const CMatrix& comm_channel, const CMatrix& precoder, double noise_power) {
  if (!(noise_power > 0.0)) throw InvalidArgument("comm_snr: noise power must be > 0");
  return gram_trace(comm_channel, precoder) / noise_power;
}

double weighted_objective(double gamma_r, double gamma_c, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidArgument("weighted_objective: alpha must lie in [0, 1]");
  return (1.0 - alpha) * gamma_r + alpha * gamma_c;
}

CMatrix build_C(const CMatrix& radar_channel, const CMatrix& comm_channel,
                const DesignWeights& weights) {
  weights.validate();
  require_dims(radar_channel.rows() == radar_channel.cols(), "F_r must be square");
  require_dims(comm_channel.cols() == radar_channel.cols(), "F_c must have M columns");
  CMatrix c = ((1.0 - weights.alpha) / weights.noise_radar) * (radar_channel.adjoint() * radar_channel) +
              (weights.alpha / weights.noise_comm) * (comm_channel.adjoint() * comm_channel);
  // Symmetrize away round-off so downstream eigen-solvers see an exact Hermitian.
  return 0.5 * (c + c.adjoint());
}

ObjectiveBundle build_bundle(const ChannelSet& channels, const CVector& irs_steering,
                             const CMatrix& precoder, const DesignWeights& weights) {
  channels.check_dims();
  weights.validate();
  const CMatrix& g = channels.G;
  const auto n = g.rows();
  const auto m = g.cols();
  require_dims(irs_steering.size() == n, "steering length must equal N");
  require_dims(precoder.rows() == m && precoder.cols() == m, "W must be M x M");

  ObjectiveBundle b;
  b.num_radar_antennas = static_cast<int>(m);
  b.radar_scale = (1.0 - weights.alpha) * std::norm(channels.eta) / weights.noise_radar;

  // R = a a^T; Z_ij(n, k) = R(n, k) * g_i(n) * (G w_j)(k).
  const CMatrix r = irs_steering * irs_steering.transpose();
  const CMatrix gw = g * precoder;  // column j is G w_j
  b.Z.reserve(static_cast<std::size_t>(m * m));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      b.Z.emplace_back(r.cwiseProduct(g.col(i) * gw.col(j).transpose()));

  const double comm_scale = weights.alpha / weights.noise_comm;
  const CMatrix rw = precoder * precoder.adjoint();
  const CMatrix grg = g * rw * g.adjoint();
  CMatrix d1 = comm_scale * (channels.H.adjoint() * channels.H).cwiseProduct(grg.transpose());
  b.D1 = 0.5 * (d1 + d1.adjoint());

  // diag(G Rw F^H H) without forming the N x N product.
  const CMatrix left = g * rw * channels.F.adjoint();  // N x K
  b.v = comm_scale * left.cwiseProduct(channels.H.transpose()).rowwise().sum();

  b.t0 = comm_scale * (channels.F * precoder).squaredNorm();
  return b;
}

std::vector<Complex> quartic_forms(const CVector& theta, const ObjectiveBundle& bundle) {
  require_dims(theta.size() == bundle.num_irs_elements(), "theta length must equal N");
  std::vector<Complex> h;
  h.reserve(bundle.Z.size());
  for (const auto& z : bundle.Z) h.push_back(theta.transpose() * (z * theta));
  return h;
}

ObjectiveTerms eval_terms(const CVector& theta, const ObjectiveBundle& bundle) {
  require_dims(theta.size() == bundle.num_irs_elements(), "theta length must equal N");
  ObjectiveTerms t;
  if (bundle.radar_scale != 0.0) {
    double acc = 0.0;
    for (const Complex& h : quartic_forms(theta, bundle)) acc += std::norm(h);
    t.quartic = bundle.radar_scale * acc;
  }
  const Complex quad = theta.dot(bundle.D1 * theta);  // dot conjugates the left operand
  t.quadratic = quad.real();
  t.quadratic_imag = quad.imag();
  t.linear = 2.0 * (theta.transpose() * bundle.v).value().real();
  return t;
}

double eval_f1(const CVector& theta, const ObjectiveBundle& bundle) {
  return eval_terms(theta, bundle).f1();
}

SnrReport evaluate_snrs(const ChannelSet& channels, const CVector& irs_steering,
                        const CVector& theta, const CMatrix& precoder,
                        const DesignWeights& weights) {
  weights.validate();
  SnrReport r;
  r.radar = radar_snr(composite_radar_channel(channels, theta, irs_steering), precoder,
                      weights.noise_radar);
  r.comm = comm_snr(composite_comm_channel(channels, theta), precoder, weights.noise_comm);
  r.weighted = weighted_objective(r.radar, r.comm, weights.alpha);
  return r;
}

}  // namespace dfrc
