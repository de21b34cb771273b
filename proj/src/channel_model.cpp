#include "cvqkd/channel_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cvqkd/qpsk_basis.hpp"

namespace cvqkd {

void ChannelPoint::validate() const {
  if (!(transmittance >= 0.0 && transmittance <= 1.0)) {
    throw std::invalid_argument("channel: transmittance must lie in [0, 1]");
  }
  if (!(excess_noise >= 0.0)) throw std::invalid_argument("channel: excess noise must be >= 0");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("channel: beta must lie in [0, 1]");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("channel: alpha must be >= 0");
}

double transmittance_from_distance(double distance_km, double loss_db_per_km) {
  if (!(distance_km >= 0.0) || !(loss_db_per_km >= 0.0)) {
    throw std::invalid_argument("distance and loss must be >= 0");
  }
  return std::pow(10.0, -loss_db_per_km * distance_km / 10.0);
}

ObservedStats gaussian_stats(const ChannelPoint& p) {
  p.validate();
  const double t = p.transmittance;
  const double a = p.alpha;
  return {2.0 * std::sqrt(t) * a, 1.0 + 2.0 * t * a * a + t * p.excess_noise,
          mutual_info_awgn(p).bits};
}

ConstellationStats gaussian_stats(const Constellation& c, double transmittance, double excess_noise) {
  ChannelPoint{transmittance, excess_noise, 0.0, 1.0}.validate();
  const double n = c.mean_photon_number();
  return {Complex(std::sqrt(transmittance) * n, 0.0),
          1.0 + 2.0 * transmittance * n + transmittance * excess_noise};
}

MutualInfo mutual_info_awgn(double mean_photon_number, double transmittance, double excess_noise) {
  const double s = 2.0 * transmittance * mean_photon_number / (2.0 + transmittance * excess_noise);
  return {std::log2(1.0 + s), s};
}

MutualInfo mutual_info_awgn(const ChannelPoint& p) {
  p.validate();
  return mutual_info_awgn(p.alpha * p.alpha, p.transmittance, p.excess_noise);
}

double capacity_binary_awgn(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("capacity_binary_awgn: need s > 0");
  using std::numbers::pi;
  const double log_norm = 0.5 * std::log(s / (8.0 * pi));
  // -phi log2(phi), with log(phi) evaluated as a log-sum-exp.
  auto integrand = [&](double x) {
    const double u = -0.5 * s * (x + 1.0) * (x + 1.0);
    const double w = -0.5 * s * (x - 1.0) * (x - 1.0);
    const double hi = std::max(u, w);
    const double log_phi = log_norm + hi + std::log1p(std::exp(std::min(u, w) - hi));
    return -std::exp(log_phi) * log_phi / std::numbers::ln2;
  };
  const double half_width = 1.0 + 12.0 / std::sqrt(s);
  double err = 0.0;
  const double h = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -half_width, half_width, 20, 1e-12, &err);
  const double c = h + 0.5 * std::log2(s / (2.0 * pi * std::numbers::e));
  return std::clamp(c, 0.0, 1.0);
}

BipartiteOperator pure_loss_state(double alpha, double transmittance, int n) {
  ChannelPoint{transmittance, 0.0, alpha, 1.0}.validate();
  const QpskAliceBasis alice(alpha, n);
  const double t = std::sqrt(transmittance);
  const double r = std::sqrt(1.0 - transmittance);

  std::array<CVector, 4> bob;
  for (int k = 0; k < 4; ++k) {
    const auto v = coherent_state(alice.amplitude(k) * t, n);
    if (v.truncation_deficit > 1e-6) {
      throw std::invalid_argument("pure_loss_state: truncation deficit exceeds 1e-6");
    }
    bob[k] = v.amplitudes;
  }
  // Alice's psi_k is the k-th unit vector of the 4-dim basis.
  CMatrix rho = CMatrix::Zero(4 * n, 4 * n);
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      const Complex eve = coherent_overlap(r * alice.amplitude(l), r * alice.amplitude(k));
      rho.block(k * n, l * n, n, n) = 0.25 * eve * bob[k] * bob[l].adjoint();
    }
  }
  return BipartiteOperator(4, n, std::move(rho));
}

double pure_loss_z(double alpha, double transmittance, int n) {
  const QpskAliceBasis alice(alpha, n);
  const auto rho = pure_loss_state(alpha, transmittance, n);
  const CMatrix ab = tensor(alice.annihilation(), annihilation(n).matrix()).matrix();
  return 2.0 * (ab * rho.matrix()).trace().real();
}

QuadrantSymbol quadrant_map(double z_q, double z_p) {
  if (!std::isfinite(z_q) || !std::isfinite(z_p)) {
    throw std::invalid_argument("quadrant_map: outcomes must be finite");
  }
  if (z_q == 0.0 && z_p == 0.0) return {0, 0};
  if (z_p < z_q && z_p >= -z_q) return {0, 0};
  if (z_p >= z_q && z_p > -z_q) return {0, 1};
  if (z_p > z_q && z_p <= -z_q) return {1, 0};
  return {1, 1};  // z_p <= z_q && z_p < -z_q
}

}  // namespace cvqkd
