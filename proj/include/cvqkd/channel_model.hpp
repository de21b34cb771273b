#pragma once

// Phase-invariant Gaussian channel model: observed statistics (c, v), Alice-Bob
// mutual information, the pure-loss reference state and the QPSK quadrant map.

#include "cvqkd/constellation.hpp"
#include "cvqkd/fock_space.hpp"

namespace cvqkd {

/// Fiber attenuation used for distance sweeps.
inline constexpr double kDefaultLossDbPerKm = 0.2;

struct ChannelPoint {
  double transmittance = 1.0;  // T in [0, 1]
  double excess_noise = 0.0;   // xi, shot-noise units
  double alpha = 0.0;          // modulation amplitude
  double beta = 1.0;           // reconciliation efficiency in [0, 1]

  /// Throws std::invalid_argument when a field is outside its range.
  void validate() const;
};

/// T = 10^{-loss * d / 10}; the default gives T = 10^{-0.02 d}.
double transmittance_from_distance(double distance_km, double loss_db_per_km = kDefaultLossDbPerKm);

struct ObservedStats {
  double c = 0.0;     // QPSK correlation, shot-noise units
  double v = 1.0;     // Bob variance, shot-noise units
  double i_xy = 0.0;  // bits per symbol, AWGN approximation
};

struct MutualInfo {
  double bits = 0.0;
  double snr = 0.0;  // s = 2 T alpha^2 / (2 + T xi)
};

/// c = 2 sqrt(T) alpha, v = 1 + 2 T alpha^2 + T xi.
ObservedStats gaussian_stats(const ChannelPoint& p);

/// Statistics for a general constellation under the same channel:
/// c = sqrt(T) <|alpha|^2> (the heterodyne first moment correlated with
/// conj(alpha_k)), v = 1 + 2 T <|alpha|^2> + T xi.
struct ConstellationStats {
  Complex c;
  double v = 1.0;
};
ConstellationStats gaussian_stats(const Constellation& c, double transmittance, double excess_noise);

/// log2(1 + s), the two-quadrature AWGN capacity.
MutualInfo mutual_info_awgn(const ChannelPoint& p);
MutualInfo mutual_info_awgn(double mean_photon_number, double transmittance, double excess_noise);

/// Capacity of the binary-input AWGN channel at signal-to-noise ratio s, by
/// adaptive Gauss-Kronrod quadrature of the output differential entropy.
double capacity_binary_awgn(double s);

/// The QPSK two-mode state produced by a pure-loss channel, written in the
/// 4-dimensional psi basis on A and the truncated Fock basis on B:
///   1/4 sum_{k,l} <r alpha_l | r alpha_k> |psi_k><psi_l| (x) |t alpha_k><t alpha_l|
/// with t = sqrt(T), r = sqrt(1 - T).
BipartiteOperator pure_loss_state(double alpha, double transmittance, int n);

/// Z = tr[(ab + a^dagger b^dagger) rho] on pure_loss_state. Independent of any SDP.
double pure_loss_z(double alpha, double transmittance, int n);

struct QuadrantSymbol {
  int bit0 = 0;
  int bit1 = 0;
  int index() const { return 2 * bit0 + bit1; }
  friend bool operator==(const QuadrantSymbol&, const QuadrantSymbol&) = default;
};

/// Maps a heterodyne outcome (z_q, z_p) to two raw key bits. The four regions
/// are half-open cones around the axes; the origin maps to (0, 0).
QuadrantSymbol quadrant_map(double z_q, double z_p);

}  // namespace cvqkd
