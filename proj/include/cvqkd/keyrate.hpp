#pragma once

// Holevo bound and Devetak-Winter key rate from the SDP optimum Z*.
//
//   Gamma* = [ V_A 1_2      Z* sigma_Z ]     V_A = 1 + 2 <|alpha|^2>
//            [ Z* sigma_Z   V_B 1_2    ]     V_B = v
//
//   chi = g((nu1 - 1)/2) + g((nu2 - 1)/2) - g((nu3 - 1)/2)
//   nu3 = V_A - Z*^2 / (1 + v)
//   K   = beta I(X;Y) - chi

#include <string>

#include "cvqkd/channel_model.hpp"
#include "cvqkd/constellation.hpp"
#include "cvqkd/sdp_solver.hpp"

namespace cvqkd {

/// g(x) = (x + 1) log2(x + 1) - x log2(x); inputs in [-1e-9, 0) are read as 0.
double g_entropy(double x);

struct CovMatrix2Mode {
  double va = 1.0;
  double vb = 1.0;
  double z = 0.0;

  /// Requires V_A, V_B >= 1 and both symplectic eigenvalues >= 1 - 1e-9.
  void validate() const;
};

struct SymplecticEigs {
  double nu1 = 1.0;  // larger
  double nu2 = 1.0;
};

/// nu^2 = (Delta +- sqrt(Delta^2 - 4 det)) / 2, Delta = V_A^2 + V_B^2 - 2 Z^2.
SymplecticEigs symplectic_eigs(const CovMatrix2Mode& g);
/// Moduli of the eigenvalues of i Omega Gamma.
SymplecticEigs symplectic_eigs_numeric(const CovMatrix2Mode& g);

struct HolevoTerms {
  double nu1 = 1.0;
  double nu2 = 1.0;
  double nu3 = 1.0;
  double chi = 0.0;
};

/// nu3 in [1 - 1e-6, 1) is snapped to 1; smaller values throw.
inline constexpr double kNu3Window = 1e-6;
HolevoTerms holevo_bound(double mean_photon_number, double v, double z_star);

enum class MutualInfoModel { awgn, binary };

std::string to_string(MutualInfoModel m);

/// I(X;Y) for the QPSK point: log2(1 + s) or two binary-input AWGN channels.
double mutual_information(const ChannelPoint& p, MutualInfoModel model);

struct KeyRateResult {
  double c = 0.0;
  double v = 1.0;
  double z_star = 0.0;
  double nu1 = 1.0;
  double nu2 = 1.0;
  double nu3 = 1.0;
  double chi = 0.0;
  double i_xy = 0.0;
  double k = 0.0;
  double k_gauss_ref = 0.0;
  SolveStatus status = SolveStatus::solved;
  int iterations = 0;
  std::string error;  // set when the point could not be evaluated
};

/// Assembles chi and K = beta I - chi for a given Z*. K is not clamped.
KeyRateResult devetak_winter(const ChannelPoint& p, double z_star,
                             MutualInfoModel model = MutualInfoModel::awgn);

/// Same Holevo machinery for a Gaussian-modulated source with variance
/// va_gauss: Z_g = sqrt(T (V_A^2 - 1)), I = log2(1 + s).
double gaussian_reference_rate(const ChannelPoint& p, double va_gauss);

/// Solver settings used by the key-rate pipeline.
SolverConfig pipeline_solver_config();
/// pipeline_solver_config with initial rho = 1, for build_qam programs.
SolverConfig constellation_solver_config();

struct PipelineConfig {
  int truncation = 20;
  SolverConfig solver = pipeline_solver_config();
  /// Used by constellation_key_rate.
  SolverConfig qam_solver = constellation_solver_config();
  MutualInfoModel mutual_info = MutualInfoModel::awgn;
};

/// Build, reduce and solve the QPSK program at p, then evaluate the rate.
/// Solver or physicality failures are reported in the result, not thrown.
KeyRateResult qpsk_key_rate(const ChannelPoint& p, const PipelineConfig& cfg = {});

/// General constellation through build_qam. Uses the symmetry reduction when
/// the constellation allows it and the full complex program otherwise.
KeyRateResult constellation_key_rate(const Constellation& constellation, double transmittance,
                                     double excess_noise, double beta,
                                     const PipelineConfig& cfg = {});

}  // namespace cvqkd
