#include "cvqkd/keyrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cvqkd/sdp_builder.hpp"

namespace cvqkd {

namespace {

constexpr double kEntropyFloor = 1e-9;
constexpr double kHeisenbergTol = 1e-9;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

double g_entropy(double x) {
  if (!(x >= -kEntropyFloor)) throw std::domain_error("g_entropy: argument below zero");
  if (x <= 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

SymplecticEigs symplectic_eigs(const CovMatrix2Mode& g) {
  const double delta = g.va * g.va + g.vb * g.vb - 2.0 * g.z * g.z;
  const double root_det = g.va * g.vb - g.z * g.z;
  double disc = delta * delta - 4.0 * root_det * root_det;
  if (disc < 0.0) {
    if (disc < -1e-12 * std::max(1.0, delta * delta)) {
      throw std::domain_error("symplectic_eigs: unphysical covariance matrix");
    }
    disc = 0.0;
  }
  const double s = std::sqrt(disc);
  return {std::sqrt(0.5 * (delta + s)), std::sqrt(std::max(0.0, 0.5 * (delta - s)))};
}

SymplecticEigs symplectic_eigs_numeric(const CovMatrix2Mode& g) {
  // Ordering (q_A, p_A, q_B, p_B).
  Eigen::Matrix4d gamma = Eigen::Matrix4d::Zero();
  gamma(0, 0) = gamma(1, 1) = g.va;
  gamma(2, 2) = gamma(3, 3) = g.vb;
  gamma(0, 2) = gamma(2, 0) = g.z;
  gamma(1, 3) = gamma(3, 1) = -g.z;
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = omega(2, 3) = 1.0;
  omega(1, 0) = omega(3, 2) = -1.0;
  const Eigen::Matrix4cd m = std::complex<double>(0.0, 1.0) * (omega * gamma).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> eig(m, false);
  std::array<double, 4> mods{};
  for (int i = 0; i < 4; ++i) mods[i] = std::abs(eig.eigenvalues()(i));
  std::sort(mods.begin(), mods.end());
  // Eigenvalues come in +- pairs.
  return {0.5 * (mods[2] + mods[3]), 0.5 * (mods[0] + mods[1])};
}

void CovMatrix2Mode::validate() const {
  if (!(va >= 1.0 && vb >= 1.0)) throw std::domain_error("covariance: V_A and V_B must be >= 1");
  if (!std::isfinite(z)) throw std::domain_error("covariance: Z must be finite");
  const auto nu = symplectic_eigs(*this);
  if (nu.nu2 < 1.0 - kHeisenbergTol) {
    throw std::domain_error("covariance: symplectic eigenvalue below 1 (" + std::to_string(nu.nu2) + ")");
  }
}

HolevoTerms holevo_bound(double mean_photon_number, double v, double z_star) {
  const CovMatrix2Mode gamma{1.0 + 2.0 * mean_photon_number, v, z_star};
  gamma.validate();
  const auto nu = symplectic_eigs(gamma);
  HolevoTerms h;
  h.nu1 = nu.nu1;
  h.nu2 = nu.nu2;
  h.nu3 = gamma.va - z_star * z_star / (1.0 + v);
  if (h.nu3 < 1.0) {
    if (h.nu3 < 1.0 - kNu3Window) {
      throw std::domain_error("holevo_bound: nu3 = " + std::to_string(h.nu3) +
                              " below 1; (v, Z*) are inconsistent");
    }
    h.nu3 = 1.0;
  }
  h.chi = g_entropy(0.5 * (h.nu1 - 1.0)) + g_entropy(0.5 * (h.nu2 - 1.0)) -
          g_entropy(0.5 * (h.nu3 - 1.0));
  if (h.chi < 0.0) {
    if (h.chi < -kEntropyFloor) throw std::domain_error("holevo_bound: negative Holevo quantity");
    h.chi = 0.0;
  }
  return h;
}

std::string to_string(MutualInfoModel m) {
  return m == MutualInfoModel::awgn ? "awgn" : "binary";
}

double mutual_information(const ChannelPoint& p, MutualInfoModel model) {
  const auto mi = mutual_info_awgn(p);
  if (model == MutualInfoModel::awgn) return mi.bits;
  return mi.snr > 0.0 ? 2.0 * capacity_binary_awgn(mi.snr) : 0.0;
}

KeyRateResult devetak_winter(const ChannelPoint& p, double z_star, MutualInfoModel model) {
  p.validate();
  const auto stats = gaussian_stats(p);
  KeyRateResult r;
  r.c = stats.c;
  r.v = stats.v;
  r.z_star = z_star;
  const auto h = holevo_bound(p.alpha * p.alpha, stats.v, z_star);
  r.nu1 = h.nu1;
  r.nu2 = h.nu2;
  r.nu3 = h.nu3;
  r.chi = h.chi;
  r.i_xy = mutual_information(p, model);
  r.k = p.beta * r.i_xy - r.chi;
  r.k_gauss_ref = gaussian_reference_rate(p, 1.0 + 2.0 * p.alpha * p.alpha);
  return r;
}

double gaussian_reference_rate(const ChannelPoint& p, double va_gauss) {
  p.validate();
  if (!(va_gauss >= 1.0)) throw std::invalid_argument("gaussian_reference_rate: V_A must be >= 1");
  const double t = p.transmittance;
  const double mean = 0.5 * (va_gauss - 1.0);
  const double vb = 1.0 + 2.0 * t * mean + t * p.excess_noise;
  const double z = std::sqrt(t * (va_gauss * va_gauss - 1.0));
  const auto h = holevo_bound(mean, vb, z);
  return p.beta * mutual_info_awgn(mean, t, p.excess_noise).bits - h.chi;
}

SolverConfig pipeline_solver_config() {
  SolverConfig cfg;
  cfg.with_tolerance(1e-9);
  cfg.rho = 1e3;
  cfg.adapt_interval = 200;
  cfg.warn_dropped = false;
  return cfg;
}

SolverConfig constellation_solver_config() {
  SolverConfig cfg = pipeline_solver_config();
  cfg.rho = 1.0;
  return cfg;
}

namespace {

KeyRateResult failed(const ChannelPoint& p, const std::string& why) {
  KeyRateResult r;
  r.c = r.v = r.z_star = r.nu1 = r.nu2 = r.nu3 = r.chi = r.i_xy = r.k = r.k_gauss_ref = nan();
  try {
    const auto stats = gaussian_stats(p);
    r.c = stats.c;
    r.v = stats.v;
  } catch (const std::exception&) {
  }
  r.error = why;
  return r;
}

/// Fills the rate fields, keeping solver status and iteration count.
KeyRateResult finish(const ChannelPoint& p, const RealSdpSolution& sol, MutualInfoModel model) {
  if (sol.status == SolveStatus::infeasible || sol.status == SolveStatus::unbounded) {
    auto r = failed(p, "solver: " + to_string(sol.status));
    r.status = sol.status;
    r.iterations = sol.iterations;
    return r;
  }
  KeyRateResult r;
  try {
    r = devetak_winter(p, sol.objective, model);
  } catch (const std::exception& e) {
    r = failed(p, e.what());
    r.z_star = sol.objective;
  }
  r.status = sol.status;
  r.iterations = sol.iterations;
  return r;
}

}  // namespace

KeyRateResult qpsk_key_rate(const ChannelPoint& p, const PipelineConfig& cfg) {
  try {
    p.validate();
    const auto stats = gaussian_stats(p);
    const auto problem = build_qpsk(p.alpha, stats.c, stats.v, cfg.truncation);
    const auto reduction = qpsk_reduction(cfg.truncation, bob_scaling_ratio(stats.v));
    const auto sol = solve(reduce_real(problem, reduction), cfg.solver);
    return finish(p, sol, cfg.mutual_info);
  } catch (const std::exception& e) {
    return failed(p, e.what());
  }
}

KeyRateResult constellation_key_rate(const Constellation& constellation, double transmittance,
                                     double excess_noise, double beta, const PipelineConfig& cfg) {
  const double mean = constellation.mean_photon_number();
  const ChannelPoint p{transmittance, excess_noise, std::sqrt(mean), beta};
  try {
    p.validate();
    if (!constellation.has_symmetric_covariance()) {
      throw std::invalid_argument(
          "constellation_key_rate: <alpha> and <alpha^2> must vanish for the [Z sigma_Z] covariance form");
    }
    const auto basis = purify(constellation, cfg.truncation);
    const auto stats = gaussian_stats(constellation, transmittance, excess_noise);
    const auto problem = build_qam(basis, stats.c, stats.v);

    double z = 0.0;
    SolveStatus status = SolveStatus::solved;
    int iterations = 0;
    if (basis.support_charge.size() == static_cast<std::size_t>(basis.support.cols()) &&
        basis.support.imag().cwiseAbs().maxCoeff() <= 1e-14) {
      const auto reduction = constellation_reduction(basis, bob_scaling_ratio(stats.v));
      const auto sol = solve(reduce_real(problem, reduction), cfg.qam_solver);
      z = sol.objective;
      status = sol.status;
      iterations = sol.iterations;
    } else {
      const auto sol = solve(problem, cfg.qam_solver);
      z = sol.objective;
      status = sol.status;
      iterations = sol.iterations;
    }

    KeyRateResult r;
    if (status == SolveStatus::infeasible || status == SolveStatus::unbounded) {
      r = failed(p, "solver: " + to_string(status));
    } else {
      try {
        const auto h = holevo_bound(mean, stats.v, z);
        r.nu1 = h.nu1;
        r.nu2 = h.nu2;
        r.nu3 = h.nu3;
        r.chi = h.chi;
        r.i_xy = mutual_info_awgn(mean, transmittance, excess_noise).bits;
        r.k = beta * r.i_xy - r.chi;
        r.k_gauss_ref = gaussian_reference_rate(p, 1.0 + 2.0 * mean);
      } catch (const std::exception& e) {
        r = failed(p, e.what());
      }
    }
    r.c = stats.c.real();
    r.v = stats.v;
    r.z_star = z;
    r.status = status;
    r.iterations = iterations;
    return r;
  } catch (const std::exception& e) {
    return failed(p, e.what());
  }
}

}  // namespace cvqkd
