#pragma once

// Discrete-modulation constellations of coherent states, their average states,
// the QPSK phi/psi bases, the correlation-maximizing purification and the
// measurement {F_k} on the purifying mode that prepares each constellation state.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "cvqkd/fock_space.hpp"

namespace cvqkd {

enum class Modulation { qpsk, psk, qam, custom };

struct ConstellationPoint {
  double probability = 0.0;
  Complex amplitude;
};

class Constellation {
 public:
  /// Validates probabilities (non-negative, summing to one within 1e-12) and
  /// requires at least two distinct amplitudes.
  Constellation(std::vector<ConstellationPoint> points, Modulation kind);

  const std::vector<ConstellationPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  Modulation kind() const { return kind_; }
  std::string label() const;

  /// sum_k p_k |alpha_k|^2
  double mean_photon_number() const;
  /// 1 + 2 <n>, the quadrature variance of the average state.
  double variance() const { return 1.0 + 2.0 * mean_photon_number(); }
  /// True when <alpha> = 0 and <alpha^2> = 0, i.e. the two-mode covariance
  /// matrix keeps the [V_A 1, Z sigma_Z; Z sigma_Z, V_B 1] shape.
  bool has_symmetric_covariance() const;

 private:
  std::vector<ConstellationPoint> points_;
  Modulation kind_;
};

/// Four states i^k alpha, uniform.
Constellation qpsk(double alpha);
/// n states alpha e^{2 pi i k / n}, uniform.
Constellation psk(int n, double alpha);
/// Square n-QAM (n = 4, 16, 64, ...) on a uniform grid, uniform weights, scaled
/// so the mean photon number is rms_alpha^2.
Constellation qam(int n, double rms_alpha);
/// Plain text, one point per line: "p  re(alpha)  im(alpha)"; '#' starts a comment.
Constellation load_constellation(const std::filesystem::path& path);
Constellation parse_constellation(const std::string& text);

/// (nu_0, nu_1, nu_2, nu_3) with nu_m = sum_{j = m mod 4} alpha^{2j} / j!.
std::array<double, 4> nu_coefficients(double alpha);

/// |phi_m> restricted to Fock indices = m (mod 4). For alpha = 0 only m = 0 exists.
FockVector phi_vector(double alpha, int m, int n);
std::array<FockVector, 4> phi_basis(double alpha, int n);
/// |psi_k> = 1/2 sum_m e^{-i k m pi/2} |phi_m>.
std::array<FockVector, 4> psi_basis(double alpha, int n);

/// sum_k p_k |alpha_k><alpha_k| in the truncated basis.
FockOperator average_state(const Constellation& c, int n);

struct ThermalState {
  FockOperator rho;
  double truncation_deficit = 0.0;  // gamma^{2N}
};
/// (1 - gamma^2) sum_k gamma^{2k} |k><k|.
ThermalState thermal_state(double gamma, int n);

/// (1 (x) sqrt(rho)) sum_i |i>|i>, flattened A-major.
CVector purify_state(const CMatrix& rho);

struct ConstellationBasis {
  int n = 0;
  std::vector<double> probabilities;
  std::vector<Complex> amplitudes;
  FockOperator rho;       // rho_n
  FockOperator rho_bar;   // entrywise conjugate: the reduced state on the purifying mode
  FockOperator sqrt_rho;  // sqrt(rho_n)
  CVector purification;   // on A (x) B, A-major
  CMatrix support;        // N x r orthonormal columns spanning supp(rho_bar)
  RVector support_eigenvalues;
  /// Fock number mod 4 carried by each support column; empty unless the
  /// constellation is invariant under rotation by i.
  std::vector<int> support_charge;
  std::vector<FockOperator> f_ops;  // F_k on A
  CMatrix m_n;                      // sum_k alpha_k F_k
  double trace_deficit = 0.0;
};

inline constexpr double kSupportCutoff = 1e-12;

/// True when multiplying every amplitude by i permutes the constellation.
bool rotation_invariant(const Constellation& c);

/// Builds the purification and the {F_k} measurement. Throws when the
/// truncation leaves more than 1e-6 of the trace of rho_n outside the basis.
ConstellationBasis purify(const Constellation& c, int n);
std::vector<FockOperator> povm_f(const Constellation& c, int n);

/// tr_A[(F_k (x) 1)|Phi><Phi|] / p_k, the state prepared on B by outcome k.
CMatrix conditional_state(const ConstellationBasis& basis, std::size_t k);

}  // namespace cvqkd
