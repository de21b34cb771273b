#include "cvqkd/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cvqkd/diagnostics.hpp"

namespace cvqkd {

namespace {

constexpr double kProbabilityTol = 1e-12;
constexpr double kFileProbabilityTol = 1e-6;
constexpr double kMaxTraceDeficit = 1e-6;

bool distinct(Complex a, Complex b) { return std::abs(a - b) > 1e-14; }

}  // namespace

Constellation::Constellation(std::vector<ConstellationPoint> points, Modulation kind)
    : points_(std::move(points)), kind_(kind) {
  double total = 0.0;
  for (const auto& p : points_) {
    if (!(p.probability >= 0.0) || !std::isfinite(std::abs(p.amplitude))) {
      throw std::invalid_argument("constellation: probabilities must be >= 0 and amplitudes finite");
    }
    total += p.probability;
  }
  if (std::abs(total - 1.0) > kProbabilityTol) {
    throw std::invalid_argument("constellation: probabilities must sum to 1");
  }
  bool has_two = false;
  for (std::size_t i = 1; i < points_.size() && !has_two; ++i) {
    has_two = distinct(points_[i].amplitude, points_[0].amplitude);
  }
  if (!has_two) throw std::invalid_argument("constellation: need at least two distinct points");
}

std::string Constellation::label() const {
  switch (kind_) {
    case Modulation::qpsk: return "qpsk";
    case Modulation::psk: return "psk:" + std::to_string(points_.size());
    case Modulation::qam: return "qam:" + std::to_string(points_.size());
    case Modulation::custom: return "custom";
  }
  return "custom";
}

double Constellation::mean_photon_number() const {
  double n = 0.0;
  for (const auto& p : points_) n += p.probability * std::norm(p.amplitude);
  return n;
}

bool Constellation::has_symmetric_covariance() const {
  Complex first{0.0};
  Complex second{0.0};
  for (const auto& p : points_) {
    first += p.probability * p.amplitude;
    second += p.probability * p.amplitude * p.amplitude;
  }
  const double scale = std::max(1.0, mean_photon_number());
  return std::abs(first) <= 1e-12 * scale && std::abs(second) <= 1e-12 * scale;
}

Constellation qpsk(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("qpsk: alpha must be > 0");
  std::vector<ConstellationPoint> pts;
  const Complex phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const Complex ph : phases) pts.push_back({0.25, alpha * ph});
  return Constellation(std::move(pts), Modulation::qpsk);
}

Constellation psk(int n, double alpha) {
  if (n < 2) throw std::invalid_argument("psk: need n >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("psk: alpha must be > 0");
  if (n == 4) return qpsk(alpha);
  std::vector<ConstellationPoint> pts;
  for (int k = 0; k < n; ++k) {
    pts.push_back({1.0 / n, std::polar(alpha, 2.0 * std::numbers::pi * k / n)});
  }
  return Constellation(std::move(pts), Modulation::psk);
}

Constellation qam(int n, double rms_alpha) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (n < 4 || side * side != n || side % 2 != 0) {
    throw std::invalid_argument("qam: n must be an even square (4, 16, 64, ...)");
  }
  if (!(rms_alpha > 0.0)) throw std::invalid_argument("qam: amplitude must be > 0");
  const double scale = rms_alpha / std::sqrt(2.0 * (side * side - 1) / 3.0);
  std::vector<ConstellationPoint> pts;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      pts.push_back({1.0 / n, scale * Complex(2 * i - (side - 1), 2 * j - (side - 1))});
    }
  }
  return Constellation(std::move(pts), Modulation::qam);
}

Constellation parse_constellation(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ConstellationPoint> pts;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double p = 0, re = 0, im = 0;
    if (!(fields >> p)) continue;  // blank or comment-only line
    std::string extra;
    if (!(fields >> re >> im) || (fields >> extra)) {
      throw std::invalid_argument("constellation file line " + std::to_string(line_no) +
                                  ": expected 'p re im'");
    }
    pts.push_back({p, {re, im}});
  }
  double total = 0.0;
  for (const auto& pt : pts) total += pt.probability;
  if (pts.empty() || std::abs(total - 1.0) > kFileProbabilityTol) {
    throw std::invalid_argument("constellation file: probabilities must sum to 1");
  }
  for (auto& pt : pts) pt.probability /= total;
  return Constellation(std::move(pts), Modulation::custom);
}

Constellation load_constellation(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open constellation file " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_constellation(buf.str());
}

std::array<double, 4> nu_coefficients(double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("nu_coefficients: alpha must be >= 0");
  const double x = alpha * alpha;
  std::array<double, 4> nu{0, 0, 0, 0};
  double term = 1.0;
  double total = 0.0;
  for (int j = 0; j < 100000; ++j) {
    if (j > 0) term *= x / j;
    nu[j % 4] += term;
    total += term;
    if (j > x && term <= 1e-18 * total) break;
  }
  return nu;
}

FockVector phi_vector(double alpha, int m, int n) {
  if (m < 0 || m > 3) throw std::invalid_argument("phi_vector: m must be in 0..3");
  if (n < 8 || n > kMaxFockDim) throw std::invalid_argument("phi_vector: need 8 <= N <= 128");
  if (!(alpha >= 0.0)) throw std::invalid_argument("phi_vector: alpha must be >= 0");
  if (alpha == 0.0 && m != 0) {
    throw std::invalid_argument("phi_vector: only phi_0 exists for alpha = 0");
  }
  const double norm = 1.0 / std::sqrt(nu_coefficients(alpha)[m]);
  FockVector v;
  v.amplitudes = CVector::Zero(n);
  double r = 1.0;  // alpha^j / sqrt(j!)
  for (int j = 0; j < n; ++j) {
    if (j > 0) r *= alpha / std::sqrt(static_cast<double>(j));
    if (j % 4 == m) v.amplitudes(j) = r * norm;
  }
  v.truncation_deficit = 1.0 - v.amplitudes.squaredNorm();
  return v;
}

std::array<FockVector, 4> phi_basis(double alpha, int n) {
  if (!(alpha > 0.0)) throw std::invalid_argument("phi_basis: alpha must be > 0");
  return {phi_vector(alpha, 0, n), phi_vector(alpha, 1, n), phi_vector(alpha, 2, n),
          phi_vector(alpha, 3, n)};
}

std::array<FockVector, 4> psi_basis(double alpha, int n) {
  const auto phi = phi_basis(alpha, n);
  std::array<FockVector, 4> psi;
  for (int k = 0; k < 4; ++k) {
    psi[k].amplitudes = CVector::Zero(n);
    for (int m = 0; m < 4; ++m) {
      const Complex phase = std::polar(0.5, -0.5 * std::numbers::pi * ((k * m) % 4));
      psi[k].amplitudes += phase * phi[m].amplitudes;
    }
    psi[k].truncation_deficit = 1.0 - psi[k].amplitudes.squaredNorm();
  }
  return psi;
}

FockOperator average_state(const Constellation& c, int n) {
  CMatrix rho = CMatrix::Zero(n, n);
  for (const auto& p : c.points()) {
    const CVector v = coherent_state(p.amplitude, n).amplitudes;
    rho.noalias() += p.probability * v * v.adjoint();
  }
  return FockOperator(std::move(rho));
}

ThermalState thermal_state(double gamma, int n) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("thermal_state: need 0 <= gamma < 1");
  if (n < 1 || n > kMaxFockDim) throw std::invalid_argument("thermal_state: bad truncation");
  CMatrix rho = CMatrix::Zero(n, n);
  double w = 1.0 - gamma * gamma;
  for (int k = 0; k < n; ++k) {
    rho(k, k) = w;
    w *= gamma * gamma;
  }
  return {FockOperator(std::move(rho)), std::pow(gamma, 2.0 * n)};
}

CVector purify_state(const CMatrix& rho) {
  const auto eig = hermitian_eig(rho);
  const CMatrix root = spectral_map(eig, [](double l) { return std::sqrt(std::max(l, 0.0)); });
  const Eigen::Index n = rho.rows();
  CVector phi(n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) phi(i * n + j) = root(j, i);
  }
  return phi;
}

bool rotation_invariant(const Constellation& c) {
  const double scale = std::sqrt(std::max(c.mean_photon_number(), 1.0));
  for (const auto& p : c.points()) {
    const Complex turned = Complex(0.0, 1.0) * p.amplitude;
    const bool found = std::any_of(c.points().begin(), c.points().end(), [&](const ConstellationPoint& q) {
      return std::abs(q.amplitude - turned) <= 1e-12 * scale &&
             std::abs(q.probability - p.probability) <= 1e-12;
    });
    if (!found) return false;
  }
  return true;
}

ConstellationBasis purify(const Constellation& c, int n) {
  ConstellationBasis b;
  b.n = n;
  b.rho = average_state(c, n);
  b.trace_deficit = 1.0 - b.rho.matrix().trace().real();
  if (b.trace_deficit > kMaxTraceDeficit) {
    throw std::invalid_argument("purify: truncation N=" + std::to_string(n) +
                                " too small for this constellation (trace deficit " +
                                std::to_string(b.trace_deficit) + ")");
  }
  b.rho_bar = FockOperator(b.rho.matrix().conjugate());

  const auto eig = hermitian_eig(b.rho);
  b.sqrt_rho = FockOperator(spectral_map(eig, [](double l) { return std::sqrt(std::max(l, 0.0)); }));
  b.purification = purify_state(b.rho.matrix());

  const auto expected_rank = std::min<std::size_t>(c.size(), static_cast<std::size_t>(n));
  std::vector<CVector> columns;
  std::vector<double> values;
  const auto take = [&](const EigenDecomposition& e, const std::vector<Eigen::Index>& index,
                        int charge) {
    for (Eigen::Index i = e.values.size() - 1; i >= 0; --i) {
      if (e.values(i) <= kSupportCutoff) continue;
      CVector col = CVector::Zero(n);
      for (std::size_t r = 0; r < index.size(); ++r) col(index[r]) = e.vectors(static_cast<Eigen::Index>(r), i);
      columns.push_back(std::move(col));
      values.push_back(e.values(i));
      if (charge >= 0) b.support_charge.push_back(charge);
    }
  };
  const bool real = b.rho_bar.matrix().imag().cwiseAbs().maxCoeff() <= 1e-14;
  const auto decompose = [&](const CMatrix& m) {
    if (!real) return hermitian_eig(FockOperator(m));
    // Real eigenvectors keep every matrix built from them real.
    Eigen::SelfAdjointEigenSolver<RMatrix> e(m.real());
    return EigenDecomposition{e.eigenvalues(), e.eigenvectors().cast<Complex>()};
  };
  if (rotation_invariant(c)) {
    for (int charge = 0; charge < 4; ++charge) {
      std::vector<Eigen::Index> index;
      for (Eigen::Index i = charge; i < n; i += 4) index.push_back(i);
      CMatrix sector(static_cast<Eigen::Index>(index.size()), static_cast<Eigen::Index>(index.size()));
      for (std::size_t r = 0; r < index.size(); ++r) {
        for (std::size_t q = 0; q < index.size(); ++q) sector(r, q) = b.rho_bar.matrix()(index[r], index[q]);
      }
      take(decompose(sector), index, charge);
    }
  } else {
    std::vector<Eigen::Index> index(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) index[i] = i;
    take(decompose(b.rho_bar.matrix()), index, -1);
  }
  if (columns.size() < expected_rank) {
    warn("purify: rho_n is ill-conditioned; " + std::to_string(expected_rank - columns.size()) +
         " eigenvalue(s) below 1e-12 dropped from the support");
  }
  b.support.resize(n, static_cast<Eigen::Index>(columns.size()));
  b.support_eigenvalues.resize(static_cast<Eigen::Index>(columns.size()));
  for (std::size_t col = 0; col < columns.size(); ++col) {
    b.support.col(col) = columns[col];
    b.support_eigenvalues(col) = values[col];
  }
  const CMatrix inv_sqrt = b.support *
                           b.support_eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
                           b.support.adjoint();

  b.m_n = CMatrix::Zero(n, n);
  for (const auto& p : c.points()) {
    const CVector v = inv_sqrt * coherent_state(std::conj(p.amplitude), n).amplitudes;
    CMatrix f = p.probability * v * v.adjoint();
    f = 0.5 * (f + f.adjoint());
    b.m_n += p.amplitude * f;
    b.f_ops.emplace_back(std::move(f));
    b.probabilities.push_back(p.probability);
    b.amplitudes.push_back(p.amplitude);
  }
  return b;
}

std::vector<FockOperator> povm_f(const Constellation& c, int n) { return purify(c, n).f_ops; }

CMatrix conditional_state(const ConstellationBasis& basis, std::size_t k) {
  const int n = basis.n;
  const CMatrix p = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(basis.purification.data(), n, n);
  const CMatrix fp = basis.f_ops.at(k).matrix() * p;
  return fp.transpose() * p.conjugate() / basis.probabilities.at(k);
}

}  // namespace cvqkd
