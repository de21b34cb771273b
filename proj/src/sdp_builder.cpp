#include "cvqkd/sdp_builder.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cvqkd/qpsk_basis.hpp"

namespace cvqkd {

namespace {

constexpr Complex kI{0.0, 1.0};

CMatrix unit(int n, int row, int col) {
  CMatrix e = CMatrix::Zero(n, n);
  e(row, col) = 1.0;
  return e;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) { return tensor(a, b).matrix(); }

/// Constraints pinning the A-marginal of X to `target` (dim_a x dim_a):
/// Re and Im of X_A(k, l) for k <= l.
void add_marginal_constraints(SdpProblem& p, const CMatrix& target, int dim_b) {
  const int da = static_cast<int>(target.rows());
  const CMatrix id_b = CMatrix::Identity(dim_b, dim_b);
  for (int k = 0; k < da; ++k) {
    for (int l = k; l < da; ++l) {
      const CMatrix re = 0.5 * (unit(da, l, k) + unit(da, k, l));
      p.constraints.push_back({kron(re, id_b), target(k, l).real(),
                               "marginal_re(" + std::to_string(k) + "," + std::to_string(l) + ")"});
      if (k == l) continue;
      const CMatrix im = (unit(da, l, k) - unit(da, k, l)) / (2.0 * kI);
      p.constraints.push_back({kron(im, id_b), target(k, l).imag(),
                               "marginal_im(" + std::to_string(k) + "," + std::to_string(l) + ")"});
    }
  }
}

CMatrix bob_variance(int n) {
  return CMatrix::Identity(n, n) + 2.0 * number_op(n).matrix();
}

}  // namespace

template <typename Scalar>
void validate(const SdpProblemT<Scalar>& p) {
  const auto check = [&](const auto& m, const std::string& what) {
    if (m.rows() != p.dim || m.cols() != p.dim) throw std::invalid_argument(what + ": wrong size");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument(what + ": not Hermitian");
    }
  };
  if (p.dim < 1) throw std::invalid_argument("sdp: dim must be positive");
  check(p.objective, "objective");
  for (const auto& c : p.constraints) check(c.matrix, "constraint " + c.label);
}

template void validate<double>(const RealSdpProblem&);
template void validate<Complex>(const SdpProblem&);

SdpProblem build_qpsk(double alpha, double c, double v, int n) {
  if (n < 10 || n > kMaxFockDim) throw std::invalid_argument("build_qpsk: need 10 <= N <= 128");
  if (!(alpha > 0.0)) throw std::invalid_argument("build_qpsk: alpha must be > 0");
  const QpskAliceBasis alice(alpha, n);
  const CMatrix a = alice.annihilation();
  const CMatrix b = annihilation(n).matrix();

  SdpProblem p;
  p.dim = 4 * n;
  p.dim_a = 4;
  p.dim_b = n;
  p.objective = kron(a, b) + kron(a.adjoint(), b.adjoint());

  p.constraints.push_back({kron(CMatrix::Identity(4, 4), bob_variance(n)), v, "variance"});

  CMatrix d02 = CMatrix::Zero(4, 4);
  CMatrix d13 = CMatrix::Zero(4, 4);
  d02(0, 0) = 1.0;
  d02(2, 2) = -1.0;
  d13(1, 1) = 1.0;
  d13(3, 3) = -1.0;
  p.constraints.push_back(
      {kron(d02, quad_q(n).matrix()) + kron(d13, quad_p(n).matrix()), c, "correlation"});

  // Redundant with the marginal constraints (their diagonal sums to one).
  p.constraints.push_back({CMatrix::Identity(p.dim, p.dim), 1.0, "trace"});

  CMatrix gram(4, 4);
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      gram(k, l) = 0.25 * coherent_overlap(alice.amplitude(l), alice.amplitude(k));
    }
  }
  add_marginal_constraints(p, gram, n);
  return p;
}

SdpProblem build_qam(const ConstellationBasis& basis, Complex c, double v) {
  const int n = basis.n;
  const CMatrix& u = basis.support;
  const int da = static_cast<int>(u.cols());
  if (da < 1) throw std::invalid_argument("build_qam: empty support");
  if (da * n > kMaxBipartiteDim) throw std::invalid_argument("build_qam: dim_a * N exceeds 4096");

  const CMatrix a = u.adjoint() * annihilation(n).matrix() * u;
  const CMatrix b = annihilation(n).matrix();

  SdpProblem p;
  p.dim = da * n;
  p.dim_a = da;
  p.dim_b = n;
  p.objective = kron(a, b) + kron(a.adjoint(), b.adjoint());

  p.constraints.push_back({kron(CMatrix::Identity(da, da), bob_variance(n)), v, "variance"});

  const CMatrix k = kron(u.adjoint() * basis.m_n.adjoint() * u, b);
  p.constraints.push_back({0.5 * (k + k.adjoint()), c.real(), "correlation_re"});
  p.constraints.push_back({(k - k.adjoint()) / (2.0 * kI), c.imag(), "correlation_im"});

  CMatrix target = u.adjoint() * basis.rho_bar.matrix() * u;
  target = 0.5 * (target + target.adjoint());
  p.constraints.push_back({CMatrix::Identity(p.dim, p.dim), target.trace().real(), "trace"});
  add_marginal_constraints(p, target, n);
  return p;
}

namespace {

/// Columns ratio^nb e_a (x) e_nb of the (a_dim x n) product basis grouped by
/// (charge[a] - nb) mod 4; `a_basis` maps Alice's new basis into the old one.
BlockReduction sector_reduction(const CMatrix& a_basis, const std::vector<int>& charge, int n,
                                double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("reduction: ratio must lie in (0, 1]");
  const auto da = static_cast<int>(a_basis.cols());
  BlockReduction r;
  r.basis = CMatrix::Zero(static_cast<Eigen::Index>(a_basis.rows()) * n, static_cast<Eigen::Index>(da) * n);
  Eigen::Index col = 0;
  for (int sector = 0; sector < 4; ++sector) {
    int size = 0;
    for (int a = 0; a < da; ++a) {
      for (int nb = 0; nb < n; ++nb) {
        if (((charge[a] - nb) % 4 + 4) % 4 != sector) continue;
        const double e = std::pow(ratio, nb);
        for (Eigen::Index k = 0; k < a_basis.rows(); ++k) r.basis(k * n + nb, col) = a_basis(k, a) * e;
        ++col;
        ++size;
      }
    }
    if (size > 0) r.blocks.push_back(size);
  }
  return r;
}

}  // namespace

double bob_scaling_ratio(double v) {
  const double mean = std::max(0.0, 0.5 * (v - 1.0));
  return std::clamp(3.0 * std::sqrt(mean / (1.0 + mean)), 0.01, 0.9);
}

BlockReduction qpsk_reduction(int n, double ratio) {
  // <psi_k|phi_m> = e^{i k m pi/2} / 2
  const Complex powers[4] = {1.0, kI, -1.0, -kI};
  CMatrix w(4, 4);
  for (int k = 0; k < 4; ++k) {
    for (int m = 0; m < 4; ++m) w(k, m) = 0.5 * powers[(k * m) % 4];
  }
  return sector_reduction(w, {0, 1, 2, 3}, n, ratio);
}

BlockReduction constellation_reduction(const ConstellationBasis& basis, double ratio) {
  const auto da = static_cast<std::size_t>(basis.support.cols());
  if (basis.support_charge.size() != da) {
    throw std::invalid_argument("constellation_reduction: constellation is not invariant under rotation by i");
  }
  if (basis.support.imag().cwiseAbs().maxCoeff() > 1e-14) {
    throw std::invalid_argument("constellation_reduction: average state is not real");
  }
  return sector_reduction(CMatrix::Identity(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(da)),
                          basis.support_charge, basis.n, ratio);
}

RealSdpProblem reduce_real(const SdpProblem& p, const BlockReduction& r) {
  if (r.basis.rows() != p.dim || r.basis.cols() != p.dim) {
    throw std::invalid_argument("reduce_real: basis does not match the problem");
  }
  const auto restrict = [&](const CMatrix& m) {
    const CMatrix t = r.basis.adjoint() * m * r.basis;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p.dim, p.dim);
    Eigen::Index off = 0;
    for (const int s : r.blocks) {
      out.block(off, off, s, s) = t.block(off, off, s, s).real();
      off += s;
    }
    return Eigen::MatrixXd(0.5 * (out + out.transpose()));
  };
  RealSdpProblem out;
  out.dim = p.dim;
  out.dim_a = p.dim_a;
  out.dim_b = p.dim_b;
  out.blocks = r.blocks;
  out.objective = restrict(p.objective);
  for (const auto& c : p.constraints) out.constraints.push_back({restrict(c.matrix), c.value, c.label});
  return out;
}

CMatrix expand_reduced(const Eigen::MatrixXd& x, const BlockReduction& r) {
  const CMatrix full = r.basis * x.cast<Complex>() * r.basis.adjoint();
  return 0.5 * (full + full.adjoint());
}

Eigen::MatrixXd embed_matrix(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

CMatrix extract_complex(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows() / 2;
  if (x.rows() != 2 * n || x.cols() != x.rows()) {
    throw std::invalid_argument("extract_complex: expected an even square matrix");
  }
  const Eigen::MatrixXd re = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
  const Eigen::MatrixXd im = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
  CMatrix out(n, n);
  out.real() = re;
  out.imag() = im;
  return out;
}

RealSdpProblem embed_real(const SdpProblem& p) {
  RealSdpProblem r;
  r.dim = 2 * p.dim;
  r.objective = 0.5 * embed_matrix(p.objective);
  for (const auto& c : p.constraints) {
    r.constraints.push_back({embed_matrix(c.matrix), 2.0 * c.value, c.label});
  }
  return r;
}

namespace {

void write_matrix(const CMatrix& m, std::ostream& out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Complex z = m(i, j);
      if (z != Complex(0.0, 0.0)) out << i << ' ' << j << ' ' << z.real() << ' ' << z.imag() << '\n';
    }
  }
}

Eigen::Index count_nonzero(const CMatrix& m) {
  return (m.array() != Complex(0.0, 0.0)).count();
}

CMatrix read_matrix(std::istream& in, int dim, Eigen::Index nnz) {
  CMatrix m = CMatrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double re = 0, im = 0;
    if (!(in >> i >> j >> re >> im) || i < 0 || j < 0 || i >= dim || j >= dim) {
      throw std::runtime_error("sparse triplets: malformed entry");
    }
    m(i, j) = Complex(re, im);
  }
  return m;
}

}  // namespace

void write_sparse_triplets(const SdpProblem& p, std::ostream& out) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# cvqkd-sdp v1\n" << p.dim << ' ' << p.constraints.size() << '\n';
  out << "objective " << count_nonzero(p.objective) << '\n';
  write_matrix(p.objective, out);
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    out << "constraint " << i << ' ' << c.value << ' ' << count_nonzero(c.matrix) << ' '
        << c.label << '\n';
    write_matrix(c.matrix, out);
  }
  out.precision(old_precision);
}

SdpProblem read_sparse_triplets(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# cvqkd-sdp", 0) != 0) {
    throw std::runtime_error("sparse triplets: missing header");
  }
  SdpProblem p;
  std::size_t count = 0;
  if (!(in >> p.dim >> count) || p.dim < 1) throw std::runtime_error("sparse triplets: bad sizes");
  std::string tag;
  Eigen::Index nnz = 0;
  if (!(in >> tag >> nnz) || tag != "objective") throw std::runtime_error("sparse triplets: no objective");
  p.objective = read_matrix(in, p.dim, nnz);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t index = 0;
    SdpProblem::Constraint c;
    if (!(in >> tag >> index >> c.value >> nnz >> c.label) || tag != "constraint" || index != i) {
      throw std::runtime_error("sparse triplets: bad constraint header");
    }
    c.matrix = read_matrix(in, p.dim, nnz);
    p.constraints.push_back(std::move(c));
  }
  return p;
}

}  // namespace cvqkd
