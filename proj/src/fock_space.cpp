#include "cvqkd/fock_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace cvqkd {

namespace {

void check_fock_dim(int n, int min_dim) {
  if (n < min_dim || n > kMaxFockDim) {
    throw std::invalid_argument("Fock truncation must lie in [" + std::to_string(min_dim) +
                                ", " + std::to_string(kMaxFockDim) + "], got " +
                                std::to_string(n));
  }
}

}  // namespace

FockOperator::FockOperator(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("FockOperator must be square");
}

BipartiteOperator::BipartiteOperator(int dim_a, int dim_b, CMatrix m)
    : dim_a_(dim_a), dim_b_(dim_b), m_(std::move(m)) {
  if (dim_a < 1 || dim_b < 1) throw std::invalid_argument("bipartite dims must be positive");
  if (m_.rows() != dim_a * dim_b || m_.cols() != dim_a * dim_b) {
    throw std::invalid_argument("bipartite matrix does not match dimA*dimB");
  }
}

FockVector coherent_state(Complex alpha, int n) {
  check_fock_dim(n, 1);
  FockVector v;
  v.amplitudes.resize(n);
  Complex c = std::exp(-0.5 * std::norm(alpha));
  v.amplitudes(0) = c;
  for (int k = 1; k < n; ++k) {
    c *= alpha / std::sqrt(static_cast<double>(k));
    v.amplitudes(k) = c;
  }
  v.truncation_deficit = 1.0 - v.amplitudes.squaredNorm();
  return v;
}

FockOperator annihilation(int n) {
  check_fock_dim(n, 2);
  CMatrix a = CMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return FockOperator(std::move(a));
}

FockOperator creation(int n) { return FockOperator(annihilation(n).matrix().adjoint()); }

FockOperator quad_q(int n) {
  const CMatrix a = annihilation(n).matrix();
  return FockOperator(a + a.adjoint());
}

FockOperator quad_p(int n) {
  const CMatrix a = annihilation(n).matrix();
  return FockOperator(Complex(0, 1) * (a.adjoint() - a));
}

FockOperator number_op(int n) {
  check_fock_dim(n, 2);
  CMatrix m = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
  return FockOperator(std::move(m));
}

FockOperator identity(int n) {
  check_fock_dim(n, 1);
  return FockOperator(CMatrix::Identity(n, n));
}

double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  return hermiticity_defect(m) <= tol * scale;
}

BipartiteOperator tensor(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw std::invalid_argument("tensor: operands must be square");
  }
  const Eigen::Index da = a.rows();
  const Eigen::Index db = b.rows();
  if (da < 1 || db < 1 || da * db > kMaxBipartiteDim) {
    throw std::invalid_argument("tensor: product dimension out of range");
  }
  CMatrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a(i, j) * b;
    }
  }
  return BipartiteOperator(static_cast<int>(da), static_cast<int>(db), std::move(out));
}

CMatrix partial_trace_b(const CMatrix& x, int dim_a, int dim_b) {
  if (x.rows() != static_cast<Eigen::Index>(dim_a) * dim_b || x.cols() != x.rows()) {
    throw std::invalid_argument("partial_trace_b: dimension mismatch");
  }
  CMatrix out(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i) {
    for (int j = 0; j < dim_a; ++j) {
      out(i, j) = x.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
    }
  }
  return out;
}

CMatrix partial_trace_a(const CMatrix& x, int dim_a, int dim_b) {
  if (x.rows() != static_cast<Eigen::Index>(dim_a) * dim_b || x.cols() != x.rows()) {
    throw std::invalid_argument("partial_trace_a: dimension mismatch");
  }
  CMatrix out = CMatrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_a; ++i) out += x.block(i * dim_b, i * dim_b, dim_b, dim_b);
  return out;
}

CMatrix partial_trace_b(const BipartiteOperator& x) {
  return partial_trace_b(x.matrix(), x.dim_a(), x.dim_b());
}

CMatrix partial_trace_a(const BipartiteOperator& x) {
  return partial_trace_a(x.matrix(), x.dim_a(), x.dim_b());
}

EigenDecomposition hermitian_eig(const CMatrix& m) {
  if (!is_hermitian(m)) throw std::invalid_argument("hermitian_eig: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eig: no convergence");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Complex coherent_overlap(Complex alpha, Complex beta) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

}  // namespace cvqkd
