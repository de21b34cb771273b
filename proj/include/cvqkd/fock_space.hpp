#pragma once

// Dense complex linear algebra over the truncated Fock basis {|0>, ..., |N-1>}.
//
// Bipartite operators use the Kronecker convention A (x) B with the A index
// major and the B index minor: basis element |i>_A |j>_B sits at row i*dimB + j.
// Every module in this library relies on that ordering.

#include <complex>
#include <utility>

#include <Eigen/Core>

namespace cvqkd {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Largest supported Fock truncation.
inline constexpr int kMaxFockDim = 128;
/// Largest supported side of a bipartite operator.
inline constexpr int kMaxBipartiteDim = 4096;

inline constexpr double kHermitianTol = 1e-12;

struct FockVector {
  CVector amplitudes;
  /// 1 - ||v||^2 for states that would be normalized in the untruncated space.
  double truncation_deficit = 0.0;

  int dim() const { return static_cast<int>(amplitudes.size()); }
};

class FockOperator {
 public:
  FockOperator() = default;
  explicit FockOperator(CMatrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

 private:
  CMatrix m_;
};

class BipartiteOperator {
 public:
  BipartiteOperator() = default;
  BipartiteOperator(int dim_a, int dim_b, CMatrix m);

  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }
  int dim() const { return dim_a_ * dim_b_; }
  const CMatrix& matrix() const { return m_; }

 private:
  int dim_a_ = 0;
  int dim_b_ = 0;
  CMatrix m_;
};

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // columns are eigenvectors
};

/// e^{-|alpha|^2/2} sum_n alpha^n / sqrt(n!) |n> for n < N. Amplitudes are
/// accumulated as a running product so no factorial is ever formed.
FockVector coherent_state(Complex alpha, int n);

FockOperator annihilation(int n);
FockOperator creation(int n);
/// q = a + a^dagger (vacuum variance 1, [q, p] = 2i).
FockOperator quad_q(int n);
/// p = i (a^dagger - a).
FockOperator quad_p(int n);
FockOperator number_op(int n);
FockOperator identity(int n);

bool is_hermitian(const CMatrix& m, double tol = kHermitianTol);
double hermiticity_defect(const CMatrix& m);

BipartiteOperator tensor(const CMatrix& a, const CMatrix& b);
inline BipartiteOperator tensor(const FockOperator& a, const FockOperator& b) {
  return tensor(a.matrix(), b.matrix());
}

CMatrix partial_trace_b(const BipartiteOperator& x);
CMatrix partial_trace_a(const BipartiteOperator& x);
CMatrix partial_trace_b(const CMatrix& x, int dim_a, int dim_b);
CMatrix partial_trace_a(const CMatrix& x, int dim_a, int dim_b);

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Throws std::invalid_argument when the input is not Hermitian.
EigenDecomposition hermitian_eig(const CMatrix& m);
inline EigenDecomposition hermitian_eig(const FockOperator& m) {
  return hermitian_eig(m.matrix());
}

/// f applied to the spectrum of a Hermitian matrix.
template <typename F>
CMatrix spectral_map(const EigenDecomposition& eig, F&& f) {
  RVector mapped = eig.values.unaryExpr(std::forward<F>(f));
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

/// <u|v> with the bra conjugated.
inline Complex inner(const CVector& u, const CVector& v) { return u.dot(v); }

/// Closed-form overlap <alpha|beta> of untruncated coherent states.
Complex coherent_overlap(Complex alpha, Complex beta);

}  // namespace cvqkd
