#include "cvqkd/kernels.hpp"

#include <cmath>
#include <numbers>

#include "cvqkd/sdp_problem.hpp"

namespace cvqkd {

namespace {

// Below this many entries the thread fork costs more than the product.
constexpr Eigen::Index kParallelThreshold = 1 << 15;

}  // namespace

template <typename Scalar>
Eigen::Index svec_size(Eigen::Index n) {
  if constexpr (is_complex_v<Scalar>) {
    return n * n;
  } else {
    return n * (n + 1) / 2;
  }
}

template <typename Scalar>
Eigen::VectorXd svec(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd v(svec_size<Scalar>(n));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) v(k++) = std::real(m(i, i));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      v(k++) = std::numbers::sqrt2 * std::real(m(i, j));
      if constexpr (is_complex_v<Scalar>) v(k++) = std::numbers::sqrt2 * std::imag(m(i, j));
    }
  }
  return v;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> smat(const Eigen::VectorXd& v, Eigen::Index n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
  constexpr double inv = 1.0 / std::numbers::sqrt2;
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = v(k++);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if constexpr (is_complex_v<Scalar>) {
        const Scalar z(inv * v(k), inv * v(k + 1));
        k += 2;
        m(i, j) = z;
        m(j, i) = std::conj(z);
      } else {
        m(i, j) = m(j, i) = inv * v(k++);
      }
    }
  }
  return m;
}

template Eigen::Index svec_size<double>(Eigen::Index);
template Eigen::Index svec_size<std::complex<double>>(Eigen::Index);
template Eigen::VectorXd svec<double>(const Eigen::MatrixXd&);
template Eigen::VectorXd svec<std::complex<double>>(const Eigen::MatrixXcd&);
template Eigen::MatrixXd smat<double>(const Eigen::VectorXd&, Eigen::Index);
template Eigen::MatrixXcd smat<std::complex<double>>(const Eigen::VectorXd&, Eigen::Index);

namespace parallel {

void apply_rows(const Eigen::MatrixXd& rows, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
  const Eigen::Index m = rows.rows();
  out.resize(m);
#pragma omp parallel for schedule(static) if (rows.size() > kParallelThreshold)
  for (Eigen::Index i = 0; i < m; ++i) out(i) = rows.row(i).dot(x);
}

void apply_rows_transposed(const Eigen::MatrixXd& rows, const Eigen::VectorXd& y,
                           Eigen::VectorXd& out) {
  const Eigen::Index d = rows.cols();
  const Eigen::Index m = rows.rows();
  out.resize(d);
#pragma omp parallel for schedule(static) if (rows.size() > kParallelThreshold)
  for (Eigen::Index j = 0; j < d; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) acc += rows(i, j) * y(i);
    out(j) = acc;
  }
}

}  // namespace parallel

namespace serial {

void apply_rows(const Eigen::MatrixXd& rows, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
  out.resize(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < rows.cols(); ++j) acc += rows(i, j) * x(j);
    out(i) = acc;
  }
}

void apply_rows_transposed(const Eigen::MatrixXd& rows, const Eigen::VectorXd& y,
                           Eigen::VectorXd& out) {
  out = Eigen::VectorXd::Zero(rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out(j) += rows(i, j) * y(i);
  }
}

}  // namespace serial

}  // namespace cvqkd
