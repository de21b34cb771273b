#pragma once

// Inner kernels shared by the solver and the sweep driver. Each kernel has an
// OpenMP version (namespace parallel) and a plain loop (namespace serial) that
// is kept as the reference for tests and benchmarks.
//
// Matrices are handled in "svec" coordinates: a Hermitian n x n matrix maps to
// n^2 reals (diagonal, then sqrt(2) Re and sqrt(2) Im of the strict upper
// triangle, row by row); a real symmetric one maps to n(n+1)/2 reals. With this
// scaling Re tr(A X) is the Euclidean dot product of the two vectors.

#include <complex>

#include <Eigen/Core>

namespace cvqkd {

template <typename Scalar>
Eigen::Index svec_size(Eigen::Index n);

template <typename Scalar>
Eigen::VectorXd svec(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m);

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> smat(const Eigen::VectorXd& v, Eigen::Index n);

namespace parallel {

/// out = rows * x, one row per constraint.
void apply_rows(const Eigen::MatrixXd& rows, const Eigen::VectorXd& x, Eigen::VectorXd& out);
/// out = rows^T * y.
void apply_rows_transposed(const Eigen::MatrixXd& rows, const Eigen::VectorXd& y,
                           Eigen::VectorXd& out);

}  // namespace parallel

namespace serial {

void apply_rows(const Eigen::MatrixXd& rows, const Eigen::VectorXd& x, Eigen::VectorXd& out);
void apply_rows_transposed(const Eigen::MatrixXd& rows, const Eigen::VectorXd& y,
                           Eigen::VectorXd& out);

}  // namespace serial

}  // namespace cvqkd
