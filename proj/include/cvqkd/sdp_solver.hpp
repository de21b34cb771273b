#pragma once

// First-order SDP solver: ADMM on the dual (alternating a least-squares step
// for the multipliers y, an eigendecomposition-based projection onto the PSD
// cone for the slack S, and a multiplier step for X).
//
//   y <- (A A*)^{-1} (mu (b - A(X)) + A(C - S))
//   V <- C - A*(y) - mu X
//   S <- [V]_+ ,  X <- (1 - r) X + r [-V]_+ / mu
//
// A is applied in svec coordinates (see kernels.hpp) with a Cholesky
// factorization of the tiny Gram matrix A A* cached across iterations. With
// scaling on, constraint rows, b and C are normalized first. Block-diagonal
// problems (SdpProblemT::blocks) are projected block by block.

#include <iosfwd>
#include <string>
#include <vector>

#include "cvqkd/sdp_problem.hpp"

namespace cvqkd {

struct SolverConfig {
  int max_iters = 200000;
  double eps_primal = 1e-6;
  double eps_dual = 1e-6;
  double eps_gap = 1e-6;
  /// Initial mu. Large values favour primal feasibility, which is what
  /// degenerate instances (no strictly feasible point) need.
  double rho = 1.0;
  /// Step length for the X update, in [1, (1 + sqrt 5) / 2).
  double over_relaxation = 1.5;
  /// Normalize constraint rows and the objective before iterating.
  bool scaling = true;
  /// Residual-balancing period for rho; 0 disables adaptation.
  int adapt_interval = 50;
  /// When set, a "iter,primal_res,dual_res,gap,objective" header and matching lines are streamed
  /// every trace_interval iterations.
  std::ostream* trace = nullptr;
  int trace_interval = 100;
  /// Report dropped dependent constraints through the warning sink.
  bool warn_dropped = true;

  /// All eps_* set to the same value.
  SolverConfig& with_tolerance(double eps);
  void validate() const;
};

enum class SolveStatus { solved, max_iters, infeasible, unbounded };

std::string to_string(SolveStatus s);

struct Residuals {
  double primal = 0.0;  // ||A(X) - b|| / (1 + ||b||), scaled data
  double dual = 0.0;    // ||C - A*(y) - S|| / (1 + ||C||)
  double gap = 0.0;     // |b'y - <C, X>| / (1 + |b'y| + |<C, X>|)
  double combined() const;
};

template <typename Scalar>
struct SdpSolutionT {
  using Matrix = typename SdpProblemT<Scalar>::Matrix;
  Matrix x;
  double objective = 0.0;       // <C, X>
  double dual_objective = 0.0;  // b'y
  Eigen::VectorXd y;            // one multiplier per input constraint (0 for dropped rows)
  Residuals residuals;
  SolveStatus status = SolveStatus::max_iters;
  int iterations = 0;
  /// Combined residual sampled every 100 iterations.
  std::vector<double> residual_history;
  std::vector<std::size_t> dropped_constraints;
};

using SdpSolution = SdpSolutionT<std::complex<double>>;
using RealSdpSolution = SdpSolutionT<double>;

template <typename Scalar>
SdpSolutionT<Scalar> solve(const SdpProblemT<Scalar>& problem, const SolverConfig& cfg = {});

/// Nearest PSD matrix in Frobenius norm (eigenvalues clipped at zero).
template <typename Matrix>
Matrix project_psd(const Matrix& m);

}  // namespace cvqkd
