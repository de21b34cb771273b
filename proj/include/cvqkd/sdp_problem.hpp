#pragma once

#include <complex>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

namespace cvqkd {

template <typename T>
inline constexpr bool is_complex_v = false;
template <typename T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

/// min tr(C X) subject to tr(A_i X) = b_i and X >= 0, with Hermitian (or real
/// symmetric) data. Every builder in this library emits a minimization.
template <typename Scalar>
struct SdpProblemT {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  struct Constraint {
    Matrix matrix;
    double value = 0.0;
    std::string label;
  };

  int dim = 0;
  Matrix objective;
  std::vector<Constraint> constraints;
  /// Bipartite structure of X when known (dim = dim_a * dim_b), else 0.
  int dim_a = 0;
  int dim_b = 0;
  /// When non-empty, X is restricted to be block diagonal with these block
  /// sizes (summing to dim); only the diagonal blocks of the data are read.
  std::vector<int> blocks;

  std::size_t num_constraints() const { return constraints.size(); }
  std::vector<int> block_sizes() const { return blocks.empty() ? std::vector<int>{dim} : blocks; }
};

using SdpProblem = SdpProblemT<std::complex<double>>;
using RealSdpProblem = SdpProblemT<double>;

/// Throws std::invalid_argument when sizes disagree or data is not Hermitian.
template <typename Scalar>
void validate(const SdpProblemT<Scalar>& p);

}  // namespace cvqkd
