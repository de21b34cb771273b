#pragma once

#include <array>

#include "cvqkd/fock_space.hpp"

namespace cvqkd {

/// Alice's side of the QPSK problem in the orthonormal basis {|psi_k>} of the
/// span of the four coherent states. Matrix elements are evaluated in a Fock
/// embedding of dimension max(N, kAliceFockDim) so that they do not depend on
/// Bob's truncation.
class QpskAliceBasis {
 public:
  static constexpr int kAliceFockDim = 48;

  QpskAliceBasis(double alpha, int n);

  double alpha() const { return alpha_; }
  /// i^k alpha
  Complex amplitude(int k) const;
  /// <psi_j| a |psi_k>, i.e. Pi a Pi in the psi basis.
  const CMatrix& annihilation() const { return a_; }
  /// The psi_k as Fock vectors in the embedding.
  const std::array<CVector, 4>& psi() const { return psi_; }

 private:
  double alpha_;
  std::array<CVector, 4> psi_;
  CMatrix a_;
};

}  // namespace cvqkd
