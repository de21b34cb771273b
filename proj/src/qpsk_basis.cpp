#include "cvqkd/qpsk_basis.hpp"

#include <algorithm>

#include "cvqkd/constellation.hpp"

namespace cvqkd {

QpskAliceBasis::QpskAliceBasis(double alpha, int n) : alpha_(alpha) {
  const int dim = std::max(n, kAliceFockDim);
  const auto psi = psi_basis(alpha, dim);
  for (int k = 0; k < 4; ++k) psi_[k] = psi[k].amplitudes;
  const CMatrix a = cvqkd::annihilation(dim).matrix();
  a_.resize(4, 4);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) a_(j, k) = psi_[j].dot(a * psi_[k]);
  }
}

Complex QpskAliceBasis::amplitude(int k) const {
  static constexpr Complex kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return alpha_ * kPhase[((k % 4) + 4) % 4];
}

}  // namespace cvqkd
