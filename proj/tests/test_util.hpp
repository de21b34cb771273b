#pragma once

#include <random>

#include "cvqkd/fock_space.hpp"

namespace cvqkd::test {

inline CMatrix random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  const CMatrix g = random_complex(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

/// G G^dag / tr(G G^dag) with a full-rank Ginibre G.
inline CMatrix random_density(int n, std::mt19937_64& rng) {
  const CMatrix g = random_complex(n, n, rng);
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline RMatrix random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return 0.5 * (m + m.transpose());
}

}  // namespace cvqkd::test
