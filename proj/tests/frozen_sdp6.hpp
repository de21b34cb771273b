#pragma once

// Frozen 6x6 real SDP: min tr(C X) s.t. tr(X) = 1, tr(A_i X) = b_i (i = 1..3),
// X >= 0. Instance and optimum from tests/oracles/sdp6_oracle.py (multi-start
// SLSQP over X = L L^T / tr(L L^T), confirmed by cvxpy to 1e-10).

#include <initializer_list>

#include "cvqkd/sdp_solver.hpp"

namespace cvqkd::frozen {

constexpr double kSdp6Optimum = -1.7692560103;

inline RMatrix sdp6_matrix(std::initializer_list<double> v) {
  RMatrix m(6, 6);
  auto it = v.begin();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = *it++;
  return m;
}

inline RealSdpProblem sdp6() {
  RealSdpProblem p;
  p.dim = 6;
  p.objective = sdp6_matrix({
      -0.211, -0.622, 0.296, -0.466, 0.262, 0.217,
      -0.622, 0.099, -1.440, 0.035, -0.467, 0.317,
      0.296, -1.440, -0.933, -0.718, 0.034, 1.008,
      -0.466, 0.035, -0.718, -0.867, 0.199, -1.389,
      0.262, -0.467, 0.034, 0.199, 1.369, 0.233,
      0.217, 0.317, 1.008, -1.389, 0.233, -1.024});
  p.constraints.push_back({RMatrix::Identity(6, 6), 1.0, "trace"});
  p.constraints.push_back({sdp6_matrix({
      -0.869, -0.961, -1.012, -1.083, -1.013, 0.005,
      -0.961, -0.874, 0.514, 0.372, -0.583, 0.455,
      -1.012, 0.514, -0.809, -0.568, -0.247, 0.897,
      -1.083, 0.372, -0.568, -1.367, -0.292, -0.509,
      -1.013, -0.583, -0.247, -0.292, 0.876, 1.485,
      0.005, 0.455, 0.897, -0.509, 1.485, -0.049}), -0.307874, "a1"});
  p.constraints.push_back({sdp6_matrix({
      -0.606, -0.332, -0.630, -0.246, 0.249, -0.363,
      -0.332, 0.376, 0.091, -0.156, 0.271, -0.144,
      -0.630, 0.091, 1.931, -0.237, 1.051, -0.093,
      -0.246, -0.156, -0.237, -0.911, 1.446, 0.988,
      0.249, 0.271, 1.051, 1.446, 0.203, -0.177,
      -0.363, -0.144, -0.093, 0.988, -0.177, 0.811}), -0.126682, "a2"});
  p.constraints.push_back({sdp6_matrix({
      0.163, 0.715, -0.323, -0.175, 0.567, -0.460,
      0.715, 0.975, -0.689, 0.046, -0.606, 1.029,
      -0.323, -0.689, -1.413, -0.985, 0.814, -0.333,
      -0.175, 0.046, -0.985, 1.613, -0.534, 0.227,
      0.567, -0.606, 0.814, -0.534, -0.824, -0.491,
      -0.460, 1.029, -0.333, 0.227, -0.491, 1.386}), -0.104562, "a3"});
  return p;
}

}  // namespace cvqkd::frozen
