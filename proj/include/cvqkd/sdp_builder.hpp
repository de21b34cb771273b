#pragma once

// Assembly of the key-rate semidefinite programs.
//
// QPSK: X lives on span{psi_k} (x) Fock_N (dim 4N). Minimize
//   tr(C X),  C = Pi a Pi (x) b + Pi a^dag Pi (x) b^dag
// subject to the Bob variance v, the quadrature correlation c and the 16 real
// constraints that pin tr_B X to 1/4 sum <alpha_l|alpha_k> |psi_k><psi_l|.
//
// General constellations: X lives on supp(rho_bar_n) (x) Fock_N. Minimize
// tr((ab + a^dag b^dag) X) subject to tr_B X = rho_bar_n, the variance v and
// tr((M_n^dag (x) b) X) = c split into real and imaginary parts.

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "cvqkd/constellation.hpp"
#include "cvqkd/sdp_problem.hpp"

namespace cvqkd {

SdpProblem build_qpsk(double alpha, double c, double v, int n);

/// dim_a * N must not exceed 4096.
SdpProblem build_qam(const ConstellationBasis& basis, Complex c, double v);

/// Change of basis X = W X' W^dag whose columns are grouped into blocks that
/// X' may be assumed block diagonal (and real) over.
/// Both builders are invariant under rotating Alice's and Bob's modes by i in
/// opposite senses and under complex conjugation, so averaging any optimum
/// over those symmetries gives a real optimum that does not mix sectors of
/// different (Alice charge - Bob photon number) mod 4. Bob's Fock level nb is
/// additionally scaled by ratio^nb, which leaves the optimum unchanged and
/// evens out the magnitudes the solver sees.
struct BlockReduction {
  CMatrix basis;
  std::vector<int> blocks;
};

/// Ratio matched to Bob's mean photon number (v - 1) / 2.
double bob_scaling_ratio(double v);

/// Reduction for build_qpsk output: psi basis -> phi basis, then sectors.
BlockReduction qpsk_reduction(int n, double ratio = 1.0);
/// Reduction for build_qam output; requires basis.support_charge and a real
/// support basis, otherwise throws std::invalid_argument.
BlockReduction constellation_reduction(const ConstellationBasis& basis, double ratio = 1.0);

/// Rewrites p in the reduced basis keeping only real parts of the diagonal
/// blocks. Constraints that vanish there are kept (as zero rows) so labels
/// still line up with the input.
RealSdpProblem reduce_real(const SdpProblem& p, const BlockReduction& r);
/// Block-diagonal real solution back in the original basis.
CMatrix expand_reduced(const Eigen::MatrixXd& x, const BlockReduction& r);

/// [[Re H, -Im H], [Im H, Re H]] doubling. Constraint values are doubled and the
/// objective halved so that the real optimum equals the complex one.
RealSdpProblem embed_real(const SdpProblem& p);
/// Hermitian matrix represented by a real symmetric 2n x 2n matrix (averaging
/// the two copies, so it also accepts non-structured solver output).
CMatrix extract_complex(const Eigen::MatrixXd& x_real);
Eigen::MatrixXd embed_matrix(const CMatrix& h);

/// Plain-text sparse triplet dump:
///   # cvqkd-sdp v1
///   <dim> <n_constraints>
///   objective <nnz>
///   i j re im            (nnz lines, zero-based)
///   constraint <index> <rhs> <nnz> <label>
///   i j re im            ...
void write_sparse_triplets(const SdpProblem& p, std::ostream& out);
SdpProblem read_sparse_triplets(std::istream& in);

}  // namespace cvqkd
