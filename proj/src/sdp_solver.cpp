#include "cvqkd/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cvqkd/diagnostics.hpp"
#include "cvqkd/kernels.hpp"

namespace cvqkd {

SolverConfig& SolverConfig::with_tolerance(double eps) {
  eps_primal = eps_dual = eps_gap = eps;
  return *this;
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be positive");
  if (!(eps_primal > 0 && eps_dual > 0 && eps_gap > 0)) {
    throw std::invalid_argument("solver: tolerances must be positive");
  }
  if (!(rho > 0)) throw std::invalid_argument("solver: rho must be positive");
  if (!(over_relaxation >= 1.0 && over_relaxation < 1.6180339887)) {
    throw std::invalid_argument("solver: over_relaxation must lie in [1, golden ratio)");
  }
  if (adapt_interval < 0 || trace_interval < 1) throw std::invalid_argument("solver: bad intervals");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::solved: return "solved";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

double Residuals::combined() const { return std::max({primal, dual, gap}); }

template <typename Matrix>
Matrix project_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
}

template Eigen::MatrixXd project_psd(const Eigen::MatrixXd&);
template Eigen::MatrixXcd project_psd(const Eigen::MatrixXcd&);

namespace {

constexpr double kDependenceTol = 1e-9;
constexpr double kZeroRowTol = 1e-12;  // relative to the largest row norm
constexpr double kDivergence = 1e8;
constexpr int kCertificateWindow = 1000;
constexpr double kCertificateTol = 1e-8;
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e8;
constexpr double kBalanceRatio = 5.0;
constexpr double kRhoStep = 10.0;

struct ScaledRows {
  Eigen::MatrixXd rows;        // kept constraints, scaled
  Eigen::VectorXd b;           // scaled right-hand sides
  Eigen::VectorXd row_scale;   // per kept row
  std::vector<std::size_t> kept;
  std::vector<std::size_t> dropped;
  bool inconsistent = false;
};

ScaledRows prepare_rows(const Eigen::MatrixXd& all_rows, const Eigen::VectorXd& all_b, bool scaling) {
  const Eigen::Index m = all_rows.rows();
  std::vector<Eigen::VectorXd> basis;  // orthonormalized kept rows
  ScaledRows out;
  const double largest = m > 0 ? all_rows.rowwise().norm().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double norm = all_rows.row(i).norm();
    if (norm <= kZeroRowTol * largest) {
      out.dropped.push_back(static_cast<std::size_t>(i));
      continue;
    }
    Eigen::VectorXd r = all_rows.row(i).transpose() / std::max(norm, 1e-300);
    for (const auto& q : basis) r -= q.dot(r) * q;
    if (r.norm() > kDependenceTol) {
      basis.push_back(r.normalized());
      out.kept.push_back(static_cast<std::size_t>(i));
    } else {
      out.dropped.push_back(static_cast<std::size_t>(i));
    }
  }
  const auto k = static_cast<Eigen::Index>(out.kept.size());
  out.rows.resize(k, all_rows.cols());
  out.b.resize(k);
  out.row_scale.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto i = static_cast<Eigen::Index>(out.kept[j]);
    const double s = scaling ? all_rows.row(i).norm() : 1.0;
    out.rows.row(j) = all_rows.row(i) / s;
    out.b(j) = all_b(i) / s;
    out.row_scale(j) = s;
  }
  if (!out.dropped.empty() && k > 0) {
    const Eigen::MatrixXd gram = out.rows * out.rows.transpose();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    for (const auto i : out.dropped) {
      const auto row = all_rows.row(static_cast<Eigen::Index>(i)).transpose();
      const Eigen::VectorXd coef = ldlt.solve(out.rows * row);
      const double predicted = coef.dot(out.b);
      const double actual = all_b(static_cast<Eigen::Index>(i));
      if (std::abs(predicted - actual) > 1e-8 * (1.0 + std::abs(actual) + out.b.norm())) {
        out.inconsistent = true;
      }
    }
  } else if (!out.dropped.empty()) {
    for (const auto i : out.dropped) {
      if (all_b(static_cast<Eigen::Index>(i)) != 0.0) out.inconsistent = true;
    }
  }
  return out;
}

/// Block-diagonal layout of X in svec coordinates.
template <typename Scalar>
struct BlockLayout {
  using Matrix = typename SdpProblemT<Scalar>::Matrix;
  std::vector<Eigen::Index> size, offset, svec_offset;
  Eigen::Index dim = 0;
  Eigen::Index svec_dim = 0;

  explicit BlockLayout(const std::vector<int>& sizes) {
    for (const int s : sizes) {
      if (s < 1) throw std::invalid_argument("sdp: block sizes must be positive");
      size.push_back(s);
      offset.push_back(dim);
      svec_offset.push_back(svec_dim);
      dim += s;
      svec_dim += svec_size<Scalar>(s);
    }
  }
  std::size_t count() const { return size.size(); }

  Eigen::VectorXd pack(const Matrix& m) const {
    Eigen::VectorXd out(svec_dim);
    for (std::size_t k = 0; k < count(); ++k) {
      out.segment(svec_offset[k], svec_size<Scalar>(size[k])) =
          svec<Scalar>(m.block(offset[k], offset[k], size[k], size[k]));
    }
    return out;
  }
  Matrix block(const Eigen::VectorXd& v, std::size_t k) const {
    return smat<Scalar>(v.segment(svec_offset[k], svec_size<Scalar>(size[k])), size[k]);
  }
  Matrix unpack(const Eigen::VectorXd& v) const {
    Matrix out = Matrix::Zero(dim, dim);
    for (std::size_t k = 0; k < count(); ++k) {
      out.block(offset[k], offset[k], size[k], size[k]) = block(v, k);
    }
    return out;
  }
  double min_eigenvalue(const Eigen::VectorXd& v) const {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count(); ++k) {
      Eigen::SelfAdjointEigenSolver<Matrix> e(block(v, k), Eigen::EigenvaluesOnly);
      lo = std::min(lo, e.eigenvalues().minCoeff());
    }
    return lo;
  }
};

}  // namespace

template <typename Scalar>
SdpSolutionT<Scalar> solve(const SdpProblemT<Scalar>& p, const SolverConfig& cfg) {
  using Matrix = typename SdpProblemT<Scalar>::Matrix;
  cfg.validate();
  validate(p);

  const Eigen::Index n = p.dim;
  const BlockLayout<Scalar> layout(p.block_sizes());
  if (layout.dim != n) throw std::invalid_argument("sdp: block sizes must sum to dim");
  const Eigen::Index d = layout.svec_dim;
  const auto m_all = static_cast<Eigen::Index>(p.constraints.size());

  Eigen::MatrixXd all_rows(m_all, d);
  Eigen::VectorXd all_b(m_all);
  for (Eigen::Index i = 0; i < m_all; ++i) {
    all_rows.row(i) = layout.pack(p.constraints[i].matrix).transpose();
    all_b(i) = p.constraints[i].value;
  }
  const ScaledRows data = prepare_rows(all_rows, all_b, cfg.scaling);

  SdpSolutionT<Scalar> sol;
  sol.dropped_constraints = data.dropped;
  sol.y = Eigen::VectorXd::Zero(m_all);
  if (!data.dropped.empty() && cfg.warn_dropped) {
    warn("sdp solver: dropped " + std::to_string(data.dropped.size()) +
         " linearly dependent constraint(s)");
  }
  if (data.inconsistent) {
    sol.status = SolveStatus::infeasible;
    sol.x = Matrix::Zero(n, n);
    return sol;
  }

  const Eigen::VectorXd c_orig = layout.pack(p.objective);
  const double c_scale = (cfg.scaling && c_orig.norm() > 0.0) ? c_orig.norm() : 1.0;
  const Eigen::VectorXd c = c_orig / c_scale;
  const Eigen::MatrixXd& rows = data.rows;
  const double b_scale = (cfg.scaling && data.b.norm() > 0.0) ? data.b.norm() : 1.0;
  const Eigen::VectorXd b = data.b / b_scale;
  const Eigen::Index m = rows.rows();

  Eigen::LLT<Eigen::MatrixXd> gram;
  if (m > 0) gram.compute(rows * rows.transpose());

  const double b_norm = b.norm();
  const double c_norm = c.norm();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd x_proj = x;
  Eigen::VectorXd v(d);
  Eigen::VectorXd ax(m), rhs(m), aty(d), tmp(m);

  Eigen::VectorXd y_window = y;
  Eigen::VectorXd x_window = x;
  double primal_window = std::numeric_limits<double>::infinity();
  double dual_window = std::numeric_limits<double>::infinity();

  double mu = cfg.rho;
  const double relax = cfg.over_relaxation;
  std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> eig(layout.count());
  Residuals res;
  double pobj = 0.0, dobj = 0.0;
  double primal_sum = 0.0, dual_sum = 0.0;

  if (cfg.trace) *cfg.trace << "iter,primal_res,dual_res,gap,objective\n";
  int it = 0;
  for (it = 1; it <= cfg.max_iters; ++it) {
    if (m > 0) {
      parallel::apply_rows(rows, x, ax);
      parallel::apply_rows(rows, c - s, tmp);
      rhs = mu * (b - ax) + tmp;
      y = gram.solve(rhs);
      parallel::apply_rows_transposed(rows, y, aty);
    } else {
      aty.setZero(d);
    }
    v = c - aty - mu * x;
    for (std::size_t k = 0; k < layout.count(); ++k) {
      auto& e = eig[k];
      e.compute(layout.block(v, k));
      const auto& lambda = e.eigenvalues();
      const auto& q = e.eigenvectors();
      const Eigen::Index sz = layout.size[k];
      // Eigenvalues ascend: [0, split) are negative, [split, sz) non-negative.
      Eigen::Index split = 0;
      while (split < sz && lambda(split) < 0.0) ++split;
      Matrix pos = Matrix::Zero(sz, sz);
      Matrix neg = Matrix::Zero(sz, sz);
      if (split < sz) {
        const auto qp = q.rightCols(sz - split);
        pos.noalias() = qp * lambda.tail(sz - split).asDiagonal() * qp.adjoint();
      }
      if (split > 0) {
        const auto qn = q.leftCols(split);
        neg.noalias() = qn * (-lambda.head(split)).asDiagonal() * qn.adjoint();
      }
      const Eigen::Index len = svec_size<Scalar>(sz);
      s.segment(layout.svec_offset[k], len) = svec<Scalar>(pos);
      x_proj.segment(layout.svec_offset[k], len) = svec<Scalar>(neg) / mu;
    }
    x = (1.0 - relax) * x + relax * x_proj;

    if (m > 0) parallel::apply_rows(rows, x_proj, ax);
    res.primal = m > 0 ? (ax - b).norm() / (1.0 + b_norm) : 0.0;
    res.dual = (c - aty - s).norm() / (1.0 + c_norm);
    pobj = c.dot(x_proj);
    dobj = m > 0 ? b.dot(y) : 0.0;
    res.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    primal_sum += std::max(res.primal, res.gap);
    dual_sum += res.dual;

    if (it % 100 == 0) sol.residual_history.push_back(res.combined());
    if (cfg.trace && it % cfg.trace_interval == 0) {
      *cfg.trace << it << ',' << res.primal << ',' << res.dual << ',' << res.gap << ','
                 << c_scale * b_scale * pobj << '\n';
    }
    if (res.primal <= cfg.eps_primal && res.dual <= cfg.eps_dual && res.gap <= cfg.eps_gap) {
      sol.status = SolveStatus::solved;
      break;
    }

    if (cfg.adapt_interval > 0 && it % cfg.adapt_interval == 0) {
      // Residual balancing on the sums over the last period. The primal side
      // also carries the gap: near-degenerate instances are limited by it.
      if (primal_sum > kBalanceRatio * dual_sum || dual_sum > kBalanceRatio * primal_sum) {
        const double ratio = primal_sum / std::max(dual_sum, std::numeric_limits<double>::min());
        mu = std::clamp(mu * std::clamp(ratio, 1.0 / kRhoStep, kRhoStep), kRhoMin, kRhoMax);
      }
      primal_sum = dual_sum = 0.0;
    }

    if (it % kCertificateWindow == 0) {
      // Divergence with residuals that stopped improving over the window.
      if (y.norm() > kDivergence && res.primal >= primal_window) {
        sol.status = SolveStatus::infeasible;
        break;
      }
      if (x.norm() > kDivergence && res.dual >= dual_window) {
        sol.status = SolveStatus::unbounded;
        break;
      }
      const Eigen::VectorXd dy = y - y_window;
      const Eigen::VectorXd dx = x - x_window;
      const bool primal_stalled = res.primal >= 0.9 * primal_window;
      const bool dual_stalled = res.dual >= 0.9 * dual_window;
      if (primal_stalled && m > 0 && dy.norm() > 0.0) {
        // Dual ray: A*(dy) <= 0 with b'dy > 0 certifies primal infeasibility.
        // Violations are measured relative to b'dy.
        const Eigen::VectorXd dir = dy / dy.norm();
        Eigen::VectorXd ray;
        parallel::apply_rows_transposed(rows, dir, ray);
        const double top = -layout.min_eigenvalue(-ray);
        const double gain = b.dot(dir);
        if (gain > 0.0 && top <= kCertificateTol * gain) {
          sol.status = SolveStatus::infeasible;
          break;
        }
      }
      if (dual_stalled && dx.norm() > 0.0) {
        // Primal ray: X-direction in the cone, in the null space of A, descending.
        const Eigen::VectorXd dir = dx / dx.norm();
        Eigen::VectorXd adir = Eigen::VectorXd::Zero(m);
        if (m > 0) parallel::apply_rows(rows, dir, adir);
        const double bottom = layout.min_eigenvalue(dir);
        const double descent = -c.dot(dir);
        if (descent > 0.0 && adir.norm() <= kCertificateTol * descent &&
            bottom >= -kCertificateTol * descent) {
          sol.status = SolveStatus::unbounded;
          break;
        }
      }
      y_window = y;
      x_window = x;
      primal_window = res.primal;
      dual_window = res.dual;
    }
  }

  sol.iterations = std::min(it, cfg.max_iters);
  sol.residuals = res;
  x_proj *= b_scale;
  sol.x = layout.unpack(x_proj);
  sol.objective = c_orig.dot(x_proj);
  for (Eigen::Index j = 0; j < m; ++j) {
    sol.y(static_cast<Eigen::Index>(data.kept[j])) = c_scale * y(j) / data.row_scale(j);
  }
  sol.dual_objective = all_b.dot(sol.y);
  return sol;
}

template SdpSolution solve<std::complex<double>>(const SdpProblem&, const SolverConfig&);
template RealSdpSolution solve<double>(const RealSdpProblem&, const SolverConfig&);

}  // namespace cvqkd
