#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cvqkd/channel_model.hpp"
#include "cvqkd/diagnostics.hpp"
#include "cvqkd/kernels.hpp"
#include "cvqkd/keyrate.hpp"
#include "cvqkd/sdp_builder.hpp"
#include "cvqkd/sdp_solver.hpp"
#include "frozen_sdp6.hpp"
#include "test_util.hpp"

using namespace cvqkd;

namespace {

RealSdpProblem trace_one(const RMatrix& objective) {
  RealSdpProblem p;
  p.dim = static_cast<int>(objective.rows());
  p.objective = objective;
  p.constraints.push_back({RMatrix::Identity(p.dim, p.dim), 1.0, "trace"});
  return p;
}

template <typename Scalar>
void check_solved_invariants(const SdpSolutionT<Scalar>& s, const SolverConfig& cfg) {
  REQUIRE(s.status == SolveStatus::solved);
  CHECK(s.residuals.primal <= cfg.eps_primal);
  CHECK(s.residuals.dual <= cfg.eps_dual);
  CHECK(s.residuals.gap <= cfg.eps_gap);
  using Matrix = typename SdpSolutionT<Scalar>::Matrix;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (s.x + s.x.adjoint())));
  CHECK(es.eigenvalues().minCoeff() >= -10.0 * cfg.eps_primal);
}

/// Combined residual at iteration 10k is at most the one at iteration k.
void check_residual_trend(const std::vector<double>& history) {
  // history[i] is sampled at iteration 100 (i + 1).
  for (std::size_t i = 0; 10 * i + 9 < history.size(); ++i) {
    CHECK(history[10 * i + 9] <= history[i]);
  }
}

RealSdpProblem qpsk_instance(double t, double xi, int n) {
  const auto stats = gaussian_stats(ChannelPoint{t, xi, 0.35, 1.0});
  return reduce_real(build_qpsk(0.35, stats.c, stats.v, n), qpsk_reduction(n, bob_scaling_ratio(stats.v)));
}

}  // namespace

TEST_CASE("eigenvalue extremization") {
  RMatrix c = RMatrix::Zero(2, 2);
  c(0, 0) = 1.0;
  c(1, 1) = -1.0;
  const auto p = trace_one(c);
  SolverConfig cfg;
  const auto s = solve(p, cfg);
  check_solved_invariants(s, cfg);
  CHECK(std::abs(s.objective + 1.0) < 1e-5);
  RMatrix expected = RMatrix::Zero(2, 2);
  expected(1, 1) = 1.0;
  CHECK((s.x - expected).norm() < 1e-5);
  check_residual_trend(s.residual_history);

  // Larger random symmetric objective: optimum is the smallest eigenvalue.
  std::mt19937_64 rng(17);
  const RMatrix r = test::random_symmetric(8, rng);
  const auto s8 = solve(trace_one(r), cfg);
  check_solved_invariants(s8, cfg);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(r);
  CHECK(std::abs(s8.objective - es.eigenvalues()(0)) < 1e-5);
}

TEST_CASE("constant objective on the feasible set") {
  for (int n : {1, 2, 3, 5, 8}) {
    const auto s = solve(trace_one(RMatrix::Identity(n, n)));
    CHECK(s.status == SolveStatus::solved);
    CHECK(std::abs(s.objective - 1.0) < 1e-5);
  }
}

TEST_CASE("frozen 6x6 instance against the brute-force optimum") {
  const auto p = frozen::sdp6();
  SolverConfig cfg;
  const auto s = solve(p, cfg);
  check_solved_invariants(s, cfg);
  CHECK(std::abs(s.objective - frozen::kSdp6Optimum) < 1e-5);
  check_residual_trend(s.residual_history);
}

TEST_CASE("complex problem and its real embedding") {
  std::mt19937_64 rng(23);
  SdpProblem p;
  p.dim = 4;
  p.objective = test::random_hermitian(4, rng);
  p.constraints.push_back({CMatrix::Identity(4, 4), 1.0, "trace"});
  const CMatrix a = test::random_hermitian(4, rng);
  const CMatrix rho = test::random_density(4, rng);
  p.constraints.push_back({a, (a * rho).trace().real(), "a"});

  SolverConfig cfg;
  cfg.with_tolerance(1e-8);
  const auto direct = solve(p, cfg);
  REQUIRE(direct.status == SolveStatus::solved);
  const auto embedded = solve(embed_real(p), cfg);
  REQUIRE(embedded.status == SolveStatus::solved);
  CHECK(std::abs(direct.objective - embedded.objective) < 1e-6);
  const CMatrix x = extract_complex(embedded.x);
  CHECK(hermiticity_defect(x) <= 1e-8);
  CHECK(std::abs((p.objective * x).trace().real() - direct.objective) < 1e-6);
  CHECK(hermiticity_defect(direct.x) <= 1e-8);
}

TEST_CASE("constraint rescaling invariance") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  SolverConfig cfg;
  cfg.with_tolerance(1e-7);
  for (auto p : {frozen::sdp6(), qpsk_instance(0.5, 0.01, 10)}) {
    auto solve_cfg = cfg;
    if (p.dim > 6) solve_cfg.rho = pipeline_solver_config().rho;
    const auto base = solve(p, solve_cfg);
    REQUIRE(base.status == SolveStatus::solved);
    for (int trial = 0; trial < 3; ++trial) {
      auto q = p;
      for (auto& c : q.constraints) {
        const double s = scale(rng);
        c.matrix *= s;
        c.value *= s;
      }
      const auto r = solve(q, solve_cfg);
      CHECK(r.status == SolveStatus::solved);
      CHECK(std::abs(r.objective - base.objective) <= 10.0 * cfg.eps_gap);
    }
  }
}

TEST_CASE("shipped QPSK instances: residual trend and trace") {
  for (double t : {0.5, 0.1, 0.01}) {
    const auto p = qpsk_instance(t, 0.002, 12);
    const auto s = solve(p, pipeline_solver_config());
    REQUIRE(s.status == SolveStatus::solved);
    check_residual_trend(s.residual_history);
  }
}

TEST_CASE("infeasible and unbounded problems are reported") {
  RealSdpProblem p = trace_one(RMatrix::Identity(2, 2));
  p.constraints[0].value = -1.0;
  const auto s = solve(p);
  CHECK(s.status == SolveStatus::infeasible);

  RealSdpProblem u;
  u.dim = 2;
  u.objective = RMatrix::Zero(2, 2);
  u.objective(0, 0) = -1.0;
  RMatrix off = RMatrix::Zero(2, 2);
  off(0, 1) = off(1, 0) = 0.5;
  u.constraints.push_back({off, 0.0, "offdiag"});
  RMatrix second = RMatrix::Zero(2, 2);
  second(1, 1) = 1.0;
  u.constraints.push_back({second, 1.0, "x11"});
  const auto su = solve(u);
  CHECK(su.status == SolveStatus::unbounded);
}

TEST_CASE("dependent constraints are dropped with a warning") {
  auto p = trace_one(RMatrix::Identity(3, 3));
  p.objective(0, 0) = -1.0;
  p.constraints.push_back({2.0 * RMatrix::Identity(3, 3), 2.0, "trace_twice"});
  std::vector<std::string> seen;
  set_warning_sink([&](std::string_view m) { seen.emplace_back(m); });
  const auto s = solve(p);
  set_warning_sink(nullptr);
  CHECK(s.status == SolveStatus::solved);
  CHECK(std::abs(s.objective + 1.0) < 1e-5);
  CHECK(s.dropped_constraints.size() == 1);
  CHECK(!seen.empty());
  REQUIRE(s.y.size() == 2);

  // Inconsistent duplicates cannot be satisfied.
  p.constraints[1].value = 3.0;
  const auto bad = solve(p);
  CHECK(bad.status == SolveStatus::infeasible);
}

TEST_CASE("iteration trace") {
  std::ostringstream trace;
  SolverConfig cfg;
  cfg.trace = &trace;
  RMatrix c = RMatrix::Zero(3, 3);
  c(2, 2) = -2.0;
  const auto s = solve(trace_one(c), cfg);
  CHECK(s.status == SolveStatus::solved);
  std::istringstream lines(trace.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "iter,primal_res,dual_res,gap,objective");
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
    ++count;
  }
  CHECK(count == s.iterations / 100);
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  cfg.eps_gap = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.over_relaxation = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  RealSdpProblem p = trace_one(RMatrix::Identity(2, 2));
  p.constraints[0].matrix = RMatrix::Identity(3, 3);
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
}

TEST_CASE("PSD projection") {
  RMatrix d = RMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -3.0;
  RMatrix expected = RMatrix::Zero(2, 2);
  expected(0, 0) = 2.0;
  CHECK((project_psd(d) - expected).norm() < 1e-15);

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix rho = test::random_density(6, rng);
    CHECK((project_psd(rho) - rho).norm() < 1e-12);
  }

  // Frobenius optimality against an exhaustive grid over 2x2 PSD matrices
  // [[a, b], [b, c]] with a, c >= 0 and b^2 <= a c.
  for (int trial = 0; trial < 5; ++trial) {
    const RMatrix m = test::random_symmetric(2, rng);
    const RMatrix proj = project_psd(m);
    const double best = (proj - m).norm();
    double grid_best = std::numeric_limits<double>::infinity();
    const int steps = 120;
    const double lim = 3.0;
    for (int i = 0; i <= steps; ++i) {
      const double a = lim * i / steps;
      for (int k = 0; k <= steps; ++k) {
        const double c = lim * k / steps;
        const double bmax = std::sqrt(a * c);
        for (int j = -steps; j <= steps; ++j) {
          const double b = bmax * j / steps;
          RMatrix x(2, 2);
          x << a, b, b, c;
          grid_best = std::min(grid_best, (x - m).norm());
        }
      }
    }
    CHECK(best <= grid_best + 1e-12);
    CHECK(grid_best - best < 0.05);
  }
}

TEST_CASE("svec kernels: serial and parallel agree") {
  std::mt19937_64 rng(53);
  const CMatrix h = test::random_hermitian(7, rng);
  const CMatrix x = test::random_hermitian(7, rng);
  const Eigen::VectorXd sh = svec<Complex>(h), sx = svec<Complex>(x);
  CHECK(sh.size() == svec_size<Complex>(7));
  CHECK(std::abs(sh.dot(sx) - (h * x).trace().real()) < 1e-12);
  CHECK((smat<Complex>(sh, 7) - h).norm() < 1e-14);

  const RMatrix r = test::random_symmetric(9, rng);
  CHECK(svec<double>(r).size() == 45);
  CHECK((smat<double>(svec<double>(r), 9) - r).norm() < 1e-14);

  const Eigen::MatrixXd rows = Eigen::MatrixXd::Random(25, 400);
  const Eigen::VectorXd v = Eigen::VectorXd::Random(400);
  const Eigen::VectorXd y = Eigen::VectorXd::Random(25);
  Eigen::VectorXd a, b, c, d;
  serial::apply_rows(rows, v, a);
  parallel::apply_rows(rows, v, b);
  serial::apply_rows_transposed(rows, y, c);
  parallel::apply_rows_transposed(rows, y, d);
  CHECK((a - rows * v).norm() < 1e-12);
  CHECK((a - b).norm() < 1e-12);
  CHECK((c - rows.transpose() * y).norm() < 1e-12);
  CHECK((c - d).norm() < 1e-12);
}
