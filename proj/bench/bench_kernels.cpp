// Serial vs OpenMP timings for the solver kernels and the sweep driver.

#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "cvqkd/kernels.hpp"
#include "cvqkd/sweep.hpp"

using namespace cvqkd;

namespace {

// Rows sized like a reduced QPSK program at N = 20: 19 constraints on svec of
// the real embedding.
struct Rows {
  Eigen::MatrixXd a;
  Eigen::VectorXd x, y, out;
  explicit Rows(Eigen::Index cols) : a(Eigen::MatrixXd::Random(19, cols)), x(Eigen::VectorXd::Random(cols)),
                                     y(Eigen::VectorXd::Random(19)) {}
};

template <void (*Kernel)(const Eigen::MatrixXd&, const Eigen::VectorXd&, Eigen::VectorXd&)>
void forward(benchmark::State& state) {
  Rows r(state.range(0));
  for (auto _ : state) {
    Kernel(r.a, r.x, r.out);
    benchmark::DoNotOptimize(r.out.data());
  }
  state.SetBytesProcessed(state.iterations() * r.a.size() * static_cast<int64_t>(sizeof(double)));
}

template <void (*Kernel)(const Eigen::MatrixXd&, const Eigen::VectorXd&, Eigen::VectorXd&)>
void adjoint(benchmark::State& state) {
  Rows r(state.range(0));
  for (auto _ : state) {
    Kernel(r.a, r.y, r.out);
    benchmark::DoNotOptimize(r.out.data());
  }
  state.SetBytesProcessed(state.iterations() * r.a.size() * static_cast<int64_t>(sizeof(double)));
}

void sweep(benchmark::State& state, Execution mode) {
  SweepConfig cfg;
  cfg.distance_grid = {10.0, 30.0, 50.0, 70.0};
  cfg.xi_list = {0.002};
  cfg.truncation = 12;
  cfg.record_timing = false;
  for (auto _ : state) {
    auto rows = run_points(cfg, mode);
    benchmark::DoNotOptimize(rows.data());
  }
}

}  // namespace

BENCHMARK(forward<serial::apply_rows>)->Name("apply_rows/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(forward<parallel::apply_rows>)->Name("apply_rows/parallel")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(adjoint<serial::apply_rows_transposed>)->Name("apply_rows_transposed/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(adjoint<parallel::apply_rows_transposed>)
    ->Name("apply_rows_transposed/parallel")
    ->Arg(1 << 12)
    ->Arg(1 << 16);
BENCHMARK_CAPTURE(sweep, serial, Execution::serial)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK_CAPTURE(sweep, parallel, Execution::parallel)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
