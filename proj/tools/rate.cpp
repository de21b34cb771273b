// rate: command-line driver for key-rate sweeps, single points, SDP export
// and plot scripts.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "cvqkd/sdp_builder.hpp"
#include "cvqkd/sweep.hpp"

using namespace cvqkd;

namespace {

struct Overrides {
  std::string modulation, alpha, distance, xi, output;
  double beta = 0, eps = 0, rho = 0, loss = 0;
  int truncation = 0, threads = 0, max_iters = 0;
  bool binary_mi = false, no_timing = false, serial = false;
};

void add_solver_flags(CLI::App* app, Overrides& o) {
  app->add_option("--max-iters", o.max_iters, "Solver iteration cap")->check(CLI::PositiveNumber);
  app->add_option("--eps", o.eps, "Solver tolerance (primal, dual and gap)")->check(CLI::PositiveNumber);
  app->add_option("--rho", o.rho, "Initial ADMM penalty")->check(CLI::PositiveNumber);
}

void apply(const CLI::App* app, const Overrides& o, SweepConfig& cfg) {
  const auto given = [&](const char* name) { return app->count(name) > 0; };
  if (given("--modulation")) cfg.modulation = parse_modulation(o.modulation);
  if (given("--alpha")) cfg.alpha_grid = parse_grid(o.alpha);
  if (given("--distance")) cfg.distance_grid = parse_grid(o.distance);
  if (given("--xi")) cfg.xi_list = parse_grid(o.xi);
  if (given("--beta")) cfg.beta = o.beta;
  if (given("--truncation")) cfg.truncation = o.truncation;
  if (given("--loss")) cfg.loss_db_per_km = o.loss;
  if (given("--out")) cfg.output_dir = o.output;
  if (given("--threads")) cfg.threads = o.threads;
  if (given("--max-iters")) cfg.max_iters = o.max_iters;
  if (given("--eps")) cfg.eps = o.eps;
  if (given("--rho")) cfg.rho = o.rho;
  if (o.binary_mi) cfg.mutual_info = MutualInfoModel::binary;
  if (o.no_timing) cfg.record_timing = false;
}

void print_row(const SweepRow& row) {
  const auto& r = row.result;
  const std::pair<const char*, double> fields[] = {
      {"distance_km", row.point.distance_km}, {"T", row.point.transmittance}, {"xi", row.point.xi},
      {"alpha", row.point.alpha}, {"beta", row.beta}, {"c", r.c}, {"v", r.v}, {"Z_star", r.z_star},
      {"nu1", r.nu1}, {"nu2", r.nu2}, {"nu3", r.nu3}, {"chi", r.chi}, {"I_xy", r.i_xy}, {"K", r.k},
      {"K_gauss_ref", r.k_gauss_ref}};
  for (const auto& [name, value] : fields) std::cout << name << '=' << format_number(value) << '\n';
  std::cout << "N=" << row.truncation << '\n'
            << "solver_status=" << to_string(r.status) << '\n'
            << "iters=" << r.iterations << '\n'
            << "wall_ms=" << format_number(row.wall_ms) << '\n';
  if (!r.error.empty()) std::cout << "error=" << r.error << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic key-rate bounds for discrete-modulation CV-QKD"};
  app.require_subcommand(1);

  Overrides sw;
  std::string config_path;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write CSV, manifest and plot script");
  sweep->add_option("--config", config_path, "INI file with [sweep] and [solver] sections")->check(CLI::ExistingFile);
  sweep->add_option("--out", sw.output, "Output directory");
  sweep->add_option("--threads", sw.threads, "Worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
  sweep->add_flag("--exact-binary-mi", sw.binary_mi, "Use the binary-input AWGN mutual information");
  sweep->add_option("--truncation", sw.truncation, "Fock truncation N");
  sweep->add_option("--modulation", sw.modulation, "qpsk, psk:n, qam:n or custom:<file>");
  sweep->add_option("--alpha", sw.alpha, "Amplitude grid (list or start:step:stop)");
  sweep->add_option("--distance", sw.distance, "Distance grid in km");
  sweep->add_option("--xi", sw.xi, "Excess noise list");
  sweep->add_option("--beta", sw.beta, "Reconciliation efficiency");
  sweep->add_option("--loss", sw.loss, "Fiber loss in dB/km");
  sweep->add_flag("--no-timing", sw.no_timing, "Write wall_ms = 0 so reruns are byte-identical");
  sweep->add_flag("--serial", sw.serial, "Evaluate points in a plain loop");
  add_solver_flags(sweep, sw);

  Overrides pt;
  pt.alpha = "0.35";
  pt.xi = "0.002";
  pt.beta = 0.95;
  pt.truncation = 20;
  double distance = 50.0;
  double transmittance = -1.0;
  auto* point = app.add_subcommand("point", "Evaluate a single channel point");
  point->add_option("--alpha", pt.alpha, "Amplitude")->capture_default_str();
  auto* dist_opt = point->add_option("--distance", distance, "Distance in km")->capture_default_str();
  point->add_option("--transmittance", transmittance, "Transmittance T (overrides --distance)")
      ->excludes(dist_opt);
  point->add_option("--xi", pt.xi, "Excess noise")->capture_default_str();
  point->add_option("--beta", pt.beta, "Reconciliation efficiency")->capture_default_str();
  point->add_option("--truncation", pt.truncation, "Fock truncation N")->capture_default_str();
  point->add_option("--modulation", pt.modulation, "qpsk, psk:n, qam:n or custom:<file>");
  point->add_option("--loss", pt.loss, "Fiber loss in dB/km");
  point->add_flag("--exact-binary-mi", pt.binary_mi, "Use the binary-input AWGN mutual information");
  add_solver_flags(point, pt);

  Overrides ex;
  ex.alpha = "0.35";
  ex.xi = "0.002";
  ex.truncation = 20;
  double ex_distance = 50.0;
  std::string ex_out;
  auto* exp = app.add_subcommand("export-sdp", "Write the assembled SDP as sparse triplets");
  exp->add_option("--alpha", ex.alpha, "Amplitude")->capture_default_str();
  exp->add_option("--distance", ex_distance, "Distance in km")->capture_default_str();
  exp->add_option("--xi", ex.xi, "Excess noise")->capture_default_str();
  exp->add_option("--truncation", ex.truncation, "Fock truncation N")->capture_default_str();
  exp->add_option("--modulation", ex.modulation, "qpsk, psk:n, qam:n or custom:<file>");
  exp->add_option("--out", ex_out, "Output file (default: stdout)");

  std::string csv_path, script_path;
  auto* plot = app.add_subcommand("plot", "Generate a matplotlib script from a sweep CSV");
  plot->add_option("--csv", csv_path, "Sweep CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", script_path, "Script path (default: plot_<csv stem>.py next to the CSV)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      SweepConfig cfg;
      if (!config_path.empty()) cfg = load_sweep_config(config_path);
      apply(sweep, sw, cfg);
      const auto t0 = std::chrono::steady_clock::now();
      const auto out = run_sweep(cfg, sw.serial ? Execution::serial : Execution::parallel);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::size_t positive = 0;
      for (const auto& r : out.rows) positive += r.result.k > 0.0 ? 1 : 0;
      std::cerr << out.rows.size() << " points (" << positive << " with K > 0) in "
                << format_number(std::round(seconds * 10.0) / 10.0) << " s\n"
                << "wrote " << out.csv.string() << ", " << out.manifest.string() << ", "
                << out.plot_script.string() << '\n';
    } else if (point->parsed()) {
      SweepConfig cfg;
      cfg.alpha_grid = parse_grid(pt.alpha);
      cfg.xi_list = parse_grid(pt.xi);
      cfg.beta = pt.beta;
      cfg.truncation = pt.truncation;
      if (!pt.modulation.empty()) cfg.modulation = parse_modulation(pt.modulation);
      if (point->count("--loss")) cfg.loss_db_per_km = pt.loss;
      if (point->count("--max-iters")) cfg.max_iters = pt.max_iters;
      if (point->count("--eps")) cfg.eps = pt.eps;
      if (point->count("--rho")) cfg.rho = pt.rho;
      if (pt.binary_mi) cfg.mutual_info = MutualInfoModel::binary;
      cfg.distance_grid = {distance};
      if (cfg.alpha_grid.size() != 1 || cfg.xi_list.size() != 1) {
        throw std::invalid_argument("point: --alpha and --xi take a single value");
      }
      cfg.validate();
      SweepPoint p{distance, transmittance_from_distance(distance, cfg.loss_db_per_km), cfg.xi_list[0],
                   cfg.alpha_grid[0]};
      if (transmittance >= 0.0) {
        if (transmittance > 1.0) throw std::invalid_argument("point: T must lie in [0, 1]");
        p.transmittance = transmittance;
        p.distance_km = transmittance > 0.0 ? -10.0 * std::log10(transmittance) / cfg.loss_db_per_km
                                            : std::numeric_limits<double>::infinity();
      }
      const auto row = evaluate_point(cfg, p);
      print_row(row);
      return row.result.error.empty() ? 0 : 1;
    } else if (exp->parsed()) {
      const double alpha = std::stod(ex.alpha);
      const double xi = std::stod(ex.xi);
      const double t = transmittance_from_distance(ex_distance);
      const ModulationSpec mod = ex.modulation.empty() ? ModulationSpec{} : parse_modulation(ex.modulation);
      SdpProblem problem;
      if (mod.kind == Modulation::qpsk) {
        const auto stats = gaussian_stats(ChannelPoint{t, xi, alpha, 1.0});
        problem = build_qpsk(alpha, stats.c, stats.v, ex.truncation);
      } else {
        SweepConfig cfg;
        cfg.modulation = mod;
        cfg.alpha_grid = {alpha};
        cfg.xi_list = {xi};
        cfg.truncation = ex.truncation;
        cfg.validate();
        const Constellation c = mod.kind == Modulation::psk   ? psk(mod.points, alpha)
                                : mod.kind == Modulation::qam ? qam(mod.points, alpha)
                                                              : load_constellation(mod.path);
        const auto stats = gaussian_stats(c, t, xi);
        problem = build_qam(purify(c, ex.truncation), stats.c, stats.v);
      }
      if (ex_out.empty()) {
        write_sparse_triplets(problem, std::cout);
      } else {
        std::ofstream f(ex_out);
        if (!f) throw std::runtime_error("cannot write " + ex_out);
        write_sparse_triplets(problem, f);
      }
    } else if (plot->parsed()) {
      const auto path = emit_plot_script(csv_path, script_path.empty()
                                                       ? std::optional<std::filesystem::path>{}
                                                       : std::optional<std::filesystem::path>{script_path});
      std::cout << path.string() << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
