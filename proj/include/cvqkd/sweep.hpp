#pragma once

// Batch sweeps over (distance, xi, alpha) with CSV output, a key=value
// manifest and a matplotlib script for the key-rate curves.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvqkd/keyrate.hpp"

namespace cvqkd {

/// 0 to 200 km in 5 km steps.
std::vector<double> default_distance_grid();

/// Parses "0.1", "0.1,0.2" or "start:step:stop" (stop included when hit
/// within 1e-9 of the step); comma-separated items may mix both forms.
std::vector<double> parse_grid(const std::string& text);

struct ModulationSpec {
  Modulation kind = Modulation::qpsk;
  int points = 4;          // psk:n, qam:n
  std::string path;        // custom:path
  std::string text() const;
};

/// "qpsk", "psk:8", "qam:16" or "custom:<file>".
ModulationSpec parse_modulation(const std::string& text);

struct SweepConfig {
  ModulationSpec modulation;
  std::vector<double> alpha_grid{0.35};
  std::vector<double> distance_grid = default_distance_grid();  // km
  std::vector<double> xi_list{0.002};
  double beta = 0.95;
  int truncation = 20;
  MutualInfoModel mutual_info = MutualInfoModel::awgn;
  double loss_db_per_km = kDefaultLossDbPerKm;
  int max_iters = pipeline_solver_config().max_iters;
  double eps = pipeline_solver_config().eps_gap;
  double rho = 0.0;  // initial ADMM penalty; 0 keeps the per-program default
  std::filesystem::path output_dir = ".";
  int threads = 0;            // 0: OpenMP default
  bool record_timing = true;  // false writes wall_ms = 0 for byte-stable output

  /// Grids non-empty, N in [10, 128], beta in [0, 1], parameters in range.
  void validate() const;
  PipelineConfig pipeline() const;
  /// Everything that affects the numbers, one key=value per line.
  std::string canonical() const;
};

/// Reads a flat INI file ([sweep] and [solver] sections). Keys:
///   [sweep]  modulation alpha distance xi beta truncation mutual_info
///            loss_db_per_km output threads timing
///   [solver] max_iters eps rho
/// Unknown keys are rejected. Unset keys keep `base` values.
SweepConfig load_sweep_config(const std::filesystem::path& path, SweepConfig base = {});
SweepConfig parse_sweep_config(std::istream& in, SweepConfig base = {});

struct SweepPoint {
  double distance_km = 0.0;
  double transmittance = 1.0;
  double xi = 0.0;
  double alpha = 0.0;
};

struct SweepRow {
  SweepPoint point;
  double beta = 0.0;
  int truncation = 0;
  KeyRateResult result;
  double wall_ms = 0.0;
};

/// Grid in output order: sorted by (xi, distance, alpha).
std::vector<SweepPoint> sweep_points(const SweepConfig& cfg);

/// Evaluates one point; never throws for numerical failures.
SweepRow evaluate_point(const SweepConfig& cfg, const SweepPoint& p);

enum class Execution { serial, parallel };

/// All grid points, in sweep_points order. The parallel path distributes
/// points over OpenMP threads; the serial one is the reference loop.
std::vector<SweepRow> run_points(const SweepConfig& cfg, Execution mode = Execution::parallel);

inline constexpr const char* kCsvHeader =
    "distance_km,T,xi,alpha,beta,N,c,v,Z_star,nu1,nu2,nu3,chi,I_xy,K,K_gauss_ref,solver_status,"
    "iters,wall_ms";

/// 12 significant digits, '.' separator, "nan" / "inf" for non-finite values.
std::string format_number(double x);
void write_csv(const std::vector<SweepRow>& rows, std::ostream& out);

std::uint64_t fnv1a64(const std::string& text);
std::string tool_version();
void write_manifest(const SweepConfig& cfg, const std::vector<SweepRow>& rows, std::ostream& out);

struct SweepOutputs {
  std::filesystem::path csv;
  std::filesystem::path manifest;
  std::filesystem::path plot_script;
  std::vector<SweepRow> rows;
};

/// Runs the grid and writes sweep.csv, manifest.txt and plot_sweep.py into
/// cfg.output_dir (created if missing).
SweepOutputs run_sweep(const SweepConfig& cfg, Execution mode = Execution::parallel);

/// Minimal CSV reader for files written by write_csv: header -> column.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(const std::string& name) const;
};
CsvTable read_csv(std::istream& in);

/// Standalone matplotlib script with the CSV data embedded: log-scale K
/// versus distance (versus alpha when the file holds a single distance),
/// one series per (xi, alpha) plus the Gaussian reference. Rows with K <= 0
/// or non-finite K are left out of the series and listed in a caption block.
/// Output depends only on the CSV contents.
std::string plot_script(const CsvTable& table, const std::string& image_name);
std::filesystem::path emit_plot_script(const std::filesystem::path& csv_path,
                                       std::optional<std::filesystem::path> script_path = {});

}  // namespace cvqkd
