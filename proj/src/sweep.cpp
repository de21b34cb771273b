#include "cvqkd/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <omp.h>

#include "cvqkd/diagnostics.hpp"

#ifndef CVQKD_VERSION
#define CVQKD_VERSION "0.0.0"
#endif

namespace cvqkd {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument(what + ": cannot parse number '" + text + "'");
  }
  return value;
}

int to_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument(what + ": cannot parse integer '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument(what + ": expected a boolean, got '" + text + "'");
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_number(values[i]);
  }
  return out;
}

Constellation make_constellation(const ModulationSpec& m, double alpha) {
  switch (m.kind) {
    case Modulation::qpsk: return qpsk(alpha);
    case Modulation::psk: return psk(m.points, alpha);
    case Modulation::qam: return qam(m.points, alpha);
    case Modulation::custom: {
      const Constellation raw = load_constellation(m.path);
      const double scale = alpha / std::sqrt(raw.mean_photon_number());
      std::vector<ConstellationPoint> pts = raw.points();
      for (auto& p : pts) p.amplitude *= scale;
      return Constellation(std::move(pts), Modulation::custom);
    }
  }
  throw std::logic_error("unknown modulation");
}

std::string status_text(const KeyRateResult& r) {
  if (r.error.empty() || r.error.rfind("solver: ", 0) == 0) return to_string(r.status);
  return "error";
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (trim(text).empty()) throw std::invalid_argument("grid: empty");
  std::vector<double> out;
  for (const auto& raw : split(text, ',')) {
    const std::string item = trim(raw);
    if (item.empty()) throw std::invalid_argument("grid: empty item in '" + text + "'");
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(to_double(item, "grid"));
      continue;
    }
    if (parts.size() != 3) throw std::invalid_argument("grid: expected start:step:stop, got '" + item + "'");
    const double start = to_double(parts[0], "grid");
    const double step = to_double(parts[1], "grid");
    const double stop = to_double(parts[2], "grid");
    if (!(step != 0.0) || (stop - start) * step < 0.0) {
      throw std::invalid_argument("grid: step does not lead from start to stop in '" + item + "'");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    if (count > 100000) throw std::invalid_argument("grid: too many points in '" + item + "'");
    for (long k = 0; k <= count; ++k) out.push_back(start + static_cast<double>(k) * step);
  }
  return out;
}

std::string ModulationSpec::text() const {
  switch (kind) {
    case Modulation::qpsk: return "qpsk";
    case Modulation::psk: return "psk:" + std::to_string(points);
    case Modulation::qam: return "qam:" + std::to_string(points);
    case Modulation::custom: return "custom:" + path;
  }
  return "qpsk";
}

ModulationSpec parse_modulation(const std::string& text) {
  const std::string t = trim(text);
  ModulationSpec m;
  if (t == "qpsk") return m;
  const auto colon = t.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("modulation: unknown '" + text + "'");
  const std::string kind = t.substr(0, colon);
  const std::string arg = t.substr(colon + 1);
  if (kind == "custom") {
    if (arg.empty()) throw std::invalid_argument("modulation: custom needs a file path");
    m.kind = Modulation::custom;
    m.path = arg;
    m.points = 0;
    return m;
  }
  if (kind != "psk" && kind != "qam") throw std::invalid_argument("modulation: unknown '" + text + "'");
  m.kind = kind == "psk" ? Modulation::psk : Modulation::qam;
  m.points = to_int(arg, "modulation");
  if (m.kind == Modulation::psk && m.points == 4) m.kind = Modulation::qpsk;
  return m;
}

std::vector<double> default_distance_grid() { return parse_grid("0:5:200"); }

void SweepConfig::validate() const {
  if (alpha_grid.empty()) throw std::invalid_argument("config: alpha grid is empty");
  if (distance_grid.empty()) throw std::invalid_argument("config: distance grid is empty");
  if (xi_list.empty()) throw std::invalid_argument("config: xi list is empty");
  for (const double a : alpha_grid) {
    if (!(a > 0.0 && std::isfinite(a))) throw std::invalid_argument("config: alpha values must be > 0");
  }
  for (const double d : distance_grid) {
    if (!(d >= 0.0 && std::isfinite(d))) throw std::invalid_argument("config: distances must be >= 0");
  }
  for (const double x : xi_list) {
    if (!(x >= 0.0 && std::isfinite(x))) throw std::invalid_argument("config: xi values must be >= 0");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("config: beta must lie in [0, 1]");
  if (truncation < 10 || truncation > 128) throw std::invalid_argument("config: N must lie in [10, 128]");
  if (!(loss_db_per_km >= 0.0)) throw std::invalid_argument("config: loss must be >= 0");
  if (!(rho >= 0.0 && std::isfinite(rho))) throw std::invalid_argument("config: rho must be >= 0 (0: default)");
  if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
  if (mutual_info == MutualInfoModel::binary && modulation.kind != Modulation::qpsk) {
    throw std::invalid_argument("config: the binary mutual-information model is defined for qpsk only");
  }
  if (modulation.kind == Modulation::psk && modulation.points < 2) {
    throw std::invalid_argument("config: psk needs at least 2 points");
  }
  (void)make_constellation(modulation, alpha_grid.front());
  pipeline().solver.validate();
}

PipelineConfig SweepConfig::pipeline() const {
  PipelineConfig p;
  p.truncation = truncation;
  p.mutual_info = mutual_info;
  for (SolverConfig* s : {&p.solver, &p.qam_solver}) {
    s->max_iters = max_iters;
    s->with_tolerance(eps);
    if (rho > 0.0) s->rho = rho;
  }
  return p;
}

std::string SweepConfig::canonical() const {
  std::ostringstream out;
  out << "modulation=" << modulation.text() << '\n'
      << "alpha=" << join(alpha_grid) << '\n'
      << "distance_km=" << join(distance_grid) << '\n'
      << "xi=" << join(xi_list) << '\n'
      << "beta=" << format_number(beta) << '\n'
      << "truncation=" << truncation << '\n'
      << "mutual_info=" << to_string(mutual_info) << '\n'
      << "loss_db_per_km=" << format_number(loss_db_per_km) << '\n'
      << "solver.max_iters=" << max_iters << '\n'
      << "solver.eps=" << format_number(eps) << '\n'
      << "solver.rho=" << format_number(rho) << '\n'
      << "timing=" << (record_timing ? "true" : "false") << '\n';
  return out.str();
}

SweepConfig parse_sweep_config(std::istream& in, SweepConfig base) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  SweepConfig cfg = std::move(base);
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw std::invalid_argument("config: key '" + section + "' must sit in a [sweep] or [solver] section");
    }
    for (const auto& [key, node] : body) {
      const std::string v = node.data();
      const std::string what = section + "." + key;
      if (section == "sweep") {
        if (key == "modulation") cfg.modulation = parse_modulation(v);
        else if (key == "alpha") cfg.alpha_grid = parse_grid(v);
        else if (key == "distance") cfg.distance_grid = parse_grid(v);
        else if (key == "xi") cfg.xi_list = parse_grid(v);
        else if (key == "beta") cfg.beta = to_double(v, what);
        else if (key == "truncation") cfg.truncation = to_int(v, what);
        else if (key == "mutual_info") {
          const std::string t = trim(v);
          if (t == "awgn") cfg.mutual_info = MutualInfoModel::awgn;
          else if (t == "binary") cfg.mutual_info = MutualInfoModel::binary;
          else throw std::invalid_argument("config: mutual_info must be awgn or binary");
        } else if (key == "loss_db_per_km") cfg.loss_db_per_km = to_double(v, what);
        else if (key == "output") cfg.output_dir = trim(v);
        else if (key == "threads") cfg.threads = to_int(v, what);
        else if (key == "timing") cfg.record_timing = to_bool(v, what);
        else throw std::invalid_argument("config: unknown key " + what);
      } else if (section == "solver") {
        if (key == "max_iters") cfg.max_iters = to_int(v, what);
        else if (key == "eps") cfg.eps = to_double(v, what);
        else if (key == "rho") cfg.rho = to_double(v, what);
        else throw std::invalid_argument("config: unknown key " + what);
      } else {
        throw std::invalid_argument("config: unknown section [" + section + "]");
      }
    }
  }
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  return parse_sweep_config(in, std::move(base));
}

std::vector<SweepPoint> sweep_points(const SweepConfig& cfg) {
  std::vector<SweepPoint> pts;
  for (const double xi : cfg.xi_list) {
    for (const double d : cfg.distance_grid) {
      for (const double a : cfg.alpha_grid) {
        pts.push_back({d, transmittance_from_distance(d, cfg.loss_db_per_km), xi, a});
      }
    }
  }
  std::stable_sort(pts.begin(), pts.end(), [](const SweepPoint& l, const SweepPoint& r) {
    if (l.xi != r.xi) return l.xi < r.xi;
    if (l.distance_km != r.distance_km) return l.distance_km < r.distance_km;
    return l.alpha < r.alpha;
  });
  return pts;
}

SweepRow evaluate_point(const SweepConfig& cfg, const SweepPoint& p) {
  SweepRow row;
  row.point = p;
  row.beta = cfg.beta;
  row.truncation = cfg.truncation;
  const auto start = std::chrono::steady_clock::now();
  const PipelineConfig pipeline = cfg.pipeline();
  if (cfg.modulation.kind == Modulation::qpsk) {
    row.result = qpsk_key_rate({p.transmittance, p.xi, p.alpha, cfg.beta}, pipeline);
  } else {
    try {
      const Constellation c = make_constellation(cfg.modulation, p.alpha);
      row.result = constellation_key_rate(c, p.transmittance, p.xi, cfg.beta, pipeline);
    } catch (const std::exception& e) {
      row.result.c = row.result.v = row.result.z_star = row.result.nu1 = row.result.nu2 =
          row.result.nu3 = row.result.chi = row.result.i_xy = row.result.k = row.result.k_gauss_ref =
              std::numeric_limits<double>::quiet_NaN();
      row.result.error = e.what();
    }
  }
  if (cfg.record_timing) {
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  if (!row.result.error.empty()) {
    warn("sweep point d=" + format_number(p.distance_km) + " km, xi=" + format_number(p.xi) +
         ", alpha=" + format_number(p.alpha) + ": " + row.result.error);
  }
  return row;
}

std::vector<SweepRow> run_points(const SweepConfig& cfg, Execution mode) {
  cfg.validate();
  const auto pts = sweep_points(cfg);
  std::vector<SweepRow> rows(pts.size());
  const auto count = static_cast<long>(pts.size());
  if (mode == Execution::serial) {
    for (long i = 0; i < count; ++i) rows[i] = evaluate_point(cfg, pts[i]);
    return rows;
  }
  const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < count; ++i) rows[i] = evaluate_point(cfg, pts[i]);
  return rows;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, ptr);
}

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& row : rows) {
    const auto& r = row.result;
    const double fields[] = {row.point.distance_km, row.point.transmittance, row.point.xi, row.point.alpha,
                             row.beta};
    for (const double f : fields) out << format_number(f) << ',';
    out << row.truncation << ',';
    const double values[] = {r.c, r.v, r.z_star, r.nu1, r.nu2, r.nu3, r.chi, r.i_xy, r.k, r.k_gauss_ref};
    for (const double f : values) out << format_number(f) << ',';
    out << status_text(r) << ',' << r.iterations << ',' << format_number(row.wall_ms) << '\n';
  }
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string tool_version() { return CVQKD_VERSION; }

void write_manifest(const SweepConfig& cfg, const std::vector<SweepRow>& rows, std::ostream& out) {
  const std::string canonical = cfg.canonical();
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical);
  out << "tool=rate\n"
      << "version=" << tool_version() << '\n'
      << "config_hash=" << hash.str() << '\n'
      << canonical << "points=" << rows.size() << '\n';
  const char* statuses[] = {"solved", "max_iters", "infeasible", "unbounded", "error"};
  for (const char* s : statuses) {
    const auto n = std::count_if(rows.begin(), rows.end(),
                                 [&](const SweepRow& r) { return status_text(r.result) == s; });
    out << "status." << s << '=' << n << '\n';
  }
  const auto positive = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.result.k > 0.0; });
  out << "positive_rate_points=" << positive << '\n';
}

SweepOutputs run_sweep(const SweepConfig& cfg, Execution mode) {
  cfg.validate();
  SweepOutputs out;
  out.rows = run_points(cfg, mode);
  std::filesystem::create_directories(cfg.output_dir);
  out.csv = cfg.output_dir / "sweep.csv";
  out.manifest = cfg.output_dir / "manifest.txt";
  {
    std::ofstream f(out.csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out.csv.string());
    write_csv(out.rows, f);
  }
  {
    std::ofstream f(out.manifest, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out.manifest.string());
    write_manifest(cfg, out.rows, f);
  }
  out.plot_script = emit_plot_script(out.csv);
  return out;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument("csv: missing column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
  t.header = split(trim(line), ',');
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != t.header.size()) throw std::invalid_argument("csv: ragged row");
    t.rows.push_back(std::move(fields));
  }
  return t;
}

namespace {

struct Series {
  std::string label;
  std::vector<std::string> x;
  std::vector<std::string> y;
};

double cell(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return to_double(s, "csv");
}

std::string python_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i];
  }
  return out + "]";
}

std::string python_str(const std::string& s) {
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string plot_script(const CsvTable& table, const std::string& image_name) {
  const auto c_d = table.column("distance_km");
  const auto c_xi = table.column("xi");
  const auto c_a = table.column("alpha");
  const auto c_k = table.column("K");
  const auto c_g = table.column("K_gauss_ref");

  bool single_distance = !table.rows.empty();
  for (const auto& r : table.rows) single_distance = single_distance && r[c_d] == table.rows.front()[c_d];
  bool many_alpha = false;
  for (const auto& r : table.rows) many_alpha = many_alpha || r[c_a] != table.rows.front()[c_a];
  const bool versus_alpha = single_distance && many_alpha;
  const auto c_x = versus_alpha ? c_a : c_d;

  // Series keyed by the row's first appearance, so the order follows the CSV.
  std::vector<std::string> keys;
  std::vector<Series> rate, reference;
  std::vector<std::string> caption;
  for (const auto& r : table.rows) {
    const std::string key = versus_alpha ? "xi=" + r[c_xi] : "xi=" + r[c_xi] + ", alpha=" + r[c_a];
    auto pos = std::find(keys.begin(), keys.end(), key);
    if (pos == keys.end()) {
      keys.push_back(key);
      rate.push_back({"SDP bound, " + key, {}, {}});
      reference.push_back({"Gaussian reference, " + key, {}, {}});
      pos = keys.end() - 1;
    }
    const auto idx = static_cast<std::size_t>(pos - keys.begin());
    const double k = cell(r[c_k]);
    if (std::isfinite(k) && k > 0.0) {
      rate[idx].x.push_back(r[c_x]);
      rate[idx].y.push_back(r[c_k]);
    } else {
      caption.push_back("d=" + r[c_d] + " km, xi=" + r[c_xi] + ", alpha=" + r[c_a] + ": K=" + r[c_k]);
    }
    const double g = cell(r[c_g]);
    if (std::isfinite(g) && g > 0.0) {
      reference[idx].x.push_back(r[c_x]);
      reference[idx].y.push_back(r[c_g]);
    }
  }

  std::ostringstream s;
  s << "#!/usr/bin/env python3\n"
    << "# Secret key rate plot generated by `rate plot`. Data is embedded below.\n"
    << "import os\n\n"
    << "import matplotlib\n"
    << "matplotlib.use(\"Agg\")\n"
    << "import matplotlib.pyplot as plt\n\n"
    << "X_LABEL = " << python_str(versus_alpha ? "alpha" : "distance (km)") << "\n"
    << "IMAGE = " << python_str(image_name) << "\n\n"
    << "SERIES = [\n";
  for (const auto& r : rate) {
    s << "    (" << python_str(r.label) << ", " << python_list(r.x) << ", " << python_list(r.y) << "),\n";
  }
  s << "]\n\nREFERENCE = [\n";
  for (const auto& r : reference) {
    s << "    (" << python_str(r.label) << ", " << python_list(r.x) << ", " << python_list(r.y) << "),\n";
  }
  s << "]\n\n# Rows left out of the log-scale series (K <= 0 or not finite):\n";
  for (const auto& line : caption) s << "#   " << line << '\n';
  s << "CAPTION = [\n";
  for (const auto& line : caption) s << "    " << python_str(line) << ",\n";
  s << "]\n\n"
    << "fig, ax = plt.subplots(figsize=(7, 5))\n"
    << "for label, x, y in SERIES:\n"
    << "    if x:\n"
    << "        ax.semilogy(x, y, \"x-\", label=label)\n"
    << "for label, x, y in REFERENCE:\n"
    << "    if x:\n"
    << "        ax.semilogy(x, y, \"--\", label=label)\n"
    << "ax.set_xlabel(X_LABEL)\n"
    << "ax.set_ylabel(\"secret key rate (bits per pulse)\")\n"
    << "ax.grid(True, which=\"both\", alpha=0.3)\n"
    << "if ax.get_legend_handles_labels()[0]:\n"
    << "    ax.legend(fontsize=8)\n"
    << "if CAPTION:\n"
    << "    text = \"Not shown (K <= 0):\\n\" + \"\\n\".join(CAPTION)\n"
    << "    fig.text(0.01, -0.02, text, fontsize=7, va=\"top\", family=\"monospace\")\n"
    << "fig.savefig(os.path.join(os.path.dirname(os.path.abspath(__file__)), IMAGE), dpi=150, bbox_inches=\"tight\")\n";
  return s.str();
}

std::filesystem::path emit_plot_script(const std::filesystem::path& csv_path,
                                       std::optional<std::filesystem::path> script_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::invalid_argument("plot: cannot open " + csv_path.string());
  const CsvTable table = read_csv(in);
  const auto target = script_path.value_or(csv_path.parent_path() / ("plot_" + csv_path.stem().string() + ".py"));
  const std::string image = csv_path.stem().string() + ".png";
  std::ofstream out(target, std::ios::binary);
  if (!out) throw std::runtime_error("plot: cannot write " + target.string());
  out << plot_script(table, image);
  return target;
}

}  // namespace cvqkd
