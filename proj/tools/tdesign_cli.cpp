// tdesign: construct and certify unitary designs, run t-RB simulations, fit
// decay curves. Exit codes: 0 success/pass, 1 verified failure, 2 usage or
// input error, 3 construction failure, 4 flagged fit under --strict.

#include "tdesign/channel_io.hpp"
#include "tdesign/design_io.hpp"
#include "tdesign/designs.hpp"
#include "tdesign/fit.hpp"
#include "tdesign/irreps.hpp"
#include "tdesign/rb.hpp"
#include "tdesign/zonal.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#ifdef TDESIGN_HAVE_OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace tdesign;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kConstruction = 3, kStrictFit = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// FNV-1a over the canonical JSON dump.
std::string digest(const json& j) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

class Manifest {
 public:
  Manifest(int argc, char** argv) : start_(std::chrono::steady_clock::now()) {
    for (int i = 0; i < argc; ++i) args_.push_back(argv[i]);
  }

  void set_config(const json& config, std::uint64_t seed) {
    digest_ = digest(config);
    seed_ = seed;
  }
  const std::string& config_digest() const { return digest_; }
  void add_output(const fs::path& p) { outputs_.push_back(p.string()); }

  void write(const fs::path& path) const {
    json j;
    j["command_line"] = args_;
    j["config_digest"] = digest_;
    j["seed"] = seed_;
    j["version"] = kVersion;
    j["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    j["outputs"] = outputs_;
    write_json(path, j);
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> args_;
  std::vector<std::string> outputs_;
  std::string digest_;
  std::uint64_t seed_ = 0;
};

fs::path manifest_path_for(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

// ---- design ----------------------------------------------------------------

designs::AngleTable angle_table_from_json(const json& j) {
  designs::AngleTable table;
  for (const auto& entry : j) table[entry.at("label").get<std::vector<int>>()] = entry.at("thetas").get<std::vector<double>>();
  return table;
}

std::vector<designs::AngleTable> circuit_angles(int n_plus_1, int t, const std::string& angles_path) {
  std::vector<designs::AngleTable> tables;
  if (!angles_path.empty()) {
    for (const auto& level : read_json(angles_path)) tables.push_back(angle_table_from_json(level));
    return tables;
  }
  // Without a file only rank-one labels can be solved here.
  for (int k = 0; k + 2 <= n_plus_1; ++k) {
    const int d = 1 << (k + 2);
    designs::AngleTable table;
    for (const auto& label : zonal::enumerate_sph_labels(d / 2, d, t)) {
      if (label.positive_part.size() > 1)
        throw ConstructionError("label of length > 1 needs angles supplied with --angles");
      table[label.positive_part] = zonal::find_angles(label).thetas;
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

designs::UnitaryEnsemble build_design(const std::string& type, int d, int t, int q, std::int64_t cap,
                                      const std::string& angles) {
  if (type == "w1") return designs::w1(t);
  if (type == "qudit") return designs::build_qudit_design(d, t, cap);
  if (type == "icosahedral") return designs::icosahedral_group();
  if (type == "clifford") return designs::clifford_group(q);
  if (type == "interleaved-4design") return designs::interleaved_4design();
  if (type == "qubit-circuit") {
    const auto desc = designs::build_qubit_circuit_descriptor(q, t, circuit_angles(q, t, angles));
    return designs::descriptor_ensemble(desc);
  }
  throw UsageError("unknown design type '" + type + "'");
}

json report_to_json(const designs::DesignReport& r) {
  json res = json::array();
  for (const auto& m : r.residuals)
    res.push_back({{"r", m.r}, {"s", m.s}, {"residual", m.residual}, {"std_error", m.std_error}, {"method", m.method}});
  json j{{"t_checked", r.t_checked}, {"strong", r.strong}, {"residuals", res},
         {"haar_frame_potential", r.haar_frame_potential}, {"tolerance", r.tolerance}, {"pass", r.pass}};
  j["frame_potential"] = r.frame_potential ? json(*r.frame_potential) : json(nullptr);
  return j;
}

// ---- rb ---------------------------------------------------------------------

void write_curve_csv(const fs::path& path, const fit::DecayCurve& c, const std::string& config_digest) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << "# config_digest=" << config_digest << '\n';
  out << "m,V,stderr,n_sequences,n_shots\n" << std::setprecision(17);
  for (const auto& p : c.points)
    out << p.m << ',' << p.value << ',' << p.std_error << ',' << p.n_sequences << ',' << p.n_shots << '\n';
}

fit::DecayCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  fit::DecayCurve c;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'm') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 2) throw UsageError(path + ": expected at least columns m,V");
    fit::CurvePoint p;
    try {
      p.m = std::stoi(cells[0]);
      p.value = std::stod(cells[1]);
      if (cells.size() > 2) p.std_error = std::stod(cells[2]);
      if (cells.size() > 3) p.n_sequences = std::stol(cells[3]);
      if (cells.size() > 4) p.n_shots = std::stol(cells[4]);
    } catch (const std::exception&) {
      throw UsageError(path + ": malformed row '" + line + "'");
    }
    c.points.push_back(p);
  }
  c.validate();
  return c;
}

json fit_to_json(const fit::FitResult& f) {
  json j;
  j["amplitudes"] = std::vector<double>(f.amplitudes.data(), f.amplitudes.data() + f.amplitudes.size());
  j["rates"] = std::vector<double>(f.rates.data(), f.rates.data() + f.rates.size());
  std::vector<double> se;
  for (Eigen::Index i = 0; i < f.rates.size(); ++i) se.push_back(f.rate_std_error(static_cast<int>(i)));
  j["rate_std_errors"] = se;
  j["pinned"] = f.pinned;
  j["residual"] = f.residual_norm;
  j["evaluations"] = f.evaluations;
  j["flags"] = f.flags;
  return j;
}

struct Setting {
  std::string name;
  int t_order;
  ComplexMatrix o_ini;
  ComplexMatrix o_meas;
};

std::vector<Setting> settings_for(int q) {
  if (q == 1) {
    ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    return {{"v1", 1, pauli_z(), p0}, {"v2", 2, pauli_z(), p0}};
  }
  return {{"v1", 1, rb::op_zz(), rb::op_p00()},
          {"zz_00", 2, rb::op_zz(), rb::op_p00()},
          {"zz_zz", 2, rb::op_zz(), rb::op_zz()},
          {"rm_rm", 2, rb::op_rho_minus(), rb::op_rho_minus()}};
}

// Design used for sequence sampling and the strength it is certified at.
std::pair<designs::EnsemblePtr, int> rb_design(const json& cfg, int q) {
  const std::string type = cfg.value("design", q == 1 ? "icosahedral" : "interleaved-4design");
  if (type == "icosahedral") {
    auto e = designs::icosahedral_group();
    designs::VerifyOptions o;
    o.strong = false;
    o.compute_frame_potential = false;
    return {std::make_shared<const designs::UnitaryEnsemble>(e), designs::verify_strong_design(e, 4, o).pass ? 4 : 0};
  }
  if (type == "interleaved-4design") {
    auto e = designs::interleaved_4design();
    designs::FramePotentialOptions fo;
    fo.mode = designs::FrameMode::InterleavedReduced;
    const double fp = designs::frame_potential(e, 4, fo).value;
    return {std::make_shared<const designs::UnitaryEnsemble>(e), std::abs(fp - 24.0) < 1e-3 ? 4 : 0};
  }
  if (type == "clifford") {
    // Clifford groups are 3-designs; not enough for t = 2.
    return {std::make_shared<const designs::UnitaryEnsemble>(designs::clifford_group(q)), 3};
  }
  throw UsageError("rb config: design must be icosahedral, interleaved-4design or clifford");
}

json metric_set_json(const channels::MetricSet& m) { return channels::metrics_to_json(m); }

int cmd_rb(const std::string& config_path, const std::string& mode, std::optional<long> sequences,
           std::optional<long> shots, std::optional<std::uint64_t> seed, const fs::path& out_dir, bool strict,
           int argc, char** argv) {
  json cfg = read_json(config_path);
  if (mode != "exact" && mode != "mc") throw UsageError("--mode must be exact or mc");
  if (sequences) cfg["sequences"] = *sequences;
  if (shots) cfg["shots"] = *shots;
  if (seed) cfg["seed"] = *seed;
  cfg["mode"] = mode;

  const int q = cfg.value("qubits", 1);
  if (q != 1 && q != 2) throw UsageError("rb config: qubits must be 1 or 2");
  if (!cfg.contains("noise")) throw UsageError("rb config: missing 'noise'");
  channels::PTM noise;
  try {
    noise = channels::noise_from_json(cfg.at("noise"));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (noise.q != q) throw UsageError("rb config: noise qubit count differs from 'qubits'");
  const auto m_list = cfg.value("sequence_lengths",
                                std::vector<int>{1, 2, 4, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256});
  const std::uint64_t master_seed = cfg.value("seed", std::uint64_t{1});

  Manifest manifest(argc, argv);
  manifest.set_config(cfg, master_seed);
  fs::create_directories(out_dir);

  std::optional<rb::SPAMModel> spam;
  if (cfg.contains("spam")) {
    const auto& s = cfg.at("spam");
    spam = rb::SPAMModel{s.value("eta_prep", 0.0), s.value("eta_meas_01", 0.0), s.value("eta_meas_10", 0.0)};
    spam->validate();
  }

  std::map<std::string, fit::DecayCurve> curves;
  const auto projectors = irreps::projectors_for(q);
  std::pair<designs::EnsemblePtr, int> design;
  if (mode == "mc") design = rb_design(cfg, q);
  std::uint64_t stream = 0;
  for (const auto& s : settings_for(q)) {
    rb::RBConfig c;
    c.noise = noise;
    c.t_order = s.t_order;
    c.sequence_lengths = m_list;
    c.o_ini = s.o_ini;
    c.o_meas = s.o_meas;
    c.spam = spam;
    c.n_sequences = cfg.value("sequences", 1000L);
    c.n_shots = cfg.value("shots", 0L);
    c.seed = master_seed + 7919 * stream++;
    c.design = design.first;
    c.certified_t = design.second;
    c.waive_certification = cfg.value("waive_certification", false);
    if (mode == "exact") {
      const auto o_ini = rb::prepared_o_ini(c), o_meas = rb::measured_o_meas(c);
      curves[s.name] = s.t_order == 1 ? rb::v1_exact(noise, o_ini, o_meas, m_list)
                                      : rb::v2_exact(noise, o_ini, o_meas, m_list, projectors);
    } else {
      curves[s.name] = rb::v_t_monte_carlo(c);
    }
    const auto path = out_dir / ("curve_" + s.name + ".csv");
    write_curve_csv(path, curves[s.name], manifest.config_digest());
    manifest.add_output(path);
  }

  std::optional<double> alpha;
  if (cfg.contains("alpha_norm_sq")) alpha = cfg.at("alpha_norm_sq").get<double>();
  json report;
  report["config_digest"] = manifest.config_digest();
  report["seed"] = master_seed;
  std::vector<std::string> flags;
  json fits = json::array();
  if (q == 1) {
    const auto est = rb::estimate_metrics_1q(curves.at("v1"), curves.at("v2"), alpha);
    report["metrics"] = metric_set_json(est.value);
    report["metrics_std_error"] = metric_set_json(est.std_error);
    for (const auto& f : est.fits) fits.push_back(fit_to_json(f));
    flags = est.flags;
  } else {
    std::optional<double> u_ext;
    if (cfg.contains("u_external")) u_ext = cfg.at("u_external").get<double>();
    const auto est = rb::estimate_metrics_2q({curves.at("v1"), curves.at("zz_00"), curves.at("zz_zz"), curves.at("rm_rm")},
                                             u_ext, alpha);
    report["metrics"] = metric_set_json(est.metrics.value);
    report["metrics_std_error"] = metric_set_json(est.metrics.std_error);
    json rates;
    for (std::size_t i = 0; i < est.rates.value.labels.size(); ++i)
      rates[std::string(irreps::label_name(est.rates.value.labels[i]))] = {
          {"value", est.rates.value.values(static_cast<Eigen::Index>(i))},
          {"std_error", est.rates.std_error(static_cast<Eigen::Index>(i))}};
    report["rates"] = rates;
    for (const auto& f : est.metrics.fits) fits.push_back(fit_to_json(f));
    flags = est.metrics.flags;
  }
  report["fits"] = fits;
  report["flags"] = flags;
  report["theory"] = metric_set_json(channels::metrics(noise));
  const auto report_path = out_dir / "fit.json";
  write_json(report_path, report);
  manifest.add_output(report_path);
  manifest.write(out_dir / "manifest.json");

  // alpha_assumed_zero is informational; every other flag marks a fit problem.
  const bool fit_problem =
      std::any_of(flags.begin(), flags.end(), [](const std::string& f) { return f != "alpha_assumed_zero"; });
  return strict && fit_problem ? kStrictFit : kOk;
}

void set_threads(int threads) {
#ifdef TDESIGN_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unitary t-design construction, certification and t-RB simulation"};
  app.require_subcommand(1);
  int threads = 0;
  if (const char* env = std::getenv("TDESIGN_THREADS")) threads = std::atoi(env);
  app.add_option("--threads", threads, "Worker threads (default: TDESIGN_THREADS or all cores)");

  auto* design = app.add_subcommand("design", "Build, verify or sample designs");
  design->require_subcommand(1);

  std::string type, angles, out, in;
  int d = 2, t = 2, q = 1;
  std::int64_t cap = designs::UnitaryEnsemble::kDefaultExplicitCap;
  auto* build = design->add_subcommand("build", "Construct a design and write it as JSON");
  build->add_option("--type", type, "w1|qudit|icosahedral|clifford|interleaved-4design|qubit-circuit")->required();
  build->add_option("--d", d, "Dimension (qudit)");
  build->add_option("--t", t, "Design strength");
  build->add_option("--q", q, "Qubit count (clifford, qubit-circuit)");
  build->add_option("--cap", cap, "Largest ensemble to expand explicitly");
  build->add_option("--angles", angles, "Angle tables for qubit-circuit levels");
  build->add_option("--out", out, "Output design file")->required();

  bool strong = false;
  double tol = 1e-10;
  std::int64_t mc_samples = 0;
  std::uint64_t seed = 1;
  std::optional<int> verify_t;
  auto* verify = design->add_subcommand("verify", "Check design moments against Haar");
  verify->add_option("--in", in, "Design file")->required();
  verify->add_option("--t", verify_t, "Strength to check (default: the file's t)");
  verify->add_flag("--strong", strong, "Check all moments r, s <= t instead of r = s = t");
  verify->add_option("--tol", tol, "Residual tolerance");
  verify->add_option("--mc-samples", mc_samples, "Samples for non-explicit ensembles");
  verify->add_option("--seed", seed, "Seed for Monte Carlo checks");
  verify->add_option("--out", out, "Report file (default: stdout)");

  long count = 10;
  auto* sample = design->add_subcommand("sample", "Draw elements from a design");
  sample->add_option("--in", in, "Design file")->required();
  sample->add_option("--count", count, "Number of samples");
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--out", out, "Output file")->required();

  std::string config, mode = "exact", out_dir = "rb_out";
  std::optional<long> sequences, shots;
  std::optional<std::uint64_t> rb_seed;
  bool strict = false;
  auto* rbc = app.add_subcommand("rb", "Run the t-RB pipeline and estimate noise metrics");
  rbc->add_option("--config", config, "RB config JSON")->required();
  rbc->add_option("--mode", mode, "exact|mc");
  rbc->add_option("--sequences", sequences, "Sequences per length (mc)");
  rbc->add_option("--shots", shots, "Shots per sequence, 0 for exact expectations (mc)");
  rbc->add_option("--seed", rb_seed, "Master seed");
  rbc->add_option("--out-dir", out_dir, "Output directory");
  rbc->add_flag("--strict", strict, "Exit with code 4 when a fit is flagged");

  std::string noise_path;
  auto* met = app.add_subcommand("metrics", "Noise metrics of a channel");
  met->add_option("--noise", noise_path, "Noise config JSON")->required();
  met->add_option("--out", out, "Metrics file (default: stdout)");
  std::string ptm_out;
  met->add_option("--ptm-csv", ptm_out, "Also write the PTM as CSV");

  std::string csv;
  int terms = 1;
  std::vector<double> known;
  auto* fitc = app.add_subcommand("fit", "Fit a decay curve CSV");
  fitc->add_option("--csv", csv, "Curve CSV (m,V[,stderr,...])")->required();
  fitc->add_option("--terms", terms, "Free exponential terms")->check(CLI::Range(1, 3));
  fitc->add_option("--known", known, "Pinned rates")->delimiter(',');
  fitc->add_option("--out", out, "Fit report (default: stdout)");
  fitc->add_flag("--strict", strict, "Exit with code 4 when the fit is flagged");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  set_threads(threads);

  try {
    if (build->parsed()) {
      designs::UnitaryEnsemble e = designs::w1(1);
      try {
        e = build_design(type, d, t, q, cap, angles);
      } catch (const UsageError&) {
        throw;
      } catch (const std::exception& ex) {
        throw ConstructionError(ex.what());
      }
      designs::save_design(out, e, t);
      Manifest m(argc, argv);
      m.set_config(json{{"type", type}, {"d", d}, {"t", t}, {"q", q}, {"cap", cap}, {"angles", angles}}, 0);
      m.add_output(out);
      m.write(manifest_path_for(out));
      std::cout << "wrote " << out << " (" << designs::kind_name(e.kind()) << ", projected size " << e.projected_size()
                << ")\n";
      return kOk;
    }
    if (verify->parsed()) {
      designs::LoadedDesign loaded = [&] {
        try {
          return designs::load_design(in);
        } catch (const std::exception& ex) {
          throw UsageError(ex.what());
        }
      }();
      designs::VerifyOptions o;
      o.tol = tol;
      o.strong = strong;
      o.seed = seed;
      if (mc_samples > 0) o.mc_samples = mc_samples;
      const auto report = designs::verify_strong_design(loaded.ensemble, verify_t.value_or(loaded.t), o);
      const json j = report_to_json(report);
      if (out.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        write_json(out, j);
        Manifest m(argc, argv);
        m.set_config(json{{"in", in}, {"t", report.t_checked}, {"strong", strong}, {"tol", tol}}, seed);
        m.add_output(out);
        m.write(manifest_path_for(out));
      }
      return report.pass ? kOk : kFail;
    }
    if (sample->parsed()) {
      const auto loaded = designs::load_design(in);
      std::mt19937_64 rng(seed);
      json j{{"d", loaded.ensemble.d()}, {"seed", seed}, {"samples", json::array()}};
      for (long i = 0; i < count; ++i) j["samples"].push_back(designs::matrix_to_json(loaded.ensemble.sample(rng)));
      write_json(out, j);
      Manifest m(argc, argv);
      m.set_config(json{{"in", in}, {"count", count}}, seed);
      m.add_output(out);
      m.write(manifest_path_for(out));
      return kOk;
    }
    if (rbc->parsed()) return cmd_rb(config, mode, sequences, shots, rb_seed, out_dir, strict, argc, argv);
    if (met->parsed()) {
      const json cfg = read_json(noise_path);
      channels::PTM l;
      try {
        l = channels::noise_from_json(cfg);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      json j = channels::metrics_to_json(channels::metrics(l));
      const auto alpha = l.alpha();
      j["alpha"] = std::vector<double>(alpha.data(), alpha.data() + alpha.size());
      j["min_choi_eigenvalue"] = channels::min_choi_eigenvalue(l);
      if (!ptm_out.empty()) channels::write_ptm_csv(ptm_out, l);
      if (out.empty()) {
        std::cout << std::setprecision(17) << j.dump(2) << '\n';
      } else {
        write_json(out, j);
        Manifest m(argc, argv);
        m.set_config(cfg, 0);
        m.add_output(out);
        if (!ptm_out.empty()) m.add_output(ptm_out);
        m.write(manifest_path_for(out));
      }
      return kOk;
    }
    if (fitc->parsed()) {
      const auto curve = read_curve_csv(csv);
      fit::FitResult r;
      try {
        r = fit::fit_exponentials(curve, terms, known);
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      const json j = fit_to_json(r);
      if (out.empty()) std::cout << j.dump(2) << '\n';
      else write_json(out, j);
      return strict && r.flagged() ? kStrictFit : kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConstructionError& e) {
    std::cerr << "construction failed: " << e.what() << '\n';
    return kConstruction;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
