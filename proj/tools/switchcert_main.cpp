// Command-line front end: problem ingestion, certificate search, signal
// synthesis, and simulation with CSV output.
//
// Exit codes: 0 certificate found (or simulation completed), 2 no
// certificate within the configured caps, 1 input or usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "switchcert/switchcert.hpp"

namespace fs = std::filesystem;
using namespace switchcert;

namespace {

constexpr int kExitFound = 0;
constexpr int kExitNoCertificate = 2;
constexpr int kExitInputError = 1;

struct CliConfig {
  std::string problem_path;
  std::string signal_path;
  std::string emit_dir = ".";
  std::optional<int> m_max;
  std::optional<int> max_interior;
  std::optional<long> horizon;
  std::optional<int> trials;
  std::optional<uint64_t> seed;
  bool allow_stable = false;
};

ProblemFile load_problem(const CliConfig& cfg) {
  std::ifstream in(cfg.problem_path);
  if (!in) {
    throw std::invalid_argument("cannot open problem file: " + cfg.problem_path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  ProblemFile pf = parse_problem(buf.str());
  if (cfg.m_max) pf.options.m_max = *cfg.m_max;
  if (cfg.max_interior) pf.options.max_interior = *cfg.max_interior;
  if (cfg.horizon) pf.options.horizon = *cfg.horizon;
  if (cfg.trials) pf.options.trials = *cfg.trials;
  if (cfg.seed) pf.options.seed = *cfg.seed;
  if (cfg.allow_stable) pf.options.allow_stable = true;
  if (pf.options.allow_stable) {
    // Re-validate under the relaxed premise; parse_problem already validated
    // with the file's own flag, but the CLI may have just enabled it.
    ValidationReport rep = validate_instance(pf.instance, true);
    if (!rep.ok()) {
      std::string msg = "invalid instance:";
      for (const auto& v : rep.violations) msg += "\n  - " + v;
      throw std::invalid_argument(msg);
    }
  }
  return pf;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

fs::path ensure_emit_dir(const CliConfig& cfg) {
  fs::path dir(cfg.emit_dir);
  fs::create_directories(dir);
  return dir;
}

int run_analyze(const CliConfig& cfg, std::ostream& os) {
  ProblemFile pf = load_problem(cfg);
  os << describe_instance(pf);
  SearchResult res = search_certificate(pf.instance, to_search_options(pf.options));
  if (res.certificate) {
    os << describe_certificate(*res.certificate);
    os << describe_candidates(res);
    return kExitFound;
  }
  os << describe_candidates(res);
  return kExitNoCertificate;
}

int run_synthesize(const CliConfig& cfg, std::ostream& os) {
  ProblemFile pf = load_problem(cfg);
  os << describe_instance(pf);
  SearchResult res = search_certificate(pf.instance, to_search_options(pf.options));
  if (!res.certificate) {
    os << describe_candidates(res);
    return kExitNoCertificate;
  }
  os << describe_certificate(*res.certificate);
  SwitchingSignal sig = synthesize_signal(*res.certificate, pf.options.horizon);
  AdmissibilityReport adm = check_admissible(sig, pf.instance.graph, pf.instance.dwell);
  os << describe_signal(sig, adm);

  fs::path dir = ensure_emit_dir(cfg);
  {
    std::ostringstream csv;
    write_signal_csv(csv, sig);
    write_file(dir / "signal.csv", csv.str());
  }
  {
    std::ostringstream csv;
    write_blocks_csv(csv, sig);
    write_file(dir / "blocks.csv", csv.str());
  }
  os << "wrote " << (dir / "signal.csv").string() << "\n";
  os << "wrote " << (dir / "blocks.csv").string() << "\n";
  return kExitFound;
}

void emit_simulation_csvs(const ProblemFile& pf, const SwitchingSignal& sig,
                          const fs::path& dir, std::ostream& os) {
  auto norms = prefix_norms(pf.instance.family, sig, sig.horizon);
  {
    std::ostringstream csv;
    write_prefix_norms_csv(csv, norms);
    write_file(dir / "prefix_norms.csv", csv.str());
  }
  auto starts = make_initial_states(pf.instance.family.dimension,
                                    pf.options.trials, pf.options.seed);
  for (size_t k = 0; k < starts.size(); ++k) {
    Trajectory traj = simulate(pf.instance.family, sig, starts[k]);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_file(dir / ("trajectory_" + std::to_string(k + 1) + ".csv"), csv.str());
  }
  os << "wrote " << (dir / "prefix_norms.csv").string() << " and "
     << starts.size() << " trajectory files\n";
}

int run_simulate(const CliConfig& cfg, std::ostream& os) {
  ProblemFile pf = load_problem(cfg);
  std::ifstream in(cfg.signal_path);
  if (!in) {
    throw std::invalid_argument("cannot open signal file: " + cfg.signal_path);
  }
  SwitchingSignal sig = read_blocks_csv(in);
  os << describe_instance(pf);
  AdmissibilityReport adm = check_admissible(sig, pf.instance.graph, pf.instance.dwell);
  os << describe_signal(sig, adm);

  fs::path dir = ensure_emit_dir(cfg);
  emit_simulation_csvs(pf, sig, dir, os);

  // Without a certificate the decay rate is the empirical fit.
  auto norms = prefix_norms(pf.instance.family, sig, sig.horizon);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long count = 0;
  for (const auto& [t, n] : norms) {
    if (n <= 0.0) continue;
    double x = static_cast<double>(t), y = std::log(n);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++count;
  }
  double fitted = 0.0;
  if (count >= 2) {
    double denom = count * sxx - sx * sx;
    fitted = denom != 0.0 ? -(count * sxy - sx * sy) / denom : 0.0;
  }
  os << "== empirical decay ==\n";
  os << "lambda_hat (fitted): " << fmt7(fitted) << "\n";
  return kExitFound;
}

int run_full(const CliConfig& cfg, std::ostream& os) {
  ProblemFile pf = load_problem(cfg);
  os << describe_instance(pf);
  SearchResult res = search_certificate(pf.instance, to_search_options(pf.options));
  if (!res.certificate) {
    os << describe_candidates(res);
    return kExitNoCertificate;
  }
  const Certificate& cert = *res.certificate;
  os << describe_certificate(cert);

  SwitchingSignal sig = synthesize_signal(cert, pf.options.horizon);
  AdmissibilityReport adm = check_admissible(sig, pf.instance.graph, pf.instance.dwell);
  os << describe_signal(sig, adm);

  fs::path dir = ensure_emit_dir(cfg);
  {
    std::ostringstream csv;
    write_signal_csv(csv, sig);
    write_file(dir / "signal.csv", csv.str());
  }
  {
    std::ostringstream csv;
    write_blocks_csv(csv, sig);
    write_file(dir / "blocks.csv", csv.str());
  }
  emit_simulation_csvs(pf, sig, dir, os);

  DecayEstimate est = verify_ges(pf.instance.family, sig, cert.lambda,
                                 sig.horizon, pf.options.trials, pf.options.seed);
  os << describe_verification(est, cert.lambda, sig.horizon, pf.options.trials);
  return kExitFound;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stabilizability certificates and switching-signal synthesis "
               "for discrete-time switched linear systems"};
  app.require_subcommand(1);

  CliConfig cfg;
  int m_max = 0, max_interior = 0, trials = 0;
  long horizon = 0;
  uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("problem", cfg.problem_path, "problem file (JSON)")
        ->required();
    sub->add_option("--m-max", m_max, "largest power tried for the decay certificate");
    sub->add_option("--max-interior", max_interior,
                    "largest interior vertex count per path (default N-2)");
    sub->add_option("--horizon", horizon, "synthesis/simulation horizon in steps");
    sub->add_option("--trials", trials, "number of random initial states");
    sub->add_option("--seed", seed, "seed for the initial-state draws");
    sub->add_flag("--allow-stable", cfg.allow_stable,
                  "permit Schur-stable subsystems (single-subsystem combinations)");
    sub->add_option("--emit-csv", cfg.emit_dir, "directory for CSV outputs");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "certificate search only");
  CLI::App* synthesize =
      app.add_subcommand("synthesize", "search and emit the switching signal");
  CLI::App* simulate =
      app.add_subcommand("simulate", "simulate trajectories under a given signal");
  CLI::App* full = app.add_subcommand("full", "search, synthesize, simulate, verify");
  for (CLI::App* sub : {analyze, synthesize, simulate, full}) add_common(sub);
  simulate->add_option("--signal", cfg.signal_path, "blocks CSV (index,dwell)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  auto grab = [&](CLI::App* sub) {
    if (sub->count("--m-max")) cfg.m_max = m_max;
    if (sub->count("--max-interior")) cfg.max_interior = max_interior;
    if (sub->count("--horizon")) cfg.horizon = horizon;
    if (sub->count("--trials")) cfg.trials = trials;
    if (sub->count("--seed")) cfg.seed = seed;
  };

  try {
    if (app.got_subcommand(analyze)) {
      grab(analyze);
      return run_analyze(cfg, std::cout);
    }
    if (app.got_subcommand(synthesize)) {
      grab(synthesize);
      return run_synthesize(cfg, std::cout);
    }
    if (app.got_subcommand(simulate)) {
      grab(simulate);
      return run_simulate(cfg, std::cout);
    }
    grab(full);
    return run_full(cfg, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
