// SPDX-License-Identifier: Apache-2.0
//
// Experiment runner: bspd <subcommand> [--config PATH] [--seed U64]
//   [--trials N] [--out PATH] [--schemes a,b,c] [--threads N]

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include "bspd/bspd.hpp"

namespace {

using namespace bspd;
using namespace bspd::harness;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out;
  std::string svg;
  std::string schemes;
  std::optional<unsigned> threads;
};

ExperimentSpec build_spec(ExperimentKind kind, const Options& o) {
  ExperimentSpec spec = o.config.empty() ? parse_config("", kind) : load_config(o.config, kind);
  if (o.seed) spec.base_seed = *o.seed;
  if (o.trials) {
    if (*o.trials == 0) throw InvalidParameter("--trials: must be >= 1");
    spec.trials = *o.trials;
  }
  if (o.threads) spec.threads = *o.threads;
  if (!o.schemes.empty()) spec.schemes = parse_scheme_list(o.schemes);
  if (!o.out.empty()) spec.output = o.out;
  spec.validate();
  return spec;
}

int run_sweep(ExperimentKind kind, const Options& o) {
  const ExperimentSpec spec = build_spec(kind, o);
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_experiment(spec);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (spec.output.empty()) {
    write_csv(rows, std::cout);
  } else {
    emit_csv(rows, spec.output);
    std::cerr << "wrote " << rows.size() << " rows to " << spec.output << '\n';
  }
  if (!o.svg.empty()) emit_svg(rows, o.svg);
  std::cerr << to_string(kind) << ": " << spec.effective_trials() << " trials/point, " << secs << " s\n";
  return 0;
}

int run_validate(const Options& o) {
  const ExperimentSpec spec = build_spec(ExperimentKind::validate, o);
  const auto results = run_validation(spec);
  std::ostringstream report;
  bool all = true;
  for (const auto& r : results) {
    report << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.seconds << " s): " << r.detail << '\n';
    all = all && r.passed;
  }
  std::cout << report.str();
  if (!spec.output.empty()) {
    std::ofstream out(spec.output, std::ios::trunc);
    if (!out) throw std::runtime_error("validate: cannot open '" + spec.output + "' for writing");
    out << report.str();
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beam split pattern detection channel estimation experiments"};
  app.require_subcommand(1);
  Options o;

  struct Sub {
    const char* name;
    ExperimentKind kind;
    const char* help;
  };
  const Sub subs[] = {
      {"sweep-snr", ExperimentKind::snr_sweep, "NMSE against SNR"},
      {"sweep-pilots", ExperimentKind::pilot_sweep, "NMSE against pilot length"},
      {"sweep-bandwidth", ExperimentKind::bandwidth_sweep, "NMSE against bandwidth (GHz)"},
      {"direction-prob", ExperimentKind::direction_prob, "direction detection probability and its lower bound"},
      {"capture-ratio", ExperimentKind::capture_ratio, "window capture ratio against halfwidth"},
      {"validate", ExperimentKind::validate, "run the property suite"},
  };
  std::optional<ExperimentKind> chosen;
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    cmd->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "base seed (u64)");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials per point");
    cmd->add_option("--out", o.out, "output path (CSV; text report for validate)");
    cmd->add_option("--schemes", o.schemes, "comma list of bspd,somp,omp-block,oracle");
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    if (s.kind != ExperimentKind::validate) cmd->add_option("--svg", o.svg, "also write an SVG line chart");
    cmd->callback([&chosen, kind = s.kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (*chosen == ExperimentKind::validate) return run_validate(o);
    return run_sweep(*chosen, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
