#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "experiment.hpp"
#include "replay.hpp"

namespace fs = std::filesystem;
using namespace mmdual;
using namespace mmdual::cli;

namespace {

int cmd_run(const fs::path& config, const Overrides& ov, bool quiet) {
  ExperimentConfig cfg = load_config(config);
  apply_overrides(cfg, ov);
  const ExperimentOutput out = run_experiment(cfg);
  if (!quiet) {
    const FinalReport& r = out.result.report;
    std::cerr << "iterations " << r.iterations << "  sum_rho " << format_double(r.sum_rho) << "  P_t "
              << format_double(r.P_t);
    if (out.oracle) std::cerr << "  P* " << format_double(out.oracle->P_star) << "  rel.err " << r.relative_error;
    std::cerr << "  wall " << r.wall_time_s << " s\n"
              << "wrote " << (cfg.output_dir / "trace.csv").string() << ", report.json, resolved_config.json\n";
  }
  return kOk;
}

int cmd_replay(const fs::path& trace, const fs::path& report) {
  const ReplayResult r = replay_check_files(trace, report);
  for (const auto& f : r.failures) std::cout << "FAIL " << f << '\n';
  std::cout << (r.ok ? "ok" : "failed") << ": " << r.rows << " rows checked\n";
  return r.ok ? kOk : kCheckFailed;
}

int cmd_export(const fs::path& config, const fs::path& output, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = load_config(config);
  apply_overrides(cfg, Overrides{.seed = seed});
  const MinMaxProblem p = build_problem(cfg);
  write_problem_file(output.string(), p);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed min-max optimization by dual decomposition"};
  app.require_subcommand(1);

  fs::path config;
  std::string output_dir;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run the oracle and the distributed algorithm on a config");
  run->add_option("--config", config, "Experiment config (JSON)")->required();
  auto* out_opt = run->add_option("--output-dir", output_dir, "Override output_dir");
  auto* it_opt = run->add_option("--iterations", iterations, "Override run.iterations");
  auto* seed_opt = run->add_option("--seed", seed, "Override every seed in the config");
  run->add_flag("--quiet", quiet, "No progress output");

  fs::path trace, report;
  auto* replay = app.add_subcommand("replay-check", "Re-verify trace invariants from output files");
  replay->add_option("--trace", trace, "trace.csv")->required();
  replay->add_option("--report", report, "report.json")->required();

  fs::path export_out;
  std::uint64_t export_seed = 0;
  auto* exp = app.add_subcommand("export-problem", "Write the configured problem as JSON");
  exp->add_option("--config", config, "Experiment config (JSON)")->required();
  exp->add_option("--output", export_out, "Problem JSON path")->required();
  auto* export_seed_opt = exp->add_option("--seed", export_seed, "Override every seed in the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      Overrides ov;
      if (*out_opt) ov.output_dir = output_dir;
      if (*it_opt) ov.iterations = iterations;
      if (*seed_opt) ov.seed = seed;
      return cmd_run(config, ov, quiet);
    }
    if (*replay) return cmd_replay(trace, report);
    return cmd_export(config, export_out, *export_seed_opt ? std::optional(export_seed) : std::nullopt);
  } catch (const std::exception& e) {
    std::cerr << "mmdual: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
