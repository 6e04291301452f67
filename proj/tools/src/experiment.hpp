#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <mmdual/harness.hpp>
#include <mmdual/io.hpp>
#include <mmdual/tcl.hpp>

namespace mmdual::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kInfeasible = 3,
  kSolverFailure = 4,
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct BuiltinTiny {};
struct TclSource {
  std::size_t agents = 20;
  Index horizon = 60;
  std::uint64_t seed = 0;
  ScenarioTemplate tmpl;
};
struct FileSource {
  std::filesystem::path path;
};
using ProblemSource = std::variant<BuiltinTiny, TclSource, FileSource>;

struct ErdosRenyiSource {
  double p = 0.2;
  std::uint64_t seed = 0;
  int max_tries = 1000;
};
struct EdgeListSource {
  std::filesystem::path path;
};
struct CompleteSource {};
using GraphSource = std::variant<ErdosRenyiSource, EdgeListSource, CompleteSource>;

struct OracleConfig {
  bool enabled = true;
  std::optional<std::filesystem::path> cache;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  ProblemSource problem = BuiltinTiny{};
  GraphSource graph = CompleteSource{};
  RunConfig run;
  std::filesystem::path output_dir = "out";
  OracleConfig oracle;
};

struct Overrides {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> iterations;
  std::optional<std::uint64_t> seed;
};

/// Parses a config document. Sub-seeds left out default to the top-level
/// seed; relative input paths are taken relative to base_dir. Throws
/// ConfigError.
ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// A seed override replaces every seed in the document.
void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

/// Every field with its effective value; parse_config(resolved(c)) == c.
json resolved(const ExperimentConfig& cfg);

/// Two agents, two slots, rates 1 and 2, X = {x in [0,1]^2 : x1 + x2 >= 1}.
MinMaxProblem builtin_tiny();

MinMaxProblem build_problem(const ExperimentConfig& cfg);
/// Throws ConfigError when the node count differs from n_agents.
Graph build_graph(const ExperimentConfig& cfg, std::size_t n_agents);

struct ExperimentOutput {
  RunResult result;
  std::optional<OracleResult> oracle;
  std::string problem_hash;
};

/// validate -> oracle -> run, then writes trace.csv, report.json,
/// resolved_config.json, timing.json and (with the oracle) oracle.json.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Maps an exception thrown by the steps above to an exit status.
int exit_code_for(const std::exception& e);

}  // namespace mmdual::cli
