#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mmdual/graph.hpp"
#include "mmdual/model.hpp"
#include "mmdual/protocol.hpp"

namespace mmdual {

struct EarlyStop {
  bool enabled = false;
  /// Relative cost error |sum_rho - P*| / max(1, |P*|).
  double target = 1e-3;
  /// Consecutive recorded rows that must meet the target.
  int consecutive = 20;
};

struct RunConfig {
  std::uint64_t iterations = 1000;
  StepSchedule schedule = PowerLaw{};
  /// Seeds SeededRandomInit (its own seed field is replaced by this one).
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::uint64_t record_every = 1;
  LambdaInit lambda_init = ZeroInit{};
  EarlyStop early_stop;
  /// Threshold for FinalReport::converged.
  double convergence_target = 1e-3;
  bool record_agent_rho = false;
  bool record_slot_violations = false;
  /// Threads used for the local solves of one round.
  unsigned workers = 1;

  /// Throws InvalidInput.
  void validate() const;
};

struct TraceRow {
  std::uint64_t t = 0;
  double sum_rho = 0.0;
  double P_t = 0.0;
  /// |sum_rho - P*|; NaN without an oracle value.
  double cost_error = 0.0;
  /// max_s [sum_i g^i_s(x^i_s) - sum_rho].
  double max_violation = 0.0;
  std::vector<double> rho;
  std::vector<double> violations;
};

/// Worst values over every round, recorded or not.
struct InvariantSummary {
  std::uint64_t rounds = 0;
  double max_violation = -lp::kInf;
  double max_simplex_error = 0.0;
  double min_mu = lp::kInf;
  double max_lambda_imbalance = 0.0;
  /// max over rounds of P* - P_t and P_t - sum_rho.
  double max_lower_gap = -lp::kInf;
  double max_upper_gap = -lp::kInf;
  double max_local_kkt = 0.0;
};

struct RunTrace {
  std::size_t num_agents = 0;
  Index S = 0;
  bool has_oracle = false;
  std::vector<TraceRow> rows;
  InvariantSummary invariants;
};

struct FinalReport {
  std::vector<VectorXd> x;
  std::vector<double> rho;
  VectorXd profile;
  double sum_rho = 0.0;
  double P_t = 0.0;
  std::uint64_t iterations = 0;
  bool early_stopped = false;
  std::optional<double> oracle_value;
  /// |sum_rho - P*| / max(1, |P*|); NaN without an oracle value.
  double relative_error = 0.0;
  bool converged = false;
  double wall_time_s = 0.0;
  InvariantSummary invariants;
};

struct RunResult {
  RunTrace trace;
  FinalReport report;
};

class RunFailure : public Error {
 public:
  RunFailure(NodeId agent, std::uint64_t round, const std::string& what)
      : Error(what), agent_(agent), round_(round) {}
  NodeId agent() const { return agent_; }
  std::uint64_t round() const { return round_; }

 private:
  NodeId agent_;
  std::uint64_t round_;
};

/// Drives every agent through cfg.iterations synchronous rounds. Row t holds
/// the state after t rounds; rows are kept for t = 1, every record_every-th
/// round and the last round. Throws InvalidInput on a bad problem/graph pair
/// and RunFailure when a local solve fails.
RunResult run(const MinMaxProblem& problem, const Graph& g, const RunConfig& cfg,
              std::optional<double> oracle_value = std::nullopt);

class InsufficientData : public Error {
 public:
  using Error::Error;
};

struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log(running-min cost_error) against log(t) over
/// the last tail_fraction of the rows with positive error. Errors at or
/// below zero_floor * max(1, |sum_rho|) are round-off and count as zero.
/// Needs >= 50 rows with positive error.
RateFit rate_fit(const std::vector<TraceRow>& rows, double tail_fraction = 0.5, double zero_floor = 1e-12);
inline RateFit rate_fit(const RunTrace& trace, double tail_fraction = 0.5, double zero_floor = 1e-12) {
  return rate_fit(trace.rows, tail_fraction, zero_floor);
}

}  // namespace mmdual
