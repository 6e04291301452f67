#include "mmdual/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace mmdual {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double relative_error(double sum_rho, double oracle) { return std::abs(sum_rho - oracle) / std::max(1.0, std::abs(oracle)); }

struct AgentError {
  std::size_t agent;
  std::exception_ptr error;
};

// Runs fn(i) for every agent; returns the lowest-index failure, if any.
template <class Fn>
std::optional<AgentError> for_each_agent(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto body = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t w = std::min<std::size_t>(std::max(1u, workers), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < w; ++k) {
      pool.emplace_back([&, k] {
        for (std::size_t i = k; i < n; i += w) body(i);
      });
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) return AgentError{i, errors[i]};
  }
  return std::nullopt;
}

}  // namespace

void RunConfig::validate() const {
  if (iterations < 1) throw InvalidInput("run config: iterations must be >= 1");
  if (record_every < 1) throw InvalidInput("run config: record_every must be >= 1");
  if (!(tol > 0.0)) throw InvalidInput("run config: tol must be positive");
  if (early_stop.consecutive < 1) throw InvalidInput("run config: early_stop.consecutive must be >= 1");
  if (gamma(schedule, 0) < 0.0) throw InvalidInput("run config: step size must be nonnegative");
}

RunResult run(const MinMaxProblem& problem, const Graph& g, const RunConfig& cfg, std::optional<double> oracle_value) {
  cfg.validate();
  const ValidationReport rep = validate(problem);
  if (!rep.ok) throw InvalidInput("run: " + rep.issues.front());
  const std::size_t N = problem.agents.size();
  const Index S = problem.S;
  if (g.num_nodes() != N) {
    throw InvalidInput("run: graph has " + std::to_string(g.num_nodes()) + " nodes but problem has " +
                       std::to_string(N) + " agents");
  }
  if (!is_connected(g)) throw InvalidInput("run: graph is not connected");

  const auto start = std::chrono::steady_clock::now();
  LambdaInit init = cfg.lambda_init;
  if (auto* r = std::get_if<SeededRandomInit>(&init)) r->seed = cfg.seed;

  std::vector<AgentState> states;
  std::vector<LocalSolver> solvers;
  for (std::size_t i = 0; i < N; ++i) {
    states.push_back(init_agent(i, g, problem.agents[i], init));
    solvers.emplace_back(problem.agents[i], cfg.tol);
  }

  RunResult out;
  RunTrace& trace = out.trace;
  trace.num_agents = N;
  trace.S = S;
  trace.has_oracle = oracle_value.has_value();
  InvariantSummary& inv = trace.invariants;

  std::vector<std::map<NodeId, VectorXd>> inbox(N);
  int streak = 0;
  bool stopped = false;
  std::uint64_t t = 0;
  double sum_rho = 0.0;
  VectorXd profile;

  while (t < cfg.iterations && !stopped) {
    for (std::size_t i = 0; i < N; ++i) {
      inbox[i].clear();
      for (NodeId j : g.neighbors(i)) inbox[i].emplace(j, states[j].lambda_out.at(i));
    }
    VectorXd imbalance = VectorXd::Zero(S);
    for (std::size_t i = 0; i < N; ++i) {
      for (const auto& [j, lam] : states[i].lambda_out) imbalance += lam - inbox[i].at(j);
    }
    inv.max_lambda_imbalance = std::max(inv.max_lambda_imbalance, S > 0 ? imbalance.cwiseAbs().maxCoeff() : 0.0);

    if (auto err = for_each_agent(N, cfg.workers, [&](std::size_t i) { round_phase1(states[i], inbox[i], solvers[i]); })) {
      std::string what = "unknown error";
      try {
        std::rethrow_exception(err->error);
      } catch (const std::exception& e) {
        what = e.what();
      }
      throw RunFailure(err->agent, t,
                       "agent " + std::to_string(err->agent) + " failed in round " + std::to_string(t) + ": " + what);
    }

    sum_rho = 0.0;
    std::vector<VectorXd> xs(N);
    for (std::size_t i = 0; i < N; ++i) {
      const AgentState& st = states[i];
      sum_rho += st.rho;
      xs[i] = st.x;
      inv.max_simplex_error = std::max(inv.max_simplex_error, std::abs(st.mu.sum() - 1.0));
      inv.min_mu = std::min(inv.min_mu, st.mu.minCoeff());
      inv.max_local_kkt = std::max(inv.max_local_kkt, st.kkt.max());
    }
    profile = aggregate_profile(problem, xs);
    const double P_t = profile.maxCoeff();
    const double max_violation = P_t - sum_rho;
    inv.max_violation = std::max(inv.max_violation, max_violation);
    inv.max_upper_gap = std::max(inv.max_upper_gap, P_t - sum_rho);
    if (oracle_value) inv.max_lower_gap = std::max(inv.max_lower_gap, *oracle_value - P_t);

    for (std::size_t i = 0; i < N; ++i) {
      inbox[i].clear();
      for (NodeId j : g.neighbors(i)) inbox[i].emplace(j, states[j].mu);
    }
    const double step = gamma(cfg.schedule, t);
    for (std::size_t i = 0; i < N; ++i) round_phase2(states[i], inbox[i], step);
    ++t;
    ++inv.rounds;

    const bool last = t == cfg.iterations;
    if (t == 1 || t % cfg.record_every == 0 || last) {
      TraceRow row;
      row.t = t;
      row.sum_rho = sum_rho;
      row.P_t = P_t;
      row.cost_error = oracle_value ? std::abs(sum_rho - *oracle_value) : kNaN;
      row.max_violation = max_violation;
      if (cfg.record_agent_rho) {
        for (const auto& st : states) row.rho.push_back(st.rho);
      }
      if (cfg.record_slot_violations) {
        for (Index s = 0; s < S; ++s) row.violations.push_back(profile(s) - sum_rho);
      }
      trace.rows.push_back(std::move(row));
      if (cfg.early_stop.enabled && oracle_value) {
        streak = relative_error(sum_rho, *oracle_value) <= cfg.early_stop.target ? streak + 1 : 0;
        if (streak >= cfg.early_stop.consecutive) stopped = true;
      }
    }
  }

  FinalReport& rep_out = out.report;
  for (const auto& st : states) {
    rep_out.x.push_back(st.x);
    rep_out.rho.push_back(st.rho);
  }
  rep_out.profile = profile;
  rep_out.sum_rho = sum_rho;
  rep_out.P_t = profile.maxCoeff();
  rep_out.iterations = t;
  rep_out.early_stopped = stopped;
  rep_out.oracle_value = oracle_value;
  rep_out.relative_error = oracle_value ? relative_error(sum_rho, *oracle_value) : kNaN;
  rep_out.converged = oracle_value && rep_out.relative_error <= cfg.convergence_target;
  rep_out.invariants = inv;
  rep_out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RateFit rate_fit(const std::vector<TraceRow>& rows, double tail_fraction, double zero_floor) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidInput("rate_fit: tail fraction must be in (0, 1]");
  std::vector<double> lt, le;
  double env = lp::kInf;
  for (const auto& r : rows) {
    const double floor = zero_floor * std::max(1.0, std::abs(r.sum_rho));
    if (!(r.cost_error > floor) || !std::isfinite(r.cost_error) || r.t < 1) continue;
    env = std::min(env, r.cost_error);
    lt.push_back(std::log(static_cast<double>(r.t)));
    le.push_back(std::log(env));
  }
  if (lt.size() < 50) {
    throw InsufficientData("rate_fit: need at least 50 rows with positive cost error, got " + std::to_string(lt.size()));
  }
  const std::size_t k = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(tail_fraction * lt.size())));
  const std::size_t first = lt.size() - std::min(k, lt.size());
  const auto m = static_cast<Index>(lt.size() - first);
  Eigen::Map<const VectorXd> x(lt.data() + first, m), y(le.data() + first, m);
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  if (!(sxx > 0.0)) throw InsufficientData("rate_fit: tail spans a single t");
  RateFit fit;
  fit.exponent = ((x.array() - mx) * (y.array() - my)).sum() / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.points = static_cast<std::size_t>(m);
  return fit;
}

}  // namespace mmdual
