#include <gtest/gtest.h>

#include <cmath>

#include <mmdual/harness.hpp>
#include <mmdual/reference.hpp>
#include <mmdual/tcl.hpp>

#include "oracles/instances.hpp"

using namespace mmdual;

namespace {

void expect_invariants(const RunResult& r, bool zero_init) {
  const auto& inv = r.trace.invariants;
  EXPECT_LE(inv.max_violation, 1e-8);
  EXPECT_LE(inv.max_simplex_error, 1e-7);
  EXPECT_GE(inv.min_mu, -1e-9);
  if (zero_init) {
    EXPECT_LE(inv.max_lambda_imbalance, 1e-9);
    EXPECT_LE(inv.max_upper_gap, 1e-8);
    if (r.trace.has_oracle) EXPECT_LE(inv.max_lower_gap, 1e-7);
  }
  for (const auto& row : r.trace.rows) {
    EXPECT_LE(row.max_violation, 1e-8);
    EXPECT_LE(row.P_t, row.sum_rho + 1e-8);
  }
}

}  // namespace

TEST(Run, SingleAgent) {
  MinMaxProblem p;
  p.S = 2;
  p.agents = {oracle::tiny_agent(3.0)};
  RunConfig cfg;
  cfg.iterations = 5;
  const auto r = run(p, Graph(1), cfg, 1.5);
  ASSERT_EQ(r.trace.rows.size(), 5u);
  for (const auto& row : r.trace.rows) EXPECT_NEAR(row.sum_rho, 1.5, 1e-12);
  EXPECT_TRUE(r.report.converged);
}

TEST(Run, TinyConverges) {
  const auto p = oracle::tiny_problem();
  RunConfig cfg;
  cfg.iterations = 2000;
  const auto r = run(p, Graph::complete(2), cfg, 1.5);
  EXPECT_NEAR(r.report.sum_rho, 1.5, 1e-3);
  expect_invariants(r, true);
}

TEST(Run, RandomInitStillConverges) {
  const auto p = oracle::tiny_problem();
  RunConfig cfg;
  cfg.iterations = 3000;
  cfg.lambda_init = SeededRandomInit{0, 1.0};
  cfg.seed = 4;
  const auto r = run(p, Graph::complete(2), cfg, 1.5);
  EXPECT_NEAR(r.report.sum_rho, 1.5, 1e-3);
  expect_invariants(r, false);
}

TEST(Run, SmallTclSandwich) {
  const auto sc = build_scenario(6, 16, 5);
  const auto o = solve_centralized(sc.problem);
  RunConfig cfg;
  cfg.iterations = 300;
  cfg.record_every = 3;
  cfg.record_agent_rho = true;
  cfg.record_slot_violations = true;
  const auto r = run(sc.problem, erdos_renyi(6, 0.4, 2), cfg, o.P_star);
  expect_invariants(r, true);
  EXPECT_EQ(r.trace.rows.front().t, 1u);
  EXPECT_EQ(r.trace.rows.back().t, 300u);
  EXPECT_EQ(r.trace.rows[1].t, 3u);
  EXPECT_EQ(r.trace.rows.front().rho.size(), 6u);
  EXPECT_EQ(r.trace.rows.front().violations.size(), 16u);
  for (const auto& row : r.trace.rows) {
    for (double v : row.violations) EXPECT_LE(v, 1e-8);
  }
}

TEST(Run, Deterministic) {
  const auto sc = build_scenario(5, 10, 9);
  RunConfig cfg;
  cfg.iterations = 100;
  cfg.lambda_init = SeededRandomInit{0, 0.5};
  cfg.seed = 77;
  const Graph g = erdos_renyi(5, 0.5, 1);
  const auto a = run(sc.problem, g, cfg);
  const auto b = run(sc.problem, g, cfg);
  ASSERT_EQ(a.trace.rows.size(), b.trace.rows.size());
  for (std::size_t k = 0; k < a.trace.rows.size(); ++k) {
    EXPECT_EQ(a.trace.rows[k].sum_rho, b.trace.rows[k].sum_rho);
    EXPECT_EQ(a.trace.rows[k].P_t, b.trace.rows[k].P_t);
  }
  EXPECT_TRUE(std::isnan(a.trace.rows[0].cost_error));
}

TEST(Run, WorkersDoNotChangeResults) {
  const auto sc = build_scenario(6, 12, 2);
  RunConfig cfg;
  cfg.iterations = 60;
  const Graph g = erdos_renyi(6, 0.5, 3);
  const auto a = run(sc.problem, g, cfg);
  cfg.workers = 3;
  const auto b = run(sc.problem, g, cfg);
  for (std::size_t k = 0; k < a.trace.rows.size(); ++k) EXPECT_EQ(a.trace.rows[k].sum_rho, b.trace.rows[k].sum_rho);
}

TEST(Run, EarlyStop) {
  const auto p = oracle::tiny_problem();
  RunConfig cfg;
  cfg.iterations = 1000;
  cfg.early_stop = {true, 1e-6, 5};
  const auto r = run(p, Graph::complete(2), cfg, 1.5);
  EXPECT_TRUE(r.report.early_stopped);
  EXPECT_LT(r.report.iterations, 1000u);
}

TEST(Run, RejectsBadInputs) {
  const auto p = oracle::tiny_problem();
  RunConfig cfg;
  EXPECT_THROW(run(p, Graph::complete(3), cfg), InvalidInput);
  EXPECT_THROW(run(p, Graph(2), cfg), InvalidInput);
  cfg.record_every = 0;
  EXPECT_THROW(run(p, Graph::complete(2), cfg), InvalidInput);
}

TEST(Run, EmptyAgentRejectedUpFront) {
  auto p = oracle::tiny_problem();
  p.agents[1].add_constraint(VectorXd::Constant(2, 1.0), 0.5);  // empties X^1 with x1 + x2 >= 1
  RunConfig cfg;
  EXPECT_THROW(run(p, Graph::complete(2), cfg), InvalidInput);
}

TEST(RateFit, SyntheticPowerLaw) {
  std::vector<TraceRow> rows;
  for (std::uint64_t t = 1; t <= 2000; t += 5) rows.push_back(TraceRow{t, 1.0, 1.0, std::pow(double(t), -0.5), 0.0, {}, {}});
  EXPECT_NEAR(rate_fit(rows).exponent, -0.5, 0.02);
}

TEST(RateFit, ConstantError) {
  std::vector<TraceRow> rows;
  for (std::uint64_t t = 1; t <= 200; ++t) rows.push_back(TraceRow{t, 1.0, 1.0, 0.3, 0.0, {}, {}});
  EXPECT_NEAR(rate_fit(rows).exponent, 0.0, 1e-12);
}

TEST(RateFit, EnvelopeIgnoresSpikes) {
  std::vector<TraceRow> rows;
  for (std::uint64_t t = 1; t <= 1000; ++t) {
    const double e = 1.0 / double(t) * (t % 7 == 0 ? 50.0 : 1.0);
    rows.push_back(TraceRow{t, 1.0, 1.0, e, 0.0, {}, {}});
  }
  EXPECT_NEAR(rate_fit(rows).exponent, -1.0, 0.02);
}

TEST(RateFit, InsufficientData) {
  std::vector<TraceRow> rows;
  for (std::uint64_t t = 1; t <= 49; ++t) rows.push_back(TraceRow{t, 1.0, 1.0, 0.1, 0.0, {}, {}});
  EXPECT_THROW(rate_fit(rows), InsufficientData);
  for (auto& r : rows) r.cost_error = 0.0;
  for (std::uint64_t t = 50; t <= 200; ++t) rows.push_back(TraceRow{t, 1.0, 1.0, 1e-17, 0.0, {}, {}});
  EXPECT_THROW(rate_fit(rows), InsufficientData);
}
