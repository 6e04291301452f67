#include <gtest/gtest.h>

#include <random>

#include <mmdual/local_step.hpp>
#include <mmdual/reference.hpp>
#include <mmdual/tcl.hpp>

#include "oracles/instances.hpp"

using namespace mmdual;

namespace {

MinMaxProblem random_problem(std::mt19937_64& rng, std::size_t N, Eigen::Index S, bool quadratic = false) {
  MinMaxProblem p;
  p.S = S;
  for (std::size_t i = 0; i < N; ++i) p.agents.push_back(oracle::random_agent(rng, S, static_cast<int>(i % 2), quadratic));
  return p;
}

void expect_oracle_invariants(const MinMaxProblem& p, const OracleResult& r) {
  EXPECT_LE(std::abs(r.mu_star.sum() - 1.0), 1e-7);
  EXPECT_GE(r.mu_star.minCoeff(), -1e-9);
  EXPECT_LE((aggregate_profile(p, r.x_star).array() - r.P_star).maxCoeff(), 1e-8);
  for (std::size_t i = 0; i < p.agents.size(); ++i) {
    const auto& a = p.agents[i];
    EXPECT_TRUE(((r.x_star[i] - a.lower).array() >= -1e-8).all());
    EXPECT_TRUE(((r.x_star[i] - a.upper).array() <= 1e-8).all());
    if (a.A.rows() > 0) EXPECT_LE((a.A * r.x_star[i] - a.b).maxCoeff(), 1e-8);
  }
}

}  // namespace

TEST(Centralized, Tiny) {
  const auto p = oracle::tiny_problem();
  const auto r = solve_centralized(p);
  EXPECT_NEAR(r.P_star, 1.5, 1e-12);
  EXPECT_NEAR(oracle::vertex_enumeration(oracle::joint_epigraph(p))->value, 1.5, 1e-12);
  // the minimizer is not unique, but every one flattens the profile
  const VectorXd prof = aggregate_profile(p, r.x_star);
  EXPECT_NEAR(prof(0), 1.5, 1e-12);
  EXPECT_NEAR(prof(1), 1.5, 1e-12);
  expect_oracle_invariants(p, r);
  EXPECT_TRUE(strong_duality_check(p, r, 1e-7));
}

TEST(Centralized, SingleAgentIsMinOfMax) {
  MinMaxProblem p;
  p.S = 2;
  p.agents = {oracle::tiny_agent(4.0)};
  EXPECT_NEAR(solve_centralized(p).P_star, solve_local(p.agents[0], VectorXd::Zero(2)).rho, 1e-12);
}

TEST(Centralized, ZeroCosts) {
  MinMaxProblem p;
  p.S = 3;
  p.agents = {AgentSpec::box(3, 0.0, 1.0, ScalarCost::affine(0.0)), AgentSpec::box(3, -1.0, 1.0, ScalarCost::affine(0.0))};
  const auto r = solve_centralized(p);
  EXPECT_NEAR(r.P_star, 0.0, 1e-15);
  expect_oracle_invariants(p, r);
}

TEST(Centralized, RandomAgainstBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    // at most 4 variables in total for the brute force
    const std::size_t N = 1 + trial % 2;
    const Eigen::Index S = N == 1 ? 1 + trial % 3 : 1;
    const auto p = random_problem(rng, N, S);
    const auto r = solve_centralized(p);
    EXPECT_NEAR(r.P_star, oracle::vertex_enumeration(oracle::joint_epigraph(p))->value, 1e-8) << trial;
    expect_oracle_invariants(p, r);
  }
}

TEST(Centralized, Quadratic) {
  // two agents, one slot: min max(x^2 + y^2) with x + y >= 1 split over agents
  MinMaxProblem p;
  p.S = 1;
  for (int i = 0; i < 2; ++i) {
    AgentSpec a = AgentSpec::box(1, 0.0, 2.0, ScalarCost::quadratic(1.0, 0.0));
    a.add_constraint(VectorXd::Constant(1, -1.0), -0.5);  // x >= 0.5
    p.agents.push_back(a);
  }
  const auto r = solve_centralized(p);
  EXPECT_NEAR(r.P_star, 0.5, 1e-6);
  expect_oracle_invariants(p, r);
  EXPECT_TRUE(strong_duality_check(p, r, 1e-6));
}

TEST(StrongDuality, RandomAndWeak) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const auto p = random_problem(rng, 1 + trial % 3, 1 + trial % 3, trial % 4 == 3);
    const auto r = solve_centralized(p);
    EXPECT_TRUE(strong_duality_check(p, r, 1e-6)) << trial;
    for (int k = 0; k < 10; ++k) {
      VectorXd mu(p.S);
      for (Eigen::Index s = 0; s < p.S; ++s) mu(s) = u(rng);
      mu /= mu.sum();
      EXPECT_LE(dual_value(p, mu), r.P_star + 1e-7);
    }
  }
}

TEST(StrongDuality, PerturbedMultiplierIsBelow) {
  const auto p = oracle::tiny_problem();
  auto r = solve_centralized(p);
  r.mu_star = (VectorXd(2) << 0.9, 0.1).finished();
  EXPECT_LT(dual_value(p, r.mu_star), r.P_star - 1e-3);
  EXPECT_FALSE(strong_duality_check(p, r, 1e-7));
}

TEST(StrongDuality, DefaultTclScenario) {
  const auto sc = build_scenario(20, 60, 2017);
  const auto r = solve_centralized(sc.problem);
  expect_oracle_invariants(sc.problem, r);
  EXPECT_TRUE(strong_duality_check(sc.problem, r, 1e-6));
}
