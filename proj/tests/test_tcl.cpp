#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <mmdual/io.hpp>
#include <mmdual/tcl.hpp>

using namespace mmdual;

namespace {

TclParams random_params(std::mt19937_64& rng, Eigen::Index S) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TclParams p;
  p.alpha = 0.1 + 2.0 * u(rng);
  p.Q = 0.5 + 10.0 * u(rng);
  p.dtau = 0.05 + u(rng);
  p.T0 = 15.0 + 10.0 * u(rng);
  p.Tmin = 18.0;
  p.Tmax = 26.0;
  p.Tout = VectorXd::NullaryExpr(S, [&] { return 10.0 + 20.0 * u(rng); });
  p.delta = VectorXd::NullaryExpr(S, [&] { return -2.0 + 4.0 * u(rng); });
  p.c = 1.0 + 2.0 * u(rng);
  return p;
}

}  // namespace

TEST(DiscreteStep, Equilibrium) {
  TclParams p;
  p.Tout = VectorXd::Constant(3, 18.0);
  p.delta = VectorXd::Zero(3);
  EXPECT_NEAR(discrete_step(p, 18.0, 0.0, 1), 18.0, 1e-12);
}

TEST(DiscreteStep, SteadyStateLimit) {
  TclParams p;
  p.alpha = 1.0;
  p.dtau = 50.0;
  p.Q = 4.0;
  p.Tout = VectorXd::Constant(1, 10.0);
  p.delta = VectorXd::Constant(1, 2.0);
  EXPECT_NEAR(discrete_step(p, 40.0, 0.5, 0), 4.0 * 0.5 + 2.0 + 10.0, 1e-12);
}

TEST(DiscreteStep, HalfLife) {
  TclParams p;
  p.alpha = 1.0;
  p.dtau = std::log(2.0);
  p.Tout = VectorXd::Constant(1, 20.0);
  p.delta = VectorXd::Zero(1);
  EXPECT_NEAR(discrete_step(p, 10.0, 0.0, 0), 15.0, 1e-12);
  EXPECT_THROW(discrete_step(p, 10.0, 0.0, 1), IndexOutOfRange);
}

TEST(BuildMatrices, SingleSlot) {
  TclParams p;
  p.Tout = VectorXd::Constant(1, 15.0);
  p.delta = VectorXd::Zero(1);
  const auto m = build_matrices(p);
  const double Ahat = std::exp(-p.alpha * p.dtau);
  EXPECT_NEAR(m.F(0, 0), 1.0 - Ahat, 1e-15);
  EXPECT_NEAR(m.G(0), Ahat, 1e-15);
  EXPECT_NEAR(m.A(0, 0), p.Q / p.alpha * (1.0 - Ahat), 1e-15);
  EXPECT_NEAR(m.A(1, 0), -p.Q / p.alpha * (1.0 - Ahat), 1e-15);
}

TEST(BuildMatrices, Structure) {
  std::mt19937_64 rng(1);
  const auto p = random_params(rng, 8);
  const auto m = build_matrices(p);
  for (Eigen::Index r = 0; r < 8; ++r) {
    EXPECT_NEAR(m.F(r, r), m.Bhat, 1e-15);
    for (Eigen::Index c = r + 1; c < 8; ++c) EXPECT_EQ(m.F(r, c), 0.0);
  }
  EXPECT_EQ(m.A.topRows(8), -m.A.bottomRows(8));
}

TEST(BuildMatrices, MatrixMatchesRecursion) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index S = 1 + trial % 30;
    const auto p = random_params(rng, S);
    const auto m = build_matrices(p);
    const VectorXd x = VectorXd::NullaryExpr(S, [&] { return u(rng); });
    EXPECT_LE((trajectory(p, m, x) - simulate(p, x)).cwiseAbs().maxCoeff(), 1e-10) << trial;
  }
}

TEST(BuildMatrices, RowsEncodeTheBand) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto p = random_params(rng, 12);
  const auto m = build_matrices(p);
  for (int k = 0; k < 50; ++k) {
    const VectorXd x = VectorXd::NullaryExpr(12, [&] { return u(rng); });
    const VectorXd T = simulate(p, x);
    const VectorXd slack = m.b - m.A * x;
    // upper rows: Tmax - T, lower rows: T - Tmin
    EXPECT_LE((slack.head(12) - (VectorXd::Constant(12, p.Tmax) - T)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((slack.tail(12) - (T - VectorXd::Constant(12, p.Tmin))).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BuildMatrices, InvalidParams) {
  TclParams p;
  p.Tout = VectorXd::Constant(2, 15.0);
  p.delta = VectorXd::Zero(3);
  EXPECT_THROW(build_matrices(p), InvalidInput);
  p.delta = VectorXd::Zero(2);
  p.Tmin = 30.0;
  EXPECT_THROW(build_matrices(p), InvalidInput);
}

TEST(Scenario, TwentyBySixty) {
  const auto sc = build_scenario(20, 60, 2017);
  EXPECT_EQ(sc.problem.num_agents(), 20);
  EXPECT_EQ(sc.problem.S, 60);
  EXPECT_TRUE(validate(sc.problem).ok);
  EXPECT_EQ(sc.c_values.size(), 5u);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& p = sc.params[i];
    EXPECT_GE(p.c, 1.0);
    EXPECT_LE(p.c, 3.0);
    EXPECT_NE(std::find(sc.c_values.begin(), sc.c_values.end(), p.c), sc.c_values.end());
    std::vector<Eigen::Index> on;
    for (Eigen::Index s = 0; s < 60; ++s) {
      if (p.delta(s) != 0.0) on.push_back(s);
    }
    ASSERT_EQ(on.size(), 5u);
    EXPECT_EQ(on.back() - on.front(), 4);
    const Eigen::Index center = on[2];
    EXPECT_GE(center, 30 - 7);
    EXPECT_LE(center, 30 + 7);
    EXPECT_LE(p.delta(center), -0.5 + 1e-15);
    EXPECT_GE(p.delta(center), -1.0);
  }
}

TEST(Scenario, MinimalHorizon) {
  const auto sc = build_scenario(1, 5, 4);
  EXPECT_EQ(sc.params[0].delta.cwiseAbs().minCoeff() > 0.0, true);
  EXPECT_THROW(build_scenario(1, 4, 4), InvalidInput);
}

TEST(Scenario, Deterministic) {
  const auto a = build_scenario(7, 20, 11);
  const auto b = build_scenario(7, 20, 11);
  EXPECT_EQ(to_json(a.problem).dump(), to_json(b.problem).dump());
  EXPECT_NE(to_json(a.problem).dump(), to_json(build_scenario(7, 20, 12).problem).dump());
}

TEST(Scenario, InfeasibleReported) {
  ScenarioTemplate t;
  t.Tout = 60.0;  // far too hot to hold the band with heating only
  try {
    build_scenario(3, 10, 1, t);
    FAIL();
  } catch (const ScenarioInfeasible& e) {
    EXPECT_EQ(e.agent(), 0u);
  }
}
