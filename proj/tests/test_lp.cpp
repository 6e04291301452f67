#include <gtest/gtest.h>

#include <random>

#include <mmdual/lp.hpp>

#include "oracles/random_lp.hpp"
#include "oracles/vertex_enum.hpp"

using namespace mmdual;
using lp::LpProblem;
using lp::Status;
using Eigen::VectorXd;

using oracle::random_lp;

TEST(LpSolve, BoxOnly) {
  LpProblem p = LpProblem::with_vars(1);
  p.cost(0) = 1.0;
  p.lower(0) = 0.0;
  p.upper(0) = 1.0;
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Solved);
  EXPECT_NEAR(s.z(0), 0.0, 1e-12);
  EXPECT_NEAR(s.objective_value, 0.0, 1e-12);
  EXPECT_NEAR(s.duals_upper(0), 0.0, 1e-12);
  EXPECT_NEAR(s.duals_lower(0), 1.0, 1e-12);
}

TEST(LpSolve, SimplexCorner) {
  LpProblem p = LpProblem::with_vars(2);
  p.cost << -1.0, -1.0;
  p.lower.setZero();
  p.add_ineq(VectorXd::Ones(2), 1.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Solved);
  EXPECT_NEAR(s.objective_value, -1.0, 1e-12);
  EXPECT_NEAR(s.duals_ineq(0), 1.0, 1e-12);
  EXPECT_NEAR(oracle::vertex_enumeration(p)->value, -1.0, 1e-12);
}

TEST(LpSolve, EpigraphExample) {
  // vars (x, rho): min rho s.t. x <= rho, 2x >= 1, 0 <= x <= 1
  LpProblem p = LpProblem::with_vars(2);
  p.cost << 0.0, 1.0;
  p.lower(0) = 0.0;
  p.upper(0) = 1.0;
  p.add_ineq((VectorXd(2) << 1.0, -1.0).finished(), 0.0);
  p.add_ineq((VectorXd(2) << -2.0, 0.0).finished(), -1.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Solved);
  EXPECT_NEAR(s.z(1), 0.5, 1e-12);
  EXPECT_NEAR(s.duals_ineq(0), 1.0, 1e-12);
  EXPECT_NEAR(oracle::vertex_enumeration(p)->value, 0.5, 1e-12);
}

TEST(LpSolve, Infeasible) {
  LpProblem p = LpProblem::with_vars(1);
  p.lower(0) = 0.0;
  p.upper(0) = 1.0;
  p.add_ineq(VectorXd::Constant(1, -1.0), -2.0);
  EXPECT_EQ(lp::solve(p).status, Status::Infeasible);
}

TEST(LpSolve, InconsistentEqualities) {
  LpProblem p = LpProblem::with_vars(2);
  p.add_eq(VectorXd::Ones(2), 1.0);
  p.add_eq(VectorXd::Ones(2), 2.0);
  EXPECT_EQ(lp::solve(p).status, Status::Infeasible);
}

TEST(LpSolve, Unbounded) {
  LpProblem p = LpProblem::with_vars(2);
  p.cost << -1.0, 0.0;
  p.lower.setZero();
  p.add_ineq((VectorXd(2) << 1.0, -1.0).finished(), 1.0);
  EXPECT_EQ(lp::solve(p).status, Status::Unbounded);
}

TEST(LpSolve, EqualityDuals) {
  // min x + 2y s.t. x + y = 1, x, y >= 0  -> x = 1, w = -1
  LpProblem p = LpProblem::with_vars(2);
  p.cost << 1.0, 2.0;
  p.lower.setZero();
  p.add_eq(VectorXd::Ones(2), 1.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Solved);
  EXPECT_NEAR(s.z(0), 1.0, 1e-12);
  EXPECT_NEAR(s.duals_eq(0), -1.0, 1e-12);
  EXPECT_LE(s.kkt.max(), 1e-9);
}

TEST(LpSolve, InvalidProblemThrows) {
  LpProblem p = LpProblem::with_vars(2);
  p.lower(0) = 1.0;
  p.upper(0) = 0.0;
  EXPECT_THROW(lp::solve(p), InvalidInput);
}

TEST(CheckKkt, PerturbedPrimal) {
  LpProblem p = LpProblem::with_vars(2);
  p.cost << -1.0, -1.0;
  p.lower.setZero();
  p.add_ineq(VectorXd::Ones(2), 1.0);
  auto s = lp::solve(p);
  EXPECT_LE(lp::check_kkt(p, s).max(), 1e-9);
  s.z(0) += 1.0;
  EXPECT_NEAR(lp::check_kkt(p, s).primal_feas, 1.0, 1e-12);
}

TEST(CheckKkt, ZeroMultipliers) {
  LpProblem p = LpProblem::with_vars(2);
  p.cost << -1.0, -1.0;
  p.lower.setZero();
  p.add_ineq(VectorXd::Ones(2), 1.0);
  auto s = lp::solve(p);
  s.duals_ineq.setZero();
  s.duals_lower.setZero();
  s.duals_upper.setZero();
  EXPECT_GT(lp::check_kkt(p, s).stationarity, 0.5);
}

TEST(LpSolve, RandomAgainstVertexEnumeration) {
  std::mt19937_64 rng(11);
  int solved = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const LpProblem p = random_lp(rng, trial % 2 == 0);
    const auto s = lp::solve(p);
    const auto ref = oracle::vertex_enumeration(p);
    ASSERT_TRUE(ref.has_value()) << trial;
    ASSERT_EQ(s.status, Status::Solved) << trial;
    EXPECT_NEAR(s.objective_value, ref->value, 1e-8) << trial;
    const auto k = lp::check_kkt(p, s);
    EXPECT_LE(k.max(), 1e-9) << trial;
    // strong duality and complementary slackness
    EXPECT_LE(std::abs(lp::dual_objective(p, s) - s.objective_value), 1e-7 * (1.0 + std::abs(s.objective_value)));
    if (p.num_ineq() > 0) {
      const VectorXd slack = p.G * s.z - p.h;
      EXPECT_LE(s.duals_ineq.cwiseProduct(slack).cwiseAbs().maxCoeff(), 1e-7);
      EXPECT_GE(s.duals_ineq.minCoeff(), -1e-9);
    }
    ++solved;
  }
  EXPECT_EQ(solved, 300);
}

TEST(LpSolve, Deterministic) {
  std::mt19937_64 rng(5);
  const LpProblem p = random_lp(rng, true);
  const auto a = lp::solve(p);
  const auto b = lp::solve(p);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.duals_ineq, b.duals_ineq);
}

TEST(LpSolve, SeparableQuadratic) {
  // min 1/2 q z^2 + c z on a box: z = clamp(-c/q)
  LpProblem p = LpProblem::with_vars(3);
  p.quad_diag = (VectorXd(3) << 2.0, 1.0, 4.0).finished();
  p.cost << -1.0, 5.0, -8.0;
  p.lower.setConstant(-1.0);
  p.upper.setConstant(1.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Solved);
  EXPECT_NEAR(s.z(0), 0.5, 1e-8);
  EXPECT_NEAR(s.z(1), -1.0, 1e-8);
  EXPECT_NEAR(s.z(2), 1.0, 1e-8);
  EXPECT_LE(s.kkt.max(), 1e-7);
}

TEST(LpSolve, QuadraticWithRow) {
  // min z1^2 + z2^2 s.t. z1 + z2 >= 1 -> (0.5, 0.5), multiplier 1
  LpProblem p = LpProblem::with_vars(2);
  p.quad_diag = VectorXd::Constant(2, 2.0);
  p.lower.setConstant(-3.0);
  p.upper.setConstant(3.0);
  p.add_ineq(VectorXd::Constant(2, -1.0), -1.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Solved);
  EXPECT_NEAR(s.z(0), 0.5, 1e-8);
  EXPECT_NEAR(s.z(1), 0.5, 1e-8);
  EXPECT_NEAR(s.duals_ineq(0), 1.0, 1e-7);
  EXPECT_NEAR(s.objective_value, 0.5, 1e-8);
}

TEST(Solver, WarmStartMatchesCold) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    LpProblem p = random_lp(rng, false);
    if (p.num_ineq() == 0) continue;
    lp::Solver warm(p);
    for (int step = 0; step < 10; ++step) {
      const Eigen::Index row = step % p.num_ineq();
      p.h(row) += 0.3 * std::abs(u(rng));  // relaxing keeps feasibility
      warm.set_ineq_rhs(row, p.h(row));
      const auto a = warm.solve();
      const auto b = lp::solve(p);
      ASSERT_EQ(a.status, Status::Solved);
      ASSERT_EQ(b.status, Status::Solved);
      EXPECT_NEAR(a.objective_value, b.objective_value, 1e-9);
      EXPECT_LE(lp::check_kkt(p, a).max(), 1e-9);
    }
  }
}

TEST(Solver, AddRowAndBounds) {
  LpProblem p = LpProblem::with_vars(2);
  p.cost << -1.0, -2.0;
  p.lower.setZero();
  p.upper.setConstant(1.0);
  lp::Solver s(p);
  EXPECT_NEAR(s.solve().objective_value, -3.0, 1e-12);
  const Eigen::Index r = s.add_ineq(VectorXd::Ones(2), 1.0);
  EXPECT_EQ(r, 0);
  auto sol = s.solve();
  EXPECT_NEAR(sol.objective_value, -2.0, 1e-12);
  // degenerate vertex: any row dual in [1, 2] certifies optimality
  EXPECT_GE(sol.duals_ineq(0), 1.0 - 1e-12);
  EXPECT_LE(sol.duals_ineq(0), 2.0 + 1e-12);
  EXPECT_LE(lp::check_kkt(s.problem(), sol).max(), 1e-12);
  s.set_bounds(1, 0.0, 0.25);
  sol = s.solve();
  EXPECT_NEAR(sol.objective_value, -1.25, 1e-12);
  s.set_ineq_rhs(0, -1.0);
  EXPECT_EQ(s.solve().status, Status::Infeasible);
  s.set_ineq_rhs(0, 1.0);
  EXPECT_NEAR(s.solve().objective_value, -1.25, 1e-12);
}
