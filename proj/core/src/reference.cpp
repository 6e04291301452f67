#include "mmdual/reference.hpp"

#include <cmath>

#include "mmdual/local_step.hpp"

namespace mmdual {

namespace {

constexpr double kCutGap = 1e-9;
constexpr int kMaxCutRounds = 500;

struct Lifted {
  std::size_t agent;
  Index slot;
  Index var;  // epigraph variable
};

}  // namespace

OracleResult solve_centralized(const MinMaxProblem& problem, double tol) {
  const ValidationReport rep = validate(problem);
  if (!rep.ok) throw InvalidInput("centralized solve: " + rep.issues.front());
  const Index S = problem.S;
  const std::size_t N = problem.agents.size();

  std::vector<Lifted> lifted;
  Index rows = 0;
  for (std::size_t i = 0; i < N; ++i) {
    rows += problem.agents[i].A.rows();
    for (Index s = 0; s < S; ++s) {
      if (!problem.agents[i].costs[static_cast<std::size_t>(s)].is_affine()) {
        lifted.push_back({i, s, static_cast<Index>(N) * S + static_cast<Index>(lifted.size())});
      }
    }
  }
  const Index nx = static_cast<Index>(N) * S;
  const Index P = nx + static_cast<Index>(lifted.size());
  const Index n = P + 1;

  lp::LpProblem lp = lp::LpProblem::with_vars(n);
  lp.cost(P) = 1.0;
  lp.G = MatrixXd::Zero(rows + S, n);
  lp.h = VectorXd::Zero(rows + S);
  Index r = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const AgentSpec& a = problem.agents[i];
    const Index off = static_cast<Index>(i) * S;
    lp.lower.segment(off, S) = a.lower;
    lp.upper.segment(off, S) = a.upper;
    lp.G.block(r, off, a.A.rows(), S) = a.A;
    lp.h.segment(r, a.A.rows()) = a.b;
    r += a.A.rows();
    for (Index s = 0; s < S; ++s) {
      const ScalarCost& g = a.costs[static_cast<std::size_t>(s)];
      if (g.is_affine()) lp.G(rows + s, off + s) = g.linear();
    }
  }
  const Index coupling = rows;
  for (const auto& l : lifted) lp.G(coupling + l.slot, l.var) = 1.0;
  for (Index s = 0; s < S; ++s) lp.G(coupling + s, P) = -1.0;

  lp::Solver solver(std::move(lp), lp::SolverOptions{.tol = tol});
  auto add_tangent = [&](const Lifted& l, double at) {
    const ScalarCost& g = problem.agents[l.agent].costs[static_cast<std::size_t>(l.slot)];
    VectorXd row = VectorXd::Zero(n);
    row(static_cast<Index>(l.agent) * S + l.slot) = g.slope(at);
    row(l.var) = -1.0;
    solver.add_ineq(row, g.curvature() * at * at);
  };
  for (const auto& l : lifted) {
    const Index v = static_cast<Index>(l.agent) * S + l.slot;
    const double lo = solver.problem().lower(v);
    const double hi = solver.problem().upper(v);
    add_tangent(l, lo);
    add_tangent(l, hi);
    add_tangent(l, 0.5 * (lo + hi));
  }

  lp::LpSolution sol;
  for (int round = 0;; ++round) {
    sol = solver.solve();
    if (sol.status != lp::Status::Solved) {
      throw OracleFailure(sol.status, "centralized solve: " + std::string(lp::to_string(sol.status)));
    }
    if (round >= kMaxCutRounds) break;
    bool added = false;
    for (const auto& l : lifted) {
      const double xs = sol.z(static_cast<Index>(l.agent) * S + l.slot);
      const double gx = problem.agents[l.agent].costs[static_cast<std::size_t>(l.slot)](xs);
      if (gx - sol.z(l.var) > kCutGap) {
        add_tangent(l, xs);
        added = true;
      }
    }
    if (!added) break;
  }

  OracleResult out;
  out.P_star = sol.z(P);
  for (std::size_t i = 0; i < N; ++i) out.x_star.push_back(sol.z.segment(static_cast<Index>(i) * S, S));
  out.mu_star = sol.duals_ineq.segment(coupling, S);
  out.kkt = sol.kkt;
  return out;
}

double dual_value(const MinMaxProblem& problem, const VectorXd& mu, double tol) {
  double total = 0.0;
  for (const auto& a : problem.agents) total += eval_qi(a, mu, tol);
  return total;
}

bool strong_duality_check(const MinMaxProblem& problem, const OracleResult& result, double tol) {
  try {
    return std::abs(dual_value(problem, result.mu_star.cwiseMax(0.0)) - result.P_star) <= tol;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace mmdual
