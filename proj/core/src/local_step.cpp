#include "mmdual/local_step.hpp"

#include <algorithm>
#include <cmath>

namespace mmdual {

namespace {

constexpr double kCutGap = 1e-10;
constexpr int kMaxCutRounds = 500;

lp::LpProblem local_lp(const AgentSpec& spec) {
  const Index S = spec.S;
  lp::LpProblem p = lp::LpProblem::with_vars(S + 1);
  p.cost(S) = 1.0;
  p.lower.head(S) = spec.lower;
  p.upper.head(S) = spec.upper;
  p.G = MatrixXd::Zero(spec.A.rows(), S + 1);
  p.G.leftCols(S) = spec.A;
  p.h = spec.b;
  return p;
}

bool all_affine(const AgentSpec& spec) {
  return std::all_of(spec.costs.begin(), spec.costs.end(), [](const ScalarCost& c) { return c.is_affine(); });
}

}  // namespace

VectorXd lambda_delta(const LambdaExchange& ex) {
  if (ex.out.size() != ex.in.size()) throw InvalidInput("lambda exchange: out/in key sets differ");
  VectorXd delta;
  auto in_it = ex.in.begin();
  for (const auto& [j, out] : ex.out) {
    if (in_it->first != j) throw InvalidInput("lambda exchange: out/in key sets differ");
    const VectorXd& in = in_it->second;
    if (delta.size() == 0) delta = VectorXd::Zero(out.size());
    if (out.size() != delta.size() || in.size() != delta.size()) {
      throw InvalidInput("lambda exchange: vector length mismatch for neighbor " + std::to_string(j));
    }
    delta += out - in;
    ++in_it;
  }
  return delta;
}

LocalSolver::LocalSolver(AgentSpec spec, double tol)
    : spec_(std::move(spec)), tol_(tol), lp_(local_lp(spec_), lp::SolverOptions{.tol = tol}) {
  const Index S = spec_.S;
  if (static_cast<Index>(spec_.costs.size()) != S) throw InvalidInput("local solver: costs must have S entries");
  for (Index s = 0; s < S; ++s) {
    const ScalarCost& g = spec_.costs[static_cast<std::size_t>(s)];
    if (g.is_affine()) {
      VectorXd row = VectorXd::Zero(S + 1);
      row(s) = g.linear();
      row(S) = -1.0;
      coupling_.push_back({lp_.add_ineq(row, 0.0), s, 0.0});
    } else {
      const double lo = spec_.lower(s);
      const double hi = spec_.upper(s);
      add_tangent(s, lo, 0.0);
      if (hi > lo) {
        add_tangent(s, hi, 0.0);
        add_tangent(s, 0.5 * (lo + hi), 0.0);
      }
    }
  }
}

// Tangent of g_s at `at`:  slope(at) x - rho <= a at^2 - delta_s.
void LocalSolver::add_tangent(Index slot, double at, double delta_slot) {
  const Index S = spec_.S;
  const ScalarCost& g = spec_.costs[static_cast<std::size_t>(slot)];
  VectorXd row = VectorXd::Zero(S + 1);
  row(slot) = g.slope(at);
  row(S) = -1.0;
  const double offset = g.curvature() * at * at;
  coupling_.push_back({lp_.add_ineq(row, offset - delta_slot), slot, offset});
}

LocalPrimalDual LocalSolver::solve(const VectorXd& delta) {
  const Index S = spec_.S;
  if (delta.size() != S) throw InvalidInput("local solve: delta must have S entries");
  for (const auto& c : coupling_) lp_.set_ineq_rhs(c.row, c.offset - delta(c.slot));

  lp::LpSolution sol;
  int iterations = 0;
  for (int round = 0;; ++round) {
    sol = lp_.solve();
    iterations += sol.iterations;
    if (sol.status == lp::Status::Infeasible) {
      throw LocalSolveError(sol.status, "local problem infeasible");
    }
    if (sol.status != lp::Status::Solved) {
      throw LocalSolveError(sol.status, "local solve failed: " + std::string(lp::to_string(sol.status)));
    }
    if (all_affine(spec_) || round >= kMaxCutRounds) break;
    bool added = false;
    const double rho = sol.z(S);
    for (Index s = 0; s < S; ++s) {
      const ScalarCost& g = spec_.costs[static_cast<std::size_t>(s)];
      if (g.is_affine()) continue;
      const double xs = sol.z(s);
      if (g(xs) + delta(s) - rho > kCutGap) {
        add_tangent(s, xs, delta(s));
        added = true;
      }
    }
    if (!added) break;
  }

  LocalPrimalDual out;
  out.x = sol.z.head(S);
  out.rho = sol.z(S);
  out.mu = VectorXd::Zero(S);
  for (const auto& c : coupling_) out.mu(c.slot) += sol.duals_ineq(c.row);
  out.kkt = sol.kkt;
  out.iterations = iterations;
  return out;
}

LocalPrimalDual solve_local(const AgentSpec& spec, const VectorXd& delta, double tol) {
  LocalSolver solver(spec, tol);
  return solver.solve(delta);
}

double eval_qi(const AgentSpec& spec, const VectorXd& mu, double tol) {
  const Index S = spec.S;
  if (mu.size() != S) throw InvalidInput("eval_qi: mu must have S entries");
  if ((mu.array() < 0.0).any()) throw InvalidInput("eval_qi: mu must be nonnegative");
  lp::LpProblem p = spec.feasible_set_lp();
  bool quad = false;
  VectorXd q = VectorXd::Zero(S);
  for (Index s = 0; s < S; ++s) {
    const ScalarCost& g = spec.costs[static_cast<std::size_t>(s)];
    p.cost(s) = mu(s) * g.linear();
    q(s) = 2.0 * mu(s) * g.curvature();
    quad = quad || q(s) > 0.0;
  }
  if (quad) p.quad_diag = q;
  const auto sol = lp::solve(p, lp::SolverOptions{.tol = tol});
  if (sol.status != lp::Status::Solved) {
    throw LocalSolveError(sol.status, "eval_qi: " + std::string(lp::to_string(sol.status)));
  }
  return sol.objective_value;
}

double eval_eta_delta(const AgentSpec& spec, const VectorXd& delta, double tol) {
  const Index S = spec.S;
  if (delta.size() != S) throw InvalidInput("eval_eta: delta must have S entries");
  if (!all_affine(spec)) return solve_local(spec, delta, tol).rho;

  // Dual of the local LP in (mu, nu, z_lower, z_upper) >= 0:
  //   max  delta'mu - b'nu + lower'z_lower - upper'z_upper
  //   s.t. A'nu + diag(c) mu - z_lower + z_upper = 0,  1'mu = 1.
  const Index r = spec.A.rows();
  const Index n = S + r + 2 * S;
  lp::LpProblem p = lp::LpProblem::with_vars(n);
  p.lower.setZero();
  p.cost.segment(0, S) = -delta;
  p.cost.segment(S, r) = spec.b;
  p.cost.segment(S + r, S) = -spec.lower;
  p.cost.segment(2 * S + r, S) = spec.upper;
  p.Aeq = MatrixXd::Zero(S + 1, n);
  p.beq = VectorXd::Zero(S + 1);
  for (Index s = 0; s < S; ++s) {
    p.Aeq(s, s) = spec.costs[static_cast<std::size_t>(s)].linear();
    p.Aeq(s, S + r + s) = -1.0;
    p.Aeq(s, 2 * S + r + s) = 1.0;
  }
  if (r > 0) p.Aeq.block(0, S, S, r) = spec.A.transpose();
  p.Aeq.block(S, 0, 1, S).setOnes();
  p.beq(S) = 1.0;
  const auto sol = lp::solve(p, lp::SolverOptions{.tol = tol});
  if (sol.status != lp::Status::Solved) {
    throw LocalSolveError(sol.status, "eval_eta: dual LP " + std::string(lp::to_string(sol.status)));
  }
  return -sol.objective_value;
}

double eval_eta_i(const AgentSpec& spec, const LambdaExchange& ex, double tol) {
  VectorXd delta = ex.out.empty() ? VectorXd::Zero(spec.S) : lambda_delta(ex);
  return eval_eta_delta(spec, delta, tol);
}

}  // namespace mmdual
