#pragma once

#include <map>
#include <vector>

#include "mmdual/graph.hpp"
#include "mmdual/lp.hpp"
#include "mmdual/model.hpp"

namespace mmdual {

/// Edge multipliers seen by one agent: out[j] = lambda^{ij} (owned by this
/// agent), in[j] = lambda^{ji} (received from neighbor j).
struct LambdaExchange {
  std::map<NodeId, VectorXd> out;
  std::map<NodeId, VectorXd> in;
};

/// Delta_s = sum_j (lambda^{ij} - lambda^{ji})_s. Throws InvalidInput when
/// the key sets differ or vector lengths disagree.
VectorXd lambda_delta(const LambdaExchange& ex);

/// Primal-dual optimum of the local epigraph problem
///   min rho  s.t.  x in X,  g_s(x_s) + delta_s <= rho  for all s.
/// mu holds the multipliers of the S coupling rows and lies in the simplex.
struct LocalPrimalDual {
  VectorXd x;
  double rho = 0.0;
  VectorXd mu;
  lp::KktResiduals kkt;
  int iterations = 0;
};

/// The local solve ended without an optimal primal-dual pair.
class LocalSolveError : public Error {
 public:
  LocalSolveError(lp::Status status, const std::string& what) : Error(what), status_(status) {}
  lp::Status status() const { return status_; }

 private:
  lp::Status status_;
};

/// Warm-started local solver for one agent. Only the coupling right-hand
/// sides change between calls, so the previous optimal basis is reused.
/// Quadratic slot costs are handled by tangent cuts that persist across
/// calls (they stay valid outer approximations for any delta).
class LocalSolver {
 public:
  explicit LocalSolver(AgentSpec spec, double tol = 1e-9);

  const AgentSpec& spec() const { return spec_; }

  /// Throws LocalSolveError on infeasibility or numerical failure.
  LocalPrimalDual solve(const VectorXd& delta);

 private:
  struct CouplingRow {
    Index row;
    Index slot;
    double offset;  // rhs = offset - delta_slot
  };

  void add_tangent(Index slot, double at, double delta_slot);

  AgentSpec spec_;
  double tol_;
  lp::Solver lp_;
  std::vector<CouplingRow> coupling_;
};

/// Cold local solve; a pure function of its arguments.
LocalPrimalDual solve_local(const AgentSpec& spec, const VectorXd& delta, double tol = 1e-9);

/// q(mu) = min over X of sum_s mu_s g_s(x_s). mu must be nonnegative.
double eval_qi(const AgentSpec& spec, const VectorXd& mu, double tol = 1e-9);

/// eta(lambda) = max over the simplex of q(mu) + mu' delta. For affine costs
/// this solves the explicit dual LP of the local problem, a separate route
/// from solve_local; with quadratic costs it returns solve_local's rho.
double eval_eta_i(const AgentSpec& spec, const LambdaExchange& ex, double tol = 1e-9);
double eval_eta_delta(const AgentSpec& spec, const VectorXd& delta, double tol = 1e-9);

}  // namespace mmdual
