#pragma once

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <string_view>

#include "mmdual/error.hpp"

namespace mmdual::lp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense problem
///
///   minimize    cost' z + 1/2 sum_k quad_diag_k z_k^2
///   subject to  G z <= h,  Aeq z = beq,  lower <= z <= upper.
///
/// Bounds may be infinite. quad_diag is either empty (pure LP) or holds one
/// nonnegative entry per variable; variables with a positive entry must have
/// finite bounds.
struct LpProblem {
  VectorXd cost;
  VectorXd quad_diag;
  MatrixXd G;
  VectorXd h;
  MatrixXd Aeq;
  VectorXd beq;
  VectorXd lower;
  VectorXd upper;

  /// n free variables with zero cost and no rows.
  static LpProblem with_vars(Index n);

  Index num_vars() const { return cost.size(); }
  Index num_ineq() const { return G.rows(); }
  Index num_eq() const { return Aeq.rows(); }
  bool has_quadratic() const;

  /// Appends the row  row' z <= rhs.
  void add_ineq(const VectorXd& row, double rhs);
  void add_eq(const VectorXd& row, double rhs);

  /// Throws InvalidInput on inconsistent dimensions, lower > upper, negative
  /// or non-finite quadratic entries, or quadratic terms on unbounded vars.
  void validate() const;
};

enum class Status { Solved, Infeasible, Unbounded, NumericalFailure };

std::string_view to_string(Status s);

/// Max-norm KKT residuals of a primal-dual pair.
struct KktResiduals {
  double primal_feas = 0.0;
  double dual_feas = 0.0;
  double complementarity = 0.0;
  double stationarity = 0.0;

  double max() const;
};

/// Multiplier signs follow the Lagrangian
///   cost'z + duals_ineq'(G z - h) + duals_eq'(Aeq z - beq)
///          + duals_lower'(lower - z) + duals_upper'(z - upper),
/// so duals_ineq, duals_lower and duals_upper are nonnegative at optimality.
struct LpSolution {
  Status status = Status::NumericalFailure;
  VectorXd z;
  double objective_value = 0.0;
  VectorXd duals_ineq;
  VectorXd duals_eq;
  VectorXd duals_lower;
  VectorXd duals_upper;
  KktResiduals kkt;
  int iterations = 0;
};

struct SolverOptions {
  /// Bound on every KKT residual of a Solved result (pure LPs).
  double tol = 1e-9;
  /// Residual bound for problems with quadratic terms, which are solved by
  /// tangent-cut outer approximation; used when the exact active-set
  /// refinement does not apply.
  double quad_tol = 1e-7;
  int max_cut_rounds = 400;
  /// Simplex iteration cap per solve; 0 picks a size-based default.
  int max_iterations = 0;
};

/// Recomputes the four residuals from the problem data alone.
KktResiduals check_kkt(const LpProblem& problem, const LpSolution& candidate);

/// Lagrangian dual value of the multipliers in `candidate` (with the primal
/// point used for the quadratic part). Equals the primal objective at a KKT
/// point.
double dual_objective(const LpProblem& problem, const LpSolution& candidate);

/// Primal objective cost'z + 1/2 sum q z^2.
double primal_objective(const LpProblem& problem, const VectorXd& z);

/// One-shot solve. Pure and deterministic for a fixed instance.
LpSolution solve(const LpProblem& problem, const SolverOptions& options = {});

/// Re-solvable LP that keeps its simplex basis between calls.
///
/// After right-hand-side or bound edits, or after appending inequality rows,
/// the next solve() starts from the previous optimal basis, which stays dual
/// feasible, so the dual simplex usually needs only a few pivots. The cost
/// vector is fixed at construction.
class Solver {
 public:
  explicit Solver(LpProblem problem, SolverOptions options = {});
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;
  Solver(const Solver&);
  Solver& operator=(const Solver&);

  const LpProblem& problem() const;
  const SolverOptions& options() const;

  void set_ineq_rhs(Index row, double rhs);
  void set_bounds(Index var, double lower, double upper);
  /// Appends row' z <= rhs and returns its inequality index.
  Index add_ineq(const VectorXd& row, double rhs);

  /// Drops the stored basis; the next solve starts cold.
  void reset();

  LpSolution solve();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mmdual::lp
