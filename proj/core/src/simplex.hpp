#pragma once

// Dense bounded-variable simplex on a compact tableau.
//
// Every row i of  A z  gets a logical variable r_i = a_i' z with bounds
// [row_lo_i, row_hi_i], so the working system is  [A  -I] (z, r) = 0  with
// bounds on all n + m variables. The tableau stores T = B^{-1} N for the
// current basis B, so that  x_B = -T x_N.
//
// Cold starts use the composite primal simplex (phase 1 minimizes the sum of
// bound violations). Warm starts after right-hand-side, bound or row edits
// keep the basis, which stays dual feasible, and run the dual simplex.
// Results are recomputed exactly from the final basis by polish().

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace mmdual::lp::detail {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SimplexTolerances {
  double primal = 1e-10;
  double dual = 1e-10;
  double pivot = 1e-9;
};

enum class Outcome { Optimal, Infeasible, Unbounded, IterationLimit, Singular };

struct BasicSolution {
  VectorXd z;          // structural values
  VectorXd row_duals;  // one per row; zero for rows whose logical is basic
  VectorXd reduced;    // c + A'y per structural (zero for basic ones)
  std::vector<std::int8_t> at_bound;  // per structural: 0 basic/free, -1 lower, +1 upper
  std::vector<char> row_active;       // per row: logical is nonbasic
};

class BoundedSimplex {
 public:
  BoundedSimplex(MatrixXd rows, VectorXd row_lo, VectorXd row_hi, VectorXd cost, VectorXd lower,
                 VectorXd upper, SimplexTolerances tol = {});

  Index num_structural() const { return n_; }
  Index num_rows() const { return m_; }
  bool has_basis() const { return has_basis_; }

  void set_row_bounds(Index row, double lo, double hi);
  void set_var_bounds(Index var, double lo, double hi);
  void add_row(const VectorXd& a, double lo, double hi);
  void reset() { has_basis_ = false; }

  /// Runs to optimality from the current (or a fresh slack) basis.
  Outcome optimize(int max_iterations, int& iterations);

  /// Recomputes T, basic values and reduced costs from the original data.
  /// Returns false (and falls back to the slack basis) if the basis matrix
  /// is numerically singular.
  bool reinvert();

  /// Exact primal and dual values for the current basis via one LU solve.
  bool polish(BasicSolution& out) const;

 private:
  enum class NbPos : std::int8_t { Lower, Upper, Zero };
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  void cold_start();
  double bound_value(Index v, NbPos pos) const;
  NbPos default_position(Index v) const;
  void move_nonbasic(Index v, double value);
  void recompute_basic_values();
  void compute_reduced_costs();
  double infeasibility(Index v) const;
  bool primal_feasible() const;
  bool dual_feasible() const;
  bool is_fixed(Index v) const { return lo_(v) == hi_(v); }
  double feas_tol(double bound) const;

  Outcome primal(int max_iterations, int& iterations);
  Outcome dual(int max_iterations, int& iterations);
  void pivot(Index row, Index col, NbPos leaving_pos);

  Index n_ = 0;
  Index m_ = 0;
  MatrixXd A_;
  VectorXd lo_, hi_, cost_;  // length n + m
  SimplexTolerances tol_;

  bool has_basis_ = false;
  RowMatrix T_;
  std::vector<Index> head_;     // basic variable per row
  std::vector<Index> col_var_;  // nonbasic variable per column
  std::vector<Index> where_;    // row (basic) or column (nonbasic) per variable
  std::vector<char> basic_;
  std::vector<NbPos> pos_;
  VectorXd x_;  // values of all n + m variables
  VectorXd d_;  // reduced costs per tableau column
};

}  // namespace mmdual::lp::detail
