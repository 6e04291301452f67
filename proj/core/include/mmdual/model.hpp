#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mmdual/error.hpp"
#include "mmdual/lp.hpp"

namespace mmdual {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Convex scalar cost g(x) = a x^2 + b x with a >= 0. An affine cost c x is
/// stored as a = 0, b = c but keeps its kind for serialization.
class ScalarCost {
 public:
  enum class Kind { Affine, Quadratic };

  ScalarCost() = default;
  static ScalarCost affine(double c);
  /// Throws InvalidInput when curvature is negative or either term is not finite.
  static ScalarCost quadratic(double curvature, double linear);

  Kind kind() const { return kind_; }
  bool is_affine() const { return kind_ == Kind::Affine || a_ == 0.0; }
  double curvature() const { return a_; }
  double linear() const { return b_; }

  double operator()(double x) const { return (a_ * x + b_) * x; }
  double slope(double x) const { return 2.0 * a_ * x + b_; }

  friend bool operator==(const ScalarCost&, const ScalarCost&) = default;

 private:
  ScalarCost(Kind k, double a, double b) : kind_(k), a_(a), b_(b) {}

  Kind kind_ = Kind::Affine;
  double a_ = 0.0;
  double b_ = 0.0;
};

/// One agent's data: X = {x : A x <= b, lower <= x <= upper} and the costs
/// g_s, one per slot.
struct AgentSpec {
  Index S = 0;
  MatrixXd A;
  VectorXd b;
  VectorXd lower;
  VectorXd upper;
  std::vector<ScalarCost> costs;

  /// Box-only agent with identical costs in every slot.
  static AgentSpec box(Index S, double lower, double upper, ScalarCost cost);

  /// Appends the row  row' x <= rhs  to A, b.
  void add_constraint(const VectorXd& row, double rhs);

  /// The feasible set as LP rows over x alone (zero cost).
  lp::LpProblem feasible_set_lp() const;
};

/// Minimize over x^1..x^N in X^1..X^N the peak  max_s sum_i g^i_s(x^i_s).
struct MinMaxProblem {
  Index S = 0;
  std::vector<AgentSpec> agents;

  Index num_agents() const { return static_cast<Index>(agents.size()); }
};

struct AgentValidation {
  bool dimensions_ok = false;
  bool box_finite = false;
  bool convex = false;
  bool nonempty = false;
  std::string message;

  bool ok() const { return dimensions_ok && box_finite && convex && nonempty; }
};

struct ValidationReport {
  bool ok = false;
  std::vector<AgentValidation> agents;
  std::vector<std::string> issues;
};

/// Checks one agent: shapes, finite box, convex costs, and nonempty X via a
/// phase-1 LP.
AgentValidation validate_agent(const AgentSpec& spec, Index expected_S);

/// Report-style check of every agent and of the shared horizon; never throws.
ValidationReport validate(const MinMaxProblem& problem);

/// g_s(x_s); throws IndexOutOfRange for a bad slot.
double eval_cost(const AgentSpec& spec, Index s, double x_s);

/// Per-slot aggregate  sum_i g^i_s(x^i_s)  for a joint point.
VectorXd aggregate_profile(const MinMaxProblem& problem, const std::vector<VectorXd>& x);

/// max_s of aggregate_profile.
double peak(const MinMaxProblem& problem, const std::vector<VectorXd>& x);

}  // namespace mmdual
