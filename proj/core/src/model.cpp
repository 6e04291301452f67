#include "mmdual/model.hpp"

#include <cmath>

namespace mmdual {

ScalarCost ScalarCost::affine(double c) {
  if (!std::isfinite(c)) throw InvalidInput("affine cost rate must be finite");
  return ScalarCost(Kind::Affine, 0.0, c);
}

ScalarCost ScalarCost::quadratic(double curvature, double linear) {
  if (!std::isfinite(curvature) || !std::isfinite(linear)) throw InvalidInput("quadratic cost terms must be finite");
  if (curvature < 0.0) throw InvalidInput("quadratic cost curvature must be >= 0");
  return ScalarCost(Kind::Quadratic, curvature, linear);
}

AgentSpec AgentSpec::box(Index S, double lower, double upper, ScalarCost cost) {
  AgentSpec spec;
  spec.S = S;
  spec.A.resize(0, S);
  spec.b.resize(0);
  spec.lower = VectorXd::Constant(S, lower);
  spec.upper = VectorXd::Constant(S, upper);
  spec.costs.assign(static_cast<std::size_t>(S), cost);
  return spec;
}

void AgentSpec::add_constraint(const VectorXd& row, double rhs) {
  if (row.size() != S) throw InvalidInput("constraint row must have S entries");
  A.conservativeResize(A.rows() + 1, S);
  A.row(A.rows() - 1) = row.transpose();
  b.conservativeResize(b.size() + 1);
  b(b.size() - 1) = rhs;
}

lp::LpProblem AgentSpec::feasible_set_lp() const {
  lp::LpProblem p = lp::LpProblem::with_vars(S);
  p.G = A;
  p.h = b;
  p.lower = lower;
  p.upper = upper;
  return p;
}

AgentValidation validate_agent(const AgentSpec& spec, Index expected_S) {
  AgentValidation v;
  const Index S = spec.S;
  if (S != expected_S) {
    v.message = "horizon " + std::to_string(S) + " differs from problem horizon " + std::to_string(expected_S);
    return v;
  }
  if (S < 1 || spec.A.cols() != S || spec.A.rows() != spec.b.size() || spec.lower.size() != S ||
      spec.upper.size() != S || static_cast<Index>(spec.costs.size()) != S) {
    v.message = "inconsistent dimensions";
    return v;
  }
  v.dimensions_ok = true;
  v.box_finite = spec.lower.allFinite() && spec.upper.allFinite() && (spec.lower.array() <= spec.upper.array()).all();
  if (!v.box_finite) v.message = "box bounds must be finite with lower <= upper";
  v.convex = true;
  for (const auto& c : spec.costs) {
    if (c.curvature() < 0.0) v.convex = false;
  }
  if (!v.convex) v.message = "cost curvature must be nonnegative";
  if (!v.box_finite || !spec.A.allFinite() || !spec.b.allFinite()) return v;

  const auto sol = lp::solve(spec.feasible_set_lp());
  v.nonempty = sol.status == lp::Status::Solved;
  if (!v.nonempty) v.message = std::string("feasible set check: ") + std::string(lp::to_string(sol.status));
  return v;
}

ValidationReport validate(const MinMaxProblem& problem) {
  ValidationReport r;
  if (problem.agents.empty()) r.issues.push_back("problem has no agents");
  if (problem.S < 1) r.issues.push_back("horizon must be at least 1");
  for (std::size_t i = 0; i < problem.agents.size(); ++i) {
    r.agents.push_back(validate_agent(problem.agents[i], problem.S));
    if (!r.agents.back().ok()) r.issues.push_back("agent " + std::to_string(i) + ": " + r.agents.back().message);
  }
  r.ok = r.issues.empty();
  return r;
}

double eval_cost(const AgentSpec& spec, Index s, double x_s) {
  if (s < 0 || s >= static_cast<Index>(spec.costs.size())) {
    throw IndexOutOfRange("slot " + std::to_string(s) + " out of range for horizon " + std::to_string(spec.S));
  }
  return spec.costs[static_cast<std::size_t>(s)](x_s);
}

VectorXd aggregate_profile(const MinMaxProblem& problem, const std::vector<VectorXd>& x) {
  if (x.size() != problem.agents.size()) throw InvalidInput("one point per agent required");
  VectorXd total = VectorXd::Zero(problem.S);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (Index s = 0; s < problem.S; ++s) total(s) += eval_cost(problem.agents[i], s, x[i](s));
  }
  return total;
}

double peak(const MinMaxProblem& problem, const std::vector<VectorXd>& x) {
  return aggregate_profile(problem, x).maxCoeff();
}

}  // namespace mmdual
