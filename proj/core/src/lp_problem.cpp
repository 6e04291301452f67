#include <algorithm>
#include <cmath>
#include <string>

#include "mmdual/lp.hpp"

namespace mmdual::lp {

LpProblem LpProblem::with_vars(Index n) {
  LpProblem p;
  p.cost = VectorXd::Zero(n);
  p.G.resize(0, n);
  p.h.resize(0);
  p.Aeq.resize(0, n);
  p.beq.resize(0);
  p.lower = VectorXd::Constant(n, -kInf);
  p.upper = VectorXd::Constant(n, kInf);
  return p;
}

bool LpProblem::has_quadratic() const {
  return quad_diag.size() > 0 && (quad_diag.array() != 0.0).any();
}

namespace {

void append_row(MatrixXd& M, VectorXd& rhs_vec, const VectorXd& row, double rhs) {
  const Index n = row.size();
  if (M.cols() != n && M.rows() > 0) {
    throw InvalidInput("row length " + std::to_string(n) + " does not match " + std::to_string(M.cols()));
  }
  M.conservativeResize(M.rows() + 1, n);
  M.row(M.rows() - 1) = row.transpose();
  rhs_vec.conservativeResize(rhs_vec.size() + 1);
  rhs_vec(rhs_vec.size() - 1) = rhs;
}

}  // namespace

void LpProblem::add_ineq(const VectorXd& row, double rhs) { append_row(G, h, row, rhs); }

void LpProblem::add_eq(const VectorXd& row, double rhs) { append_row(Aeq, beq, row, rhs); }

void LpProblem::validate() const {
  const Index n = num_vars();
  auto fail = [](const std::string& what) { throw InvalidInput("LpProblem: " + what); };
  if (lower.size() != n || upper.size() != n) fail("bound vectors must have one entry per variable");
  if (G.rows() != h.size() || (G.rows() > 0 && G.cols() != n)) fail("G/h dimensions inconsistent");
  if (Aeq.rows() != beq.size() || (Aeq.rows() > 0 && Aeq.cols() != n)) fail("Aeq/beq dimensions inconsistent");
  if (quad_diag.size() != 0 && quad_diag.size() != n) fail("quad_diag must be empty or length n");
  if (!cost.allFinite() || !G.allFinite() || !Aeq.allFinite() || !beq.allFinite()) fail("non-finite data");
  for (Index k = 0; k < h.size(); ++k) {
    if (std::isnan(h(k)) || h(k) == -kInf) fail("inequality rhs must be a number or +inf");
  }
  for (Index j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j) || lower(j) == kInf ||
        upper(j) == -kInf) {
      fail("invalid bounds on variable " + std::to_string(j));
    }
    if (quad_diag.size() == n) {
      if (!std::isfinite(quad_diag(j)) || quad_diag(j) < 0.0) fail("quadratic term must be finite and >= 0");
      if (quad_diag(j) > 0.0 && !(std::isfinite(lower(j)) && std::isfinite(upper(j)))) {
        fail("quadratic term on variable " + std::to_string(j) + " requires finite bounds");
      }
    }
  }
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Solved: return "Solved";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

double KktResiduals::max() const { return std::max({primal_feas, dual_feas, complementarity, stationarity}); }

double primal_objective(const LpProblem& problem, const VectorXd& z) {
  double v = problem.cost.dot(z);
  if (problem.quad_diag.size() == z.size()) v += 0.5 * (problem.quad_diag.array() * z.array().square()).sum();
  return v;
}

KktResiduals check_kkt(const LpProblem& p, const LpSolution& s) {
  const Index n = p.num_vars();
  KktResiduals r;
  if (s.z.size() != n || s.duals_ineq.size() != p.num_ineq() || s.duals_eq.size() != p.num_eq() ||
      s.duals_lower.size() != n || s.duals_upper.size() != n) {
    r.primal_feas = r.dual_feas = r.complementarity = r.stationarity = kInf;
    return r;
  }

  VectorXd grad = p.cost;
  if (p.quad_diag.size() == n) grad.array() += p.quad_diag.array() * s.z.array();

  if (p.num_ineq() > 0) {
    const VectorXd slack = p.h - p.G * s.z;
    for (Index k = 0; k < slack.size(); ++k) {
      const double y = s.duals_ineq(k);
      r.primal_feas = std::max(r.primal_feas, -slack(k));
      r.dual_feas = std::max(r.dual_feas, -y);
      if (std::isfinite(slack(k))) {
        r.complementarity = std::max(r.complementarity, std::abs(y * slack(k)));
      } else {
        r.dual_feas = std::max(r.dual_feas, std::abs(y));
      }
    }
    grad += p.G.transpose() * s.duals_ineq;
  }
  if (p.num_eq() > 0) {
    r.primal_feas = std::max(r.primal_feas, (p.Aeq * s.z - p.beq).cwiseAbs().maxCoeff());
    grad += p.Aeq.transpose() * s.duals_eq;
  }
  for (Index j = 0; j < n; ++j) {
    const double zl = s.duals_lower(j);
    const double zu = s.duals_upper(j);
    r.dual_feas = std::max({r.dual_feas, -zl, -zu});
    if (std::isfinite(p.lower(j))) {
      r.primal_feas = std::max(r.primal_feas, p.lower(j) - s.z(j));
      r.complementarity = std::max(r.complementarity, std::abs(zl * (s.z(j) - p.lower(j))));
    } else {
      r.dual_feas = std::max(r.dual_feas, std::abs(zl));
    }
    if (std::isfinite(p.upper(j))) {
      r.primal_feas = std::max(r.primal_feas, s.z(j) - p.upper(j));
      r.complementarity = std::max(r.complementarity, std::abs(zu * (p.upper(j) - s.z(j))));
    } else {
      r.dual_feas = std::max(r.dual_feas, std::abs(zu));
    }
    grad(j) += zu - zl;
  }
  r.stationarity = n > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
  if (!s.z.allFinite()) r.primal_feas = kInf;
  return r;
}

double dual_objective(const LpProblem& p, const LpSolution& s) {
  const Index n = p.num_vars();
  double v = 0.0;
  for (Index k = 0; k < p.num_ineq(); ++k) {
    if (s.duals_ineq(k) != 0.0) v -= p.h(k) * s.duals_ineq(k);
  }
  if (p.num_eq() > 0) v -= p.beq.dot(s.duals_eq);
  for (Index j = 0; j < n; ++j) {
    if (s.duals_lower(j) != 0.0) v += p.lower(j) * s.duals_lower(j);
    if (s.duals_upper(j) != 0.0) v -= p.upper(j) * s.duals_upper(j);
  }
  if (p.quad_diag.size() == n) v -= 0.5 * (p.quad_diag.array() * s.z.array().square()).sum();
  return v;
}

}  // namespace mmdual::lp
