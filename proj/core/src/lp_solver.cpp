#include <algorithm>
#include <cmath>
#include <vector>

#include "mmdual/lp.hpp"
#include "simplex.hpp"

namespace mmdual::lp {

namespace {

// Tangent-cut refinement stops once every epigraph variable is within this
// gap of its quadratic term.
constexpr double kCutGap = 1e-10;

struct QuadTerm {
  Index var;    // original variable
  Index epi;    // lifted epigraph variable
  double curv;  // objective adds curv/2 * z^2
};

detail::BoundedSimplex make_simplex(const LpProblem& p, const std::vector<QuadTerm>& quad) {
  const Index n = p.num_vars();
  const Index nl = n + static_cast<Index>(quad.size());
  const Index mi = p.num_ineq();
  const Index me = p.num_eq();
  MatrixXd rows = MatrixXd::Zero(mi + me, nl);
  VectorXd lo(mi + me);
  VectorXd hi(mi + me);
  if (mi > 0) rows.block(0, 0, mi, n) = p.G;
  if (me > 0) rows.block(mi, 0, me, n) = p.Aeq;
  lo.head(mi).setConstant(-kInf);
  hi.head(mi) = p.h;
  lo.tail(me) = p.beq;
  hi.tail(me) = p.beq;
  VectorXd cost = VectorXd::Zero(nl);
  VectorXd lower = VectorXd::Constant(nl, -kInf);
  VectorXd upper = VectorXd::Constant(nl, kInf);
  cost.head(n) = p.cost;
  lower.head(n) = p.lower;
  upper.head(n) = p.upper;
  for (const auto& qt : quad) cost(qt.epi) = 1.0;
  return detail::BoundedSimplex(std::move(rows), std::move(lo), std::move(hi), std::move(cost),
                                std::move(lower), std::move(upper));
}

LpSolution empty_solution(const LpProblem& p, Status status, int iterations) {
  LpSolution s;
  s.status = status;
  s.iterations = iterations;
  s.z = VectorXd::Constant(p.num_vars(), std::numeric_limits<double>::quiet_NaN());
  s.objective_value = std::numeric_limits<double>::quiet_NaN();
  s.duals_ineq = VectorXd::Zero(p.num_ineq());
  s.duals_eq = VectorXd::Zero(p.num_eq());
  s.duals_lower = VectorXd::Zero(p.num_vars());
  s.duals_upper = VectorXd::Zero(p.num_vars());
  s.kkt.primal_feas = s.kkt.dual_feas = s.kkt.complementarity = s.kkt.stationarity = kInf;
  return s;
}

void split_bound_dual(double reduced, std::int8_t at_bound, bool fixed, double& zl, double& zu) {
  zl = 0.0;
  zu = 0.0;
  if (at_bound == 0) return;
  if (fixed) {
    (reduced >= 0.0 ? zl : zu) = std::abs(reduced);
  } else if (at_bound < 0) {
    zl = reduced;
  } else {
    zu = -reduced;
  }
}

}  // namespace

struct Solver::Impl {
  LpProblem problem;
  SolverOptions options;
  std::vector<Index> ineq_row;  // simplex row of each inequality
  std::vector<Index> eq_row;
  std::vector<QuadTerm> quad;
  detail::BoundedSimplex simplex;

  Impl(LpProblem p, SolverOptions o)
      : problem(std::move(p)), options(o), quad(collect_quad(problem)), simplex(make_simplex(problem, quad)) {
    for (Index k = 0; k < problem.num_ineq(); ++k) ineq_row.push_back(k);
    for (Index k = 0; k < problem.num_eq(); ++k) eq_row.push_back(problem.num_ineq() + k);
    for (const auto& qt : quad) {
      const double lo = problem.lower(qt.var);
      const double hi = problem.upper(qt.var);
      add_cut(qt, lo);
      if (hi > lo) {
        add_cut(qt, hi);
        add_cut(qt, 0.5 * (lo + hi));
      }
    }
  }

  static std::vector<QuadTerm> collect_quad(const LpProblem& p) {
    p.validate();
    std::vector<QuadTerm> out;
    if (!p.has_quadratic()) return out;
    Index next = p.num_vars();
    for (Index j = 0; j < p.num_vars(); ++j) {
      if (p.quad_diag(j) > 0.0) out.push_back({j, next++, p.quad_diag(j)});
    }
    return out;
  }

  Index lifted_vars() const { return problem.num_vars() + static_cast<Index>(quad.size()); }

  // t >= curv*at*z - curv*at^2/2, the tangent of curv/2 z^2 at `at`.
  void add_cut(const QuadTerm& qt, double at) {
    VectorXd row = VectorXd::Zero(lifted_vars());
    row(qt.var) = qt.curv * at;
    row(qt.epi) = -1.0;
    simplex.add_row(row, -kInf, 0.5 * qt.curv * at * at);
  }

  int iteration_cap() const {
    if (options.max_iterations > 0) return options.max_iterations;
    return static_cast<int>(50 * (simplex.num_rows() + simplex.num_structural()) + 1000);
  }

  // Runs the simplex to an optimal basis and polishes it. Returns Solved
  // with `basic` filled, or the failure status.
  Status run_lp(detail::BasicSolution& basic, int& total_iterations) {
    for (int attempt = 0; attempt < 3; ++attempt) {
      int it = 0;
      const detail::Outcome o = simplex.optimize(iteration_cap(), it);
      total_iterations += it;
      switch (o) {
        case detail::Outcome::Infeasible: return Status::Infeasible;
        case detail::Outcome::Unbounded: return Status::Unbounded;
        case detail::Outcome::IterationLimit:
        case detail::Outcome::Singular:
          simplex.reinvert();
          continue;
        case detail::Outcome::Optimal: break;
      }
      if (!simplex.polish(basic)) {
        simplex.reinvert();
        continue;
      }
      if (attempt < 2 && !lifted_kkt_ok(basic)) {
        simplex.reinvert();
        continue;
      }
      return Status::Solved;
    }
    return Status::NumericalFailure;
  }

  // Feasibility and dual-sign check of a polished basis on the lifted LP.
  bool lifted_kkt_ok(const detail::BasicSolution& b) const {
    const double tol = options.tol;
    const Index n = problem.num_vars();
    for (Index k = 0; k < problem.num_ineq(); ++k) {
      const double y = b.row_duals(ineq_row[k]);
      if (y < -tol) return false;
      if (problem.G.row(k).dot(b.z.head(n)) - problem.h(k) > tol) return false;
    }
    for (Index k = 0; k < problem.num_eq(); ++k) {
      if (std::abs(problem.Aeq.row(k).dot(b.z.head(n)) - problem.beq(k)) > tol) return false;
    }
    for (Index j = 0; j < n; ++j) {
      if (b.z(j) < problem.lower(j) - tol || b.z(j) > problem.upper(j) + tol) return false;
      const bool fixed = problem.lower(j) == problem.upper(j);
      if (fixed || b.at_bound[j] == 0) {
        if (b.at_bound[j] == 0 && std::abs(b.reduced(j)) > tol) return false;
        continue;
      }
      if (b.at_bound[j] < 0 && b.reduced(j) < -tol) return false;
      if (b.at_bound[j] > 0 && b.reduced(j) > tol) return false;
    }
    return true;
  }

  LpSolution to_solution(const detail::BasicSolution& b, int iterations) const {
    const Index n = problem.num_vars();
    LpSolution s;
    s.status = Status::Solved;
    s.iterations = iterations;
    s.z = b.z.head(n);
    s.duals_ineq.resize(problem.num_ineq());
    s.duals_eq.resize(problem.num_eq());
    for (Index k = 0; k < problem.num_ineq(); ++k) s.duals_ineq(k) = b.row_duals(ineq_row[k]);
    for (Index k = 0; k < problem.num_eq(); ++k) s.duals_eq(k) = b.row_duals(eq_row[k]);
    s.duals_lower = VectorXd::Zero(n);
    s.duals_upper = VectorXd::Zero(n);
    for (Index j = 0; j < n; ++j) {
      // With quadratic lifting the reduced cost of z_j already includes the
      // cut multipliers, i.e. an approximation of curv * z_j.
      split_bound_dual(b.reduced(j), b.at_bound[j], problem.lower(j) == problem.upper(j), s.duals_lower(j),
                       s.duals_upper(j));
    }
    s.objective_value = primal_objective(problem, s.z);
    s.kkt = check_kkt(problem, s);
    return s;
  }

  // Solves the equality-constrained QP on the active set of `b` exactly.
  bool refine_active_set(const detail::BasicSolution& b, LpSolution& out) const {
    const Index n = problem.num_vars();
    std::vector<Index> free_vars;
    VectorXd z = b.z.head(n);
    for (Index j = 0; j < n; ++j) {
      if (b.at_bound[j] == 0) free_vars.push_back(j);
    }
    std::vector<Index> act_ineq;
    for (Index k = 0; k < problem.num_ineq(); ++k) {
      if (b.row_active[ineq_row[k]]) act_ineq.push_back(k);
    }
    const Index nf = static_cast<Index>(free_vars.size());
    const Index na = static_cast<Index>(act_ineq.size()) + problem.num_eq();
    MatrixXd act(na, n);
    VectorXd rhs(na);
    for (Index a = 0; a < static_cast<Index>(act_ineq.size()); ++a) {
      act.row(a) = problem.G.row(act_ineq[a]);
      rhs(a) = problem.h(act_ineq[a]);
    }
    for (Index k = 0; k < problem.num_eq(); ++k) {
      act.row(static_cast<Index>(act_ineq.size()) + k) = problem.Aeq.row(k);
      rhs(static_cast<Index>(act_ineq.size()) + k) = problem.beq(k);
    }

    MatrixXd K = MatrixXd::Zero(nf + na, nf + na);
    VectorXd r = VectorXd::Zero(nf + na);
    for (Index a = 0; a < nf; ++a) {
      const Index j = free_vars[a];
      K(a, a) = problem.quad_diag(j);
      r(a) = -problem.cost(j);
      for (Index c = 0; c < na; ++c) {
        K(a, nf + c) = act(c, j);
        K(nf + c, a) = act(c, j);
      }
    }
    VectorXd fixed_z = z;
    for (Index j : free_vars) fixed_z(j) = 0.0;
    r.tail(na) = rhs - act * fixed_z;

    VectorXd sol = VectorXd::Zero(nf + na);
    if (nf + na > 0) {
      Eigen::FullPivLU<MatrixXd> lu(K);
      sol = lu.solve(r);
      if (!sol.allFinite() || (K * sol - r).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + r.cwiseAbs().maxCoeff())) {
        return false;
      }
    }
    for (Index a = 0; a < nf; ++a) z(free_vars[a]) = sol(a);
    VectorXd y_act = sol.tail(na);

    LpSolution s;
    s.status = Status::Solved;
    s.z = z;
    s.duals_ineq = VectorXd::Zero(problem.num_ineq());
    s.duals_eq = VectorXd::Zero(problem.num_eq());
    for (Index a = 0; a < static_cast<Index>(act_ineq.size()); ++a) s.duals_ineq(act_ineq[a]) = y_act(a);
    for (Index k = 0; k < problem.num_eq(); ++k) s.duals_eq(k) = y_act(static_cast<Index>(act_ineq.size()) + k);
    VectorXd grad = problem.cost + problem.quad_diag.cwiseProduct(z);
    if (na > 0) grad += act.transpose() * y_act;
    s.duals_lower = VectorXd::Zero(n);
    s.duals_upper = VectorXd::Zero(n);
    for (Index j = 0; j < n; ++j) {
      split_bound_dual(grad(j), b.at_bound[j], problem.lower(j) == problem.upper(j), s.duals_lower(j),
                       s.duals_upper(j));
    }
    s.objective_value = primal_objective(problem, z);
    s.kkt = check_kkt(problem, s);
    if (s.kkt.max() > options.tol) return false;
    out = std::move(s);
    return true;
  }

  LpSolution solve() {
    int iterations = 0;
    detail::BasicSolution basic;
    if (quad.empty()) {
      const Status st = run_lp(basic, iterations);
      if (st != Status::Solved) return empty_solution(problem, st, iterations);
      LpSolution s = to_solution(basic, iterations);
      if (s.kkt.max() > options.tol) s.status = Status::NumericalFailure;
      return s;
    }

    for (int round = 0;; ++round) {
      const Status st = run_lp(basic, iterations);
      if (st == Status::Unbounded) return empty_solution(problem, Status::NumericalFailure, iterations);
      if (st != Status::Solved) return empty_solution(problem, st, iterations);
      double worst = 0.0;
      std::vector<std::pair<const QuadTerm*, double>> cuts;
      for (const auto& qt : quad) {
        const double zj = basic.z(qt.var);
        const double gap = 0.5 * qt.curv * zj * zj - basic.z(qt.epi);
        worst = std::max(worst, gap);
        if (gap > kCutGap) cuts.emplace_back(&qt, zj);
      }
      if (cuts.empty() || round >= options.max_cut_rounds) break;
      for (const auto& [qt, at] : cuts) add_cut(*qt, at);
    }

    LpSolution exact;
    if (refine_active_set(basic, exact)) {
      exact.iterations = iterations;
      return exact;
    }
    LpSolution s = to_solution(basic, iterations);
    if (s.kkt.max() > std::max(options.tol, options.quad_tol)) s.status = Status::NumericalFailure;
    return s;
  }
};

Solver::Solver(LpProblem problem, SolverOptions options)
    : impl_(std::make_unique<Impl>(std::move(problem), options)) {}
Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;
Solver::Solver(const Solver& other) : impl_(std::make_unique<Impl>(*other.impl_)) {}
Solver& Solver::operator=(const Solver& other) {
  if (this != &other) impl_ = std::make_unique<Impl>(*other.impl_);
  return *this;
}

const LpProblem& Solver::problem() const { return impl_->problem; }
const SolverOptions& Solver::options() const { return impl_->options; }

void Solver::set_ineq_rhs(Index row, double rhs) {
  if (row < 0 || row >= impl_->problem.num_ineq()) throw IndexOutOfRange("set_ineq_rhs: row out of range");
  impl_->problem.h(row) = rhs;
  impl_->simplex.set_row_bounds(impl_->ineq_row[row], -kInf, rhs);
}

void Solver::set_bounds(Index var, double lower, double upper) {
  if (var < 0 || var >= impl_->problem.num_vars()) throw IndexOutOfRange("set_bounds: variable out of range");
  if (!(lower <= upper)) throw InvalidInput("set_bounds: lower > upper");
  impl_->problem.lower(var) = lower;
  impl_->problem.upper(var) = upper;
  impl_->simplex.set_var_bounds(var, lower, upper);
}

Index Solver::add_ineq(const VectorXd& row, double rhs) {
  if (row.size() != impl_->problem.num_vars()) throw InvalidInput("add_ineq: row length mismatch");
  impl_->problem.add_ineq(row, rhs);
  VectorXd lifted = VectorXd::Zero(impl_->lifted_vars());
  lifted.head(row.size()) = row;
  impl_->ineq_row.push_back(impl_->simplex.num_rows());
  impl_->simplex.add_row(lifted, -kInf, rhs);
  return impl_->problem.num_ineq() - 1;
}

void Solver::reset() { impl_->simplex.reset(); }

LpSolution Solver::solve() { return impl_->solve(); }

LpSolution solve(const LpProblem& problem, const SolverOptions& options) {
  Solver s(problem, options);
  return s.solve();
}

}  // namespace mmdual::lp
