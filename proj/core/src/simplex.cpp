#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmdual::lp::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// A basis whose reduced matrix has reciprocal condition below this is
// treated as singular.
constexpr double kMinRcond = 1e-13;
}  // namespace

BoundedSimplex::BoundedSimplex(MatrixXd rows, VectorXd row_lo, VectorXd row_hi, VectorXd cost,
                               VectorXd lower, VectorXd upper, SimplexTolerances tol)
    : n_(rows.cols()), m_(rows.rows()), A_(std::move(rows)), tol_(tol) {
  lo_.resize(n_ + m_);
  hi_.resize(n_ + m_);
  cost_ = VectorXd::Zero(n_ + m_);
  lo_.head(n_) = lower;
  hi_.head(n_) = upper;
  lo_.tail(m_) = row_lo;
  hi_.tail(m_) = row_hi;
  cost_.head(n_) = cost;
}

double BoundedSimplex::feas_tol(double bound) const {
  return tol_.primal * std::max(1.0, std::abs(bound));
}

BoundedSimplex::NbPos BoundedSimplex::default_position(Index v) const {
  if (std::isfinite(lo_(v))) return NbPos::Lower;
  if (std::isfinite(hi_(v))) return NbPos::Upper;
  return NbPos::Zero;
}

double BoundedSimplex::bound_value(Index v, NbPos pos) const {
  switch (pos) {
    case NbPos::Lower: return lo_(v);
    case NbPos::Upper: return hi_(v);
    case NbPos::Zero: return 0.0;
  }
  return 0.0;
}

void BoundedSimplex::cold_start() {
  const Index nt = n_ + m_;
  T_ = -A_;
  head_.resize(m_);
  col_var_.resize(n_);
  where_.assign(nt, 0);
  basic_.assign(nt, 0);
  pos_.assign(nt, NbPos::Zero);
  x_ = VectorXd::Zero(nt);
  for (Index j = 0; j < n_; ++j) {
    col_var_[j] = j;
    where_[j] = j;
    pos_[j] = default_position(j);
    x_(j) = bound_value(j, pos_[j]);
  }
  for (Index i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    where_[n_ + i] = i;
    basic_[n_ + i] = 1;
  }
  if (m_ > 0) x_.tail(m_) = A_ * x_.head(n_);
  has_basis_ = true;
  compute_reduced_costs();
}

void BoundedSimplex::move_nonbasic(Index v, double value) {
  const double delta = value - x_(v);
  if (delta != 0.0) {
    const Index j = where_[v];
    for (Index i = 0; i < m_; ++i) x_(head_[i]) -= T_(i, j) * delta;
  }
  x_(v) = value;
}

void BoundedSimplex::set_var_bounds(Index v, double lo, double hi) {
  lo_(v) = lo;
  hi_(v) = hi;
  if (!has_basis_ || basic_[v]) return;
  NbPos p = pos_[v];
  if ((p == NbPos::Lower && !std::isfinite(lo)) || (p == NbPos::Upper && !std::isfinite(hi)) ||
      (p == NbPos::Zero && (std::isfinite(lo) || std::isfinite(hi)))) {
    p = default_position(v);
  }
  pos_[v] = p;
  move_nonbasic(v, p == NbPos::Zero ? x_(v) : bound_value(v, p));
}

void BoundedSimplex::set_row_bounds(Index row, double lo, double hi) { set_var_bounds(n_ + row, lo, hi); }

void BoundedSimplex::add_row(const VectorXd& a, double lo, double hi) {
  const Index v = n_ + m_;
  A_.conservativeResize(m_ + 1, n_);
  A_.row(m_) = a.transpose();
  lo_.conservativeResize(v + 1);
  hi_.conservativeResize(v + 1);
  cost_.conservativeResize(v + 1);
  lo_(v) = lo;
  hi_(v) = hi;
  cost_(v) = 0.0;
  if (has_basis_) {
    Eigen::RowVectorXd t = Eigen::RowVectorXd::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      const Index b = head_[i];
      if (b < n_ && a(b) != 0.0) t += a(b) * T_.row(i);
    }
    for (Index j = 0; j < n_; ++j) {
      if (col_var_[j] < n_) t(j) -= a(col_var_[j]);
    }
    T_.conservativeResize(m_ + 1, n_);
    T_.row(m_) = t;
    head_.push_back(v);
    where_.push_back(m_);
    basic_.push_back(1);
    pos_.push_back(NbPos::Zero);
    x_.conservativeResize(v + 1);
    x_(v) = a.dot(x_.head(n_));
  }
  ++m_;
}

void BoundedSimplex::compute_reduced_costs() {
  d_.resize(n_);
  for (Index j = 0; j < n_; ++j) d_(j) = cost_(col_var_[j]);
  for (Index i = 0; i < m_; ++i) {
    const double cb = cost_(head_[i]);
    if (cb != 0.0) d_ -= cb * T_.row(i).transpose();
  }
}

void BoundedSimplex::recompute_basic_values() {
  VectorXd xn(n_);
  for (Index j = 0; j < n_; ++j) xn(j) = x_(col_var_[j]);
  const VectorXd xb = -(T_ * xn);
  for (Index i = 0; i < m_; ++i) x_(head_[i]) = xb(i);
}

double BoundedSimplex::infeasibility(Index v) const {
  const double x = x_(v);
  if (x < lo_(v) - feas_tol(lo_(v))) return lo_(v) - x;
  if (x > hi_(v) + feas_tol(hi_(v))) return x - hi_(v);
  return 0.0;
}

bool BoundedSimplex::primal_feasible() const {
  for (Index i = 0; i < m_; ++i) {
    if (infeasibility(head_[i]) > 0.0) return false;
  }
  return true;
}

bool BoundedSimplex::dual_feasible() const {
  for (Index j = 0; j < n_; ++j) {
    const Index v = col_var_[j];
    if (is_fixed(v)) continue;
    switch (pos_[v]) {
      case NbPos::Lower:
        if (d_(j) < -tol_.dual) return false;
        break;
      case NbPos::Upper:
        if (d_(j) > tol_.dual) return false;
        break;
      case NbPos::Zero:
        if (std::abs(d_(j)) > tol_.dual) return false;
        break;
    }
  }
  return true;
}

void BoundedSimplex::pivot(Index r, Index q, NbPos leaving_pos) {
  const double p = T_(r, q);
  const VectorXd colq = T_.col(q);
  T_.row(r) /= p;
  T_(r, q) = 1.0 / p;
  for (Index i = 0; i < m_; ++i) {
    const double f = colq(i);
    if (i == r || f == 0.0) continue;
    T_.row(i) -= f * T_.row(r);
    T_(i, q) = -f / p;
  }
  const Index leaving = head_[r];
  const Index entering = col_var_[q];
  head_[r] = entering;
  col_var_[q] = leaving;
  where_[entering] = r;
  where_[leaving] = q;
  basic_[entering] = 1;
  basic_[leaving] = 0;
  pos_[leaving] = leaving_pos;
}

Outcome BoundedSimplex::primal(int max_iterations, int& iterations) {
  int degenerate_run = 0;
  bool bland = false;
  bool retried = false;
  VectorXd rc(n_);
  std::vector<double> alpha(m_);

  for (;;) {
    if (iterations >= max_iterations) return Outcome::IterationLimit;
    if (static_cast<Index>(alpha.size()) != m_) alpha.resize(m_);

    // Phase 1 prices the sum of bound violations; phase 2 the true cost.
    bool phase1 = false;
    rc.setZero();
    for (Index i = 0; i < m_; ++i) {
      const Index v = head_[i];
      double w = 0.0;
      if (x_(v) < lo_(v) - feas_tol(lo_(v))) {
        w = -1.0;
      } else if (x_(v) > hi_(v) + feas_tol(hi_(v))) {
        w = 1.0;
      }
      if (w != 0.0) {
        phase1 = true;
        rc -= w * T_.row(i).transpose();
      }
    }
    if (!phase1) {
      compute_reduced_costs();
      rc = d_;
    }

    Index q = -1;
    int sigma = 0;
    double best = 0.0;
    for (Index j = 0; j < n_; ++j) {
      const Index v = col_var_[j];
      if (is_fixed(v)) continue;
      const double r = rc(j);
      int s = 0;
      switch (pos_[v]) {
        case NbPos::Lower:
          if (r < -tol_.dual) s = 1;
          break;
        case NbPos::Upper:
          if (r > tol_.dual) s = -1;
          break;
        case NbPos::Zero:
          if (r < -tol_.dual) s = 1;
          else if (r > tol_.dual) s = -1;
          break;
      }
      if (s == 0) continue;
      const double score = std::abs(r);
      const bool better = q < 0 || (bland ? v < col_var_[q]
                                          : (score > best || (score == best && v < col_var_[q])));
      if (better) {
        q = j;
        sigma = s;
        best = score;
      }
    }

    if (q < 0) {
      if (!phase1) return Outcome::Optimal;
      if (!retried) {
        retried = true;
        if (!reinvert()) return Outcome::Singular;
        continue;
      }
      return Outcome::Infeasible;
    }

    // Harris two-pass ratio test.
    double theta_max = kInf;
    for (Index i = 0; i < m_; ++i) {
      const double a = -T_(i, q) * sigma;
      alpha[i] = a;
      if (std::abs(a) <= tol_.pivot) continue;
      const Index v = head_[i];
      const double x = x_(v);
      double b;
      if (x < lo_(v) - feas_tol(lo_(v))) {
        if (a < 0.0) continue;
        b = lo_(v);
      } else if (x > hi_(v) + feas_tol(hi_(v))) {
        if (a > 0.0) continue;
        b = hi_(v);
      } else {
        b = a > 0.0 ? hi_(v) : lo_(v);
        if (!std::isfinite(b)) continue;
      }
      const double relaxed = (b + (a > 0.0 ? feas_tol(b) : -feas_tol(b)) - x) / a;
      theta_max = std::min(theta_max, relaxed);
    }

    const Index entering = col_var_[q];
    const double range = hi_(entering) - lo_(entering);

    Index r = -1;
    double theta = kInf;
    double leave_bound = 0.0;
    double best_alpha = 0.0;
    if (std::isfinite(theta_max)) {
      for (Index i = 0; i < m_; ++i) {
        const double a = alpha[i];
        if (std::abs(a) <= tol_.pivot) continue;
        const Index v = head_[i];
        const double x = x_(v);
        double b;
        if (x < lo_(v) - feas_tol(lo_(v))) {
          if (a < 0.0) continue;
          b = lo_(v);
        } else if (x > hi_(v) + feas_tol(hi_(v))) {
          if (a > 0.0) continue;
          b = hi_(v);
        } else {
          b = a > 0.0 ? hi_(v) : lo_(v);
          if (!std::isfinite(b)) continue;
        }
        const double t = (b - x) / a;
        if (bland) {
          if (r < 0 || t < theta || (t == theta && v < head_[r])) {
            r = i;
            theta = t;
            leave_bound = b;
          }
        } else if (t <= theta_max) {
          const double mag = std::abs(a);
          if (r < 0 || mag > best_alpha || (mag == best_alpha && v < head_[r])) {
            r = i;
            theta = t;
            leave_bound = b;
            best_alpha = mag;
          }
        }
      }
    }

    const bool flip = std::isfinite(range) && (r < 0 || range <= theta);
    if (!flip && r < 0) return phase1 ? Outcome::Singular : Outcome::Unbounded;

    double step = flip ? range : std::max(0.0, theta);
    for (Index i = 0; i < m_; ++i) {
      if (alpha[i] != 0.0) x_(head_[i]) += alpha[i] * step;
    }
    if (flip) {
      pos_[entering] = sigma > 0 ? NbPos::Upper : NbPos::Lower;
      x_(entering) = bound_value(entering, pos_[entering]);
    } else {
      x_(entering) += sigma * step;
      const Index leaving = head_[r];
      const NbPos lp = leave_bound == lo_(leaving) ? NbPos::Lower : NbPos::Upper;
      x_(leaving) = leave_bound;
      pivot(r, q, lp);
    }

    if (step <= 1e-12) {
      if (++degenerate_run > 50) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
    ++iterations;
  }
}

Outcome BoundedSimplex::dual(int max_iterations, int& iterations) {
  for (;;) {
    if (iterations >= max_iterations) return Outcome::IterationLimit;
    compute_reduced_costs();

    Index r = -1;
    double worst = 0.0;
    for (Index i = 0; i < m_; ++i) {
      const double inf = infeasibility(head_[i]);
      if (inf > worst || (inf == worst && inf > 0.0 && head_[i] < head_[r])) {
        worst = inf;
        r = i;
      }
    }
    if (r < 0) return Outcome::Optimal;

    const Index leaving = head_[r];
    const bool below = x_(leaving) < lo_(leaving);
    const double target = below ? lo_(leaving) : hi_(leaving);
    const double dir = below ? 1.0 : -1.0;

    auto eligible = [&](Index j) {
      const Index v = col_var_[j];
      if (is_fixed(v)) return false;
      const double as = T_(r, j) * dir;
      switch (pos_[v]) {
        case NbPos::Lower: return as < -tol_.pivot;
        case NbPos::Upper: return as > tol_.pivot;
        case NbPos::Zero: return std::abs(as) > tol_.pivot;
      }
      return false;
    };

    double theta_max = kInf;
    for (Index j = 0; j < n_; ++j) {
      if (!eligible(j)) continue;
      theta_max = std::min(theta_max, (std::abs(d_(j)) + tol_.dual) / std::abs(T_(r, j)));
    }
    if (!std::isfinite(theta_max)) return Outcome::Infeasible;

    Index q = -1;
    double best = 0.0;
    for (Index j = 0; j < n_; ++j) {
      if (!eligible(j)) continue;
      const double mag = std::abs(T_(r, j));
      if (std::abs(d_(j)) / mag > theta_max) continue;
      if (q < 0 || mag > best || (mag == best && col_var_[j] < col_var_[q])) {
        q = j;
        best = mag;
      }
    }

    const Index entering = col_var_[q];
    const double dx = (target - x_(leaving)) / (-T_(r, q));
    x_(entering) += dx;
    for (Index i = 0; i < m_; ++i) x_(head_[i]) -= T_(i, q) * dx;
    x_(leaving) = target;
    pivot(r, q, below ? NbPos::Lower : NbPos::Upper);
    ++iterations;
  }
}

Outcome BoundedSimplex::optimize(int max_iterations, int& iterations) {
  iterations = 0;
  if (!has_basis_) cold_start();
  compute_reduced_costs();
  if (!primal_feasible() && dual_feasible()) {
    const Outcome o = dual(max_iterations, iterations);
    if (o == Outcome::Optimal || o == Outcome::IterationLimit) return o;
    // Confirm an infeasibility verdict from a fresh factorization.
    reinvert();
  }
  return primal(max_iterations, iterations);
}

bool BoundedSimplex::reinvert() {
  if (!has_basis_) {
    cold_start();
    return true;
  }
  std::vector<Index> bs;
  std::vector<Index> active;
  for (Index v = 0; v < n_; ++v)
    if (basic_[v]) bs.push_back(v);
  for (Index i = 0; i < m_; ++i)
    if (!basic_[n_ + i]) active.push_back(i);
  const Index k = static_cast<Index>(bs.size());
  if (static_cast<Index>(active.size()) != k) {
    cold_start();
    return false;
  }

  MatrixXd abs_cols(m_, k);
  for (Index b = 0; b < k; ++b) abs_cols.col(b) = A_.col(bs[b]);

  MatrixXd U(k, n_);
  Eigen::PartialPivLU<MatrixXd> lu;
  if (k > 0) {
    MatrixXd M(k, k);
    for (Index a = 0; a < k; ++a) M.row(a) = abs_cols.row(active[a]);
    lu.compute(M);
    if (!(lu.rcond() > kMinRcond)) {
      cold_start();
      return false;
    }
  }

  // Nonbasic columns of [A  -I].
  MatrixXd N = MatrixXd::Zero(m_, n_);
  for (Index j = 0; j < n_; ++j) {
    const Index v = col_var_[j];
    if (v < n_) {
      N.col(j) = A_.col(v);
    } else {
      N(v - n_, j) = -1.0;
    }
  }
  if (k > 0) {
    MatrixXd NR(k, n_);
    for (Index a = 0; a < k; ++a) NR.row(a) = N.row(active[a]);
    U = lu.solve(NR);
  }

  T_.resize(m_, n_);
  for (Index b = 0; b < k; ++b) T_.row(where_[bs[b]]) = U.row(b);
  for (Index i = 0; i < m_; ++i) {
    const Index v = n_ + i;
    if (!basic_[v]) continue;
    if (k > 0) {
      T_.row(where_[v]) = abs_cols.row(i) * U - N.row(i);
    } else {
      T_.row(where_[v]) = -N.row(i);
    }
  }

  for (Index j = 0; j < n_; ++j) {
    const Index v = col_var_[j];
    if (pos_[v] != NbPos::Zero) x_(v) = bound_value(v, pos_[v]);
  }
  recompute_basic_values();
  compute_reduced_costs();
  return true;
}

bool BoundedSimplex::polish(BasicSolution& out) const {
  if (!has_basis_) return false;
  std::vector<Index> bs;
  std::vector<Index> active;
  for (Index v = 0; v < n_; ++v)
    if (basic_[v]) bs.push_back(v);
  for (Index i = 0; i < m_; ++i)
    if (!basic_[n_ + i]) active.push_back(i);
  const Index k = static_cast<Index>(bs.size());
  if (static_cast<Index>(active.size()) != k) return false;

  out.z.resize(n_);
  out.at_bound.assign(n_, 0);
  for (Index v = 0; v < n_; ++v) {
    if (basic_[v]) {
      out.z(v) = 0.0;
    } else if (pos_[v] == NbPos::Zero) {
      out.z(v) = x_(v);
    } else {
      out.z(v) = bound_value(v, pos_[v]);
      out.at_bound[v] = pos_[v] == NbPos::Lower ? -1 : 1;
    }
  }
  out.row_duals = VectorXd::Zero(m_);
  out.row_active.assign(m_, 0);
  for (Index row : active) out.row_active[row] = 1;

  if (k > 0) {
    MatrixXd M(k, k);
    VectorXd rhs(k);
    VectorXd cb(k);
    for (Index a = 0; a < k; ++a) {
      const Index row = active[a];
      const Index lv = n_ + row;
      const double rv = pos_[lv] == NbPos::Zero ? x_(lv) : bound_value(lv, pos_[lv]);
      rhs(a) = rv - A_.row(row).dot(out.z);
      for (Index b = 0; b < k; ++b) M(a, b) = A_(row, bs[b]);
    }
    for (Index b = 0; b < k; ++b) cb(b) = cost_(bs[b]);
    Eigen::PartialPivLU<MatrixXd> lu(M);
    if (!(lu.rcond() > kMinRcond)) return false;
    const VectorXd zb = lu.solve(rhs);
    for (Index b = 0; b < k; ++b) out.z(bs[b]) = zb(b);
    Eigen::PartialPivLU<MatrixXd> lut(M.transpose());
    const VectorXd y = lut.solve(-cb);
    for (Index a = 0; a < k; ++a) out.row_duals(active[a]) = y(a);
  }

  out.reduced = cost_.head(n_);
  if (m_ > 0) out.reduced += A_.transpose() * out.row_duals;
  for (Index v : bs) out.reduced(v) = 0.0;
  return out.z.allFinite() && out.row_duals.allFinite();
}

}  // namespace mmdual::lp::detail
