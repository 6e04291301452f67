#pragma once

#include <algorithm>
#include <random>

#include <mmdual/lp.hpp>

namespace oracle {

using mmdual::lp::LpProblem;
using Eigen::VectorXd;

// bounded, feasible by construction: rows are satisfied at z0
inline LpProblem random_lp(std::mt19937_64& rng, bool integer_data) {
  std::uniform_int_distribution<int> nvars(1, 4), nrows(0, 6), ieq(0, 1), small(-3, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = nvars(rng);
  LpProblem p = LpProblem::with_vars(n);
  VectorXd z0(n);
  for (int k = 0; k < n; ++k) {
    p.lower(k) = integer_data ? small(rng) - 1 : -2.0 + u(rng);
    p.upper(k) = p.lower(k) + (integer_data ? 1 + (small(rng) + 3) / 2 : 1.5 + u(rng));
    z0(k) = integer_data ? p.lower(k) : p.lower(k) + 0.5 * (1.0 + u(rng)) * (p.upper(k) - p.lower(k));
    p.cost(k) = integer_data ? small(rng) : 3.0 * u(rng);
  }
  const int m = nrows(rng);
  for (int r = 0; r < m; ++r) {
    VectorXd row(n);
    for (int k = 0; k < n; ++k) row(k) = integer_data ? small(rng) : 2.0 * u(rng);
    const double slack = integer_data ? 0.0 : std::max(0.0, u(rng));
    p.add_ineq(row, row.dot(z0) + slack);
  }
  if (n > 1 && ieq(rng) == 1) {
    VectorXd row(n);
    for (int k = 0; k < n; ++k) row(k) = integer_data ? small(rng) : 2.0 * u(rng);
    p.add_eq(row, row.dot(z0));
  }
  return p;
}

}  // namespace oracle
