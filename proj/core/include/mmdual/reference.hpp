#pragma once

#include <vector>

#include "mmdual/lp.hpp"
#include "mmdual/model.hpp"

namespace mmdual {

struct OracleResult {
  double P_star = 0.0;
  std::vector<VectorXd> x_star;
  /// Multipliers of the S coupling rows; a simplex vector.
  VectorXd mu_star;
  lp::KktResiduals kkt;
};

class OracleFailure : public Error {
 public:
  OracleFailure(lp::Status status, const std::string& what) : Error(what), status_(status) {}
  lp::Status status() const { return status_; }

 private:
  lp::Status status_;
};

/// Solves the joint epigraph problem
///   min P  s.t.  x^i in X^i,  sum_i g^i_s(x^i_s) <= P  for all s.
/// Quadratic costs are lifted to per-slot epigraph variables refined by
/// tangent cuts until every lifted gap is below 1e-9 (or 500 rounds).
OracleResult solve_centralized(const MinMaxProblem& problem, double tol = 1e-9);

/// sum_i q^i(mu).
double dual_value(const MinMaxProblem& problem, const VectorXd& mu, double tol = 1e-9);

/// |sum_i q^i(mu*) - P*| <= tol.
bool strong_duality_check(const MinMaxProblem& problem, const OracleResult& result, double tol);

}  // namespace mmdual
