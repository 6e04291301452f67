#pragma once

#include <cstdint>

#include "mmdual/model.hpp"

namespace mmdual {

/// First-order thermal load  dT/dtau = -alpha (T - Tout) + Q x + delta
/// sampled every dtau with the input held constant between samples.
struct TclParams {
  double alpha = 0.5;
  double Q = 5.0;
  double dtau = 0.25;
  double T0 = 22.0;
  double Tmin = 20.0;
  double Tmax = 24.0;
  VectorXd Tout;
  VectorXd delta;
  double c = 1.0;

  Index horizon() const { return Tout.size(); }
  /// Throws InvalidInput on a bad band, nonpositive rates or mismatched profiles.
  void validate() const;
};

struct TclAgentMatrices {
  MatrixXd F;  // F(r, k) = Ahat^(r-k) Bhat for k <= r
  VectorXd G;  // G(r) = Ahat^(r+1)
  MatrixXd A;
  VectorXd b;
  double Ahat = 0.0;
  double Bhat = 0.0;
};

/// T_{s+1} from T_s under control x_s.
double discrete_step(const TclParams& p, double T_s, double x_s, Index s);

TclAgentMatrices build_matrices(const TclParams& p);

/// T_1..T_S by iterating discrete_step from T0.
VectorXd simulate(const TclParams& p, const VectorXd& x);

/// T_1..T_S as F (Tout + delta/alpha + (Q/alpha) x) + G T0.
VectorXd trajectory(const TclParams& p, const TclAgentMatrices& m, const VectorXd& x);

/// A x <= b, x in [0, 1]^S, g_s(x) = c x.
AgentSpec agent_spec(const TclParams& p);

/// Shared physical constants plus the random scenario ranges.
struct ScenarioTemplate {
  double alpha = 0.5;
  double Q = 5.0;
  double dtau = 0.25;
  double T0 = 22.0;
  double Tmin = 20.0;
  double Tmax = 24.0;
  double Tout = 15.0;
  /// Pulse amplitude is uniform in [pulse_lo, pulse_hi] * alpha.
  double pulse_lo = -2.0;
  double pulse_hi = -1.0;
  Index pulse_width = 5;
  double c_lo = 1.0;
  double c_hi = 3.0;
  int c_pool = 5;
};

struct TclScenario {
  MinMaxProblem problem;
  std::vector<TclParams> params;
  std::vector<double> c_values;
};

class ScenarioInfeasible : public Error {
 public:
  ScenarioInfeasible(std::size_t agent, const std::string& what) : Error(what), agent_(agent) {}
  std::size_t agent() const { return agent_; }

 private:
  std::size_t agent_;
};

/// n agents over horizon S >= pulse_width. Each agent gets a constant delta
/// pulse centred uniformly in [S/2 - S/8, S/2 + S/8] (clipped to the horizon)
/// and a rate c drawn from a pool of c_pool values uniform in [c_lo, c_hi].
TclScenario build_scenario(std::size_t n_agents, Index S, std::uint64_t seed, const ScenarioTemplate& tmpl = {});

}  // namespace mmdual
