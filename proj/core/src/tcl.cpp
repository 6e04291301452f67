#include "mmdual/tcl.hpp"

#include <cmath>

#include "mmdual/rng.hpp"

namespace mmdual {

void TclParams::validate() const {
  if (!(alpha > 0.0) || !(Q > 0.0) || !(dtau > 0.0)) throw InvalidInput("tcl: alpha, Q and dtau must be positive");
  if (!(Tmin < Tmax)) throw InvalidInput("tcl: Tmin must be below Tmax");
  if (Tout.size() < 1 || delta.size() != Tout.size()) throw InvalidInput("tcl: Tout and delta must share a length >= 1");
  if (!Tout.allFinite() || !delta.allFinite() || !std::isfinite(T0) || !std::isfinite(c)) {
    throw InvalidInput("tcl: non-finite parameter");
  }
}

double discrete_step(const TclParams& p, double T_s, double x_s, Index s) {
  if (s < 0 || s >= p.horizon()) throw IndexOutOfRange("tcl: slot " + std::to_string(s) + " out of range");
  const double a = std::exp(-p.alpha * p.dtau);
  return T_s * a + (1.0 - a) * (p.Q / p.alpha * x_s + p.delta(s) / p.alpha + p.Tout(s));
}

TclAgentMatrices build_matrices(const TclParams& p) {
  p.validate();
  const Index S = p.horizon();
  TclAgentMatrices m;
  m.Ahat = std::exp(-p.alpha * p.dtau);
  m.Bhat = 1.0 - m.Ahat;
  VectorXd pow(S + 1);
  pow(0) = 1.0;
  for (Index k = 1; k <= S; ++k) pow(k) = pow(k - 1) * m.Ahat;

  m.F = MatrixXd::Zero(S, S);
  m.G.resize(S);
  for (Index r = 0; r < S; ++r) {
    m.G(r) = pow(r + 1);
    for (Index k = 0; k <= r; ++k) m.F(r, k) = pow(r - k) * m.Bhat;
  }

  const double gain = p.Q / p.alpha;
  const VectorXd drift = m.G * p.T0 + m.F * p.Tout + m.F * (p.delta / p.alpha);
  m.A.resize(2 * S, S);
  m.A.topRows(S) = gain * m.F;
  m.A.bottomRows(S) = -gain * m.F;
  m.b.resize(2 * S);
  m.b.head(S) = VectorXd::Constant(S, p.Tmax) - drift;
  m.b.tail(S) = drift - VectorXd::Constant(S, p.Tmin);
  return m;
}

VectorXd simulate(const TclParams& p, const VectorXd& x) {
  const Index S = p.horizon();
  if (x.size() != S) throw InvalidInput("tcl: control length must equal the horizon");
  VectorXd T(S);
  double cur = p.T0;
  for (Index s = 0; s < S; ++s) T(s) = cur = discrete_step(p, cur, x(s), s);
  return T;
}

VectorXd trajectory(const TclParams& p, const TclAgentMatrices& m, const VectorXd& x) {
  return m.F * (p.Tout + p.delta / p.alpha + (p.Q / p.alpha) * x) + m.G * p.T0;
}

AgentSpec agent_spec(const TclParams& p) {
  const TclAgentMatrices m = build_matrices(p);
  AgentSpec spec = AgentSpec::box(p.horizon(), 0.0, 1.0, ScalarCost::affine(p.c));
  spec.A = m.A;
  spec.b = m.b;
  return spec;
}

TclScenario build_scenario(std::size_t n_agents, Index S, std::uint64_t seed, const ScenarioTemplate& tmpl) {
  if (tmpl.pulse_width < 1 || S < tmpl.pulse_width) throw InvalidInput("tcl scenario: horizon shorter than pulse");
  if (tmpl.c_pool < 1 || tmpl.c_lo > tmpl.c_hi || tmpl.pulse_lo > tmpl.pulse_hi) {
    throw InvalidInput("tcl scenario: bad template ranges");
  }
  Rng rng(seed);
  TclScenario sc;
  for (int k = 0; k < tmpl.c_pool; ++k) sc.c_values.push_back(rng.uniform(tmpl.c_lo, tmpl.c_hi));

  const Index lo = S / 2 - S / 8;
  const Index hi = S / 2 + S / 8;
  const Index before = (tmpl.pulse_width - 1) / 2;
  sc.problem.S = S;
  for (std::size_t i = 0; i < n_agents; ++i) {
    TclParams p;
    p.alpha = tmpl.alpha;
    p.Q = tmpl.Q;
    p.dtau = tmpl.dtau;
    p.T0 = tmpl.T0;
    p.Tmin = tmpl.Tmin;
    p.Tmax = tmpl.Tmax;
    p.Tout = VectorXd::Constant(S, tmpl.Tout);
    p.delta = VectorXd::Zero(S);
    p.c = sc.c_values[rng.below(static_cast<std::uint64_t>(tmpl.c_pool))];
    const Index center = lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    const double amp = rng.uniform(tmpl.pulse_lo, tmpl.pulse_hi) * tmpl.alpha;
    const Index first = std::max<Index>(0, center - before);
    const Index last = std::min<Index>(S - 1, center - before + tmpl.pulse_width - 1);
    for (Index s = first; s <= last; ++s) p.delta(s) = amp;

    AgentSpec spec = agent_spec(p);
    const AgentValidation v = validate_agent(spec, S);
    if (!v.ok()) {
      throw ScenarioInfeasible(i, "tcl scenario: agent " + std::to_string(i) + " rejected: " + v.message);
    }
    sc.problem.agents.push_back(std::move(spec));
    sc.params.push_back(std::move(p));
  }
  return sc;
}

}  // namespace mmdual
