#include "mmdual/protocol.hpp"

#include <cmath>

#include "mmdual/rng.hpp"

namespace mmdual {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_keys(const AgentState& state, const std::map<NodeId, VectorXd>& incoming, const char* what) {
  bool same = incoming.size() == state.lambda_out.size();
  for (auto a = incoming.begin(), b = state.lambda_out.begin(); same && a != incoming.end(); ++a, ++b) {
    same = a->first == b->first;
  }
  if (!same) {
    throw InvalidInput(std::string(what) + " for agent " + std::to_string(state.id) + " must have one entry per neighbor");
  }
}

}  // namespace

double gamma(const StepSchedule& schedule, std::uint64_t t) {
  const double k = static_cast<double>(t) + 1.0;
  return std::visit(overloaded{
                        [&](const PowerLaw& p) { return p.scale * std::pow(k, -p.exponent); },
                        [](const ConstantStep& c) { return c.gamma; },
                        [&](const Harmonic& h) { return h.scale / k; },
                    },
                    schedule);
}

bool validate_schedule(const StepSchedule& schedule) {
  return std::visit(overloaded{
                        [](const PowerLaw& p) { return p.scale > 0.0 && p.exponent > 0.5 && p.exponent <= 1.0; },
                        [](const ConstantStep&) { return false; },
                        [](const Harmonic& h) { return h.scale > 0.0; },
                    },
                    schedule);
}

AgentState init_agent(NodeId id, const Graph& g, const AgentSpec& spec, const LambdaInit& init) {
  AgentState st;
  st.id = id;
  st.x = VectorXd::Zero(spec.S);
  st.mu = VectorXd::Zero(spec.S);
  for (NodeId j : g.neighbors(id)) {
    VectorXd lam = VectorXd::Zero(spec.S);
    if (const auto* r = std::get_if<SeededRandomInit>(&init); r && r->scale != 0.0) {
      Rng rng(mix_seed(r->seed, id, j));
      for (Index s = 0; s < spec.S; ++s) lam(s) = rng.uniform(-r->scale, r->scale);
    }
    st.lambda_out.emplace(j, std::move(lam));
  }
  return st;
}

void round_phase1(AgentState& state, const std::map<NodeId, VectorXd>& incoming_lambda, LocalSolver& solver) {
  check_keys(state, incoming_lambda, "incoming lambda");
  const Index S = solver.spec().S;
  VectorXd delta = VectorXd::Zero(S);
  if (!state.lambda_out.empty()) delta = lambda_delta(LambdaExchange{state.lambda_out, incoming_lambda});
  LocalPrimalDual r = solver.solve(delta);
  state.x = std::move(r.x);
  state.rho = r.rho;
  state.mu = std::move(r.mu);
  state.kkt = r.kkt;
}

void round_phase1(AgentState& state, const std::map<NodeId, VectorXd>& incoming_lambda, const AgentSpec& spec,
                  double tol) {
  LocalSolver solver(spec, tol);
  round_phase1(state, incoming_lambda, solver);
}

void round_phase2(AgentState& state, const std::map<NodeId, VectorXd>& incoming_mu, double gamma_t) {
  check_keys(state, incoming_mu, "incoming mu");
  if (gamma_t < 0.0) throw InvalidInput("step size must be nonnegative");
  for (auto& [j, lam] : state.lambda_out) lam -= gamma_t * (state.mu - incoming_mu.at(j));
  ++state.round;
}

}  // namespace mmdual
