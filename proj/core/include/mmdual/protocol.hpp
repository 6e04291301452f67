#pragma once

#include <cstdint>
#include <map>
#include <variant>

#include "mmdual/graph.hpp"
#include "mmdual/local_step.hpp"

namespace mmdual {

struct PowerLaw {
  double exponent = 0.8;
  double scale = 1.0;
};
struct ConstantStep {
  double gamma = 0.1;
};
struct Harmonic {
  double scale = 1.0;
};

/// gamma(t) for t = 0, 1, ...; PowerLaw is c (t+1)^-alpha.
using StepSchedule = std::variant<PowerLaw, ConstantStep, Harmonic>;

double gamma(const StepSchedule& schedule, std::uint64_t t);

/// True iff the family vanishes, is not summable and is square summable.
bool validate_schedule(const StepSchedule& schedule);

struct ZeroInit {};
/// lambda^{ij} uniform in [-scale, scale], seeded per directed edge.
struct SeededRandomInit {
  std::uint64_t seed = 0;
  double scale = 1.0;
};
using LambdaInit = std::variant<ZeroInit, SeededRandomInit>;

struct AgentState {
  NodeId id = 0;
  VectorXd x;
  double rho = 0.0;
  VectorXd mu;
  std::map<NodeId, VectorXd> lambda_out;
  std::uint64_t round = 0;
  lp::KktResiduals kkt;
};

AgentState init_agent(NodeId id, const Graph& g, const AgentSpec& spec, const LambdaInit& init);

/// Builds the exchange from lambda_out and the gathered lambda^{ji}, solves the
/// local problem and stores (x, rho, mu). Throws InvalidInput if the incoming
/// key set is not the neighbor set.
void round_phase1(AgentState& state, const std::map<NodeId, VectorXd>& incoming_lambda, LocalSolver& solver);
void round_phase1(AgentState& state, const std::map<NodeId, VectorXd>& incoming_lambda, const AgentSpec& spec,
                  double tol = 1e-9);

/// lambda^{ij} -= gamma_t (mu^i - mu^j) for every neighbor; advances the round.
void round_phase2(AgentState& state, const std::map<NodeId, VectorXd>& incoming_mu, double gamma_t);

}  // namespace mmdual
