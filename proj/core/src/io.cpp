#include "mmdual/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace mmdual {

namespace {

constexpr const char* kTraceColumns[] = {"t", "sum_rho", "P_t", "cost_error", "max_violation"};

json vec(const VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

VectorXd vec_from(const json& j, Index n, const char* what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n) {
    throw MalformedFile(std::string(what) + ": expected an array of " + std::to_string(n) + " numbers");
  }
  VectorXd v(n);
  for (Index k = 0; k < n; ++k) {
    const json& e = j[static_cast<std::size_t>(k)];
    if (!e.is_number()) throw MalformedFile(std::string(what) + ": expected numbers");
    v(k) = e.get<double>();
  }
  return v;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw MalformedFile(std::string("missing field '") + key + "'");
  return j.at(key);
}

json maybe_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan" || text.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw MalformedFile("not a number: '" + std::string(text) + "'");
  }
  return v;
}

json to_json(const ScalarCost& c) {
  if (c.kind() == ScalarCost::Kind::Affine) return {{"kind", "affine"}, {"c", c.linear()}};
  return {{"kind", "quadratic"}, {"a", c.curvature()}, {"b", c.linear()}};
}

ScalarCost cost_from_json(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  try {
    if (kind == "affine") return ScalarCost::affine(field(j, "c").get<double>());
    if (kind == "quadratic") return ScalarCost::quadratic(field(j, "a").get<double>(), field(j, "b").get<double>());
  } catch (const json::exception& e) {
    throw MalformedFile(std::string("cost: ") + e.what());
  } catch (const InvalidInput& e) {
    throw MalformedFile(e.what());
  }
  throw MalformedFile("unknown cost kind '" + kind + "'");
}

json to_json(const AgentSpec& a) {
  json rows = json::array();
  for (Index r = 0; r < a.A.rows(); ++r) rows.push_back(vec(a.A.row(r).transpose()));
  json costs = json::array();
  for (const auto& c : a.costs) costs.push_back(to_json(c));
  return {{"A", rows}, {"b", vec(a.b)}, {"lower", vec(a.lower)}, {"upper", vec(a.upper)}, {"costs", costs}};
}

AgentSpec agent_from_json(const json& j, Index S) {
  AgentSpec a;
  a.S = S;
  const json& rows = field(j, "A");
  if (!rows.is_array()) throw MalformedFile("A: expected an array of rows");
  a.A.resize(static_cast<Index>(rows.size()), S);
  for (std::size_t r = 0; r < rows.size(); ++r) a.A.row(static_cast<Index>(r)) = vec_from(rows[r], S, "A row").transpose();
  a.b = vec_from(field(j, "b"), a.A.rows(), "b");
  a.lower = vec_from(field(j, "lower"), S, "lower");
  a.upper = vec_from(field(j, "upper"), S, "upper");
  const json& costs = field(j, "costs");
  if (!costs.is_array() || static_cast<Index>(costs.size()) != S) throw MalformedFile("costs: expected S entries");
  for (const auto& c : costs) a.costs.push_back(cost_from_json(c));
  return a;
}

json to_json(const MinMaxProblem& p) {
  json agents = json::array();
  for (const auto& a : p.agents) agents.push_back(to_json(a));
  return {{"S", p.S}, {"agents", agents}};
}

MinMaxProblem problem_from_json(const json& j) {
  MinMaxProblem p;
  const json& S = field(j, "S");
  if (!S.is_number_integer() || S.get<long long>() < 1) throw MalformedFile("S: expected a positive integer");
  p.S = S.get<Index>();
  const json& agents = field(j, "agents");
  if (!agents.is_array()) throw MalformedFile("agents: expected an array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    try {
      p.agents.push_back(agent_from_json(agents[i], p.S));
    } catch (const MalformedFile& e) {
      throw MalformedFile("agent " + std::to_string(i) + ": " + e.what());
    }
  }
  return p;
}

MinMaxProblem read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedFile("cannot open problem file '" + path + "'");
  try {
    return problem_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw MalformedFile(path + ": " + e.what());
  }
}

void write_problem_file(const std::string& path, const MinMaxProblem& p) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << to_json(p).dump(2) << '\n';
}

std::string problem_hash(const MinMaxProblem& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(p).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const OracleResult& r, const std::string& hash) {
  json xs = json::array();
  for (const auto& x : r.x_star) xs.push_back(vec(x));
  return {{"problem_hash", hash},
          {"P_star", r.P_star},
          {"x_star", xs},
          {"mu_star", vec(r.mu_star)},
          {"kkt_max", r.kkt.max()}};
}

OracleResult oracle_from_json(const json& j, const std::string& hash) {
  try {
    if (field(j, "problem_hash").get<std::string>() != hash) throw MalformedFile("oracle cache is for another problem");
    OracleResult r;
    r.P_star = field(j, "P_star").get<double>();
    const json& mu = field(j, "mu_star");
    r.mu_star = vec_from(mu, static_cast<Index>(mu.size()), "mu_star");
    for (const auto& x : field(j, "x_star")) r.x_star.push_back(vec_from(x, r.mu_star.size(), "x_star"));
    r.kkt.primal_feas = field(j, "kkt_max").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw MalformedFile(std::string("oracle: ") + e.what());
  }
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  for (std::size_t k = 0; k < std::size(kTraceColumns); ++k) out << (k ? "," : "") << kTraceColumns[k];
  const bool with_rho = !trace.rows.empty() && !trace.rows.front().rho.empty();
  const bool with_v = !trace.rows.empty() && !trace.rows.front().violations.empty();
  if (with_rho) {
    for (std::size_t i = 0; i < trace.num_agents; ++i) out << ",rho_" << i;
  }
  if (with_v) {
    for (Index s = 0; s < trace.S; ++s) out << ",v_" << s;
  }
  out << '\n';
  for (const auto& r : trace.rows) {
    out << r.t << ',' << format_double(r.sum_rho) << ',' << format_double(r.P_t) << ','
        << (std::isnan(r.cost_error) ? std::string() : format_double(r.cost_error)) << ','
        << format_double(r.max_violation);
    for (double v : r.rho) out << ',' << format_double(v);
    for (double v : r.violations) out << ',' << format_double(v);
    out << '\n';
  }
}

CsvTrace read_trace_csv(std::istream& in) {
  CsvTrace tr;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw MalformedFile("trace: empty file");
  tr.header = split(line);
  if (tr.header.size() < std::size(kTraceColumns)) throw MalformedFile("trace: bad header");
  for (std::size_t k = 0; k < std::size(kTraceColumns); ++k) {
    if (tr.header[k] != kTraceColumns[k]) throw MalformedFile("trace: bad header column '" + tr.header[k] + "'");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != tr.header.size()) {
      throw MalformedFile("trace: line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                          " fields, expected " + std::to_string(tr.header.size()));
    }
    TraceRow r;
    std::uint64_t t = 0;
    const auto res = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), t);
    if (res.ec != std::errc() || res.ptr != cells[0].data() + cells[0].size()) {
      throw MalformedFile("trace: line " + std::to_string(lineno) + ": bad iteration '" + cells[0] + "'");
    }
    try {
      r.t = t;
      r.sum_rho = parse_double(cells[1]);
      r.P_t = parse_double(cells[2]);
      r.cost_error = parse_double(cells[3]);
      r.max_violation = parse_double(cells[4]);
      for (std::size_t k = std::size(kTraceColumns); k < cells.size(); ++k) {
        (tr.header[k].rfind("rho_", 0) == 0 ? r.rho : r.violations).push_back(parse_double(cells[k]));
      }
    } catch (const MalformedFile& e) {
      throw MalformedFile("trace: line " + std::to_string(lineno) + ": " + e.what());
    }
    tr.rows.push_back(std::move(r));
  }
  if (tr.rows.empty()) throw MalformedFile("trace: no data rows");
  return tr;
}

json to_json(const FinalReport& r) {
  json xs = json::array();
  for (const auto& x : r.x) xs.push_back(vec(x));
  const InvariantSummary& v = r.invariants;
  json inv = {{"rounds", v.rounds},
              {"max_violation", maybe_number(v.max_violation)},
              {"max_simplex_error", maybe_number(v.max_simplex_error)},
              {"min_mu", maybe_number(v.min_mu)},
              {"max_lambda_imbalance", maybe_number(v.max_lambda_imbalance)},
              {"max_lower_gap", maybe_number(v.max_lower_gap)},
              {"max_upper_gap", maybe_number(v.max_upper_gap)},
              {"max_local_kkt", maybe_number(v.max_local_kkt)}};
  return {{"iterations", r.iterations},
          {"early_stopped", r.early_stopped},
          {"sum_rho", r.sum_rho},
          {"P_t", r.P_t},
          {"oracle_value", r.oracle_value ? json(*r.oracle_value) : json(nullptr)},
          {"relative_error", maybe_number(r.relative_error)},
          {"converged", r.converged},
          {"profile", vec(r.profile)},
          {"rho", r.rho},
          {"x", xs},
          {"invariants", inv}};
}

}  // namespace mmdual
