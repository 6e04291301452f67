#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>

#include "mmdual/harness.hpp"
#include "mmdual/model.hpp"
#include "mmdual/reference.hpp"

namespace mmdual {

using nlohmann::json;

class MalformedFile : public Error {
 public:
  using Error::Error;
};

/// Shortest decimal that parses back to the same double ("nan", "inf" for
/// non-finite values).
std::string format_double(double v);
/// Inverse of format_double; throws MalformedFile.
double parse_double(std::string_view text);

json to_json(const ScalarCost& c);
ScalarCost cost_from_json(const json& j);
json to_json(const AgentSpec& a);
AgentSpec agent_from_json(const json& j, Index S);
json to_json(const MinMaxProblem& p);
/// Throws MalformedFile on a schema error.
MinMaxProblem problem_from_json(const json& j);

MinMaxProblem read_problem_file(const std::string& path);
void write_problem_file(const std::string& path, const MinMaxProblem& p);

/// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string problem_hash(const MinMaxProblem& p);

json to_json(const OracleResult& r, const std::string& hash);
/// Throws MalformedFile, including when the stored hash differs from `hash`.
OracleResult oracle_from_json(const json& j, const std::string& hash);

/// Header t,sum_rho,P_t,cost_error,max_violation then rho_<i> and v_<s>
/// columns when recorded. cost_error is empty without an oracle.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

struct CsvTrace {
  std::vector<std::string> header;
  std::vector<TraceRow> rows;
};
/// Throws MalformedFile on an empty file, a bad header or a bad row.
CsvTrace read_trace_csv(std::istream& in);

json to_json(const FinalReport& r);

}  // namespace mmdual
