#include "replay.hpp"

#include <cmath>
#include <fstream>

namespace mmdual::cli {

namespace {

void fail(ReplayResult& r, std::string msg) {
  r.ok = false;
  r.failures.push_back(std::move(msg));
}

std::string row_tag(std::size_t k, const TraceRow& row) {
  return "row " + std::to_string(k) + " (t=" + std::to_string(row.t) + ")";
}

}  // namespace

ReplayResult replay_check(const CsvTrace& trace, const json& report, const ReplayOptions& opt) {
  if (!report.is_object() || !report.contains("sum_rho") || !report.contains("iterations")) {
    throw MalformedFile("report: missing sum_rho or iterations");
  }
  std::optional<double> oracle;
  if (report.contains("oracle_value") && report.at("oracle_value").is_number()) {
    oracle = report.at("oracle_value").get<double>();
  }

  ReplayResult r;
  r.rows = trace.rows.size();
  std::uint64_t prev_t = 0;
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    const TraceRow& row = trace.rows[k];
    if (k > 0 && row.t <= prev_t) fail(r, row_tag(k, row) + ": iteration not increasing");
    prev_t = row.t;
    if (!(row.max_violation <= opt.violation_tol)) {
      fail(r, row_tag(k, row) + ": coupling violation " + format_double(row.max_violation));
    }
    for (double v : row.violations) {
      if (!(v <= opt.violation_tol)) {
        fail(r, row_tag(k, row) + ": slot violation " + format_double(v));
        break;
      }
    }
    if (!(row.P_t <= row.sum_rho + opt.upper_tol)) {
      fail(r, row_tag(k, row) + ": P_t " + format_double(row.P_t) + " exceeds sum_rho " + format_double(row.sum_rho));
    }
    if (oracle) {
      if (!(*oracle - opt.lower_tol <= row.P_t)) {
        fail(r, row_tag(k, row) + ": P_t " + format_double(row.P_t) + " below P* " + format_double(*oracle));
      }
      if (!(row.cost_error >= 0.0) ||
          std::abs(row.cost_error - std::abs(row.sum_rho - *oracle)) > 1e-12 * std::max(1.0, std::abs(*oracle))) {
        fail(r, row_tag(k, row) + ": cost_error inconsistent with P*");
      }
    }
  }

  if (!trace.rows.empty()) {
    const TraceRow& last = trace.rows.back();
    if (report.at("sum_rho").get<double>() != last.sum_rho) fail(r, "report sum_rho differs from the last trace row");
    if (report.at("iterations").get<std::uint64_t>() != last.t) fail(r, "report iterations differ from the last trace row");
    if (oracle && report.contains("converged") && report.contains("relative_error") &&
        report.at("relative_error").is_number() && report.at("converged").get<bool>()) {
      const double rel = std::abs(last.sum_rho - *oracle) / std::max(1.0, std::abs(*oracle));
      if (rel != report.at("relative_error").get<double>()) fail(r, "report relative_error differs from the trace");
    }
  }
  return r;
}

ReplayResult replay_check_files(const std::filesystem::path& trace_path, const std::filesystem::path& report_path,
                                const ReplayOptions& opt) {
  std::ifstream tin(trace_path);
  if (!tin) throw MalformedFile("cannot open trace '" + trace_path.string() + "'");
  const CsvTrace trace = read_trace_csv(tin);
  std::ifstream rin(report_path);
  if (!rin) throw MalformedFile("cannot open report '" + report_path.string() + "'");
  json report;
  try {
    report = json::parse(rin);
  } catch (const json::exception& e) {
    throw MalformedFile(report_path.string() + ": " + e.what());
  }
  return replay_check(trace, report, opt);
}

}  // namespace mmdual::cli
