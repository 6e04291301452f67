#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <mmdual/io.hpp>

namespace mmdual::cli {

struct ReplayOptions {
  double violation_tol = 1e-8;
  double upper_tol = 1e-8;
  double lower_tol = 1e-7;
};

struct ReplayResult {
  bool ok = true;
  /// One entry per failed check; row indices are 0-based data rows.
  std::vector<std::string> failures;
  std::size_t rows = 0;
};

/// Re-verifies a trace against its report without re-solving: per row
/// max_violation <= tol, P_t <= sum_rho + tol, P* - tol <= P_t, cost_error
/// consistent with P*, strictly increasing t; and the last row must agree
/// with the report. Throws MalformedFile for unreadable input.
ReplayResult replay_check(const CsvTrace& trace, const json& report, const ReplayOptions& opt = {});
ReplayResult replay_check_files(const std::filesystem::path& trace_path, const std::filesystem::path& report_path,
                                const ReplayOptions& opt = {});

}  // namespace mmdual::cli
