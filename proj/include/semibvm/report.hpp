#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "semibvm/harness.hpp"

namespace semibvm {

enum class ReportFormat { Csv, Markdown };

/// Column order shared by both formats.
inline const std::vector<std::string> kReportColumns{
    "n", "model", "prior", "RMSE(theta)", "SE", "RMSE(eta)", "CR95", "KS"};

std::string render_report(const std::vector<ReplicateReport> &reports, ReportFormat format);

/// Writes report.csv or report.md under `output_dir` and returns the path.
std::filesystem::path emit_report(const std::vector<ReplicateReport> &reports,
                                  ReportFormat format, const std::filesystem::path &output_dir);

/// A parsed row of a rendered report (metrics at their printed precision).
struct ReportRow {
  Eigen::Index n = 0;
  std::string model;
  std::string prior;
  double rmse_theta = 0.0;
  double se = 0.0;
  double rmse_eta = 0.0;
  double cr95 = 0.0;
  double ks = 0.0;

  bool operator==(const ReportRow &) const = default;
};

std::vector<ReportRow> parse_report(const std::string &text, ReportFormat format);

/// Rows as they would be printed (values rounded to 3 decimals).
std::vector<ReportRow> report_rows(const std::vector<ReplicateReport> &reports);

} // namespace semibvm
