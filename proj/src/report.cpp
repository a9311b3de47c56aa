#include "semibvm/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "semibvm/error.hpp"

namespace semibvm {

namespace {

std::string fixed3(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

double round3(double x) { return std::stod(fixed3(x)); }

std::vector<std::string> cells_of(const ReplicateReport &r) {
  return {std::to_string(r.n),   to_string(r.model),   to_string(r.prior_setup),
          fixed3(r.rmse_theta),  fixed3(r.se),         fixed3(r.rmse_eta),
          fixed3(r.cr95),        fixed3(r.ks_median)};
}

std::vector<std::string> split(const std::string &line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t\r");
    const auto e = item.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return out;
}

} // namespace

std::string render_report(const std::vector<ReplicateReport> &reports, ReportFormat format) {
  if (reports.empty()) {
    fail(ErrorKind::InvalidInput, "no reports to render");
  }
  std::ostringstream out;
  auto emit_row = [&](const std::vector<std::string> &cells) {
    if (format == ReportFormat::Csv) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        out << (k ? "," : "") << cells[k];
      }
    } else {
      out << '|';
      for (const auto &c : cells) {
        out << ' ' << c << " |";
      }
    }
    out << '\n';
  };
  emit_row(kReportColumns);
  if (format == ReportFormat::Markdown) {
    out << '|';
    for (std::size_t k = 0; k < kReportColumns.size(); ++k) {
      out << (k < 3 ? " --- |" : " ---: |");
    }
    out << '\n';
  }
  for (const auto &r : reports) {
    emit_row(cells_of(r));
  }
  return out.str();
}

std::filesystem::path emit_report(const std::vector<ReplicateReport> &reports,
                                  ReportFormat format, const std::filesystem::path &output_dir) {
  const std::string text = render_report(reports, format);
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  const auto path = output_dir / (format == ReportFormat::Csv ? "report.csv" : "report.md");
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorKind::Io, "cannot write " + path.string());
  }
  out << text;
  if (!out) {
    fail(ErrorKind::Io, "failed while writing " + path.string());
  }
  return path;
}

std::vector<ReportRow> parse_report(const std::string &text, ReportFormat format) {
  std::vector<ReportRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    if (format == ReportFormat::Csv) {
      cells = split(line, ',');
    } else {
      const auto first = line.find('|');
      const auto last = line.rfind('|');
      if (first == std::string::npos || last <= first) {
        fail(ErrorKind::InvalidInput, "malformed markdown row: " + line);
      }
      cells = split(line.substr(first + 1, last - first - 1), '|');
      if (!cells.empty() && cells[0].starts_with("---")) {
        continue;
      }
    }
    if (header) {
      if (cells != kReportColumns) {
        fail(ErrorKind::InvalidInput, "unexpected report header");
      }
      header = false;
      continue;
    }
    if (cells.size() != kReportColumns.size()) {
      fail(ErrorKind::InvalidInput, "report row has wrong column count: " + line);
    }
    ReportRow row;
    row.n = std::stol(cells[0]);
    row.model = cells[1];
    row.prior = cells[2];
    row.rmse_theta = std::stod(cells[3]);
    row.se = std::stod(cells[4]);
    row.rmse_eta = std::stod(cells[5]);
    row.cr95 = std::stod(cells[6]);
    row.ks = std::stod(cells[7]);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ReportRow> report_rows(const std::vector<ReplicateReport> &reports) {
  std::vector<ReportRow> rows;
  for (const auto &r : reports) {
    rows.push_back({r.n, to_string(r.model), to_string(r.prior_setup), round3(r.rmse_theta),
                    round3(r.se), round3(r.rmse_eta), round3(r.cr95), round3(r.ks_median)});
  }
  return rows;
}

} // namespace semibvm
