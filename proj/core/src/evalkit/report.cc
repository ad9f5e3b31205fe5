#include "gendet/evalkit/report.h"

#include <cstdio>
#include <sstream>

#include "gendet/common/error.h"
#include "gendet/evalkit/metrics.h"

namespace gendet::evalkit {

namespace {

std::string Cell(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", RoundHalfUp1(value));
  return buf;
}

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string MdField(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

bool HasAverage(const EvalReport& report) {
  for (const auto& row : report.rows) {
    if (row.average) return true;
  }
  return false;
}

}  // namespace

void EvalReport::Validate() const {
  Require(!rows.empty(), "report has no rows");
  const bool wild = scenario == "InTheWild";
  for (const auto& row : rows) {
    Require(row.cells.size() == columns.size(), "report row width differs from the header");
    for (double v : row.cells) Require(v >= 0.0 && v <= 100.0, "report cell outside [0, 100]");
    if (row.average) {
      Require(wild, "Avg column is only defined for InTheWild reports");
      Require(*row.average >= 0.0 && *row.average <= 100.0, "report Avg outside [0, 100]");
    }
  }
}

ReportFormat ParseReportFormat(std::string_view text) {
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "markdown" || text == "md") return ReportFormat::kMarkdown;
  Fail(ErrorKind::kInvalidArgument, "unknown report format '" + std::string(text) + "'");
}

std::string RenderReport(const EvalReport& report, ReportFormat format) {
  report.Validate();
  const bool avg = HasAverage(report);
  std::ostringstream os;
  if (format == ReportFormat::kCsv) {
    const char* eol = "\r\n";
    os << "scenario,preprocess,arch";
    for (const auto& c : report.columns) os << ',' << CsvField(c);
    if (avg) os << ",Avg";
    os << eol;
    for (const auto& row : report.rows) {
      os << CsvField(report.scenario) << ',' << imageops::ToString(row.preprocess) << ','
         << nnet::ToString(row.arch);
      for (double v : row.cells) os << ',' << Cell(v);
      if (avg) os << ',' << (row.average ? Cell(*row.average) : "");
      os << eol;
    }
    return os.str();
  }

  os << "## " << MdField(report.scenario);
  if (report.perturbation) os << " (" << MdField(*report.perturbation) << ')';
  os << "\n\n| Preprocess | Arch |";
  for (const auto& c : report.columns) os << ' ' << MdField(c) << " |";
  if (avg) os << " Avg |";
  os << "\n|---|---|";
  for (size_t i = 0; i < report.columns.size() + (avg ? 1 : 0); ++i) os << "---:|";
  os << '\n';
  for (const auto& row : report.rows) {
    os << "| " << imageops::ToString(row.preprocess) << " | " << nnet::ToString(row.arch) << " |";
    for (double v : row.cells) os << ' ' << Cell(v) << " |";
    if (avg) os << ' ' << (row.average ? Cell(*row.average) : "") << " |";
    os << '\n';
  }
  return os.str();
}

}  // namespace gendet::evalkit
