#ifndef GENDET_EVALKIT_REPORT_H_
#define GENDET_EVALKIT_REPORT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gendet/imageops/transforms.h"
#include "gendet/nnet/model.h"
#include "gendet/nnet/train.h"

namespace gendet::evalkit {

struct ReportRow {
  imageops::PreprocessMethod preprocess = imageops::PreprocessMethod::kNone;
  nnet::Arch arch = nnet::Arch::kMiniXception;
  std::vector<double> cells;                  // mean over seeds, unrounded
  std::vector<uint64_t> seeds;
  std::vector<std::vector<double>> per_seed;  // [seed][column]
  std::vector<nnet::TrainHistory> histories;  // one per seed
  std::optional<double> average;              // unrounded
};

struct EvalReport {
  std::string scenario;  // tag name
  std::optional<std::string> perturbation;  // e.g. "blur9"
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;

  // Cells in [0, 100], row widths match the columns.
  void Validate() const;
};

enum class ReportFormat { kCsv, kMarkdown };

ReportFormat ParseReportFormat(std::string_view text);

// Cells are rounded half-up to one decimal here and nowhere else.
std::string RenderReport(const EvalReport& report, ReportFormat format);

}  // namespace gendet::evalkit

#endif  // GENDET_EVALKIT_REPORT_H_
