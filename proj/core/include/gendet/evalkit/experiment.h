#ifndef GENDET_EVALKIT_EXPERIMENT_H_
#define GENDET_EVALKIT_EXPERIMENT_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gendet/datahub/registry.h"
#include "gendet/evalkit/report.h"
#include "gendet/evalkit/runner.h"
#include "gendet/evalkit/scenario.h"

namespace gendet::evalkit {

struct ExperimentConfig {
  std::filesystem::path registry;  // relative paths resolve against the config file
  std::vector<Scenario> scenarios;
  std::vector<GridCell> grid;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  int input_size = 32;
  TrainOverrides train;
  std::optional<int> max_train_per_class;
  std::filesystem::path out_dir = "reports";
  int jobs = 1;
  std::vector<ReportFormat> formats = {ReportFormat::kCsv, ReportFormat::kMarkdown};

  // Distinct seeds, unique scenario names, non-empty grid. Throws
  // gendet::Error(kInvalidArgument).
  void Validate() const;
};

// Grid entries are either {"preprocess": "Res1", "arch": "X"} objects or a
// single {"preprocess": [...], "arch": [...]} object expanded as a product.
ExperimentConfig ExperimentFromJson(const nlohmann::json& doc,
                                    const std::filesystem::path& base_dir);
ExperimentConfig LoadExperiment(const std::filesystem::path& file);

struct ExperimentResult {
  std::vector<EvalReport> reports;
  std::vector<std::filesystem::path> files;  // reports, then run_log.json
};

// Validates every scenario before training anything, runs them in order with
// a shared ensemble cache, and writes <out>/<name>.csv|.md plus run_log.json.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const datahub::Registry& registry, ImageSource& images,
                               const std::function<void(const std::string&)>& log = {});

}  // namespace gendet::evalkit

#endif  // GENDET_EVALKIT_EXPERIMENT_H_
