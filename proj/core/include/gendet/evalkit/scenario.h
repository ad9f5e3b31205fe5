#ifndef GENDET_EVALKIT_SCENARIO_H_
#define GENDET_EVALKIT_SCENARIO_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gendet/datahub/registry.h"
#include "gendet/imageops/perturb.h"

namespace gendet::evalkit {

enum class ScenarioTag { kDefault, kCrossModel, kCrossData, kPostProcessing, kInTheWild };

std::string_view ToString(ScenarioTag tag);
ScenarioTag ParseScenarioTag(std::string_view text);

struct Scenario {
  std::string name;  // unique within an experiment; names the report files
  ScenarioTag tag = ScenarioTag::kDefault;
  std::vector<std::string> train_sets;  // train and val splits are used
  std::vector<std::string> test_sets;   // test split is used
  std::optional<imageops::PerturbationSpec> perturbation;
  // Columns averaged into the Avg column (InTheWild only). Empty means all.
  std::vector<std::string> average_sets;
};

// Checks the tag-specific relations between train and test manifests and
// runs CheckLeaks. Throws gendet::Error (kInvalidArgument for malformed
// scenarios, kNotFound for unknown ids, kDataError for leaks).
void ValidateScenario(const Scenario& scenario, const datahub::Registry& registry);

// Fails with "train/test leak" when a file used for training or validation
// is also a test image. Paths are compared after resolution.
void CheckLeaks(const Scenario& scenario, const datahub::Registry& registry);

// {"name", "tag", "train": [...], "test": [...], "perturbation": "blur9" |
//  {"kind": "blur", "kernel": 9, "sigma": 1} | {"kind": "jpeg", "quality": 90},
//  "average": [...]}
Scenario ScenarioFromJson(const nlohmann::json& doc);
nlohmann::ordered_json ToJson(const Scenario& scenario);

imageops::PerturbationSpec PerturbationFromJson(const nlohmann::json& doc);
nlohmann::ordered_json ToJson(const imageops::PerturbationSpec& spec);

}  // namespace gendet::evalkit

#endif  // GENDET_EVALKIT_SCENARIO_H_
