#ifndef GENDET_DATAHUB_MANIFEST_H_
#define GENDET_DATAHUB_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace gendet::datahub {

enum class Label { kReal, kFake };
enum class Split { kTrain, kVal, kTest };

std::string_view ToString(Label label);
std::string_view ToString(Split split);
Label ParseLabel(std::string_view text);
Split ParseSplit(std::string_view text);

struct SplitCounts {
  int train = 0;
  int val = 0;
  int test = 0;
  int total() const { return train + val + test; }
  bool operator==(const SplitCounts&) const = default;
};

// Target split sizes for n items: train and val rounded half-up from 70% and
// 20%, test takes the remainder.
SplitCounts TargetSplitCounts(int n);

// Deterministic 70/20/10 assignment of n >= 10 items. Element i is the split
// of item i.
std::vector<Split> SplitDataset(int n, uint64_t seed);

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  Split split = Split::kTrain;
  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::string id;
  Label label = Label::kReal;
  std::optional<std::string> source_model;
  std::string source_data;
  std::optional<double> psi;
  std::vector<ManifestEntry> entries;
  // Provenance of derived datasets (e.g. "jpeg90 of synth-fakeA").
  std::optional<std::string> derived_from;
  std::optional<std::string> perturbation;

  // Directory the relative entry paths are resolved against. Not serialised.
  std::filesystem::path base_dir;

  std::vector<std::string> PathsIn(Split split) const;
  SplitCounts Counts() const;
  std::filesystem::path Resolve(const std::string& entry_path) const;

  // Checks id, psi range, unique paths and (for >= 10 entries) the 70/20/10
  // ratios within one item. Throws gendet::Error(kDataError).
  void Validate() const;

  bool operator==(const DatasetManifest& other) const;
};

nlohmann::ordered_json ToJson(const DatasetManifest& manifest);
DatasetManifest ManifestFromJson(const nlohmann::json& doc);

void SaveManifest(const std::filesystem::path& file, const DatasetManifest& manifest);
DatasetManifest LoadManifest(const std::filesystem::path& file);

}  // namespace gendet::datahub

#endif  // GENDET_DATAHUB_MANIFEST_H_
