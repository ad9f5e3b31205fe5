#include "gendet/datahub/manifest.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "gendet/common/error.h"
#include "gendet/common/random.h"

namespace gendet::datahub {
namespace {

[[noreturn]] void ManifestError(const std::string& id, const std::string& what) {
  Fail(ErrorKind::kDataError, "manifest '" + id + "': " + what);
}

}  // namespace

std::string_view ToString(Label label) {
  return label == Label::kReal ? "real" : "fake";
}

std::string_view ToString(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Label ParseLabel(std::string_view text) {
  if (text == "real") return Label::kReal;
  if (text == "fake") return Label::kFake;
  Fail(ErrorKind::kInvalidArgument, "label must be 'real' or 'fake', got '" +
                                        std::string(text) + "'");
}

Split ParseSplit(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  if (text == "test") return Split::kTest;
  Fail(ErrorKind::kInvalidArgument, "split must be train, val or test, got '" +
                                        std::string(text) + "'");
}

SplitCounts TargetSplitCounts(int n) {
  SplitCounts counts;
  counts.train = (7 * n + 5) / 10;
  counts.val = (2 * n + 5) / 10;
  counts.test = n - counts.train - counts.val;
  return counts;
}

std::vector<Split> SplitDataset(int n, uint64_t seed) {
  Require(n >= 10, "cannot split fewer than 10 items into 70/20/10, got " +
                       std::to_string(n));
  const SplitCounts counts = TargetSplitCounts(n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.Shuffle(std::span<int>(order));
  std::vector<Split> assignment(n);
  for (int rank = 0; rank < n; ++rank) {
    Split s = Split::kTest;
    if (rank < counts.train) {
      s = Split::kTrain;
    } else if (rank < counts.train + counts.val) {
      s = Split::kVal;
    }
    assignment[order[rank]] = s;
  }
  return assignment;
}

std::vector<std::string> DatasetManifest::PathsIn(Split split) const {
  std::vector<std::string> paths;
  for (const auto& e : entries) {
    if (e.split == split) paths.push_back(e.path);
  }
  return paths;
}

SplitCounts DatasetManifest::Counts() const {
  SplitCounts counts;
  for (const auto& e : entries) {
    switch (e.split) {
      case Split::kTrain: ++counts.train; break;
      case Split::kVal: ++counts.val; break;
      case Split::kTest: ++counts.test; break;
    }
  }
  return counts;
}

std::filesystem::path DatasetManifest::Resolve(const std::string& entry_path) const {
  return base_dir / entry_path;
}

void DatasetManifest::Validate() const {
  if (id.empty()) ManifestError(id, "empty id");
  if (psi && !(*psi >= 0.0 && *psi <= 1.0)) ManifestError(id, "psi outside [0, 1]");
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.path).second) {
      ManifestError(id, "path listed twice: " + e.path);
    }
  }
  const int n = static_cast<int>(entries.size());
  if (n >= 10) {
    const SplitCounts actual = Counts();
    auto off = [](int got, double want) { return std::abs(got - want) > 1.0; };
    if (off(actual.train, 0.7 * n) || off(actual.val, 0.2 * n) ||
        off(actual.test, 0.1 * n)) {
      ManifestError(id, "split counts " + std::to_string(actual.train) + "/" +
                            std::to_string(actual.val) + "/" +
                            std::to_string(actual.test) +
                            " deviate from 70/20/10 by more than one item");
    }
  }
}

bool DatasetManifest::operator==(const DatasetManifest& other) const {
  return id == other.id && label == other.label &&
         source_model == other.source_model && source_data == other.source_data &&
         psi == other.psi && entries == other.entries &&
         derived_from == other.derived_from && perturbation == other.perturbation;
}

nlohmann::ordered_json ToJson(const DatasetManifest& m) {
  nlohmann::ordered_json doc;
  doc["id"] = m.id;
  doc["label"] = ToString(m.label);
  doc["source_model"] = m.source_model ? nlohmann::ordered_json(*m.source_model) : nlohmann::ordered_json();
  doc["source_data"] = m.source_data;
  doc["psi"] = m.psi ? nlohmann::ordered_json(*m.psi) : nlohmann::ordered_json();
  if (m.derived_from) doc["derived_from"] = *m.derived_from;
  if (m.perturbation) doc["perturbation"] = *m.perturbation;
  auto& entries = doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"path", e.path}, {"split", ToString(e.split)}});
  }
  return doc;
}

DatasetManifest ManifestFromJson(const nlohmann::json& doc) {
  DatasetManifest m;
  try {
    m.id = doc.at("id").get<std::string>();
    m.label = ParseLabel(doc.at("label").get<std::string>());
    if (doc.contains("source_model") && !doc["source_model"].is_null()) {
      m.source_model = doc["source_model"].get<std::string>();
    }
    m.source_data = doc.value("source_data", std::string());
    if (doc.contains("psi") && !doc["psi"].is_null()) m.psi = doc["psi"].get<double>();
    if (doc.contains("derived_from")) m.derived_from = doc["derived_from"].get<std::string>();
    if (doc.contains("perturbation")) m.perturbation = doc["perturbation"].get<std::string>();
    for (const auto& e : doc.at("entries")) {
      m.entries.push_back({e.at("path").get<std::string>(),
                           ParseSplit(e.at("split").get<std::string>())});
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kDataError, std::string("malformed manifest: ") + e.what());
  } catch (const Error& e) {
    Fail(ErrorKind::kDataError, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void SaveManifest(const std::filesystem::path& file, const DatasetManifest& manifest) {
  std::ofstream out(file, std::ios::trunc);
  out << ToJson(manifest).dump(2) << "\n";
  if (!out) Fail(ErrorKind::kDataError, "cannot write manifest " + file.string());
}

DatasetManifest LoadManifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) Fail(ErrorKind::kDataError, "cannot open manifest " + file.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kDataError, "cannot parse manifest " + file.string() + ": " + e.what());
  }
  DatasetManifest m = ManifestFromJson(doc);
  m.base_dir = file.parent_path();
  m.Validate();
  return m;
}

}  // namespace gendet::datahub
