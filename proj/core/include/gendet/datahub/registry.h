#ifndef GENDET_DATAHUB_REGISTRY_H_
#define GENDET_DATAHUB_REGISTRY_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gendet/datahub/manifest.h"

namespace gendet::datahub {

// A set of manifests with unique ids.
class Registry {
 public:
  // Throws gendet::Error(kDataError) on a duplicate id.
  void Add(DatasetManifest manifest);

  bool Contains(const std::string& id) const { return manifests_.contains(id); }
  // Throws gendet::Error(kNotFound) naming the id.
  const DatasetManifest& Get(const std::string& id) const;

  std::vector<std::string> Ids() const;
  std::vector<DatasetManifest> Manifests() const;
  size_t size() const { return manifests_.size(); }

  // Loads a registry file: {"manifests": ["relative/manifest.json", ...]}.
  static Registry Load(const std::filesystem::path& file);

 private:
  std::map<std::string, DatasetManifest> manifests_;
  std::vector<std::string> order_;
};

struct RegistryRow {
  std::string id;
  Label label = Label::kReal;
  std::optional<std::string> source_model;
  std::string source_data;
  std::optional<double> psi;
  SplitCounts counts;
};

// One row per manifest in the given order. Rejects duplicate ids.
std::vector<RegistryRow> DescribeRegistry(const std::vector<DatasetManifest>& manifests);
std::string FormatRegistryTable(const std::vector<RegistryRow>& rows);

struct Provenance {
  std::string id;
  std::optional<std::string> source_model;
  std::string source_data;
  std::optional<double> psi;
};

struct IngestOptions {
  uint64_t split_seed = 0;
  // Skip undecodable files instead of failing.
  bool allow_corrupt = false;
};

// Builds a manifest from every PNG/JPEG directly inside `dir`. Paths are
// stored relative to `dir`, sorted and deduplicated.
DatasetManifest IngestDirectory(const std::filesystem::path& dir, Label label,
                                const Provenance& provenance,
                                const IngestOptions& options = {});

}  // namespace gendet::datahub

#endif  // GENDET_DATAHUB_REGISTRY_H_
