#include "gendet/datahub/registry.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "gendet/common/error.h"
#include "gendet/imageops/image_io.h"

namespace gendet::datahub {

void Registry::Add(DatasetManifest manifest) {
  const std::string id = manifest.id;
  if (manifests_.contains(id)) {
    Fail(ErrorKind::kDataError, "duplicate manifest id '" + id + "'");
  }
  manifests_.emplace(id, std::move(manifest));
  order_.push_back(id);
}

const DatasetManifest& Registry::Get(const std::string& id) const {
  auto it = manifests_.find(id);
  if (it == manifests_.end()) {
    Fail(ErrorKind::kNotFound, "unknown manifest id '" + id + "'");
  }
  return it->second;
}

std::vector<std::string> Registry::Ids() const { return order_; }

std::vector<DatasetManifest> Registry::Manifests() const {
  std::vector<DatasetManifest> out;
  for (const auto& id : order_) out.push_back(manifests_.at(id));
  return out;
}

Registry Registry::Load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) Fail(ErrorKind::kDataError, "cannot open registry " + file.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kDataError, "cannot parse registry " + file.string() + ": " + e.what());
  }
  if (!doc.contains("manifests") || !doc["manifests"].is_array()) {
    Fail(ErrorKind::kDataError, "registry " + file.string() + " lacks a 'manifests' array");
  }
  Registry registry;
  for (const auto& rel : doc["manifests"]) {
    registry.Add(LoadManifest(file.parent_path() / rel.get<std::string>()));
  }
  return registry;
}

std::vector<RegistryRow> DescribeRegistry(const std::vector<DatasetManifest>& manifests) {
  Require(!manifests.empty(), "describe needs at least one manifest");
  std::set<std::string> ids;
  std::vector<RegistryRow> rows;
  for (const auto& m : manifests) {
    if (!ids.insert(m.id).second) {
      Fail(ErrorKind::kDataError, "duplicate manifest id '" + m.id + "'");
    }
    rows.push_back({m.id, m.label, m.source_model, m.source_data, m.psi, m.Counts()});
  }
  return rows;
}

std::string FormatRegistryTable(const std::vector<RegistryRow>& rows) {
  std::ostringstream os;
  os << "id\tlabel\tsource_model\tsource_data\tpsi\ttrain\tval\ttest\n";
  for (const auto& r : rows) {
    os << r.id << '\t' << ToString(r.label) << '\t' << r.source_model.value_or("-")
       << '\t' << (r.source_data.empty() ? "-" : r.source_data) << '\t';
    if (r.psi) {
      os << *r.psi;
    } else {
      os << '-';
    }
    os << '\t' << r.counts.train << '\t' << r.counts.val << '\t' << r.counts.test << '\n';
  }
  return os.str();
}

DatasetManifest IngestDirectory(const std::filesystem::path& dir, Label label,
                                const Provenance& provenance,
                                const IngestOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    Fail(ErrorKind::kDataError, "not a directory: " + dir.string());
  }
  std::set<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
      names.insert(entry.path().filename().string());
    }
  }

  std::vector<std::string> decodable;
  for (const auto& name : names) {
    try {
      imageops::ReadImage(dir / name);
      decodable.push_back(name);
    } catch (const Error& e) {
      if (!options.allow_corrupt) {
        Fail(ErrorKind::kDataError, "undecodable image " + (dir / name).string());
      }
    }
  }
  if (decodable.empty()) Fail(ErrorKind::kDataError, "no images in " + dir.string());

  DatasetManifest m;
  m.id = provenance.id;
  m.label = label;
  m.source_model = provenance.source_model;
  m.source_data = provenance.source_data;
  m.psi = provenance.psi;
  m.base_dir = dir;
  const int n = static_cast<int>(decodable.size());
  std::vector<Split> splits(n, Split::kTrain);
  if (n >= 10) splits = SplitDataset(n, options.split_seed);
  for (int i = 0; i < n; ++i) m.entries.push_back({decodable[i], splits[i]});
  m.Validate();
  return m;
}

}  // namespace gendet::datahub
