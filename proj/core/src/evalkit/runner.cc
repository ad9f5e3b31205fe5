#include "gendet/evalkit/runner.h"

#include <algorithm>
#include <sstream>

#include "gendet/common/error.h"
#include "gendet/evalkit/metrics.h"
#include "gendet/imageops/image_io.h"
#include "gendet/imageops/perturb.h"

namespace gendet::evalkit {

using datahub::DatasetManifest;
using datahub::Label;
using datahub::ManifestEntry;
using datahub::Split;
using imageops::ImageTensor;

imageops::ImageTensor DiskImageSource::Load(const DatasetManifest& manifest,
                                            const ManifestEntry& entry) {
  return imageops::ReadImage(manifest.Resolve(entry.path));
}

void MemoryImageSource::Add(const DatasetManifest& manifest, std::vector<ImageTensor> images) {
  Require(images.size() == manifest.entries.size(),
          "image count differs from manifest " + manifest.id);
  for (size_t i = 0; i < images.size(); ++i) {
    images_.insert_or_assign({manifest.id, manifest.entries[i].path}, std::move(images[i]));
  }
}

imageops::ImageTensor MemoryImageSource::Load(const DatasetManifest& manifest,
                                              const ManifestEntry& entry) {
  auto it = images_.find({manifest.id, entry.path});
  if (it == images_.end()) {
    Fail(ErrorKind::kNotFound, "no image " + entry.path + " in " + manifest.id);
  }
  return it->second;
}

nnet::TrainConfig TrainOverrides::For(nnet::Arch arch) const {
  auto cfg = nnet::TrainConfig::ForArch(arch);
  if (learning_rate) cfg.learning_rate = *learning_rate;
  if (momentum) cfg.momentum = *momentum;
  if (weight_decay) cfg.weight_decay = *weight_decay;
  if (batch_size) cfg.batch_size = *batch_size;
  if (patience) cfg.patience = *patience;
  if (max_epochs) cfg.max_epochs = *max_epochs;
  cfg.Validate();
  return cfg;
}

EnsembleCache::Ensemble EnsembleCache::Find(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : it->second;
}

void EnsembleCache::Put(const std::string& key, Ensemble ensemble) {
  std::lock_guard lock(mu_);
  entries_[key] = std::move(ensemble);
}

size_t EnsembleCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

namespace {

struct Item {
  const DatasetManifest* manifest;
  const ManifestEntry* entry;
};

// Entries of one split, drawn round-robin from the manifests of one class.
std::vector<Item> Interleave(const std::vector<const DatasetManifest*>& manifests, Split split,
                             std::optional<int> cap) {
  std::vector<std::vector<Item>> per;
  for (const auto* m : manifests) {
    auto& items = per.emplace_back();
    for (const auto& e : m->entries) {
      if (e.split == split) items.push_back({m, &e});
    }
  }
  std::vector<Item> out;
  for (size_t i = 0;; ++i) {
    bool any = false;
    for (const auto& items : per) {
      if (i < items.size()) {
        out.push_back(items[i]);
        any = true;
      }
    }
    if (!any) break;
  }
  if (cap && out.size() > static_cast<size_t>(*cap)) out.resize(*cap);
  return out;
}

std::string CacheKey(const Scenario& scenario, const GridCell& cell, const RunOptions& options,
                     const nnet::TrainConfig& cfg) {
  auto ids = scenario.train_sets;
  std::sort(ids.begin(), ids.end());
  const auto& w = options.model.widths;
  nlohmann::ordered_json key = {
      {"train", ids},
      {"preprocess", imageops::ToString(cell.preprocess)},
      {"arch", nnet::ToString(cell.arch)},
      {"input", options.input_size},
      {"seeds", options.seeds},
      {"cap", options.max_train_per_class ? *options.max_train_per_class : -1},
      {"cfg", {cfg.learning_rate, cfg.momentum, cfg.weight_decay, cfg.batch_size,
               cfg.patience, cfg.max_epochs}},
      {"init", {options.model.init.fan_in_scaled, options.model.init.std}},
      {"lambda", options.model.ft_lambda},
      {"widths", {w.stem, w.blocks, w.encoder}}};
  return key.dump();
}

}  // namespace

TrainingImages LoadTrainingImages(const datahub::Registry& registry,
                                  const std::vector<std::string>& ids, ImageSource& images,
                                  std::optional<int> max_per_class) {
  std::vector<const DatasetManifest*> real_sets, fake_sets;
  for (const auto& id : ids) {
    const auto& m = registry.Get(id);
    (m.label == Label::kReal ? real_sets : fake_sets).push_back(&m);
  }
  TrainingImages out;
  for (const auto* group : {&real_sets, &fake_sets}) {
    const int label = group == &real_sets ? nnet::kRealClass : nnet::kFakeClass;
    const std::string name = group == &real_sets ? "real" : "fake";
    const auto train_items = Interleave(*group, Split::kTrain, max_per_class);
    const auto val_items = Interleave(*group, Split::kVal, std::nullopt);
    if (train_items.empty()) Fail(ErrorKind::kDataError, "no " + name + " training images");
    if (val_items.empty()) Fail(ErrorKind::kDataError, "no " + name + " validation images");
    for (const auto& it : train_items) {
      out.train.images.push_back(images.Load(*it.manifest, *it.entry));
      out.train.labels.push_back(label);
    }
    for (const auto& it : val_items) {
      out.val.images.push_back(images.Load(*it.manifest, *it.entry));
      out.val.labels.push_back(label);
    }
  }
  return out;
}

nnet::SampleSet PrepareSamples(const nnet::DetectorModel& model, const LabeledImages& images) {
  nnet::SampleSet set(model.SampleShape());
  for (size_t i = 0; i < images.images.size(); ++i) {
    set.Add(model.PrepareInput(images.images[i]), images.labels[i]);
  }
  return set;
}

EvalReport RunScenario(const Scenario& scenario, const datahub::Registry& registry,
                       ImageSource& images, const RunOptions& options, EnsembleCache* cache) {
  ValidateScenario(scenario, registry);
  Require(!options.grid.empty(), "empty preprocess x arch grid");
  Require(!options.seeds.empty(), "no seeds");
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };
  auto phase = [&](RunPhase p) {
    if (options.on_phase) options.on_phase(p);
  };
  const std::string tag(ToString(scenario.tag));

  EnsembleCache local_cache;
  if (cache == nullptr) cache = &local_cache;
  std::vector<EnsembleCache::Ensemble> ensembles(options.grid.size());
  std::vector<std::string> keys(options.grid.size());
  std::vector<nnet::TrainConfig> configs;
  bool need_training = false;
  for (size_t c = 0; c < options.grid.size(); ++c) {
    configs.push_back(options.train.For(options.grid[c].arch));
    keys[c] = CacheKey(scenario, options.grid[c], options, configs[c]);
    ensembles[c] = cache->Find(keys[c]);
    need_training |= ensembles[c] == nullptr;
  }

  phase(RunPhase::kTraining);
  if (need_training) {
    const TrainingImages data = LoadTrainingImages(registry, scenario.train_sets, images,
                                                   options.max_train_per_class);
    for (size_t c = 0; c < options.grid.size(); ++c) {
      if (ensembles[c]) continue;
      const GridCell cell = options.grid[c];
      auto factory = [&](uint64_t seed) {
        return nnet::DetectorModel::Build(cell.arch, cell.preprocess, options.input_size, seed,
                                          options.model);
      };
      const auto probe = factory(options.seeds.front());
      const nnet::SampleSet train_set = PrepareSamples(probe, data.train);
      const nnet::SampleSet val_set = PrepareSamples(probe, data.val);
      std::ostringstream msg;
      msg << tag << ' ' << imageops::ToString(cell.preprocess) << '/'
          << nnet::ToString(cell.arch) << ": training " << options.seeds.size()
          << " seeds on " << train_set.size() << " images";
      log(msg.str());
      ensembles[c] = std::make_shared<std::vector<nnet::EnsembleMember>>(nnet::TrainEnsemble(
          factory, train_set, val_set, configs[c], options.seeds, options.jobs));
      cache->Put(keys[c], ensembles[c]);
    }
  }

  phase(RunPhase::kEvaluation);
  EvalReport report;
  report.scenario = tag;
  if (scenario.perturbation) report.perturbation = scenario.perturbation->Tag();
  report.columns = scenario.test_sets;
  report.rows.resize(options.grid.size());
  for (size_t c = 0; c < options.grid.size(); ++c) {
    auto& row = report.rows[c];
    row.preprocess = options.grid[c].preprocess;
    row.arch = options.grid[c].arch;
    row.seeds = options.seeds;
    row.per_seed.assign(options.seeds.size(), std::vector<double>(report.columns.size()));
    for (const auto& member : *ensembles[c]) row.histories.push_back(member.history);
  }

  for (size_t col = 0; col < scenario.test_sets.size(); ++col) {
    const auto& m = registry.Get(scenario.test_sets[col]);
    std::vector<ImageTensor> raw;
    for (const auto& e : m.entries) {
      if (e.split != Split::kTest) continue;
      auto img = images.Load(m, e);
      if (scenario.perturbation) img = imageops::ApplyPerturbation(img, *scenario.perturbation);
      raw.push_back(std::move(img));
    }
    Require(!raw.empty(), "test set " + m.id + " has no test images");
    for (size_t c = 0; c < options.grid.size(); ++c) {
      auto& members = *ensembles[c];
      nnet::SampleSet set(members.front().model.SampleShape());
      for (const auto& img : raw) {
        set.Add(members.front().model.PrepareInput(img), nnet::ClassIndex(m.label));
      }
      for (size_t s = 0; s < members.size(); ++s) {
        report.rows[c].per_seed[s][col] = AccuracyPerDataset(members[s].model, set, m.label);
      }
    }
  }

  for (auto& row : report.rows) {
    row.cells.assign(report.columns.size(), 0.0);
    for (size_t col = 0; col < report.columns.size(); ++col) {
      double sum = 0.0;
      for (const auto& seed_cells : row.per_seed) sum += seed_cells[col];
      row.cells[col] = sum / static_cast<double>(row.per_seed.size());
    }
    if (scenario.tag == ScenarioTag::kInTheWild) {
      double sum = 0.0;
      size_t n = 0;
      for (size_t col = 0; col < report.columns.size(); ++col) {
        const auto& avg = scenario.average_sets;
        if (avg.empty() || std::find(avg.begin(), avg.end(), report.columns[col]) != avg.end()) {
          sum += row.cells[col];
          ++n;
        }
      }
      row.average = sum / static_cast<double>(n);
    }
  }
  report.Validate();
  return report;
}

}  // namespace gendet::evalkit
