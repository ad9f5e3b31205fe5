#ifndef GENDET_EVALKIT_RUNNER_H_
#define GENDET_EVALKIT_RUNNER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gendet/datahub/registry.h"
#include "gendet/evalkit/report.h"
#include "gendet/evalkit/scenario.h"
#include "gendet/imageops/image.h"
#include "gendet/nnet/train.h"

namespace gendet::evalkit {

// Where scenario runs get their pixels from.
class ImageSource {
 public:
  virtual ~ImageSource() = default;
  virtual imageops::ImageTensor Load(const datahub::DatasetManifest& manifest,
                                     const datahub::ManifestEntry& entry) = 0;
};

// Decodes files at manifest.Resolve(entry.path).
class DiskImageSource : public ImageSource {
 public:
  imageops::ImageTensor Load(const datahub::DatasetManifest& manifest,
                             const datahub::ManifestEntry& entry) override;
};

// Images held in memory, keyed by (manifest id, entry path).
class MemoryImageSource : public ImageSource {
 public:
  // `images[i]` belongs to `manifest.entries[i]`.
  void Add(const datahub::DatasetManifest& manifest,
           std::vector<imageops::ImageTensor> images);

  imageops::ImageTensor Load(const datahub::DatasetManifest& manifest,
                             const datahub::ManifestEntry& entry) override;

 private:
  std::map<std::pair<std::string, std::string>, imageops::ImageTensor> images_;
};

struct GridCell {
  imageops::PreprocessMethod preprocess = imageops::PreprocessMethod::kNone;
  nnet::Arch arch = nnet::Arch::kMiniXception;
  bool operator==(const GridCell&) const = default;
};

struct TrainOverrides {
  std::optional<double> learning_rate;
  std::optional<double> momentum;
  std::optional<double> weight_decay;
  std::optional<int> batch_size;
  std::optional<int> patience;
  std::optional<int> max_epochs;

  nnet::TrainConfig For(nnet::Arch arch) const;
};

struct LabeledImages {
  std::vector<imageops::ImageTensor> images;
  std::vector<int> labels;  // nnet::kRealClass / kFakeClass
};

struct TrainingImages {
  LabeledImages train;
  LabeledImages val;
};

// Train and val splits of the given manifests. Each class's train entries
// are interleaved across its manifests and cut to `max_per_class`. Both
// classes must be present in both splits.
TrainingImages LoadTrainingImages(const datahub::Registry& registry,
                                  const std::vector<std::string>& ids, ImageSource& images,
                                  std::optional<int> max_per_class = std::nullopt);

// Model inputs for `model`'s pre-processing and input size.
nnet::SampleSet PrepareSamples(const nnet::DetectorModel& model, const LabeledImages& images);

enum class RunPhase { kTraining, kEvaluation };

struct RunOptions {
  std::vector<GridCell> grid;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  int input_size = 32;
  TrainOverrides train;
  nnet::ModelOptions model;
  // Per class, after interleaving that class's train manifests.
  std::optional<int> max_train_per_class;
  int jobs = 1;
  std::function<void(RunPhase)> on_phase;
  std::function<void(const std::string&)> log;
};

// Trained ensembles keyed by everything that determines them, so scenarios
// with identical training data share models. Thread-safe.
class EnsembleCache {
 public:
  using Ensemble = std::shared_ptr<std::vector<nnet::EnsembleMember>>;

  Ensemble Find(const std::string& key) const;
  void Put(const std::string& key, Ensemble ensemble);
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, Ensemble> entries_;
};

// Trains one ensemble per grid cell on the scenario's train sets (balanced
// real/fake), then scores every test set with every member. Test images are
// only loaded after all training has finished.
EvalReport RunScenario(const Scenario& scenario, const datahub::Registry& registry,
                       ImageSource& images, const RunOptions& options,
                       EnsembleCache* cache = nullptr);

}  // namespace gendet::evalkit

#endif  // GENDET_EVALKIT_RUNNER_H_
