#ifndef GENDET_NNET_TRAIN_H_
#define GENDET_NNET_TRAIN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gendet/common/random.h"
#include "gendet/nnet/model.h"

namespace gendet::nnet {

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0001;
  int batch_size = 32;
  int patience = 3;
  int max_epochs = 30;
  uint64_t seed = 1;

  // Batch size 64 for ForensicTransfer, 32 for MiniXception.
  static TrainConfig ForArch(Arch arch);
  void Validate() const;
};

// Pre-processed model inputs with class indices, stored contiguously.
class SampleSet {
 public:
  explicit SampleSet(Shape sample_shape) : sample_shape_(sample_shape) {
    sample_shape_.n = 1;
  }

  void Add(std::span<const double> values, int label);

  size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const Shape& sample_shape() const { return sample_shape_; }
  std::span<const int> labels() const { return labels_; }

  Tensor Batch(std::span<const size_t> indices) const;

 private:
  Shape sample_shape_;
  std::vector<double> data_;
  std::vector<int> labels_;
};

// SGD with momentum; weight decay is applied outside the momentum buffer:
//   v <- momentum * v + g
//   w <- w - lr * (v + weight_decay * w)
class SgdMomentum {
 public:
  SgdMomentum(double learning_rate, double momentum, double weight_decay)
      : lr_(learning_rate), momentum_(momentum), weight_decay_(weight_decay) {}

  void Step(std::span<Parameter* const> params);

 private:
  double lr_, momentum_, weight_decay_;
  std::vector<std::vector<double>> velocity_;
};

// Tracks the best validation accuracy; an epoch counts as an improvement
// only on a strict increase.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}

  // Records the next epoch and returns true if training should stop.
  bool Update(double val_accuracy);

  int best_epoch() const { return best_epoch_; }  // 1-based, 0 before any update
  double best_accuracy() const { return best_; }
  bool improved_last() const { return improved_last_; }

 private:
  int patience_;
  int epoch_ = 0;
  int best_epoch_ = 0;
  double best_ = -1.0;
  bool improved_last_ = false;
};

// One epoch's presentation order: each class is shuffled and cut to the size
// of the smaller class, then the union is shuffled again.
std::vector<size_t> BalancedEpochOrder(std::span<const int> labels, Rng& rng);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  bool stopped_early = false;
};

// Fraction of `samples` predicted correctly.
double Accuracy(DetectorModel& model, const SampleSet& samples, int batch_size = 128);

// Mini-batch training with early stopping on validation accuracy. The model
// ends with the weights of the best epoch. Throws gendet::Error
// (kTrainingFailure) on a non-finite loss and kInvalidArgument on empty sets.
TrainHistory Train(DetectorModel& model, const SampleSet& train, const SampleSet& val,
                   const TrainConfig& config,
                   const std::function<void(const EpochRecord&)>& on_epoch = {});

struct EnsembleMember {
  DetectorModel model;
  TrainHistory history;
};

using ModelFactory = std::function<DetectorModel(uint64_t seed)>;

// Trains one independent model per seed (the seed drives both initialisation
// and shuffling). Members may run on up to `jobs` threads; results do not
// depend on scheduling. Duplicate seeds are rejected.
std::vector<EnsembleMember> TrainEnsemble(const ModelFactory& factory, const SampleSet& train,
                                          const SampleSet& val, const TrainConfig& config,
                                          std::span<const uint64_t> seeds, int jobs = 1);

}  // namespace gendet::nnet

#endif  // GENDET_NNET_TRAIN_H_
