#include "gendet/nnet/train.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <set>
#include <thread>

#include "gendet/common/error.h"

namespace gendet::nnet {

TrainConfig TrainConfig::ForArch(Arch arch) {
  TrainConfig config;
  config.batch_size = arch == Arch::kForensicTransfer ? 64 : 32;
  return config;
}

void TrainConfig::Validate() const {
  Require(learning_rate > 0.0, "learning rate must be positive");
  Require(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0, 1)");
  Require(weight_decay >= 0.0, "weight decay must be non-negative");
  Require(patience >= 1, "patience must be >= 1");
  Require(batch_size >= 1, "batch size must be >= 1");
  Require(max_epochs >= 1, "max_epochs must be >= 1");
}

void SampleSet::Add(std::span<const double> values, int label) {
  Require(values.size() == sample_shape_.per_sample(),
          "sample has " + std::to_string(values.size()) + " values, expected shape " +
              sample_shape_.ToString());
  data_.insert(data_.end(), values.begin(), values.end());
  labels_.push_back(label);
}

Tensor SampleSet::Batch(std::span<const size_t> indices) const {
  Shape shape = sample_shape_;
  shape.n = static_cast<int>(indices.size());
  Tensor batch(shape);
  const size_t stride = sample_shape_.per_sample();
  for (size_t i = 0; i < indices.size(); ++i) {
    std::copy_n(data_.begin() + indices[i] * stride, stride, batch.sample(static_cast<int>(i)));
  }
  return batch;
}

void SgdMomentum::Step(std::span<Parameter* const> params) {
  if (velocity_.size() != params.size()) {
    velocity_.assign(params.size(), {});
    for (size_t i = 0; i < params.size(); ++i) velocity_[i].assign(params[i]->value.size(), 0.0);
  }
  for (size_t i = 0; i < params.size(); ++i) {
    auto w = params[i]->value.values();
    auto g = params[i]->grad.values();
    auto& v = velocity_[i];
    for (size_t j = 0; j < w.size(); ++j) {
      v[j] = momentum_ * v[j] + g[j];
      w[j] -= lr_ * (v[j] + weight_decay_ * w[j]);
    }
  }
}

bool EarlyStopping::Update(double val_accuracy) {
  ++epoch_;
  improved_last_ = val_accuracy > best_;
  if (improved_last_) {
    best_ = val_accuracy;
    best_epoch_ = epoch_;
  }
  return epoch_ - best_epoch_ >= patience_;
}

std::vector<size_t> BalancedEpochOrder(std::span<const int> labels, Rng& rng) {
  std::vector<size_t> real;
  std::vector<size_t> fake;
  for (size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == kRealClass ? real : fake).push_back(i);
  }
  rng.Shuffle(std::span<size_t>(real));
  rng.Shuffle(std::span<size_t>(fake));
  const size_t per_class = std::min(real.size(), fake.size());
  std::vector<size_t> order;
  order.reserve(2 * per_class);
  order.insert(order.end(), real.begin(), real.begin() + per_class);
  order.insert(order.end(), fake.begin(), fake.begin() + per_class);
  rng.Shuffle(std::span<size_t>(order));
  return order;
}

double Accuracy(DetectorModel& model, const SampleSet& samples, int batch_size) {
  Require(!samples.empty(), "accuracy of an empty sample set");
  size_t correct = 0;
  std::vector<size_t> idx;
  for (size_t begin = 0; begin < samples.size(); begin += batch_size) {
    const size_t end = std::min(samples.size(), begin + batch_size);
    idx.resize(end - begin);
    for (size_t i = begin; i < end; ++i) idx[i - begin] = i;
    const auto predicted = model.Predict(samples.Batch(idx));
    for (size_t i = begin; i < end; ++i) {
      if (predicted[i - begin] == samples.labels()[i]) ++correct;
    }
  }
  return static_cast<double>(correct) / samples.size();
}

TrainHistory Train(DetectorModel& model, const SampleSet& train, const SampleSet& val,
                   const TrainConfig& config,
                   const std::function<void(const EpochRecord&)>& on_epoch) {
  config.Validate();
  Require(!train.empty(), "training split is empty");
  Require(!val.empty(), "validation split is empty");

  Rng rng(DeriveSeed(config.seed, 0x5eed));
  SgdMomentum optimizer(config.learning_rate, config.momentum, config.weight_decay);
  EarlyStopping stopper(config.patience);
  TrainHistory history;
  std::vector<double> best_weights = model.FlatWeights();
  auto params = model.Parameters();

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto order = BalancedEpochOrder(train.labels(), rng);
    Require(!order.empty(), "training split needs both real and fake samples");
    double loss_sum = 0.0;
    size_t batches = 0;
    std::vector<int> targets;
    for (size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const size_t end = std::min(order.size(), begin + config.batch_size);
      std::span<const size_t> idx(order.data() + begin, end - begin);
      targets.resize(idx.size());
      for (size_t i = 0; i < idx.size(); ++i) targets[i] = train.labels()[idx[i]];
      const double loss = model.Loss(train.Batch(idx), targets, /*backward=*/true);
      if (!std::isfinite(loss)) {
        Fail(ErrorKind::kTrainingFailure,
             "non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                 std::to_string(batches + 1) + " (seed " + std::to_string(config.seed) + ")");
      }
      optimizer.Step(params);
      loss_sum += loss;
      ++batches;
    }

    EpochRecord record{epoch, loss_sum / static_cast<double>(batches), Accuracy(model, val)};
    history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
    const bool stop = stopper.Update(record.val_accuracy);
    if (stopper.improved_last()) best_weights = model.FlatWeights();
    if (stop) {
      history.stopped_early = true;
      break;
    }
  }
  history.best_epoch = stopper.best_epoch();
  model.SetFlatWeights(best_weights);
  return history;
}

std::vector<EnsembleMember> TrainEnsemble(const ModelFactory& factory, const SampleSet& train,
                                          const SampleSet& val, const TrainConfig& config,
                                          std::span<const uint64_t> seeds, int jobs) {
  Require(!seeds.empty(), "ensemble needs at least one seed");
  std::set<uint64_t> distinct(seeds.begin(), seeds.end());
  Require(distinct.size() == seeds.size(), "ensemble seeds must be distinct");

  std::vector<std::optional<EnsembleMember>> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < seeds.size(); i = next++) {
      try {
        TrainConfig member_config = config;
        member_config.seed = seeds[i];
        DetectorModel model = factory(seeds[i]);
        TrainHistory history = Train(model, train, val, member_config);
        results[i].emplace(EnsembleMember{std::move(model), std::move(history)});
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(seeds.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<EnsembleMember> members;
  for (auto& r : results) members.push_back(std::move(*r));
  return members;
}

}  // namespace gendet::nnet
