#include "gendet/evalkit/metrics.h"

#include <cmath>

#include "gendet/common/error.h"

namespace gendet::evalkit {

namespace {

size_t CountCorrect(std::span<const int> predictions, datahub::Label truth) {
  Require(!predictions.empty(), "accuracy of an empty test set");
  const int target = nnet::ClassIndex(truth);
  size_t correct = 0;
  for (int p : predictions) correct += p == target;
  return correct;
}

}  // namespace

double AccuracyPerDataset(std::span<const int> predictions, datahub::Label truth) {
  const size_t correct = CountCorrect(predictions, truth);
  return 100.0 * static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double MisclassifiedPercent(std::span<const int> predictions, datahub::Label truth) {
  const size_t wrong = predictions.size() - CountCorrect(predictions, truth);
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(predictions.size());
}

double AccuracyPerDataset(nnet::DetectorModel& model, const nnet::SampleSet& samples,
                          datahub::Label truth, int batch_size) {
  Require(!samples.empty(), "accuracy of an empty test set");
  std::vector<int> predictions;
  predictions.reserve(samples.size());
  std::vector<size_t> idx;
  for (size_t begin = 0; begin < samples.size(); begin += batch_size) {
    const size_t end = std::min(samples.size(), begin + static_cast<size_t>(batch_size));
    idx.clear();
    for (size_t i = begin; i < end; ++i) idx.push_back(i);
    const auto batch = model.Predict(samples.Batch(idx));
    predictions.insert(predictions.end(), batch.begin(), batch.end());
  }
  return AccuracyPerDataset(predictions, truth);
}

double RoundHalfUp1(double value) { return std::floor(value * 10.0 + 0.5 + 1e-9) / 10.0; }

double InTheWildAverage(double real1, double real2, double fake1, double fake2) {
  return RoundHalfUp1((real1 + real2 + fake1 + fake2) / 4.0);
}

}  // namespace gendet::evalkit
