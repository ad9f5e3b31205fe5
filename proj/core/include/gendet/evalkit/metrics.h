#ifndef GENDET_EVALKIT_METRICS_H_
#define GENDET_EVALKIT_METRICS_H_

#include <span>

#include "gendet/datahub/manifest.h"
#include "gendet/nnet/model.h"
#include "gendet/nnet/train.h"

namespace gendet::evalkit {

// Percentage of predictions equal to the dataset's single ground-truth class.
// Throws on an empty prediction list.
double AccuracyPerDataset(std::span<const int> predictions, datahub::Label truth);
double MisclassifiedPercent(std::span<const int> predictions, datahub::Label truth);

// Runs the model over every sample; the set's own labels are ignored.
double AccuracyPerDataset(nnet::DetectorModel& model, const nnet::SampleSet& samples,
                          datahub::Label truth, int batch_size = 128);

// Half-up rounding to one decimal, tolerant of binary representation error
// (62.35 rounds to 62.4).
double RoundHalfUp1(double value);

// Unweighted mean of two real-set and two fake-set accuracies, rounded.
double InTheWildAverage(double real1, double real2, double fake1, double fake2);

}  // namespace gendet::evalkit

#endif  // GENDET_EVALKIT_METRICS_H_
