#ifndef GENDET_NNET_GRADCHECK_H_
#define GENDET_NNET_GRADCHECK_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gendet/nnet/layers.h"
#include "gendet/nnet/model.h"

namespace gendet::nnet {

struct GroupError {
  std::string name;
  size_t elements = 0;
  // ||analytic - numeric|| / max(||analytic|| + ||numeric||, 1e-12)
  double relative_error = 0.0;
};

struct GradCheckReport {
  std::vector<GroupError> groups;
  double max_relative_error = 0.0;
};

// Central finite differences over every element of every parameter group.
// `loss` evaluates the scalar objective; `analytic` must leave the exact
// gradient in each Parameter::grad.
GradCheckReport CheckGradients(std::span<Parameter* const> params,
                               const std::function<double()>& loss,
                               const std::function<void()>& analytic, double eps = 1e-6);

// Gradient check of a whole detector on a probe batch.
GradCheckReport GradCheck(DetectorModel& model, const Tensor& batch,
                          std::span<const int> targets, double eps = 1e-6);

// Gradient check of one layer under the objective sum(w .* layer(x)) for a
// fixed random w; also checks the input gradient (reported as group "input").
GradCheckReport GradCheckLayer(Layer& layer, const Tensor& input, uint64_t seed,
                               double eps = 1e-6);

}  // namespace gendet::nnet

#endif  // GENDET_NNET_GRADCHECK_H_
