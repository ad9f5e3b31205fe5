#include "gendet/nnet/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "gendet/common/random.h"

namespace gendet::nnet {
namespace {

double RelativeError(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(na) + std::sqrt(nn), 1e-12);
}

GroupError CheckValues(std::string name, std::span<double> values,
                       std::span<const double> analytic, const std::function<double()>& loss,
                       double eps) {
  std::vector<double> numeric(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + eps;
    const double plus = loss();
    values[i] = saved - eps;
    const double minus = loss();
    values[i] = saved;
    numeric[i] = (plus - minus) / (2.0 * eps);
  }
  return {std::move(name), values.size(), RelativeError(analytic, numeric)};
}

void Finish(GradCheckReport& report) {
  for (const auto& g : report.groups) {
    report.max_relative_error = std::max(report.max_relative_error, g.relative_error);
  }
}

}  // namespace

GradCheckReport CheckGradients(std::span<Parameter* const> params,
                               const std::function<double()>& loss,
                               const std::function<void()>& analytic, double eps) {
  analytic();
  GradCheckReport report;
  for (Parameter* p : params) {
    const std::vector<double> grad(p->grad.values().begin(), p->grad.values().end());
    report.groups.push_back(CheckValues(p->name, p->value.values(), grad, loss, eps));
  }
  Finish(report);
  return report;
}

GradCheckReport GradCheck(DetectorModel& model, const Tensor& batch,
                          std::span<const int> targets, double eps) {
  auto params = model.Parameters();
  return CheckGradients(
      params, [&] { return model.Loss(batch, targets, false); },
      [&] { model.Loss(batch, targets, true); }, eps);
}

GradCheckReport GradCheckLayer(Layer& layer, const Tensor& input, uint64_t seed, double eps) {
  Tensor x = input;
  Tensor probe = layer.Forward(x);
  Rng rng(seed);
  std::vector<double> weights(probe.size());
  for (double& w : weights) w = rng.Uniform(-1.0, 1.0);
  auto loss = [&] {
    Tensor y = layer.Forward(x);
    double acc = 0.0;
    for (size_t i = 0; i < y.size(); ++i) acc += weights[i] * y[i];
    return acc;
  };

  auto params = layer.Parameters();
  for (Parameter* p : params) p->grad.Fill(0.0);
  layer.Forward(x);
  Tensor grad_out(probe.shape(), weights);
  Tensor grad_in = layer.Backward(grad_out);

  GradCheckReport report;
  for (Parameter* p : params) {
    const std::vector<double> grad(p->grad.values().begin(), p->grad.values().end());
    report.groups.push_back(CheckValues(p->name, p->value.values(), grad, loss, eps));
  }
  const std::vector<double> analytic_in(grad_in.values().begin(), grad_in.values().end());
  report.groups.push_back(CheckValues("input", x.values(), analytic_in, loss, eps));
  Finish(report);
  return report;
}

}  // namespace gendet::nnet
