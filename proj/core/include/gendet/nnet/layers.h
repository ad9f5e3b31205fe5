#ifndef GENDET_NNET_LAYERS_H_
#define GENDET_NNET_LAYERS_H_

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "gendet/common/random.h"
#include "gendet/nnet/tensor.h"

namespace gendet::nnet {

// Weight initialisation: N(0, std^2) with a fixed std, or with
// std = sqrt(2 / fan_in) when `fan_in_scaled` is set. Biases start at zero.
struct InitPolicy {
  bool fan_in_scaled = true;
  double std = 0.05;

  double StdFor(int fan_in) const;
};

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter(std::string n, Shape shape) : name(std::move(n)), value(shape), grad(shape) {}
};

// A differentiable stage. Forward caches whatever Backward needs; Backward
// returns the gradient w.r.t. the input and accumulates parameter gradients.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual Tensor Forward(const Tensor& input) = 0;
  virtual Tensor Backward(const Tensor& grad_output) = 0;
  virtual std::vector<Parameter*> Parameters() { return {}; }
  virtual std::string Name() const = 0;

  virtual void Initialize(Rng& rng, const InitPolicy& policy) {
    (void)rng;
    (void)policy;
  }
};

using LayerPtr = std::unique_ptr<Layer>;

// Dense 2-D convolution, square kernel, zero padding. Lowered to GEMM with
// an im2col buffer.
class Conv2d final : public Layer {
 public:
  Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride,
         int padding);

  Tensor Forward(const Tensor& input) override;
  Tensor Backward(const Tensor& grad_output) override;
  std::vector<Parameter*> Parameters() override { return {&weight_, &bias_}; }
  std::string Name() const override { return name_; }
  void Initialize(Rng& rng, const InitPolicy& policy) override;

  Shape OutputShape(const Shape& in) const;

 private:
  void Im2Col(const double* image, int h, int w, double* col) const;
  void Col2Im(const double* col, int h, int w, double* image) const;
  bool IsPointwise() const { return kernel_ == 1 && stride_ == 1 && padding_ == 0; }

  std::string name_;
  int in_, out_, kernel_, stride_, padding_;
  Parameter weight_;  // [out, in * k * k]
  Parameter bias_;    // [out]
  Tensor input_;
};

// Per-channel 3-D convolution (channel multiplier 1).
class DepthwiseConv2d final : public Layer {
 public:
  DepthwiseConv2d(std::string name, int channels, int kernel, int stride, int padding);

  Tensor Forward(const Tensor& input) override;
  Tensor Backward(const Tensor& grad_output) override;
  std::vector<Parameter*> Parameters() override { return {&weight_, &bias_}; }
  std::string Name() const override { return name_; }
  void Initialize(Rng& rng, const InitPolicy& policy) override;

 private:
  std::string name_;
  int channels_, kernel_, stride_, padding_;
  Parameter weight_;  // [channels, k * k]
  Parameter bias_;
  Tensor input_;
};

class Relu final : public Layer {
 public:
  explicit Relu(std::string name) : name_(std::move(name)) {}
  Tensor Forward(const Tensor& input) override;
  Tensor Backward(const Tensor& grad_output) override;
  std::string Name() const override { return name_; }

 private:
  std::string name_;
  Tensor output_;
};

// [n, c, h, w] -> [n, c, 1, 1]
class GlobalAvgPool final : public Layer {
 public:
  Tensor Forward(const Tensor& input) override;
  Tensor Backward(const Tensor& grad_output) override;
  std::string Name() const override { return "gap"; }

 private:
  Shape input_shape_;
};

// [n, in] -> [n, out]; any h/w of the input is flattened.
class Linear final : public Layer {
 public:
  Linear(std::string name, int in_features, int out_features);
  Tensor Forward(const Tensor& input) override;
  Tensor Backward(const Tensor& grad_output) override;
  std::vector<Parameter*> Parameters() override { return {&weight_, &bias_}; }
  std::string Name() const override { return name_; }
  void Initialize(Rng& rng, const InitPolicy& policy) override;

 private:
  std::string name_;
  int in_, out_;
  Parameter weight_;  // [out, in]
  Parameter bias_;
  Tensor input_;
};

// Nearest-neighbour 2x upsampling.
class Upsample2x final : public Layer {
 public:
  Tensor Forward(const Tensor& input) override;
  Tensor Backward(const Tensor& grad_output) override;
  std::string Name() const override { return "upsample2x"; }

 private:
  Shape input_shape_;
};

class Sequential final : public Layer {
 public:
  explicit Sequential(std::string name) : name_(std::move(name)) {}

  Sequential& Add(LayerPtr layer) {
    layers_.push_back(std::move(layer));
    return *this;
  }

  Tensor Forward(const Tensor& input) override;
  Tensor Backward(const Tensor& grad_output) override;
  std::vector<Parameter*> Parameters() override;
  std::string Name() const override { return name_; }
  void Initialize(Rng& rng, const InitPolicy& policy) override;

 private:
  std::string name_;
  std::vector<LayerPtr> layers_;
};

// Two depthwise-separable stages with ReLU; the second depthwise conv has
// stride 2. A strided 1x1 projection forms the skip path:
//   y = relu(pw2(dw2(relu(pw1(dw1(x)))))) + proj(x)
class SeparableResidualBlock final : public Layer {
 public:
  SeparableResidualBlock(std::string name, int in_channels, int out_channels);

  Tensor Forward(const Tensor& input) override;
  Tensor Backward(const Tensor& grad_output) override;
  std::vector<Parameter*> Parameters() override;
  std::string Name() const override { return name_; }
  void Initialize(Rng& rng, const InitPolicy& policy) override;

 private:
  std::string name_;
  Sequential main_;
  Conv2d skip_;
};

}  // namespace gendet::nnet

#endif  // GENDET_NNET_LAYERS_H_
