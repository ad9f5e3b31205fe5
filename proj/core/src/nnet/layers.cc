#include "gendet/nnet/layers.h"

#include <algorithm>

#include "gendet/common/error.h"

namespace gendet::nnet {
namespace {

void FillNormal(Tensor& t, Rng& rng, double std) {
  for (double& v : t.values()) v = std * rng.Normal();
}

}  // namespace

double InitPolicy::StdFor(int fan_in) const {
  return fan_in_scaled ? std::sqrt(2.0 / fan_in) : std;
}

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::string name, int in_channels, int out_channels, int kernel,
               int stride, int padding)
    : name_(std::move(name)),
      in_(in_channels),
      out_(out_channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding),
      weight_(name_ + ".weight", {out_channels, in_channels * kernel * kernel}),
      bias_(name_ + ".bias", {out_channels, 1}) {
  Require(in_channels > 0 && out_channels > 0 && kernel > 0 && stride > 0 && padding >= 0,
          "invalid convolution geometry for " + name_);
}

Shape Conv2d::OutputShape(const Shape& in) const {
  return {in.n, out_, (in.h + 2 * padding_ - kernel_) / stride_ + 1,
          (in.w + 2 * padding_ - kernel_) / stride_ + 1};
}

void Conv2d::Initialize(Rng& rng, const InitPolicy& policy) {
  FillNormal(weight_.value, rng, policy.StdFor(in_ * kernel_ * kernel_));
  bias_.value.Fill(0.0);
}

void Conv2d::Im2Col(const double* image, int h, int w, double* col) const {
  const int ho = (h + 2 * padding_ - kernel_) / stride_ + 1;
  const int wo = (w + 2 * padding_ - kernel_) / stride_ + 1;
  size_t row = 0;
  for (int c = 0; c < in_; ++c) {
    const double* plane = image + static_cast<size_t>(c) * h * w;
    for (int ky = 0; ky < kernel_; ++ky) {
      for (int kx = 0; kx < kernel_; ++kx, ++row) {
        double* dst = col + row * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride_ + ky - padding_;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride_ + kx - padding_;
            dst[oy * wo + ox] = (iy >= 0 && iy < h && ix >= 0 && ix < w)
                                    ? plane[static_cast<size_t>(iy) * w + ix]
                                    : 0.0;
          }
        }
      }
    }
  }
}

void Conv2d::Col2Im(const double* col, int h, int w, double* image) const {
  const int ho = (h + 2 * padding_ - kernel_) / stride_ + 1;
  const int wo = (w + 2 * padding_ - kernel_) / stride_ + 1;
  size_t row = 0;
  for (int c = 0; c < in_; ++c) {
    double* plane = image + static_cast<size_t>(c) * h * w;
    for (int ky = 0; ky < kernel_; ++ky) {
      for (int kx = 0; kx < kernel_; ++kx, ++row) {
        const double* src = col + row * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride_ + ky - padding_;
          if (iy < 0 || iy >= h) continue;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride_ + kx - padding_;
            if (ix < 0 || ix >= w) continue;
            plane[static_cast<size_t>(iy) * w + ix] += src[oy * wo + ox];
          }
        }
      }
    }
  }
}

Tensor Conv2d::Forward(const Tensor& input) {
  const Shape& in = input.shape();
  Require(in.c == in_, name_ + ": expected " + std::to_string(in_) + " input channels, got " +
                           in.ToString());
  input_ = input;
  const Shape os = OutputShape(in);
  Tensor output(os);
  const int spatial = os.h * os.w;
  const int depth = in_ * kernel_ * kernel_;
  std::vector<double> col(IsPointwise() ? 0 : static_cast<size_t>(depth) * spatial);
  for (int n = 0; n < in.n; ++n) {
    const double* cols = input.sample(n);
    if (!IsPointwise()) {
      Im2Col(input.sample(n), in.h, in.w, col.data());
      cols = col.data();
    }
    double* dst = output.sample(n);
    Gemm(Transpose::kNo, Transpose::kNo, out_, spatial, depth, 1.0, weight_.value.data(),
         depth, cols, spatial, 0.0, dst, spatial);
    for (int o = 0; o < out_; ++o) {
      const double b = bias_.value[o];
      double* row = dst + static_cast<size_t>(o) * spatial;
      for (int i = 0; i < spatial; ++i) row[i] += b;
    }
  }
  return output;
}

Tensor Conv2d::Backward(const Tensor& grad_output) {
  const Shape& in = input_.shape();
  const Shape os = OutputShape(in);
  Require(grad_output.shape() == os, name_ + ": gradient shape mismatch");
  const int spatial = os.h * os.w;
  const int depth = in_ * kernel_ * kernel_;
  Tensor grad_input(in);
  std::vector<double> col(IsPointwise() ? 0 : static_cast<size_t>(depth) * spatial);
  std::vector<double> grad_col(IsPointwise() ? 0 : static_cast<size_t>(depth) * spatial);
  for (int n = 0; n < in.n; ++n) {
    const double* dout = grad_output.sample(n);
    const double* cols = input_.sample(n);
    if (!IsPointwise()) {
      Im2Col(input_.sample(n), in.h, in.w, col.data());
      cols = col.data();
    }
    Gemm(Transpose::kNo, Transpose::kYes, out_, depth, spatial, 1.0, dout, spatial, cols,
         spatial, 1.0, weight_.grad.data(), depth);
    for (int o = 0; o < out_; ++o) {
      const double* row = dout + static_cast<size_t>(o) * spatial;
      double acc = 0.0;
      for (int i = 0; i < spatial; ++i) acc += row[i];
      bias_.grad[o] += acc;
    }
    if (IsPointwise()) {
      Gemm(Transpose::kYes, Transpose::kNo, depth, spatial, out_, 1.0, weight_.value.data(),
           depth, dout, spatial, 0.0, grad_input.sample(n), spatial);
    } else {
      Gemm(Transpose::kYes, Transpose::kNo, depth, spatial, out_, 1.0, weight_.value.data(),
           depth, dout, spatial, 0.0, grad_col.data(), spatial);
      Col2Im(grad_col.data(), in.h, in.w, grad_input.sample(n));
    }
  }
  return grad_input;
}

// ------------------------------------------------------- DepthwiseConv2d

DepthwiseConv2d::DepthwiseConv2d(std::string name, int channels, int kernel, int stride,
                                 int padding)
    : name_(std::move(name)),
      channels_(channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding),
      weight_(name_ + ".weight", {channels, kernel * kernel}),
      bias_(name_ + ".bias", {channels, 1}) {}

void DepthwiseConv2d::Initialize(Rng& rng, const InitPolicy& policy) {
  FillNormal(weight_.value, rng, policy.StdFor(kernel_ * kernel_));
  bias_.value.Fill(0.0);
}

Tensor DepthwiseConv2d::Forward(const Tensor& input) {
  const Shape& in = input.shape();
  Require(in.c == channels_, name_ + ": channel mismatch, got " + in.ToString());
  input_ = input;
  const int ho = (in.h + 2 * padding_ - kernel_) / stride_ + 1;
  const int wo = (in.w + 2 * padding_ - kernel_) / stride_ + 1;
  Tensor output({in.n, channels_, ho, wo});
  for (int n = 0; n < in.n; ++n) {
    for (int c = 0; c < channels_; ++c) {
      const double* src = input.sample(n) + static_cast<size_t>(c) * in.h * in.w;
      double* dst = output.sample(n) + static_cast<size_t>(c) * ho * wo;
      const double* k = weight_.value.data() + static_cast<size_t>(c) * kernel_ * kernel_;
      for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
          double acc = bias_.value[c];
          for (int ky = 0; ky < kernel_; ++ky) {
            const int iy = oy * stride_ + ky - padding_;
            if (iy < 0 || iy >= in.h) continue;
            for (int kx = 0; kx < kernel_; ++kx) {
              const int ix = ox * stride_ + kx - padding_;
              if (ix < 0 || ix >= in.w) continue;
              acc += k[ky * kernel_ + kx] * src[static_cast<size_t>(iy) * in.w + ix];
            }
          }
          dst[oy * wo + ox] = acc;
        }
      }
    }
  }
  return output;
}

Tensor DepthwiseConv2d::Backward(const Tensor& grad_output) {
  const Shape& in = input_.shape();
  const Shape& os = grad_output.shape();
  Tensor grad_input(in);
  for (int n = 0; n < in.n; ++n) {
    for (int c = 0; c < channels_; ++c) {
      const double* src = input_.sample(n) + static_cast<size_t>(c) * in.h * in.w;
      double* gsrc = grad_input.sample(n) + static_cast<size_t>(c) * in.h * in.w;
      const double* dout = grad_output.sample(n) + static_cast<size_t>(c) * os.h * os.w;
      const double* k = weight_.value.data() + static_cast<size_t>(c) * kernel_ * kernel_;
      double* gk = weight_.grad.data() + static_cast<size_t>(c) * kernel_ * kernel_;
      double gb = 0.0;
      for (int oy = 0; oy < os.h; ++oy) {
        for (int ox = 0; ox < os.w; ++ox) {
          const double g = dout[oy * os.w + ox];
          gb += g;
          for (int ky = 0; ky < kernel_; ++ky) {
            const int iy = oy * stride_ + ky - padding_;
            if (iy < 0 || iy >= in.h) continue;
            for (int kx = 0; kx < kernel_; ++kx) {
              const int ix = ox * stride_ + kx - padding_;
              if (ix < 0 || ix >= in.w) continue;
              const size_t idx = static_cast<size_t>(iy) * in.w + ix;
              gk[ky * kernel_ + kx] += g * src[idx];
              gsrc[idx] += g * k[ky * kernel_ + kx];
            }
          }
        }
      }
      bias_.grad[c] += gb;
    }
  }
  return grad_input;
}

// ------------------------------------------------------------------ Relu

Tensor Relu::Forward(const Tensor& input) {
  output_ = input;
  for (double& v : output_.values()) v = v < 0.0 ? 0.0 : v;
  return output_;
}

Tensor Relu::Backward(const Tensor& grad_output) {
  Tensor grad = grad_output;
  for (size_t i = 0; i < grad.size(); ++i) {
    if (!(output_[i] > 0.0)) grad[i] = 0.0;
  }
  return grad;
}

// --------------------------------------------------------- GlobalAvgPool

Tensor GlobalAvgPool::Forward(const Tensor& input) {
  input_shape_ = input.shape();
  const Shape& s = input_shape_;
  const int spatial = s.h * s.w;
  Tensor output({s.n, s.c, 1, 1});
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* src = input.sample(n) + static_cast<size_t>(c) * spatial;
      double acc = 0.0;
      for (int i = 0; i < spatial; ++i) acc += src[i];
      output[static_cast<size_t>(n) * s.c + c] = acc / spatial;
    }
  }
  return output;
}

Tensor GlobalAvgPool::Backward(const Tensor& grad_output) {
  const Shape& s = input_shape_;
  const int spatial = s.h * s.w;
  Tensor grad(s);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double g = grad_output[static_cast<size_t>(n) * s.c + c] / spatial;
      double* dst = grad.sample(n) + static_cast<size_t>(c) * spatial;
      std::fill(dst, dst + spatial, g);
    }
  }
  return grad;
}

// ---------------------------------------------------------------- Linear

Linear::Linear(std::string name, int in_features, int out_features)
    : name_(std::move(name)),
      in_(in_features),
      out_(out_features),
      weight_(name_ + ".weight", {out_features, in_features}),
      bias_(name_ + ".bias", {out_features, 1}) {}

void Linear::Initialize(Rng& rng, const InitPolicy& policy) {
  FillNormal(weight_.value, rng, policy.StdFor(in_));
  bias_.value.Fill(0.0);
}

Tensor Linear::Forward(const Tensor& input) {
  const int batch = input.shape().n;
  Require(static_cast<int>(input.shape().per_sample()) == in_,
          name_ + ": expected " + std::to_string(in_) + " features, got " +
              input.shape().ToString());
  input_ = input.Reshaped({batch, in_, 1, 1});
  Tensor output({batch, out_, 1, 1});
  Gemm(Transpose::kNo, Transpose::kYes, batch, out_, in_, 1.0, input_.data(), in_,
       weight_.value.data(), in_, 0.0, output.data(), out_);
  for (int n = 0; n < batch; ++n) {
    for (int o = 0; o < out_; ++o) output[static_cast<size_t>(n) * out_ + o] += bias_.value[o];
  }
  return output;
}

Tensor Linear::Backward(const Tensor& grad_output) {
  const int batch = input_.shape().n;
  Gemm(Transpose::kYes, Transpose::kNo, out_, in_, batch, 1.0, grad_output.data(), out_,
       input_.data(), in_, 1.0, weight_.grad.data(), in_);
  for (int n = 0; n < batch; ++n) {
    for (int o = 0; o < out_; ++o) bias_.grad[o] += grad_output[static_cast<size_t>(n) * out_ + o];
  }
  Tensor grad_input({batch, in_, 1, 1});
  Gemm(Transpose::kNo, Transpose::kNo, batch, in_, out_, 1.0, grad_output.data(), out_,
       weight_.value.data(), in_, 0.0, grad_input.data(), in_);
  return grad_input;
}

// ------------------------------------------------------------ Upsample2x

Tensor Upsample2x::Forward(const Tensor& input) {
  input_shape_ = input.shape();
  const Shape& s = input_shape_;
  Tensor output({s.n, s.c, s.h * 2, s.w * 2});
  const int w2 = s.w * 2;
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* src = input.sample(n) + static_cast<size_t>(c) * s.h * s.w;
      double* dst = output.sample(n) + static_cast<size_t>(c) * s.h * s.w * 4;
      for (int y = 0; y < s.h * 2; ++y) {
        for (int x = 0; x < w2; ++x) dst[y * w2 + x] = src[(y / 2) * s.w + x / 2];
      }
    }
  }
  return output;
}

Tensor Upsample2x::Backward(const Tensor& grad_output) {
  const Shape& s = input_shape_;
  Tensor grad(s);
  const int w2 = s.w * 2;
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* src = grad_output.sample(n) + static_cast<size_t>(c) * s.h * s.w * 4;
      double* dst = grad.sample(n) + static_cast<size_t>(c) * s.h * s.w;
      for (int y = 0; y < s.h * 2; ++y) {
        for (int x = 0; x < w2; ++x) dst[(y / 2) * s.w + x / 2] += src[y * w2 + x];
      }
    }
  }
  return grad;
}

// ------------------------------------------------------------ Sequential

Tensor Sequential::Forward(const Tensor& input) {
  Tensor x = input;
  for (auto& layer : layers_) x = layer->Forward(x);
  return x;
}

Tensor Sequential::Backward(const Tensor& grad_output) {
  Tensor g = grad_output;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->Backward(g);
  return g;
}

std::vector<Parameter*> Sequential::Parameters() {
  std::vector<Parameter*> params;
  for (auto& layer : layers_) {
    auto p = layer->Parameters();
    params.insert(params.end(), p.begin(), p.end());
  }
  return params;
}

void Sequential::Initialize(Rng& rng, const InitPolicy& policy) {
  for (auto& layer : layers_) layer->Initialize(rng, policy);
}

// ------------------------------------------------ SeparableResidualBlock

SeparableResidualBlock::SeparableResidualBlock(std::string name, int in_channels,
                                               int out_channels)
    : name_(std::move(name)),
      main_(name_ + ".main"),
      skip_(name_ + ".skip", in_channels, out_channels, 1, 2, 0) {
  main_.Add(std::make_unique<DepthwiseConv2d>(name_ + ".dw1", in_channels, 3, 1, 1))
      .Add(std::make_unique<Conv2d>(name_ + ".pw1", in_channels, out_channels, 1, 1, 0))
      .Add(std::make_unique<Relu>(name_ + ".relu1"))
      .Add(std::make_unique<DepthwiseConv2d>(name_ + ".dw2", out_channels, 3, 2, 1))
      .Add(std::make_unique<Conv2d>(name_ + ".pw2", out_channels, out_channels, 1, 1, 0))
      .Add(std::make_unique<Relu>(name_ + ".relu2"));
}

Tensor SeparableResidualBlock::Forward(const Tensor& input) {
  Tensor main = main_.Forward(input);
  Tensor skip = skip_.Forward(input);
  Require(main.shape() == skip.shape(), name_ + ": branch shapes differ");
  for (size_t i = 0; i < main.size(); ++i) main[i] += skip[i];
  return main;
}

Tensor SeparableResidualBlock::Backward(const Tensor& grad_output) {
  Tensor grad = main_.Backward(grad_output);
  Tensor skip_grad = skip_.Backward(grad_output);
  for (size_t i = 0; i < grad.size(); ++i) grad[i] += skip_grad[i];
  return grad;
}

std::vector<Parameter*> SeparableResidualBlock::Parameters() {
  auto params = main_.Parameters();
  auto skip = skip_.Parameters();
  params.insert(params.end(), skip.begin(), skip.end());
  return params;
}

void SeparableResidualBlock::Initialize(Rng& rng, const InitPolicy& policy) {
  main_.Initialize(rng, policy);
  skip_.Initialize(rng, policy);
}

}  // namespace gendet::nnet
