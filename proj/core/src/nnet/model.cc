#include "gendet/nnet/model.h"

#include <cmath>

#include "gendet/common/error.h"

namespace gendet::nnet {
namespace {

using imageops::PreprocessMethod;

std::vector<LatentCode> SplitLatent(const Tensor& latent) {
  const Shape& s = latent.shape();
  std::vector<LatentCode> codes(s.n);
  for (int n = 0; n < s.n; ++n) {
    codes[n].channels = s.c;
    codes[n].height = s.h;
    codes[n].width = s.w;
    codes[n].activations.assign(latent.sample(n), latent.sample(n) + s.per_sample());
  }
  return codes;
}

double PartitionActivity(const LatentCode& code, bool fake_half) {
  Require(code.channels > 0 && code.channels % 2 == 0,
          "latent code needs an even, positive channel count");
  const size_t plane = static_cast<size_t>(code.height) * code.width;
  const size_t half = plane * (code.channels / 2);
  Require(code.activations.size() == 2 * half, "latent code size mismatch");
  const size_t begin = fake_half ? half : 0;
  double acc = 0.0;
  for (size_t i = begin; i < begin + half; ++i) acc += std::abs(code.activations[i]);
  return acc / static_cast<double>(half);
}

double Sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::string_view ToString(Arch arch) {
  return arch == Arch::kMiniXception ? "MiniXception" : "ForensicTransfer";
}

Arch ParseArch(std::string_view text) {
  if (text == "MiniXception" || text == "X") return Arch::kMiniXception;
  if (text == "ForensicTransfer" || text == "FT") return Arch::kForensicTransfer;
  Fail(ErrorKind::kInvalidArgument,
       "unknown architecture '" + std::string(text) + "' (expected MiniXception or ForensicTransfer)");
}

double LatentCode::RealActivity() const { return PartitionActivity(*this, false); }
double LatentCode::FakeActivity() const { return PartitionActivity(*this, true); }

datahub::Label FtClassify(const LatentCode& code) {
  return code.RealActivity() > code.FakeActivity() ? datahub::Label::kReal
                                                   : datahub::Label::kFake;
}

double SoftmaxCrossEntropy(std::span<const double> logits, int target,
                           std::span<double> grad) {
  Require(target >= 0 && static_cast<size_t>(target) < logits.size(),
          "cross-entropy target out of range");
  double max = logits[0];
  for (double z : logits) max = std::max(max, z);
  double denom = 0.0;
  for (double z : logits) denom += std::exp(z - max);
  const double log_denom = std::log(denom) + max;
  if (!grad.empty()) {
    Require(grad.size() == logits.size(), "cross-entropy gradient size mismatch");
    for (size_t i = 0; i < logits.size(); ++i) {
      grad[i] = std::exp(logits[i] - log_denom) - (static_cast<int>(i) == target ? 1.0 : 0.0);
    }
  }
  return log_denom - logits[target];
}

FtLossBreakdown ForensicTransferLoss(const Tensor& reconstruction, const Tensor& input,
                                     const Tensor& latent, std::span<const int> targets,
                                     double lambda, Tensor* grad_reconstruction,
                                     Tensor* grad_latent) {
  Require(reconstruction.shape() == input.shape(),
          "reconstruction shape " + reconstruction.shape().ToString() +
              " does not match input " + input.shape().ToString());
  const Shape& ls = latent.shape();
  Require(ls.n == input.shape().n && static_cast<int>(targets.size()) == ls.n,
          "batch size mismatch in ForensicTransfer loss");
  Require(ls.c % 2 == 0, "latent channel count must be even");

  const int batch = ls.n;
  const size_t elems = input.shape().per_sample();
  const size_t half = ls.per_sample() / 2;
  if (grad_reconstruction) *grad_reconstruction = Tensor(reconstruction.shape());
  if (grad_latent) *grad_latent = Tensor(ls);

  FtLossBreakdown out;
  for (int n = 0; n < batch; ++n) {
    const double* r = reconstruction.sample(n);
    const double* x = input.sample(n);
    double l1 = 0.0;
    for (size_t i = 0; i < elems; ++i) l1 += std::abs(r[i] - x[i]);
    out.reconstruction += l1 / elems;
    if (grad_reconstruction) {
      double* g = grad_reconstruction->sample(n);
      const double scale = 1.0 / (static_cast<double>(elems) * batch);
      for (size_t i = 0; i < elems; ++i) g[i] = Sign(r[i] - x[i]) * scale;
    }

    const double* z = latent.sample(n);
    const bool is_real = targets[n] == kRealClass;
    const size_t correct_begin = is_real ? 0 : half;
    const size_t wrong_begin = is_real ? half : 0;
    double a_correct = 0.0;
    double a_wrong = 0.0;
    for (size_t i = 0; i < half; ++i) {
      a_correct += std::abs(z[correct_begin + i]);
      a_wrong += std::abs(z[wrong_begin + i]);
    }
    a_correct /= half;
    a_wrong /= half;
    out.activation += a_wrong + std::abs(a_correct - 1.0);
    if (grad_latent) {
      double* g = grad_latent->sample(n);
      const double scale = lambda / (static_cast<double>(half) * batch);
      const double correct_sign = Sign(a_correct - 1.0);
      for (size_t i = 0; i < half; ++i) {
        g[wrong_begin + i] = Sign(z[wrong_begin + i]) * scale;
        g[correct_begin + i] = correct_sign * Sign(z[correct_begin + i]) * scale;
      }
    }
  }
  out.reconstruction /= batch;
  out.activation /= batch;
  out.total = out.reconstruction + lambda * out.activation;
  return out;
}

DetectorModel::DetectorModel(Arch arch, PreprocessMethod preprocess, int input_size,
                             uint64_t seed, const ModelOptions& options)
    : arch_(arch),
      preprocess_(preprocess),
      in_channels_(imageops::OutputChannels(preprocess)),
      input_size_(input_size),
      seed_(seed),
      options_(options) {}

DetectorModel::DetectorModel(DetectorModel&&) noexcept = default;
DetectorModel& DetectorModel::operator=(DetectorModel&&) noexcept = default;
DetectorModel::~DetectorModel() = default;

DetectorModel DetectorModel::Build(Arch arch, PreprocessMethod preprocess, int input_size,
                                   uint64_t seed, const ModelOptions& options) {
  Require(input_size == 32 || input_size == 64 || input_size == 128,
          "input size must be 32, 64 or 128, got " + std::to_string(input_size));
  DetectorModel model(arch, preprocess, input_size, seed, options);
  const int in = model.in_channels_;
  const ArchWidths& w = options.widths;
  model.body_ = std::make_unique<Sequential>(std::string(ToString(arch)));
  if (arch == Arch::kMiniXception) {
    model.body_->Add(std::make_unique<Conv2d>("stem", in, w.stem, 3, 2, 1))
        .Add(std::make_unique<Relu>("stem.relu"))
        .Add(std::make_unique<SeparableResidualBlock>("block1", w.stem, w.blocks[0]))
        .Add(std::make_unique<SeparableResidualBlock>("block2", w.blocks[0], w.blocks[1]))
        .Add(std::make_unique<SeparableResidualBlock>("block3", w.blocks[1], w.blocks[2]))
        .Add(std::make_unique<GlobalAvgPool>())
        .Add(std::make_unique<Linear>("head", w.blocks[2], 2));
  } else {
    Require(w.encoder[3] % 2 == 0, "latent channel count must be even");
    int prev = in;
    for (int i = 0; i < 4; ++i) {
      const std::string name = "enc" + std::to_string(i + 1);
      model.body_->Add(std::make_unique<Conv2d>(name, prev, w.encoder[i], 3, 2, 1));
      if (i < 3) model.body_->Add(std::make_unique<Relu>(name + ".relu"));
      prev = w.encoder[i];
    }
    model.decoder_ = std::make_unique<Sequential>("decoder");
    const std::array<int, 4> outs = {w.encoder[2], w.encoder[1], w.encoder[0], in};
    for (int i = 0; i < 4; ++i) {
      const std::string name = "dec" + std::to_string(i + 1);
      model.decoder_->Add(std::make_unique<Upsample2x>())
          .Add(std::make_unique<Conv2d>(name, prev, outs[i], 3, 1, 1));
      if (i < 3) model.decoder_->Add(std::make_unique<Relu>(name + ".relu"));
      prev = outs[i];
    }
  }

  Rng rng(seed);
  model.body_->Initialize(rng, options.init);
  if (model.decoder_) model.decoder_->Initialize(rng, options.init);
  return model;
}

std::vector<double> DetectorModel::PrepareInput(const imageops::ImageTensor& rgb) const {
  imageops::ImageTensor image = rgb;
  if (image.height() != input_size_ || image.width() != input_size_) {
    image = imageops::Resize(image, input_size_, input_size_);
  }
  image = imageops::ApplyPreprocess(image, preprocess_);
  std::vector<double> values(image.data().begin(), image.data().end());
  if (preprocess_ == PreprocessMethod::kRes3) {
    for (double& v : values) v /= 4.0;
  }
  return values;
}

double DetectorModel::Loss(const Tensor& batch, std::span<const int> targets, bool backward) {
  Require(static_cast<int>(targets.size()) == batch.shape().n, "target count mismatch");
  if (backward) {
    for (Parameter* p : Parameters()) p->grad.Fill(0.0);
  }
  const int n = batch.shape().n;
  if (arch_ == Arch::kMiniXception) {
    Tensor logits = body_->Forward(batch);
    Tensor grad(logits.shape());
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      std::span<const double> z(logits.sample(i), 2);
      std::span<double> g(grad.sample(i), 2);
      loss += SoftmaxCrossEntropy(z, targets[i], g);
    }
    if (backward) {
      for (double& g : grad.values()) g /= n;
      body_->Backward(grad);
    }
    return loss / n;
  }

  Tensor latent = body_->Forward(batch);
  Tensor reconstruction = decoder_->Forward(latent);
  Tensor grad_recon;
  Tensor grad_latent;
  const FtLossBreakdown loss =
      ForensicTransferLoss(reconstruction, batch, latent, targets, options_.ft_lambda,
                           backward ? &grad_recon : nullptr, backward ? &grad_latent : nullptr);
  if (backward) {
    Tensor through_decoder = decoder_->Backward(grad_recon);
    for (size_t i = 0; i < grad_latent.size(); ++i) grad_latent[i] += through_decoder[i];
    body_->Backward(grad_latent);
  }
  return loss.total;
}

std::vector<LatentCode> DetectorModel::Encode(const Tensor& batch) {
  Require(arch_ == Arch::kForensicTransfer, "only ForensicTransfer has a latent code");
  return SplitLatent(body_->Forward(batch));
}

std::vector<int> DetectorModel::Predict(const Tensor& batch) {
  std::vector<int> out(batch.shape().n);
  if (arch_ == Arch::kMiniXception) {
    Tensor logits = body_->Forward(batch);
    for (int i = 0; i < batch.shape().n; ++i) {
      const double* z = logits.sample(i);
      out[i] = z[kRealClass] > z[kFakeClass] ? kRealClass : kFakeClass;
    }
  } else {
    auto codes = Encode(batch);
    for (size_t i = 0; i < codes.size(); ++i) out[i] = ClassIndex(FtClassify(codes[i]));
  }
  return out;
}

std::vector<Parameter*> DetectorModel::Parameters() {
  auto params = body_->Parameters();
  if (decoder_) {
    auto dec = decoder_->Parameters();
    params.insert(params.end(), dec.begin(), dec.end());
  }
  return params;
}

size_t DetectorModel::ParameterCount() {
  size_t count = 0;
  for (Parameter* p : Parameters()) count += p->value.size();
  return count;
}

std::vector<double> DetectorModel::FlatWeights() {
  std::vector<double> flat;
  flat.reserve(ParameterCount());
  for (Parameter* p : Parameters()) {
    flat.insert(flat.end(), p->value.values().begin(), p->value.values().end());
  }
  return flat;
}

void DetectorModel::SetFlatWeights(std::span<const double> weights) {
  Require(weights.size() == ParameterCount(), "flat weight vector has the wrong length");
  size_t offset = 0;
  for (Parameter* p : Parameters()) {
    std::copy(weights.begin() + offset, weights.begin() + offset + p->value.size(),
              p->value.values().begin());
    offset += p->value.size();
  }
}

}  // namespace gendet::nnet
