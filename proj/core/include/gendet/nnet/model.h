#ifndef GENDET_NNET_MODEL_H_
#define GENDET_NNET_MODEL_H_

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "gendet/datahub/manifest.h"
#include "gendet/imageops/image.h"
#include "gendet/imageops/transforms.h"
#include "gendet/nnet/layers.h"
#include "gendet/nnet/tensor.h"

namespace gendet::nnet {

enum class Arch { kMiniXception, kForensicTransfer };

std::string_view ToString(Arch arch);
// Accepts "MiniXception"/"X" and "ForensicTransfer"/"FT".
Arch ParseArch(std::string_view text);

// Class indices used by every network head.
inline constexpr int kRealClass = 0;
inline constexpr int kFakeClass = 1;

inline int ClassIndex(datahub::Label label) {
  return label == datahub::Label::kReal ? kRealClass : kFakeClass;
}
inline datahub::Label ClassLabel(int index) {
  return index == kRealClass ? datahub::Label::kReal : datahub::Label::kFake;
}

struct ArchWidths {
  int stem = 16;
  std::array<int, 3> blocks = {32, 64, 64};
  // Encoder stages; the last entry is the latent channel count (even).
  std::array<int, 4> encoder = {16, 32, 64, 16};
};

struct ModelOptions {
  InitPolicy init;
  double ft_lambda = 1.0;
  ArchWidths widths;
};

// Latent activations of one sample. The first half of the channels is the
// real partition, the second half the fake partition.
struct LatentCode {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> activations;

  // Mean absolute activation over one partition.
  double RealActivity() const;
  double FakeActivity() const;
};

// Real iff the real partition is strictly more active; ties are fake.
datahub::Label FtClassify(const LatentCode& code);

// Softmax cross-entropy of one sample. If `grad` is non-empty it receives
// d(loss)/d(logits).
double SoftmaxCrossEntropy(std::span<const double> logits, int target,
                           std::span<double> grad = {});

struct FtLossBreakdown {
  double reconstruction = 0.0;  // batch mean of per-sample mean |recon - input|
  double activation = 0.0;      // batch mean of a_wrong + |a_correct - 1|
  double total = 0.0;           // reconstruction + lambda * activation
};

// ForensicTransfer objective for a batch. Gradients (already divided by the
// batch size) are written when the output pointers are non-null.
FtLossBreakdown ForensicTransferLoss(const Tensor& reconstruction, const Tensor& input,
                                     const Tensor& latent, std::span<const int> targets,
                                     double lambda, Tensor* grad_reconstruction,
                                     Tensor* grad_latent);

// A detector network bound to its pre-processing and input size.
class DetectorModel {
 public:
  static DetectorModel Build(Arch arch, imageops::PreprocessMethod preprocess,
                             int input_size, uint64_t seed,
                             const ModelOptions& options = {});

  DetectorModel(DetectorModel&&) noexcept;
  DetectorModel& operator=(DetectorModel&&) noexcept;
  ~DetectorModel();

  Arch arch() const { return arch_; }
  imageops::PreprocessMethod preprocess() const { return preprocess_; }
  int in_channels() const { return in_channels_; }
  int input_size() const { return input_size_; }
  uint64_t seed() const { return seed_; }
  const ModelOptions& options() const { return options_; }

  // Resize to the input size, pre-process, and scale residuals into [-1, 1].
  std::vector<double> PrepareInput(const imageops::ImageTensor& rgb) const;
  Shape SampleShape() const { return {1, in_channels_, input_size_, input_size_}; }

  // Mean loss over the batch. With `backward`, parameter gradients are
  // zeroed and then filled for this batch.
  double Loss(const Tensor& batch, std::span<const int> targets, bool backward);

  std::vector<int> Predict(const Tensor& batch);
  // ForensicTransfer only.
  std::vector<LatentCode> Encode(const Tensor& batch);

  std::vector<Parameter*> Parameters();
  size_t ParameterCount();
  std::vector<double> FlatWeights();
  void SetFlatWeights(std::span<const double> weights);

 private:
  DetectorModel(Arch arch, imageops::PreprocessMethod preprocess, int input_size,
                uint64_t seed, const ModelOptions& options);

  Arch arch_;
  imageops::PreprocessMethod preprocess_;
  int in_channels_;
  int input_size_;
  uint64_t seed_;
  ModelOptions options_;
  std::unique_ptr<Sequential> body_;     // MiniXception: whole net; FT: encoder
  std::unique_ptr<Sequential> decoder_;  // FT only
};

}  // namespace gendet::nnet

#endif  // GENDET_NNET_MODEL_H_
