#ifndef GENDET_IMAGEOPS_PERTURB_H_
#define GENDET_IMAGEOPS_PERTURB_H_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gendet/imageops/image.h"

namespace gendet::imageops {

struct PerturbationSpec {
  enum class Kind { kGaussianBlur, kJpegCompress };

  Kind kind = Kind::kGaussianBlur;
  int kernel = 3;       // blur only: odd size >= 3
  double sigma = 1.0;   // blur only
  int quality = 90;     // JPEG only: [1, 100]

  static PerturbationSpec Blur(int kernel, double sigma = 1.0);
  static PerturbationSpec Jpeg(int quality);

  // Throws gendet::Error when the fields break the invariants.
  void Validate() const;

  // Short stable tag, e.g. "blur9" or "jpeg90"; non-unit sigma is appended.
  std::string Tag() const;

  bool operator==(const PerturbationSpec&) const = default;
};

// The six post-processing settings evaluated in the robustness table:
// blur kernels 3, 9, 15 and JPEG quality 90, 50, 10.
std::span<const PerturbationSpec> StandardPresets();
// Looks a preset up by tag ("blur3", ..., "jpeg10"). Throws on unknown tags.
PerturbationSpec PresetByTag(std::string_view tag);

// Normalised 1-D Gaussian weights of length `kernel`.
std::vector<double> GaussianKernel(int kernel, double sigma);

// Separable Gaussian blur with zero padding, applied per channel.
ImageTensor GaussianBlur(const ImageTensor& image, const PerturbationSpec& spec);

// Annex K base tables in natural (row-major) order.
const std::array<int, 64>& LuminanceBaseTable();
const std::array<int, 64>& ChrominanceBaseTable();

// Quality-scaled quantizer step for one base-table entry.
int ScaledQuantizer(int base, int quality);
std::array<int, 64> ScaledTable(const std::array<int, 64>& base, int quality);

// Baseline JPEG distortion without entropy coding: YCbCr 4:4:4, 8x8 DCT,
// quantise/dequantise, inverse transform, clamp to [0, 1].
ImageTensor JpegRoundTrip(const ImageTensor& rgb, const PerturbationSpec& spec);

ImageTensor ApplyPerturbation(const ImageTensor& image, const PerturbationSpec& spec);

}  // namespace gendet::imageops

#endif  // GENDET_IMAGEOPS_PERTURB_H_
