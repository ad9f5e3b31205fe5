#ifndef GENDET_IMAGEOPS_TRANSFORMS_H_
#define GENDET_IMAGEOPS_TRANSFORMS_H_

#include <span>
#include <string_view>
#include <vector>

#include "gendet/imageops/image.h"

namespace gendet::imageops {

enum class Direction { kHorizontal, kVertical };

// Taps of the derivative kernels: [1, -1] for order 1, [1, -3, 3, -1] for
// order 3. Throws for any other order.
std::span<const double> DerivativeTaps(int order);

// Cross-correlates one plane with `taps` along `direction`. Samples past the
// right/bottom edge read as zero, so the output keeps the input size.
std::vector<double> CorrelatePlane(std::span<const double> plane, int height,
                                   int width, std::span<const double> taps,
                                   Direction direction);

// High-pass residuals of an RGB image. Output has six channels ordered
// [H_r, H_g, H_b, V_r, V_g, V_b]; values are not clipped or rescaled.
ImageTensor ResidualFilter(const ImageTensor& rgb, int order);

// Per-channel co-occurrence product (M * M^T) / W of a square image.
ImageTensor CoocTransform(const ImageTensor& rgb);

// Hue is stored as degrees / 360 so every channel lies in [0, 1].
ImageTensor RgbToHsv(const ImageTensor& rgb);
ImageTensor HsvToRgb(const ImageTensor& hsv);

// Bilinear resampling with corner-aligned sample positions.
ImageTensor Resize(const ImageTensor& image, int out_height, int out_width);

enum class PreprocessMethod { kNone, kRes1, kRes3, kCooc, kHsv };

std::string_view ToString(PreprocessMethod method);
PreprocessMethod ParsePreprocessMethod(std::string_view name);
int OutputChannels(PreprocessMethod method);

ImageTensor ApplyPreprocess(const ImageTensor& rgb, PreprocessMethod method);

}  // namespace gendet::imageops

#endif  // GENDET_IMAGEOPS_TRANSFORMS_H_
