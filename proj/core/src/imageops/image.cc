#include "gendet/imageops/image.h"

#include <limits>
#include <string>

#include "gendet/common/error.h"

namespace gendet::imageops {

std::string_view ToString(ColorSpace space) {
  switch (space) {
    case ColorSpace::kRgb: return "RGB";
    case ColorSpace::kHsv: return "HSV";
    case ColorSpace::kResidual: return "RESIDUAL";
    case ColorSpace::kCooc: return "COOC";
  }
  return "?";
}

ImageTensor::ImageTensor(int channels, int height, int width, ColorSpace space)
    : ImageTensor(channels, height, width, space,
                  std::vector<double>(static_cast<size_t>(channels) *
                                      (height > 0 ? height : 0) *
                                      (width > 0 ? width : 0))) {}

ImageTensor::ImageTensor(int channels, int height, int width, ColorSpace space,
                         std::vector<double> data)
    : channels_(channels),
      height_(height),
      width_(width),
      space_(space),
      data_(std::move(data)) {
  Require(channels >= 1 && channels <= kMaxChannels,
          "image channel count must be in [1, 6], got " + std::to_string(channels));
  Require(height >= 1 && width >= 1, "image dimensions must be positive");
  Require(data_.size() == static_cast<size_t>(channels) * height * width,
          "image data length does not match channels x height x width");
}

void ImageTensor::ValidateRange() const {
  double lo = 0.0;
  double hi = 1.0;
  switch (space_) {
    case ColorSpace::kRgb:
    case ColorSpace::kHsv:
      break;
    case ColorSpace::kResidual:
      lo = -4.0;
      hi = 4.0;
      break;
    case ColorSpace::kCooc:
      hi = std::numeric_limits<double>::infinity();
      break;
  }
  for (double v : data_) {
    if (!(v >= lo && v <= hi)) {
      Fail(ErrorKind::kInvalidArgument,
           std::string(ToString(space_)) + " value out of range: " +
               std::to_string(v));
    }
  }
}

double MeanSquaredError(const ImageTensor& a, const ImageTensor& b) {
  Require(a.channels() == b.channels() && a.height() == b.height() &&
              a.width() == b.width(),
          "MSE operands must have identical shapes");
  double sum = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    sum += d * d;
  }
  return sum / static_cast<double>(da.size());
}

}  // namespace gendet::imageops
