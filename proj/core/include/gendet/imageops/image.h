#ifndef GENDET_IMAGEOPS_IMAGE_H_
#define GENDET_IMAGEOPS_IMAGE_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace gendet::imageops {

enum class ColorSpace { kRgb, kHsv, kResidual, kCooc };

std::string_view ToString(ColorSpace space);

// Planar multi-channel raster. Values are stored channel-major, then row-major
// inside each channel plane.
class ImageTensor {
 public:
  static constexpr int kMaxChannels = 6;

  ImageTensor() = default;
  // Zero-filled tensor.
  ImageTensor(int channels, int height, int width, ColorSpace space);
  ImageTensor(int channels, int height, int width, ColorSpace space,
              std::vector<double> data);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  ColorSpace space() const { return space_; }
  size_t plane_size() const { return static_cast<size_t>(height_) * width_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int c, int y, int x) {
    return data_[(static_cast<size_t>(c) * height_ + y) * width_ + x];
  }
  double at(int c, int y, int x) const {
    return data_[(static_cast<size_t>(c) * height_ + y) * width_ + x];
  }

  std::span<double> plane(int c) {
    return {data_.data() + c * plane_size(), plane_size()};
  }
  std::span<const double> plane(int c) const {
    return {data_.data() + c * plane_size(), plane_size()};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  void set_space(ColorSpace space) { space_ = space; }

  // Checks the value-range invariant of the current color space. Throws
  // gendet::Error on violation.
  void ValidateRange() const;

  bool operator==(const ImageTensor& other) const = default;

 private:
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  ColorSpace space_ = ColorSpace::kRgb;
  std::vector<double> data_;
};

// Mean squared error over all values. Shapes must match.
double MeanSquaredError(const ImageTensor& a, const ImageTensor& b);

}  // namespace gendet::imageops

#endif  // GENDET_IMAGEOPS_IMAGE_H_
