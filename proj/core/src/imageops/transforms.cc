#include "gendet/imageops/transforms.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "gendet/common/error.h"

namespace gendet::imageops {
namespace {

constexpr std::array<double, 2> kFirstOrderTaps = {1.0, -1.0};
constexpr std::array<double, 4> kThirdOrderTaps = {1.0, -3.0, 3.0, -1.0};

void RequireRgb(const ImageTensor& image, std::string_view op) {
  Require(image.space() == ColorSpace::kRgb && image.channels() == 3,
          std::string(op) + " expects a 3-channel RGB image");
}

}  // namespace

std::span<const double> DerivativeTaps(int order) {
  switch (order) {
    case 1: return kFirstOrderTaps;
    case 3: return kThirdOrderTaps;
    default:
      Fail(ErrorKind::kInvalidArgument,
           "residual order must be 1 or 3, got " + std::to_string(order));
  }
}

std::vector<double> CorrelatePlane(std::span<const double> plane, int height,
                                   int width, std::span<const double> taps,
                                   Direction direction) {
  Require(plane.size() == static_cast<size_t>(height) * width,
          "plane size does not match dimensions");
  std::vector<double> out(plane.size(), 0.0);
  const int n_taps = static_cast<int>(taps.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      if (direction == Direction::kHorizontal) {
        const int last = std::min(n_taps, width - x);
        const double* row = plane.data() + static_cast<size_t>(y) * width + x;
        for (int k = 0; k < last; ++k) acc += taps[k] * row[k];
      } else {
        const int last = std::min(n_taps, height - y);
        for (int k = 0; k < last; ++k) {
          acc += taps[k] * plane[static_cast<size_t>(y + k) * width + x];
        }
      }
      out[static_cast<size_t>(y) * width + x] = acc;
    }
  }
  return out;
}

ImageTensor ResidualFilter(const ImageTensor& rgb, int order) {
  RequireRgb(rgb, "residual filter");
  const auto taps = DerivativeTaps(order);
  const int h = rgb.height();
  const int w = rgb.width();
  ImageTensor out(6, h, w, ColorSpace::kResidual);
  for (int c = 0; c < 3; ++c) {
    auto horizontal = CorrelatePlane(rgb.plane(c), h, w, taps, Direction::kHorizontal);
    auto vertical = CorrelatePlane(rgb.plane(c), h, w, taps, Direction::kVertical);
    std::copy(horizontal.begin(), horizontal.end(), out.plane(c).begin());
    std::copy(vertical.begin(), vertical.end(), out.plane(c + 3).begin());
  }
  return out;
}

ImageTensor CoocTransform(const ImageTensor& rgb) {
  RequireRgb(rgb, "co-occurrence transform");
  Require(rgb.height() == rgb.width(),
          "co-occurrence transform needs a square image, got " +
              std::to_string(rgb.height()) + "x" + std::to_string(rgb.width()));
  const int n = rgb.width();
  const double scale = 1.0 / n;
  ImageTensor out(3, n, n, ColorSpace::kCooc);
  for (int c = 0; c < 3; ++c) {
    const auto m = rgb.plane(c);
    auto dst = out.plane(c);
    for (int i = 0; i < n; ++i) {
      const double* row_i = m.data() + static_cast<size_t>(i) * n;
      for (int j = i; j < n; ++j) {
        const double* row_j = m.data() + static_cast<size_t>(j) * n;
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += row_i[k] * row_j[k];
        acc *= scale;
        dst[static_cast<size_t>(i) * n + j] = acc;
        dst[static_cast<size_t>(j) * n + i] = acc;
      }
    }
  }
  return out;
}

ImageTensor RgbToHsv(const ImageTensor& rgb) {
  RequireRgb(rgb, "HSV conversion");
  ImageTensor out(3, rgb.height(), rgb.width(), ColorSpace::kHsv);
  const auto r = rgb.plane(0), g = rgb.plane(1), b = rgb.plane(2);
  auto hue = out.plane(0), sat = out.plane(1), val = out.plane(2);
  for (size_t i = 0; i < rgb.plane_size(); ++i) {
    const double max = std::max({r[i], g[i], b[i]});
    const double min = std::min({r[i], g[i], b[i]});
    const double delta = max - min;
    double h = 0.0;
    if (delta > 0.0) {
      if (max == r[i]) {
        h = (g[i] - b[i]) / delta;
        if (h < 0.0) h += 6.0;
      } else if (max == g[i]) {
        h = (b[i] - r[i]) / delta + 2.0;
      } else {
        h = (r[i] - g[i]) / delta + 4.0;
      }
      h /= 6.0;
    }
    hue[i] = h;
    sat[i] = max > 0.0 ? delta / max : 0.0;
    val[i] = max;
  }
  return out;
}

ImageTensor HsvToRgb(const ImageTensor& hsv) {
  Require(hsv.space() == ColorSpace::kHsv && hsv.channels() == 3,
          "inverse HSV conversion expects a 3-channel HSV image");
  ImageTensor out(3, hsv.height(), hsv.width(), ColorSpace::kRgb);
  const auto hue = hsv.plane(0), sat = hsv.plane(1), val = hsv.plane(2);
  auto r = out.plane(0), g = out.plane(1), b = out.plane(2);
  for (size_t i = 0; i < hsv.plane_size(); ++i) {
    const double h6 = hue[i] * 6.0;
    const double sector = std::floor(h6);
    const double f = h6 - sector;
    const double v = val[i];
    const double p = v * (1.0 - sat[i]);
    const double q = v * (1.0 - sat[i] * f);
    const double t = v * (1.0 - sat[i] * (1.0 - f));
    switch (static_cast<int>(sector) % 6) {
      case 0: r[i] = v; g[i] = t; b[i] = p; break;
      case 1: r[i] = q; g[i] = v; b[i] = p; break;
      case 2: r[i] = p; g[i] = v; b[i] = t; break;
      case 3: r[i] = p; g[i] = q; b[i] = v; break;
      case 4: r[i] = t; g[i] = p; b[i] = v; break;
      default: r[i] = v; g[i] = p; b[i] = q; break;
    }
  }
  return out;
}

ImageTensor Resize(const ImageTensor& image, int out_height, int out_width) {
  Require(out_height >= 1 && out_width >= 1,
          "resize target dimensions must be positive");
  if (out_height == image.height() && out_width == image.width()) return image;

  // Source coordinate and interpolation weight for each output position.
  struct Tap {
    int lo;
    int hi;
    double t;
  };
  auto taps_for = [](int in, int out) {
    std::vector<Tap> taps(out);
    const double step = out > 1 ? static_cast<double>(in - 1) / (out - 1) : 0.0;
    for (int i = 0; i < out; ++i) {
      const double pos = i * step;
      int lo = static_cast<int>(std::floor(pos));
      lo = std::clamp(lo, 0, in - 1);
      const int hi = std::min(lo + 1, in - 1);
      taps[i] = {lo, hi, pos - lo};
    }
    return taps;
  };
  const auto ytaps = taps_for(image.height(), out_height);
  const auto xtaps = taps_for(image.width(), out_width);

  ImageTensor out(image.channels(), out_height, out_width, image.space());
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < out_height; ++y) {
      const Tap& ty = ytaps[y];
      for (int x = 0; x < out_width; ++x) {
        const Tap& tx = xtaps[x];
        const double top = image.at(c, ty.lo, tx.lo) +
                           tx.t * (image.at(c, ty.lo, tx.hi) - image.at(c, ty.lo, tx.lo));
        const double bottom = image.at(c, ty.hi, tx.lo) +
                              tx.t * (image.at(c, ty.hi, tx.hi) - image.at(c, ty.hi, tx.lo));
        out.at(c, y, x) = top + ty.t * (bottom - top);
      }
    }
  }
  return out;
}

std::string_view ToString(PreprocessMethod method) {
  switch (method) {
    case PreprocessMethod::kNone: return "None";
    case PreprocessMethod::kRes1: return "Res1";
    case PreprocessMethod::kRes3: return "Res3";
    case PreprocessMethod::kCooc: return "Cooc";
    case PreprocessMethod::kHsv: return "HSV";
  }
  return "?";
}

PreprocessMethod ParsePreprocessMethod(std::string_view name) {
  for (auto m : {PreprocessMethod::kNone, PreprocessMethod::kRes1,
                 PreprocessMethod::kRes3, PreprocessMethod::kCooc,
                 PreprocessMethod::kHsv}) {
    if (name == ToString(m)) return m;
  }
  Fail(ErrorKind::kInvalidArgument,
       "unknown pre-processing method '" + std::string(name) +
           "' (expected None, Res1, Res3, Cooc or HSV)");
}

int OutputChannels(PreprocessMethod method) {
  return method == PreprocessMethod::kRes1 || method == PreprocessMethod::kRes3 ? 6 : 3;
}

ImageTensor ApplyPreprocess(const ImageTensor& rgb, PreprocessMethod method) {
  RequireRgb(rgb, "pre-processing");
  switch (method) {
    case PreprocessMethod::kNone: return rgb;
    case PreprocessMethod::kRes1: return ResidualFilter(rgb, 1);
    case PreprocessMethod::kRes3: return ResidualFilter(rgb, 3);
    case PreprocessMethod::kCooc: return CoocTransform(rgb);
    case PreprocessMethod::kHsv: return RgbToHsv(rgb);
  }
  Fail(ErrorKind::kInvalidArgument, "invalid pre-processing method");
}

}  // namespace gendet::imageops
