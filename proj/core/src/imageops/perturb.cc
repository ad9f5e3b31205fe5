#include "gendet/imageops/perturb.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gendet/common/error.h"

namespace gendet::imageops {
namespace {

constexpr std::array<int, 64> kLuminanceBase = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, 64> kChrominanceBase = {
    17, 18, 24, 47, 99, 99, 99, 99,  //
    18, 21, 26, 66, 99, 99, 99, 99,  //
    24, 26, 56, 99, 99, 99, 99, 99,  //
    47, 66, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99};

const std::array<PerturbationSpec, 6> kPresets = {
    PerturbationSpec::Blur(3),  PerturbationSpec::Blur(9),
    PerturbationSpec::Blur(15), PerturbationSpec::Jpeg(90),
    PerturbationSpec::Jpeg(50), PerturbationSpec::Jpeg(10)};

// Orthonormal DCT-II basis: basis[u][x] = c(u) cos((2x+1) u pi / 16).
struct DctBasis {
  double m[8][8];
  DctBasis() {
    for (int u = 0; u < 8; ++u) {
      const double c = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) {
        m[u][x] = c * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    }
  }
};

const DctBasis& Basis() {
  static const DctBasis basis;
  return basis;
}

void ForwardDct(const double in[64], double out[64]) {
  const auto& b = Basis().m;
  double tmp[64];
  for (int y = 0; y < 8; ++y) {
    for (int u = 0; u < 8; ++u) {
      double acc = 0.0;
      for (int x = 0; x < 8; ++x) acc += b[u][x] * in[y * 8 + x];
      tmp[y * 8 + u] = acc;
    }
  }
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 8; ++u) {
      double acc = 0.0;
      for (int y = 0; y < 8; ++y) acc += b[v][y] * tmp[y * 8 + u];
      out[v * 8 + u] = acc;
    }
  }
}

void InverseDct(const double in[64], double out[64]) {
  const auto& b = Basis().m;
  double tmp[64];
  for (int v = 0; v < 8; ++v) {
    for (int x = 0; x < 8; ++x) {
      double acc = 0.0;
      for (int u = 0; u < 8; ++u) acc += b[u][x] * in[v * 8 + u];
      tmp[v * 8 + x] = acc;
    }
  }
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      double acc = 0.0;
      for (int v = 0; v < 8; ++v) acc += b[v][y] * tmp[v * 8 + x];
      out[y * 8 + x] = acc;
    }
  }
}

// Quantises and reconstructs one level-shifted plane in place. The plane has
// dimensions that are multiples of 8.
void QuantizePlane(std::vector<double>& plane, int height, int width,
                   const std::array<int, 64>& table) {
  double block[64];
  double coeffs[64];
  for (int by = 0; by < height; by += 8) {
    for (int bx = 0; bx < width; bx += 8) {
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
          block[y * 8 + x] = plane[static_cast<size_t>(by + y) * width + bx + x];
        }
      }
      ForwardDct(block, coeffs);
      for (int i = 0; i < 64; ++i) {
        coeffs[i] = std::round(coeffs[i] / table[i]) * table[i];
      }
      InverseDct(coeffs, block);
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
          plane[static_cast<size_t>(by + y) * width + bx + x] = block[y * 8 + x];
        }
      }
    }
  }
}

}  // namespace

PerturbationSpec PerturbationSpec::Blur(int kernel, double sigma) {
  PerturbationSpec spec;
  spec.kind = Kind::kGaussianBlur;
  spec.kernel = kernel;
  spec.sigma = sigma;
  return spec;
}

PerturbationSpec PerturbationSpec::Jpeg(int quality) {
  PerturbationSpec spec;
  spec.kind = Kind::kJpegCompress;
  spec.quality = quality;
  return spec;
}

void PerturbationSpec::Validate() const {
  if (kind == Kind::kGaussianBlur) {
    Require(kernel >= 3 && kernel % 2 == 1,
            "blur kernel must be odd and >= 3, got " + std::to_string(kernel));
    Require(sigma > 0.0 && std::isfinite(sigma), "blur sigma must be positive");
  } else {
    Require(quality >= 1 && quality <= 100,
            "JPEG quality factor must be in [1, 100], got " + std::to_string(quality));
  }
}

std::string PerturbationSpec::Tag() const {
  std::ostringstream os;
  if (kind == Kind::kGaussianBlur) {
    os << "blur" << kernel;
    if (sigma != 1.0) os << "s" << sigma;
  } else {
    os << "jpeg" << quality;
  }
  return os.str();
}

std::span<const PerturbationSpec> StandardPresets() { return kPresets; }

PerturbationSpec PresetByTag(std::string_view tag) {
  for (const auto& preset : kPresets) {
    if (preset.Tag() == tag) return preset;
  }
  Fail(ErrorKind::kInvalidArgument,
       "unknown perturbation preset '" + std::string(tag) +
           "' (presets: blur3 blur9 blur15 jpeg90 jpeg50 jpeg10)");
}

std::vector<double> GaussianKernel(int kernel, double sigma) {
  PerturbationSpec::Blur(kernel, sigma).Validate();
  const int radius = (kernel - 1) / 2;
  std::vector<double> weights(kernel);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    weights[i + radius] = w;
    sum += w;
  }
  for (double& w : weights) w /= sum;
  return weights;
}

ImageTensor GaussianBlur(const ImageTensor& image, const PerturbationSpec& spec) {
  Require(spec.kind == PerturbationSpec::Kind::kGaussianBlur,
          "GaussianBlur called with a non-blur spec");
  const auto weights = GaussianKernel(spec.kernel, spec.sigma);
  const int radius = (spec.kernel - 1) / 2;
  const int h = image.height();
  const int w = image.width();
  ImageTensor out(image.channels(), h, w, image.space());
  std::vector<double> rows(image.plane_size());
  for (int c = 0; c < image.channels(); ++c) {
    const auto src = image.plane(c);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int xx = x + k;
          if (xx < 0 || xx >= w) continue;
          acc += weights[k + radius] * src[static_cast<size_t>(y) * w + xx];
        }
        rows[static_cast<size_t>(y) * w + x] = acc;
      }
    }
    auto dst = out.plane(c);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int yy = y + k;
          if (yy < 0 || yy >= h) continue;
          acc += weights[k + radius] * rows[static_cast<size_t>(yy) * w + x];
        }
        dst[static_cast<size_t>(y) * w + x] = acc;
      }
    }
  }
  return out;
}

const std::array<int, 64>& LuminanceBaseTable() { return kLuminanceBase; }
const std::array<int, 64>& ChrominanceBaseTable() { return kChrominanceBase; }

int ScaledQuantizer(int base, int quality) {
  Require(quality >= 1 && quality <= 100,
          "JPEG quality factor must be in [1, 100], got " + std::to_string(quality));
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  return std::clamp((base * scale + 50) / 100, 1, 255);
}

std::array<int, 64> ScaledTable(const std::array<int, 64>& base, int quality) {
  std::array<int, 64> table{};
  for (int i = 0; i < 64; ++i) table[i] = ScaledQuantizer(base[i], quality);
  return table;
}

ImageTensor JpegRoundTrip(const ImageTensor& rgb, const PerturbationSpec& spec) {
  Require(spec.kind == PerturbationSpec::Kind::kJpegCompress,
          "JpegRoundTrip called with a non-JPEG spec");
  spec.Validate();
  Require(rgb.space() == ColorSpace::kRgb && rgb.channels() == 3,
          "JPEG round-trip expects a 3-channel RGB image");

  const int h = rgb.height();
  const int w = rgb.width();
  const int ph = (h + 7) / 8 * 8;
  const int pw = (w + 7) / 8 * 8;
  const auto luma_table = ScaledTable(kLuminanceBase, spec.quality);
  const auto chroma_table = ScaledTable(kChrominanceBase, spec.quality);

  // Level-shifted YCbCr planes on the 0..255 scale, padded by edge replication.
  std::vector<double> y_plane(static_cast<size_t>(ph) * pw);
  std::vector<double> cb_plane(y_plane.size());
  std::vector<double> cr_plane(y_plane.size());
  for (int y = 0; y < ph; ++y) {
    const int sy = std::min(y, h - 1);
    for (int x = 0; x < pw; ++x) {
      const int sx = std::min(x, w - 1);
      const double r = rgb.at(0, sy, sx) * 255.0;
      const double g = rgb.at(1, sy, sx) * 255.0;
      const double b = rgb.at(2, sy, sx) * 255.0;
      const size_t i = static_cast<size_t>(y) * pw + x;
      y_plane[i] = 0.299 * r + 0.587 * g + 0.114 * b - 128.0;
      cb_plane[i] = -0.168736 * r - 0.331264 * g + 0.5 * b;
      cr_plane[i] = 0.5 * r - 0.418688 * g - 0.081312 * b;
    }
  }
  QuantizePlane(y_plane, ph, pw, luma_table);
  QuantizePlane(cb_plane, ph, pw, chroma_table);
  QuantizePlane(cr_plane, ph, pw, chroma_table);

  ImageTensor out(3, h, w, ColorSpace::kRgb);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * pw + x;
      const double luma = y_plane[i] + 128.0;
      const double cb = cb_plane[i];
      const double cr = cr_plane[i];
      const double r = luma + 1.402 * cr;
      const double g = luma - 0.344136 * cb - 0.714136 * cr;
      const double b = luma + 1.772 * cb;
      out.at(0, y, x) = std::clamp(r / 255.0, 0.0, 1.0);
      out.at(1, y, x) = std::clamp(g / 255.0, 0.0, 1.0);
      out.at(2, y, x) = std::clamp(b / 255.0, 0.0, 1.0);
    }
  }
  return out;
}

ImageTensor ApplyPerturbation(const ImageTensor& image, const PerturbationSpec& spec) {
  spec.Validate();
  if (spec.kind == PerturbationSpec::Kind::kGaussianBlur) {
    return GaussianBlur(image, spec);
  }
  return JpegRoundTrip(image, spec);
}

}  // namespace gendet::imageops
