#include "gendet/datahub/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gendet/common/error.h"
#include "gendet/common/random.h"
#include "gendet/imageops/image_io.h"

namespace gendet::datahub {
namespace {

constexpr double kRealSlope = 1.0;
constexpr double kFakeCSlope = 0.25;

// One octave of value noise: random lattice values every `cell` pixels,
// bilinearly interpolated.
void AddValueNoise(std::vector<double>& field, int size, int cell, double weight,
                   Rng& rng) {
  const int lattice = size / cell + 2;
  std::vector<double> grid(static_cast<size_t>(lattice) * lattice);
  for (double& g : grid) g = rng.Uniform(-1.0, 1.0);
  // Random sub-cell offset so lattice points do not align across octaves.
  const double oy = rng.Uniform();
  const double ox = rng.Uniform();
  for (int y = 0; y < size; ++y) {
    const double gy = y / static_cast<double>(cell) + oy;
    const int y0 = static_cast<int>(gy);
    const double ty = gy - y0;
    for (int x = 0; x < size; ++x) {
      const double gx = x / static_cast<double>(cell) + ox;
      const int x0 = static_cast<int>(gx);
      const double tx = gx - x0;
      auto at = [&](int yy, int xx) { return grid[static_cast<size_t>(yy) * lattice + xx]; };
      const double top = at(y0, x0) + tx * (at(y0, x0 + 1) - at(y0, x0));
      const double bottom = at(y0 + 1, x0) + tx * (at(y0 + 1, x0 + 1) - at(y0 + 1, x0));
      field[static_cast<size_t>(y) * size + x] += weight * (top + ty * (bottom - top));
    }
  }
}

void NormalizeUnit(std::vector<double>& field) {
  const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& v : field) v = range > 0.0 ? (v - min) / range : 0.5;
}

imageops::ImageTensor GenerateImage(const SynthGenSpec& spec, int index) {
  Rng rng(DeriveSeed(spec.seed, static_cast<uint64_t>(index)));
  const bool flat_spectrum = spec.kind == SynthKind::kFakeC;
  const double slope = flat_spectrum ? kFakeCSlope : kRealSlope;
  const uint64_t field_seed = rng.NextU64();
  const uint64_t detail_seed = rng.NextU64();
  const auto primary = BaseField(spec.size, field_seed, slope, flat_spectrum);
  const auto detail = BaseField(spec.size, detail_seed, slope, flat_spectrum);

  double dark[3], light[3], tint[3];
  for (int c = 0; c < 3; ++c) dark[c] = rng.Uniform(0.15, 0.85);
  for (int c = 0; c < 3; ++c) light[c] = rng.Uniform(0.15, 0.85);
  for (int c = 0; c < 3; ++c) tint[c] = rng.Uniform(-0.15, 0.15);

  const bool fake = spec.kind != SynthKind::kReal;
  imageops::ImageTensor image(3, spec.size, spec.size, imageops::ColorSpace::kRgb);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < spec.size; ++y) {
      for (int x = 0; x < spec.size; ++x) {
        const size_t i = static_cast<size_t>(y) * spec.size + x;
        double v = dark[c] + (light[c] - dark[c]) * primary[i] + tint[c] * (detail[i] - 0.5);
        v = std::clamp(v, 0.0, 1.0);
        if (fake) {
          v += spec.artifact_amplitude * CheckerboardAt(y, x, spec.artifact_period);
        }
        image.at(c, y, x) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return image;
}

}  // namespace

std::string_view ToString(SynthKind kind) {
  switch (kind) {
    case SynthKind::kReal: return "real";
    case SynthKind::kFakeA: return "fakeA";
    case SynthKind::kFakeB: return "fakeB";
    case SynthKind::kFakeC: return "fakeC";
  }
  return "?";
}

SynthKind ParseSynthKind(std::string_view text) {
  for (auto k : {SynthKind::kReal, SynthKind::kFakeA, SynthKind::kFakeB, SynthKind::kFakeC}) {
    if (text == ToString(k)) return k;
  }
  Fail(ErrorKind::kInvalidArgument, "unknown synthetic kind '" + std::string(text) +
                                        "' (expected real, fakeA, fakeB or fakeC)");
}

SynthGenSpec SynthGenSpec::Defaults(SynthKind kind, uint64_t seed, int size, int count) {
  SynthGenSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  spec.size = size;
  spec.count = count;
  spec.artifact_period = kind == SynthKind::kFakeB ? 8 : 2;
  return spec;
}

void SynthGenSpec::Validate() const {
  Require(size >= 16, "synthetic image size must be >= 16, got " + std::to_string(size));
  Require(count >= 1, "synthetic image count must be >= 1, got " + std::to_string(count));
  Require(artifact_amplitude > 0.0 && artifact_amplitude <= 0.2,
          "artifact amplitude must lie in (0, 0.2]");
  Require(artifact_period >= 2 && artifact_period % 2 == 0,
          "artifact period must be an even number of pixels >= 2");
}

std::vector<double> BaseField(int size, uint64_t seed, double spectral_slope,
                              bool include_fine_octave) {
  Rng rng(seed);
  std::vector<double> field(static_cast<size_t>(size) * size, 0.0);
  for (int cell = include_fine_octave ? 1 : 2; cell <= 8; cell *= 2) {
    AddValueNoise(field, size, cell, std::pow(cell, spectral_slope), rng);
  }
  NormalizeUnit(field);
  return field;
}

double CheckerboardAt(int y, int x, int period) {
  const int half = period / 2;
  return ((y / half) + (x / half)) % 2 == 0 ? 1.0 : -1.0;
}

SynthDataset SynthGenerate(const SynthGenSpec& spec, std::optional<std::string> id) {
  spec.Validate();
  SynthDataset out;
  out.images.reserve(spec.count);
  // Quantised to 8 bits so in-memory corpora match their PNG files exactly.
  for (int i = 0; i < spec.count; ++i) {
    out.images.push_back(imageops::QuantizeTo8Bit(GenerateImage(spec, i)));
  }

  DatasetManifest& m = out.manifest;
  m.id = id.value_or("synth-" + std::string(ToString(spec.kind)) + "-s" +
                     std::to_string(spec.seed));
  m.label = spec.kind == SynthKind::kReal ? Label::kReal : Label::kFake;
  switch (spec.kind) {
    case SynthKind::kReal: break;
    case SynthKind::kFakeA:
    case SynthKind::kFakeC: m.source_model = "styleganlike-A"; break;
    case SynthKind::kFakeB: m.source_model = "styleganlike-B"; break;
  }
  m.source_data = spec.kind == SynthKind::kFakeC ? "synthreal-2" : "synthreal-1";
  std::vector<Split> splits(spec.count, Split::kTrain);
  if (spec.count >= 10) splits = SplitDataset(spec.count, spec.seed);
  for (int i = 0; i < spec.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06d.png", i);
    m.entries.push_back({name, splits[i]});
  }
  return out;
}

}  // namespace gendet::datahub
