#ifndef GENDET_DATAHUB_SYNTH_H_
#define GENDET_DATAHUB_SYNTH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gendet/datahub/manifest.h"
#include "gendet/imageops/image.h"

namespace gendet::datahub {

// Procedural stand-ins for real and generated corpora.
//
//   real   smooth multi-octave value noise through a random per-image palette
//   fakeA  real-style base plus an additive checkerboard (upsampling artefact)
//   fakeB  as fakeA with a different artefact period ("another generator")
//   fakeC  base with a flatter spectral slope plus fakeA's artefact
//          ("same generator, different training data")
enum class SynthKind { kReal, kFakeA, kFakeB, kFakeC };

std::string_view ToString(SynthKind kind);
SynthKind ParseSynthKind(std::string_view text);

struct SynthGenSpec {
  SynthKind kind = SynthKind::kReal;
  int artifact_period = 2;          // pixels, even, fake kinds only
  double artifact_amplitude = 0.1;  // (0, 0.2]
  uint64_t seed = 0;
  int size = 32;
  int count = 1;

  // Kind-specific defaults: period 2 for fakeA/fakeC and 8 for fakeB.
  static SynthGenSpec Defaults(SynthKind kind, uint64_t seed, int size, int count);

  void Validate() const;
};

// Normalised base field in [0, 1] for image `index`. `spectral_slope` weights
// octave s by s^slope.
std::vector<double> BaseField(int size, uint64_t seed, double spectral_slope,
                              bool include_fine_octave);

// Signed unit checkerboard with the given period (value +1 or -1).
double CheckerboardAt(int y, int x, int period);

struct SynthDataset {
  std::vector<imageops::ImageTensor> images;
  DatasetManifest manifest;  // entry i describes images[i]
};

// Deterministic given `spec`: image i depends only on (seed, i). Manifest
// paths are "000000.png", ... and ids default to "synth-<kind>-s<seed>".
SynthDataset SynthGenerate(const SynthGenSpec& spec,
                           std::optional<std::string> id = std::nullopt);

}  // namespace gendet::datahub

#endif  // GENDET_DATAHUB_SYNTH_H_
