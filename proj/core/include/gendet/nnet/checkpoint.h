#ifndef GENDET_NNET_CHECKPOINT_H_
#define GENDET_NNET_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gendet/nnet/model.h"

namespace gendet::nnet {

// Binary weight container, version 1:
//   "GDCK" | u32 version | u32 header length | JSON header | f64 values...
// The header records arch, pre-processing, input size, seed, widths and the
// name/shape of every parameter array; values follow in header order as
// little-endian IEEE doubles. Identical weights give identical bytes.
std::vector<uint8_t> SerializeCheckpoint(DetectorModel& model);
DetectorModel DeserializeCheckpoint(const std::vector<uint8_t>& bytes);

void SaveCheckpoint(const std::filesystem::path& file, DetectorModel& model);
DetectorModel LoadCheckpoint(const std::filesystem::path& file);

}  // namespace gendet::nnet

#endif  // GENDET_NNET_CHECKPOINT_H_
