#ifndef GENDET_IMAGEOPS_IMAGE_IO_H_
#define GENDET_IMAGEOPS_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gendet/imageops/image.h"

namespace gendet::imageops {

// 8-bit <-> unit interval: v / 255 on read, round(v * 255) on write.
uint8_t ToByte(double v);

// Decodes a PNG or baseline JPEG file (chosen by signature) into an RGB
// tensor. Grayscale is replicated to three channels and alpha is dropped.
// Throws gendet::Error(kDataError) naming the path on failure.
ImageTensor ReadImage(const std::filesystem::path& path);

void WritePng(const std::filesystem::path& path, const ImageTensor& rgb);
std::vector<uint8_t> EncodePng(const ImageTensor& rgb);

void WriteJpeg(const std::filesystem::path& path, const ImageTensor& rgb, int quality);

// Rounds every value to the nearest 8-bit level, as a PNG round trip would.
ImageTensor QuantizeTo8Bit(const ImageTensor& rgb);

}  // namespace gendet::imageops

#endif  // GENDET_IMAGEOPS_IMAGE_IO_H_
