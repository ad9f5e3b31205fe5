#include "gendet/imageops/image_io.h"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "gendet/common/error.h"

namespace gendet::imageops {
namespace {

[[noreturn]] void DataError(const std::filesystem::path& path, const std::string& what) {
  Fail(ErrorKind::kDataError, "cannot decode image " + path.string() + ": " + what);
}

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) DataError(path, "cannot open file");
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

ImageTensor FromInterleaved(const uint8_t* pixels, int height, int width) {
  ImageTensor out(3, height, width, ColorSpace::kRgb);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const uint8_t* p = pixels + (static_cast<size_t>(y) * width + x) * 3;
      for (int c = 0; c < 3; ++c) out.at(c, y, x) = p[c] / 255.0;
    }
  }
  return out;
}

std::vector<uint8_t> ToInterleaved(const ImageTensor& rgb) {
  Require(rgb.channels() == 3, "only 3-channel images can be written");
  std::vector<uint8_t> pixels(rgb.plane_size() * 3);
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      uint8_t* p = pixels.data() + (static_cast<size_t>(y) * rgb.width() + x) * 3;
      for (int c = 0; c < 3; ++c) p[c] = ToByte(rgb.at(c, y, x));
    }
  }
  return pixels;
}

ImageTensor DecodePng(const std::vector<uint8_t>& bytes, const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    DataError(path, image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    std::string message = image.message;
    png_image_free(&image);
    DataError(path, message);
  }
  return FromInterleaved(pixels.data(), static_cast<int>(image.height),
                         static_cast<int>(image.width));
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void OnJpegError(j_common_ptr info) {
  auto* err = reinterpret_cast<JpegErrorManager*>(info->err);
  (*info->err->format_message)(info, err->message);
  std::longjmp(err->jump, 1);
}

ImageTensor DecodeJpeg(const std::vector<uint8_t>& bytes, const std::filesystem::path& path) {
  jpeg_decompress_struct info;
  JpegErrorManager err;
  info.err = jpeg_std_error(&err.base);
  err.base.error_exit = OnJpegError;
  std::vector<uint8_t> pixels;
  int width = 0;
  int height = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&info);
    DataError(path, err.message);
  }
  jpeg_create_decompress(&info);
  jpeg_mem_src(&info, bytes.data(), bytes.size());
  jpeg_read_header(&info, TRUE);
  info.out_color_space = JCS_RGB;
  jpeg_start_decompress(&info);
  width = static_cast<int>(info.output_width);
  height = static_cast<int>(info.output_height);
  pixels.resize(static_cast<size_t>(width) * height * 3);
  while (info.output_scanline < info.output_height) {
    JSAMPROW row = pixels.data() + static_cast<size_t>(info.output_scanline) * width * 3;
    jpeg_read_scanlines(&info, &row, 1);
  }
  jpeg_finish_decompress(&info);
  jpeg_destroy_decompress(&info);
  return FromInterleaved(pixels.data(), height, width);
}

}  // namespace

uint8_t ToByte(double v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

ImageTensor ReadImage(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  static constexpr uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (bytes.size() >= 8 && std::equal(bytes.begin(), bytes.begin() + 8, kPngSignature)) {
    return DecodePng(bytes, path);
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return DecodeJpeg(bytes, path);
  }
  DataError(path, "not a PNG or JPEG file");
}

std::vector<uint8_t> EncodePng(const ImageTensor& rgb) {
  const auto pixels = ToInterleaved(rgb);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(rgb.width());
  image.height = static_cast<png_uint_32>(rgb.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    Fail(ErrorKind::kDataError, std::string("PNG encoding failed: ") + image.message);
  }
  std::vector<uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    Fail(ErrorKind::kDataError, std::string("PNG encoding failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void WritePng(const std::filesystem::path& path, const ImageTensor& rgb) {
  const auto bytes = EncodePng(rgb);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kDataError, "cannot write " + path.string());
}

void WriteJpeg(const std::filesystem::path& path, const ImageTensor& rgb, int quality) {
  Require(quality >= 1 && quality <= 100, "JPEG quality factor must be in [1, 100]");
  auto pixels = ToInterleaved(rgb);
  jpeg_compress_struct info;
  JpegErrorManager err;
  info.err = jpeg_std_error(&err.base);
  err.base.error_exit = OnJpegError;
  unsigned char* buffer = nullptr;
  unsigned long buffer_size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&info);
    std::free(buffer);
    Fail(ErrorKind::kDataError, "JPEG encoding failed: " + std::string(err.message));
  }
  jpeg_create_compress(&info);
  jpeg_mem_dest(&info, &buffer, &buffer_size);
  info.image_width = static_cast<JDIMENSION>(rgb.width());
  info.image_height = static_cast<JDIMENSION>(rgb.height());
  info.input_components = 3;
  info.in_color_space = JCS_RGB;
  jpeg_set_defaults(&info);
  jpeg_set_quality(&info, quality, TRUE);
  jpeg_start_compress(&info, TRUE);
  while (info.next_scanline < info.image_height) {
    JSAMPROW row = pixels.data() + static_cast<size_t>(info.next_scanline) * rgb.width() * 3;
    jpeg_write_scanlines(&info, &row, 1);
  }
  jpeg_finish_compress(&info);
  jpeg_destroy_compress(&info);
  std::unique_ptr<unsigned char, decltype(&std::free)> owned(buffer, &std::free);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(owned.get()),
            static_cast<std::streamsize>(buffer_size));
  if (!out) Fail(ErrorKind::kDataError, "cannot write " + path.string());
}

ImageTensor QuantizeTo8Bit(const ImageTensor& rgb) {
  ImageTensor out = rgb;
  for (double& v : out.data()) v = ToByte(v) / 255.0;
  return out;
}

}  // namespace gendet::imageops
