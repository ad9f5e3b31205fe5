#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "gendet/common/error.h"
#include "gendet/imageops/image_io.h"
#include "gendet/imageops/perturb.h"
#include "test_support.h"

namespace gendet::imageops {
namespace {

TEST(ImageIo, ByteMapping) {
  EXPECT_EQ(ToByte(0.0), 0);
  EXPECT_EQ(ToByte(1.0), 255);
  EXPECT_EQ(ToByte(0.5), 128);
  EXPECT_EQ(ToByte(-0.2), 0);
  EXPECT_EQ(ToByte(1.7), 255);
  EXPECT_EQ(ToByte(100.0 / 255.0), 100);
}

TEST(ImageIo, PngRoundTripIsExactOnQuantizedImages) {
  testing::TempDir dir;
  Rng rng(1);
  ImageTensor img = QuantizeTo8Bit(testing::RandomImage(rng, 3, 13, 21));
  WritePng(dir / "a.png", img);
  ImageTensor back = ReadImage(dir / "a.png");
  EXPECT_EQ(back, img);
  auto bytes = EncodePng(img);
  ASSERT_GE(bytes.size(), 8u);
  EXPECT_EQ(bytes[0], 0x89);
  EXPECT_EQ(bytes[1], 'P');
  EXPECT_EQ(testing::ReadFile(dir / "a.png"),
            std::string(bytes.begin(), bytes.end()));
}

TEST(ImageIo, JpegFileDecodesCloseToSource) {
  testing::TempDir dir;
  ImageTensor img(3, 16, 16, ColorSpace::kRgb);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) img.at(c, y, x) = (x + y + 4 * c) / 40.0;
  WriteJpeg(dir / "a.jpg", img, 95);
  ImageTensor back = ReadImage(dir / "a.jpg");
  ASSERT_EQ(back.height(), 16);
  ASSERT_EQ(back.channels(), 3);
  EXPECT_LT(MeanSquaredError(back, img), 1e-3);
}

TEST(ImageIo, CorruptFileErrorNamesPath) {
  testing::TempDir dir;
  testing::WriteFile(dir / "broken.png", "\x89PNG\r\n\x1a\nnot really");
  try {
    ReadImage(dir / "broken.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDataError);
    EXPECT_NE(std::string(e.what()).find("broken.png"), std::string::npos);
  }
  EXPECT_THROW(ReadImage(dir / "missing.png"), Error);
}

}  // namespace
}  // namespace gendet::imageops
