#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "gendet/common/error.h"
#include "gendet/common/random.h"

namespace gendet {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(Rng, KnownFirstOutputOfMt19937_64) {
  // First output of the reference engine seeded with 5489.
  Rng rng(5489);
  EXPECT_EQ(rng.NextU64(), 14514284786278117030ULL);
}

TEST(Rng, UniformAndBelowStayInRange) {
  Rng rng(7);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    uint64_t k = rng.Below(7);
    ASSERT_LT(k, 7u);
    ++hist[k];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(Rng, NormalMoments) {
  Rng rng(3);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double z = rng.Normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(11);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  rng.Shuffle(std::span<int>(v));
  EXPECT_EQ(std::set<int>(v.begin(), v.end()).size(), 50u);
  bool moved = false;
  for (int i = 0; i < 50; ++i) moved |= v[i] != i;
  EXPECT_TRUE(moved);
}

TEST(DeriveSeed, DistinctChildren) {
  std::set<uint64_t> seen;
  for (uint64_t s = 0; s < 20; ++s) {
    for (uint64_t i = 0; i < 100; ++i) seen.insert(DeriveSeed(s, i));
  }
  EXPECT_EQ(seen.size(), 2000u);
  EXPECT_EQ(DeriveSeed(9, 4), DeriveSeed(9, 4));
}

TEST(Error, CarriesKind) {
  try {
    Require(false, "bad");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
    EXPECT_STREQ(e.what(), "bad");
  }
  EXPECT_NO_THROW(Require(true, "fine"));
}

}  // namespace
}  // namespace gendet
