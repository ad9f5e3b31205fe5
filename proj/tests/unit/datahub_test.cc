#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <set>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gendet/common/error.h"
#include "gendet/datahub/manifest.h"
#include "gendet/datahub/registry.h"
#include "gendet/datahub/synth.h"
#include "gendet/imageops/image_io.h"
#include "gendet/imageops/transforms.h"
#include "test_support.h"

namespace gendet::datahub {
namespace {

using imageops::ImageTensor;

SplitCounts Histogram(const std::vector<Split>& splits) {
  SplitCounts c;
  for (Split s : splits) {
    if (s == Split::kTrain) ++c.train;
    if (s == Split::kVal) ++c.val;
    if (s == Split::kTest) ++c.test;
  }
  return c;
}

TEST(Split, TargetCounts) {
  EXPECT_EQ(TargetSplitCounts(30000), (SplitCounts{21000, 6000, 3000}));
  EXPECT_EQ(TargetSplitCounts(10), (SplitCounts{7, 2, 1}));
  EXPECT_EQ(TargetSplitCounts(100), (SplitCounts{70, 20, 10}));
  // 0.7 * 15 = 10.5 and 0.2 * 15 = 3 round half-up.
  EXPECT_EQ(TargetSplitCounts(15), (SplitCounts{11, 3, 1}));
}

TEST(Split, HistogramMatchesTargetsForEveryN) {
  for (int n = 10; n <= 600; ++n) {
    auto splits = SplitDataset(n, static_cast<uint64_t>(n) * 31);
    ASSERT_EQ(splits.size(), static_cast<size_t>(n));
    SplitCounts c = Histogram(splits);
    ASSERT_EQ(c, TargetSplitCounts(n)) << "n=" << n;
    ASSERT_LE(std::abs(c.train - 0.7 * n), 1.0);
    ASSERT_LE(std::abs(c.val - 0.2 * n), 1.0);
    ASSERT_LE(std::abs(c.test - 0.1 * n), 1.0);
  }
}

TEST(Split, DeterministicInNAndSeed) {
  EXPECT_EQ(SplitDataset(500, 3), SplitDataset(500, 3));
  EXPECT_NE(SplitDataset(500, 3), SplitDataset(500, 4));
}

TEST(Split, RejectsTooFewItems) {
  EXPECT_THROW(SplitDataset(9, 1), Error);
  EXPECT_THROW(SplitDataset(0, 1), Error);
}

DatasetManifest SampleManifest(int n) {
  DatasetManifest m;
  m.id = "fakes";
  m.label = Label::kFake;
  m.source_model = "gen-A";
  m.source_data = "faces";
  m.psi = 0.5;
  auto splits = SplitDataset(n, 9);
  for (int i = 0; i < n; ++i) m.entries.push_back({"img" + std::to_string(i) + ".png", splits[i]});
  return m;
}

TEST(Manifest, JsonRoundTrip) {
  DatasetManifest m = SampleManifest(40);
  m.derived_from = "orig";
  m.perturbation = "jpeg90";
  DatasetManifest back = ManifestFromJson(ToJson(m));
  EXPECT_EQ(back, m);
  EXPECT_EQ(back.Counts(), (SplitCounts{28, 8, 4}));
}

TEST(Manifest, SaveAndLoadResolvesRelativePaths) {
  testing::TempDir dir;
  std::filesystem::create_directories(dir / "sub");
  DatasetManifest m = SampleManifest(20);
  SaveManifest(dir / "sub" / "manifest.json", m);
  DatasetManifest back = LoadManifest(dir / "sub" / "manifest.json");
  EXPECT_EQ(back, m);
  EXPECT_EQ(back.Resolve("img0.png"), dir / "sub" / "img0.png");
}

TEST(Manifest, ValidationErrors) {
  DatasetManifest m = SampleManifest(20);
  m.entries.push_back(m.entries[0]);
  EXPECT_THROW(m.Validate(), Error);

  m = SampleManifest(20);
  m.psi = 1.5;
  EXPECT_THROW(m.Validate(), Error);

  m = SampleManifest(20);
  for (auto& e : m.entries) e.split = Split::kTrain;
  EXPECT_THROW(m.Validate(), Error);

  m = SampleManifest(20);
  m.id.clear();
  EXPECT_THROW(m.Validate(), Error);

  nlohmann::json doc = ToJson(SampleManifest(10));
  doc["label"] = "maybe";
  EXPECT_THROW(ManifestFromJson(doc), Error);
}

TEST(Manifest, NoPathInTwoSplits) {
  DatasetManifest m = SampleManifest(200);
  std::set<std::string> all;
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
    for (const auto& p : m.PathsIn(s)) EXPECT_TRUE(all.insert(p).second) << p;
  }
  EXPECT_EQ(all.size(), 200u);
}

TEST(Registry, DuplicateAndUnknownIds) {
  Registry r;
  r.Add(SampleManifest(10));
  EXPECT_THROW(r.Add(SampleManifest(10)), Error);
  try {
    r.Get("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotFound);
    EXPECT_NE(std::string(e.what()).find("nope"), std::string::npos);
  }
}

TEST(Registry, LoadFromFile) {
  testing::TempDir dir;
  DatasetManifest a = SampleManifest(10);
  DatasetManifest b = SampleManifest(12);
  b.id = "other";
  SaveManifest(dir / "a.json", a);
  SaveManifest(dir / "b.json", b);
  testing::WriteFile(dir / "registry.json", R"({"manifests": ["a.json", "b.json"]})");
  Registry r = Registry::Load(dir / "registry.json");
  EXPECT_EQ(r.Ids(), (std::vector<std::string>{"fakes", "other"}));
  EXPECT_EQ(r.Get("other").base_dir, dir.path());
}

TEST(Describe, RowsAndTable) {
  DatasetManifest real;
  real.id = "real-1";
  real.source_data = "faces";
  auto splits = SplitDataset(100, 2);
  for (int i = 0; i < 100; ++i) real.entries.push_back({std::to_string(i) + ".png", splits[i]});
  auto rows = DescribeRegistry({real});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].counts, (SplitCounts{70, 20, 10}));

  DatasetManifest fake = SampleManifest(10);
  std::string table = FormatRegistryTable(DescribeRegistry({real, fake}));
  EXPECT_NE(table.find("\t0.5\t"), std::string::npos) << table;
  EXPECT_THROW(DescribeRegistry({real, real}), Error);
}

TEST(Ingest, SplitsSortedDirectory) {
  testing::TempDir dir;
  Rng rng(3);
  for (int i = 99; i >= 0; --i) {
    char name[16];
    std::snprintf(name, sizeof(name), "p%03d.png", i);
    imageops::WritePng(dir / name, testing::RandomImage(rng, 3, 4, 4));
  }
  testing::WriteFile(dir / "notes.txt", "ignored");
  DatasetManifest m = IngestDirectory(dir.path(), Label::kReal, {"photos", {}, "cam", {}});
  ASSERT_EQ(m.entries.size(), 100u);
  EXPECT_EQ(m.Counts(), (SplitCounts{70, 20, 10}));
  EXPECT_TRUE(std::is_sorted(m.entries.begin(), m.entries.end(),
                             [](auto& a, auto& b) { return a.path < b.path; }));
  EXPECT_EQ(m.entries.front().path, "p000.png");
  EXPECT_EQ(m.id, "photos");
  EXPECT_EQ(m.source_data, "cam");
}

TEST(Ingest, EmptyDirectory) {
  testing::TempDir dir;
  try {
    IngestDirectory(dir.path(), Label::kReal, {"x", {}, "d", {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no images"), std::string::npos);
  }
}

TEST(Ingest, CorruptFileStrictAndLenient) {
  testing::TempDir dir;
  Rng rng(4);
  for (int i = 0; i < 12; ++i) {
    imageops::WritePng(dir / ("ok" + std::to_string(i) + ".png"), testing::RandomImage(rng, 3, 4, 4));
  }
  testing::WriteFile(dir / "bad.png", "garbage");
  try {
    IngestDirectory(dir.path(), Label::kFake, {"x", "m", "d", {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("bad.png"), std::string::npos);
  }
  IngestOptions lenient;
  lenient.allow_corrupt = true;
  DatasetManifest m = IngestDirectory(dir.path(), Label::kFake, {"x", "m", "d", {}}, lenient);
  EXPECT_EQ(m.entries.size(), 12u);
}

TEST(Synth, Deterministic) {
  auto spec = SynthGenSpec::Defaults(SynthKind::kFakeA, 7, 32, 4);
  auto a = SynthGenerate(spec);
  auto b = SynthGenerate(spec);
  ASSERT_EQ(a.images.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(a.images[i], b.images[i]);
  EXPECT_EQ(a.manifest, b.manifest);
  // Image i depends on (seed, i) only.
  auto longer = SynthGenerate(SynthGenSpec::Defaults(SynthKind::kFakeA, 7, 32, 9));
  for (int i = 0; i < 4; ++i) EXPECT_EQ(longer.images[i], a.images[i]);
}

TEST(Synth, ManifestMetadata) {
  auto real = SynthGenerate(SynthGenSpec::Defaults(SynthKind::kReal, 1, 16, 20)).manifest;
  auto a = SynthGenerate(SynthGenSpec::Defaults(SynthKind::kFakeA, 1, 16, 20)).manifest;
  auto b = SynthGenerate(SynthGenSpec::Defaults(SynthKind::kFakeB, 1, 16, 20)).manifest;
  auto c = SynthGenerate(SynthGenSpec::Defaults(SynthKind::kFakeC, 1, 16, 20)).manifest;
  EXPECT_EQ(real.label, Label::kReal);
  EXPECT_FALSE(real.source_model.has_value());
  EXPECT_EQ(a.label, Label::kFake);
  EXPECT_NE(a.source_model, b.source_model);
  EXPECT_EQ(a.source_data, b.source_data);
  EXPECT_EQ(a.source_model, c.source_model);
  EXPECT_NE(a.source_data, c.source_data);
  EXPECT_EQ(real.source_data, a.source_data);
  EXPECT_NO_THROW(a.Validate());
  EXPECT_EQ(a.id, "synth-fakeA-s1");
  EXPECT_EQ(a.entries[3].path, "000003.png");
}

TEST(Synth, RejectsInvalidSpecs) {
  auto ok = SynthGenSpec::Defaults(SynthKind::kFakeA, 1, 32, 1);
  auto bad = ok;
  bad.size = 8;
  EXPECT_THROW(SynthGenerate(bad), Error);
  bad = ok;
  bad.count = 0;
  EXPECT_THROW(SynthGenerate(bad), Error);
  bad = ok;
  bad.artifact_amplitude = 0.3;
  EXPECT_THROW(SynthGenerate(bad), Error);
  bad = ok;
  bad.artifact_amplitude = 0.0;
  EXPECT_THROW(SynthGenerate(bad), Error);
  EXPECT_THROW(ParseSynthKind("fakeZ"), Error);
}

double Correlation(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= a.size();
  mb /= b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(Synth, BaseFieldsOfDifferentSeedsAreUncorrelated) {
  double worst = 0.0;
  for (uint64_t s = 1; s <= 50; ++s) {
    auto a = BaseField(32, s, 1.0, false);
    auto b = BaseField(32, s + 1000, 1.0, false);
    worst = std::max(worst, std::abs(Correlation(a, b)));
  }
  EXPECT_LT(worst, 0.5);
}

// Power spectrum of the luminance of one image, by separable direct DFT.
std::vector<double> PowerSpectrum(const ImageTensor& img) {
  const int n = img.width();
  using C = std::complex<double>;
  std::vector<C> rows(n * n), out(n * n);
  auto tw = [n](int k, int x) { return std::polar(1.0, -2.0 * std::numbers::pi * k * x / n); };
  for (int y = 0; y < n; ++y)
    for (int k = 0; k < n; ++k) {
      C s = 0;
      for (int x = 0; x < n; ++x) {
        double l = (img.at(0, y, x) + img.at(1, y, x) + img.at(2, y, x)) / 3.0;
        s += l * tw(k, x);
      }
      rows[y * n + k] = s;
    }
  std::vector<double> power(n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      C s = 0;
      for (int y = 0; y < n; ++y) s += rows[y * n + k] * tw(j, y);
      power[j * n + k] = std::norm(s);
    }
  return power;
}

int Freq(int k, int n) { return k <= n / 2 ? k : k - n; }

std::vector<double> MeanSpectrum(SynthKind kind, int count) {
  auto ds = SynthGenerate(SynthGenSpec::Defaults(kind, 21, 32, count));
  std::vector<double> mean(32 * 32, 0.0);
  for (const auto& img : ds.images) {
    auto p = PowerSpectrum(img);
    for (size_t i = 0; i < p.size(); ++i) mean[i] += p[i] / count;
  }
  return mean;
}

double HighFrequencyEnergy(const std::vector<double>& spectrum) {
  double e = 0.0;
  for (int j = 0; j < 32; ++j)
    for (int k = 0; k < 32; ++k) {
      double r = std::hypot(Freq(j, 32), Freq(k, 32));
      if (r > 8.0) e += spectrum[j * 32 + k];
    }
  return e;
}

// Strongest non-low frequency (|u| or |v| >= 3).
std::pair<int, int> PeakFrequency(const std::vector<double>& spectrum) {
  double best = -1;
  std::pair<int, int> at{0, 0};
  for (int j = 0; j < 32; ++j)
    for (int k = 0; k < 32; ++k) {
      int u = std::abs(Freq(j, 32)), v = std::abs(Freq(k, 32));
      if (std::max(u, v) < 3) continue;
      if (spectrum[j * 32 + k] > best) best = spectrum[j * 32 + k], at = {u, v};
    }
  return at;
}

TEST(Synth, FakeAHasMoreHighFrequencyEnergyThanReal) {
  auto real = MeanSpectrum(SynthKind::kReal, 200);
  auto fake = MeanSpectrum(SynthKind::kFakeA, 200);
  EXPECT_GT(HighFrequencyEnergy(fake), HighFrequencyEnergy(real));
}

TEST(Synth, FakeAAndFakeBDifferInArtifactFrequency) {
  auto a = MeanSpectrum(SynthKind::kFakeA, 60);
  auto b = MeanSpectrum(SynthKind::kFakeB, 60);
  auto pa = PeakFrequency(a);
  auto pb = PeakFrequency(b);
  EXPECT_EQ(pa, std::make_pair(16, 16));
  EXPECT_EQ(pb, std::make_pair(4, 4));
  // Same base statistics: spectra agree at low frequencies up to sampling noise.
  double lo_a = 0, lo_b = 0;
  for (int j = 0; j < 32; ++j)
    for (int k = 0; k < 32; ++k)
      if (std::max(std::abs(Freq(j, 32)), std::abs(Freq(k, 32))) <= 2 && (j || k)) {
        lo_a += a[j * 32 + k];
        lo_b += b[j * 32 + k];
      }
  EXPECT_NEAR(lo_a / lo_b, 1.0, 0.1);
}

// Mean of each diagonal band of the channel-averaged co-occurrence matrix.
Eigen::VectorXd CoocBandFeatures(const ImageTensor& img) {
  ImageTensor cooc = imageops::CoocTransform(img);
  const int w = img.width();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(17);
  for (int d = 0; d < 16; ++d) {
    double s = 0;
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i + d < w; ++i) s += cooc.at(c, i, i + d);
    f[d] = s / (3.0 * (w - d));
  }
  f[16] = 1.0;
  return f;
}

TEST(Synth, LinearProbeOnCoocSeparatesRealFromFakeA) {
  auto real = SynthGenerate(SynthGenSpec::Defaults(SynthKind::kReal, 31, 32, 500));
  auto fake = SynthGenerate(SynthGenSpec::Defaults(SynthKind::kFakeA, 32, 32, 500));
  const int train = 400;
  Eigen::MatrixXd x(2 * train, 17);
  Eigen::VectorXd y(2 * train);
  for (int i = 0; i < train; ++i) {
    x.row(i) = CoocBandFeatures(real.images[i]);
    y[i] = -1;
    x.row(train + i) = CoocBandFeatures(fake.images[i]);
    y[train + i] = 1;
  }
  Eigen::VectorXd w = x.colPivHouseholderQr().solve(y);
  int correct = 0;
  for (int i = train; i < 500; ++i) {
    correct += CoocBandFeatures(real.images[i]).dot(w) < 0;
    correct += CoocBandFeatures(fake.images[i]).dot(w) > 0;
  }
  EXPECT_GE(correct / 200.0, 0.9);
}

}  // namespace
}  // namespace gendet::datahub
