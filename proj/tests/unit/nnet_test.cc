#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "gendet/common/error.h"
#include "gendet/datahub/synth.h"
#include "gendet/nnet/checkpoint.h"
#include "gendet/nnet/layers.h"
#include "gendet/nnet/model.h"
#include "gendet/nnet/train.h"
#include "test_support.h"

namespace gendet::nnet {
namespace {

using imageops::PreprocessMethod;
using testing::ForAll;
using testing::RandomInt;
using testing::RandomVector;

Tensor RandomTensor(Rng& rng, Shape shape) {
  return Tensor(shape, RandomVector(rng, shape.size()));
}

TEST(Gemm, MatchesNaiveProductForAllTransposes) {
  ForAll(40, 201, [](Rng& rng) {
    int m = RandomInt(rng, 1, 17), n = RandomInt(rng, 1, 17), k = RandomInt(rng, 1, 17);
    bool ta = rng.Bernoulli(), tb = rng.Bernoulli();
    double alpha = rng.Uniform(-2, 2), beta = rng.Bernoulli() ? 0.0 : rng.Uniform(-1, 1);
    auto a = RandomVector(rng, m * k), b = RandomVector(rng, k * n), c = RandomVector(rng, m * n);
    auto expect = c;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int p = 0; p < k; ++p) {
          double av = ta ? a[p * m + i] : a[i * k + p];
          double bv = tb ? b[j * k + p] : b[p * n + j];
          s += av * bv;
        }
        expect[i * n + j] = alpha * s + beta * c[i * n + j];
      }
    Gemm(ta ? Transpose::kYes : Transpose::kNo, tb ? Transpose::kYes : Transpose::kNo, m, n, k,
         alpha, a.data(), ta ? m : k, b.data(), tb ? k : n, beta, c.data(), n);
    for (int i = 0; i < m * n; ++i) ASSERT_NEAR(c[i], expect[i], 1e-12);
  });
}

TEST(Conv2d, MatchesNaiveConvolution) {
  ForAll(20, 202, [](Rng& rng) {
    int cin = RandomInt(rng, 1, 4), cout = RandomInt(rng, 1, 4);
    int k = std::array{1, 3, 5}[rng.Below(3)];
    int stride = RandomInt(rng, 1, 2), pad = RandomInt(rng, 0, k / 2);
    int h = RandomInt(rng, k, 11), w = RandomInt(rng, k, 11);
    Conv2d conv("c", cin, cout, k, stride, pad);
    conv.Initialize(rng, {});
    auto params = conv.Parameters();
    for (double& b : params[1]->value.values()) b = rng.Uniform(-1, 1);
    Tensor x = RandomTensor(rng, {2, cin, h, w});
    Tensor y = conv.Forward(x);
    Shape os = conv.OutputShape(x.shape());
    ASSERT_EQ(y.shape(), os);
    const Tensor& wt = params[0]->value;
    for (int n = 0; n < 2; ++n)
      for (int co = 0; co < cout; ++co)
        for (int oy = 0; oy < os.h; ++oy)
          for (int ox = 0; ox < os.w; ++ox) {
            double s = params[1]->value[co];
            for (int ci = 0; ci < cin; ++ci)
              for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                  int iy = oy * stride + ky - pad, ix = ox * stride + kx - pad;
                  if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                  s += wt[co * cin * k * k + (ci * k + ky) * k + kx] *
                       x[((n * cin + ci) * h + iy) * w + ix];
                }
            ASSERT_NEAR(y[((n * cout + co) * os.h + oy) * os.w + ox], s, 1e-12);
          }
  });
}

TEST(DepthwiseConv2d, MatchesNaiveConvolution) {
  Rng rng(203);
  DepthwiseConv2d dw("d", 3, 3, 2, 1);
  dw.Initialize(rng, {});
  Tensor x = RandomTensor(rng, {2, 3, 7, 6});
  Tensor y = dw.Forward(x);
  ASSERT_EQ(y.shape(), (Shape{2, 3, 4, 3}));
  const Tensor& wt = dw.Parameters()[0]->value;
  for (int n = 0; n < 2; ++n)
    for (int c = 0; c < 3; ++c)
      for (int oy = 0; oy < 4; ++oy)
        for (int ox = 0; ox < 3; ++ox) {
          double s = 0;
          for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx) {
              int iy = oy * 2 + ky - 1, ix = ox * 2 + kx - 1;
              if (iy < 0 || iy >= 7 || ix < 0 || ix >= 6) continue;
              s += wt[c * 9 + ky * 3 + kx] * x[((n * 3 + c) * 7 + iy) * 6 + ix];
            }
          ASSERT_NEAR(y[((n * 3 + c) * 4 + oy) * 3 + ox], s, 1e-12);
        }
}

TEST(Layers, SimpleForwardShapes) {
  Rng rng(204);
  Tensor x = RandomTensor(rng, {2, 3, 4, 4});
  GlobalAvgPool gap;
  Tensor g = gap.Forward(x);
  ASSERT_EQ(g.shape(), (Shape{2, 3, 1, 1}));
  double mean = 0;
  for (int i = 0; i < 16; ++i) mean += x[i];
  EXPECT_NEAR(g[0], mean / 16, 1e-15);
  Upsample2x up;
  Tensor u = up.Forward(x);
  ASSERT_EQ(u.shape(), (Shape{2, 3, 8, 8}));
  EXPECT_EQ(u[9], x[0]);
  Relu relu("r");
  Tensor r = relu.Forward(x);
  for (size_t i = 0; i < x.size(); ++i) EXPECT_EQ(r[i], std::max(0.0, x[i]));
}

TEST(InitPolicy, StdChoice) {
  InitPolicy he;
  EXPECT_DOUBLE_EQ(he.StdFor(50), std::sqrt(2.0 / 50));
  InitPolicy fixed{false, 0.05};
  EXPECT_EQ(fixed.StdFor(50), 0.05);
}

TEST(Build, ChannelsFollowPreprocessing) {
  for (auto m : {PreprocessMethod::kNone, PreprocessMethod::kRes1, PreprocessMethod::kRes3,
                 PreprocessMethod::kCooc, PreprocessMethod::kHsv}) {
    auto model = DetectorModel::Build(Arch::kMiniXception, m, 32, 1);
    EXPECT_EQ(model.in_channels(), imageops::OutputChannels(m));
  }
  EXPECT_EQ(DetectorModel::Build(Arch::kMiniXception, PreprocessMethod::kRes1, 64, 3)
                .in_channels(),
            6);
  EXPECT_THROW(DetectorModel::Build(Arch::kMiniXception, PreprocessMethod::kNone, 48, 1), Error);
  EXPECT_EQ(ParseArch("X"), Arch::kMiniXception);
  EXPECT_EQ(ParseArch("FT"), Arch::kForensicTransfer);
  EXPECT_THROW(ParseArch("ResNet"), Error);
}

TEST(Build, DeterministicInitialWeights) {
  for (Arch arch : {Arch::kMiniXception, Arch::kForensicTransfer}) {
    auto a = DetectorModel::Build(arch, PreprocessMethod::kNone, 32, 9);
    auto b = DetectorModel::Build(arch, PreprocessMethod::kNone, 32, 9);
    auto c = DetectorModel::Build(arch, PreprocessMethod::kNone, 32, 10);
    EXPECT_EQ(a.FlatWeights(), b.FlatWeights());
    EXPECT_NE(a.FlatWeights(), c.FlatWeights());
    EXPECT_EQ(a.ParameterCount(), c.ParameterCount());
    auto d = DetectorModel::Build(arch, PreprocessMethod::kNone, 64, 9);
    EXPECT_EQ(a.ParameterCount(), d.ParameterCount());
  }
}

TEST(Build, ForensicTransferLatentHasEqualPartitions) {
  auto model = DetectorModel::Build(Arch::kForensicTransfer, PreprocessMethod::kNone, 64, 2);
  Rng rng(205);
  Tensor x = RandomTensor(rng, model.SampleShape());
  auto codes = model.Encode(x);
  ASSERT_EQ(codes.size(), 1u);
  EXPECT_EQ(codes[0].channels % 2, 0);
  EXPECT_EQ(codes[0].channels, 16);
  EXPECT_EQ(codes[0].activations.size(),
            static_cast<size_t>(codes[0].channels) * codes[0].height * codes[0].width);
  auto mx = DetectorModel::Build(Arch::kMiniXception, PreprocessMethod::kNone, 32, 2);
  EXPECT_THROW(mx.Encode(RandomTensor(rng, mx.SampleShape())), Error);
}

LatentCode Code(std::vector<double> real, std::vector<double> fake) {
  LatentCode c;
  c.channels = 2;
  c.height = 1;
  c.width = static_cast<int>(real.size());
  c.activations = real;
  c.activations.insert(c.activations.end(), fake.begin(), fake.end());
  return c;
}

TEST(FtClassify, DecisionRule) {
  EXPECT_EQ(FtClassify(Code({0.7, 0.7}, {0.2, -0.2})), datahub::Label::kReal);
  EXPECT_EQ(FtClassify(Code({0.2}, {0.7})), datahub::Label::kFake);
  EXPECT_EQ(FtClassify(Code({0, 0}, {0, 0})), datahub::Label::kFake);
  EXPECT_EQ(FtClassify(Code({0.5}, {-0.5})), datahub::Label::kFake);
  LatentCode c = Code({0.7}, {0.2});
  EXPECT_DOUBLE_EQ(c.RealActivity(), 0.7);
  EXPECT_DOUBLE_EQ(c.FakeActivity(), 0.2);
}

TEST(FtClassify, InvariantUnderNegationAndPositiveScaling) {
  ForAll(500, 206, [](Rng& rng) {
    LatentCode c;
    c.channels = 2 * RandomInt(rng, 1, 4);
    c.height = RandomInt(rng, 1, 3);
    c.width = RandomInt(rng, 1, 3);
    c.activations = RandomVector(rng, static_cast<size_t>(c.channels) * c.height * c.width);
    auto label = FtClassify(c);
    LatentCode neg = c;
    for (double& v : neg.activations) v = -v;
    ASSERT_EQ(FtClassify(neg), label);
    LatentCode scaled = c;
    // Powers of two keep the comparison exact.
    double s = std::ldexp(1.0, RandomInt(rng, -8, 8));
    for (double& v : scaled.activations) v *= s;
    ASSERT_EQ(FtClassify(scaled), label);
  });
}

TEST(Loss, SoftmaxCrossEntropy) {
  std::vector<double> g(2);
  double z = 3.7;
  EXPECT_NEAR(SoftmaxCrossEntropy(std::vector<double>{z, z}, 0), std::log(2.0), 1e-15);
  EXPECT_NEAR(SoftmaxCrossEntropy(std::vector<double>{z, z}, 1), std::log(2.0), 1e-15);
  double l = SoftmaxCrossEntropy(std::vector<double>{2, 0}, 0, g);
  EXPECT_NEAR(l, std::log1p(std::exp(-2.0)), 1e-15);
  EXPECT_NEAR(l, 0.1269, 1e-4);
  double p0 = 1 / (1 + std::exp(-2.0));
  EXPECT_NEAR(g[0], p0 - 1, 1e-15);
  EXPECT_NEAR(g[1], 1 - p0, 1e-15);
  EXPECT_THROW(SoftmaxCrossEntropy(std::vector<double>{1, 2}, 2), Error);
}

TEST(Loss, ForensicTransferZeroAtIdeal) {
  Rng rng(207);
  Tensor input = RandomTensor(rng, {2, 3, 4, 4});
  Tensor latent({2, 4, 1, 1});
  // Sample 0 is real: real partition at magnitude 1, fake silent.
  latent[0] = 1, latent[1] = -1;
  // Sample 1 is fake.
  latent[6] = -1, latent[7] = 1;
  std::vector<int> targets = {kRealClass, kFakeClass};
  auto loss = ForensicTransferLoss(input, input, latent, targets, 1.0, nullptr, nullptr);
  EXPECT_EQ(loss.total, 0.0);
  Tensor noisy = input;
  noisy[0] += 0.32;
  latent[0] = 0.5;
  loss = ForensicTransferLoss(noisy, input, latent, targets, 2.0, nullptr, nullptr);
  EXPECT_NEAR(loss.reconstruction, 0.32 / 48 / 2, 1e-15);
  EXPECT_NEAR(loss.activation, 0.25 / 2, 1e-15);
  EXPECT_NEAR(loss.total, loss.reconstruction + 2.0 * loss.activation, 1e-15);
}

TEST(EarlyStopping, FlatTraceStopsAfterFourthEpoch) {
  EarlyStopping es(3);
  EXPECT_FALSE(es.Update(0.8));
  EXPECT_FALSE(es.Update(0.8));
  EXPECT_FALSE(es.Update(0.8));
  EXPECT_TRUE(es.Update(0.8));
  EXPECT_EQ(es.best_epoch(), 1);
}

TEST(EarlyStopping, StrictIncreaseResetsPatience) {
  EarlyStopping es(2);
  std::vector<double> trace = {0.5, 0.6, 0.6, 0.61, 0.6, 0.61};
  std::vector<bool> stops;
  for (double v : trace) stops.push_back(es.Update(v));
  EXPECT_EQ(stops, (std::vector<bool>{false, false, false, false, false, true}));
  EXPECT_EQ(es.best_epoch(), 4);
  EXPECT_DOUBLE_EQ(es.best_accuracy(), 0.61);
}

TEST(BalancedEpochOrder, EqualClassCounts) {
  ForAll(50, 208, [](Rng& rng) {
    int reals = RandomInt(rng, 1, 60), fakes = RandomInt(rng, 1, 60);
    std::vector<int> labels(reals, kRealClass);
    labels.insert(labels.end(), fakes, kFakeClass);
    rng.Shuffle(std::span<int>(labels));
    auto order = BalancedEpochOrder(labels, rng);
    int r = 0, f = 0;
    for (size_t i : order) (labels[i] == kRealClass ? r : f)++;
    EXPECT_EQ(r, std::min(reals, fakes));
    EXPECT_EQ(f, std::min(reals, fakes));
    EXPECT_EQ(std::set<size_t>(order.begin(), order.end()).size(), order.size());
  });
}

TEST(Sgd, ZeroLearningRateLeavesWeights) {
  Parameter p("w", {1, 3});
  p.value = Tensor({1, 3}, {1.0, -2.0, 3.0});
  p.grad = Tensor({1, 3}, {5.0, 5.0, 5.0});
  SgdMomentum sgd(0.0, 0.9, 0.1);
  Parameter* ps[] = {&p};
  for (int i = 0; i < 3; ++i) sgd.Step(ps);
  EXPECT_EQ(p.value, Tensor({1, 3}, {1.0, -2.0, 3.0}));
}

TEST(Sgd, PlainGradientDescentOnQuadratic) {
  // f(w) = a/2 (w - c)^2 has w_t = c + (1 - lr a)^t (w_0 - c).
  const double a = 3.0, c = 0.7, lr = 0.05, w0 = -1.2;
  Parameter p("w", {1, 1});
  p.value[0] = w0;
  SgdMomentum sgd(lr, 0.0, 0.0);
  Parameter* ps[] = {&p};
  for (int t = 1; t <= 40; ++t) {
    p.grad[0] = a * (p.value[0] - c);
    sgd.Step(ps);
    ASSERT_NEAR(p.value[0], c + std::pow(1 - lr * a, t) * (w0 - c), 1e-12);
  }
}

TEST(Sgd, MomentumAndDecoupledDecay) {
  const double lr = 0.1, mu = 0.9, wd = 0.01;
  Parameter p("w", {1, 1});
  p.value[0] = 2.0;
  SgdMomentum sgd(lr, mu, wd);
  Parameter* ps[] = {&p};
  double w = 2.0, v = 0.0;
  for (int t = 0; t < 10; ++t) {
    double g = std::sin(t);
    p.grad[0] = g;
    sgd.Step(ps);
    v = mu * v + g;
    w = w - lr * (v + wd * w);
    ASSERT_NEAR(p.value[0], w, 1e-14);
  }
}

SampleSet SynthSamples(const DetectorModel& model, int per_class, uint64_t seed) {
  SampleSet set(model.SampleShape());
  auto real = datahub::SynthGenerate(
      datahub::SynthGenSpec::Defaults(datahub::SynthKind::kReal, seed, 32, per_class));
  auto fake = datahub::SynthGenerate(
      datahub::SynthGenSpec::Defaults(datahub::SynthKind::kFakeA, seed + 1, 32, per_class));
  for (int i = 0; i < per_class; ++i) {
    set.Add(model.PrepareInput(real.images[i]), kRealClass);
    set.Add(model.PrepareInput(fake.images[i]), kFakeClass);
  }
  return set;
}

TEST(Train, LossDecreasesOnToyProblem) {
  for (Arch arch : {Arch::kMiniXception, Arch::kForensicTransfer}) {
    auto model = DetectorModel::Build(arch, PreprocessMethod::kNone, 32, 3);
    SampleSet set = SynthSamples(model, 8, 40);
    std::vector<size_t> all(set.size());
    std::iota(all.begin(), all.end(), 0);
    Tensor batch = set.Batch(all);
    std::vector<int> targets(set.labels().begin(), set.labels().end());
    SgdMomentum sgd(0.001, 0.0, 0.0);
    auto params = model.Parameters();
    double prev = model.Loss(batch, targets, true);
    for (int step = 0; step < 5; ++step) {
      sgd.Step(params);
      double now = model.Loss(batch, targets, true);
      EXPECT_LT(now, prev) << ToString(arch) << " step " << step;
      prev = now;
    }
  }
}

TrainConfig QuickConfig(Arch arch) {
  TrainConfig cfg = TrainConfig::ForArch(arch);
  cfg.max_epochs = 2;
  return cfg;
}

TEST(Train, DeterministicAndHistoryConsistent) {
  auto make = [] { return DetectorModel::Build(Arch::kMiniXception, PreprocessMethod::kNone, 32, 4); };
  auto m1 = make(), m2 = make();
  SampleSet train = SynthSamples(m1, 40, 50), val = SynthSamples(m1, 10, 60);
  TrainConfig cfg = QuickConfig(Arch::kMiniXception);
  cfg.max_epochs = 3;
  auto h1 = Train(m1, train, val, cfg);
  auto h2 = Train(m2, train, val, cfg);
  EXPECT_EQ(m1.FlatWeights(), m2.FlatWeights());
  ASSERT_FALSE(h1.epochs.empty());
  double best = -1;
  int best_epoch = 0;
  for (const auto& e : h1.epochs) {
    EXPECT_EQ(e.val_accuracy, h2.epochs[e.epoch - 1].val_accuracy);
    if (e.val_accuracy > best) best = e.val_accuracy, best_epoch = e.epoch;
  }
  EXPECT_EQ(h1.best_epoch, best_epoch);
  EXPECT_DOUBLE_EQ(Accuracy(m1, val), best);
  if (h1.stopped_early) {
    EXPECT_EQ(static_cast<int>(h1.epochs.size()) - h1.best_epoch, cfg.patience);
  }
}

TEST(Train, Errors) {
  auto model = DetectorModel::Build(Arch::kMiniXception, PreprocessMethod::kNone, 32, 4);
  SampleSet good = SynthSamples(model, 4, 70);
  SampleSet empty(model.SampleShape());
  TrainConfig cfg = QuickConfig(Arch::kMiniXception);
  try {
    Train(model, empty, good, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
  SampleSet poisoned(model.SampleShape());
  std::vector<double> nan(model.SampleShape().size(), std::numeric_limits<double>::quiet_NaN());
  poisoned.Add(nan, kRealClass);
  poisoned.Add(nan, kFakeClass);
  try {
    Train(model, poisoned, good, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTrainingFailure);
  }
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = QuickConfig(Arch::kMiniXception);
  cfg.momentum = 1.0;
  EXPECT_THROW(cfg.Validate(), Error);
  EXPECT_EQ(TrainConfig::ForArch(Arch::kForensicTransfer).batch_size, 64);
  EXPECT_EQ(TrainConfig::ForArch(Arch::kMiniXception).batch_size, 32);
  TrainConfig defaults;
  EXPECT_EQ(defaults.learning_rate, 0.01);
  EXPECT_EQ(defaults.momentum, 0.9);
  EXPECT_EQ(defaults.weight_decay, 0.0001);
  EXPECT_EQ(defaults.patience, 3);
}

TEST(Ensemble, IndependentOfJobCountAndSeedsDistinct) {
  auto factory = [](uint64_t seed) {
    return DetectorModel::Build(Arch::kForensicTransfer, PreprocessMethod::kNone, 32, seed);
  };
  auto probe = factory(1);
  SampleSet train = SynthSamples(probe, 16, 80), val = SynthSamples(probe, 6, 90);
  TrainConfig cfg = QuickConfig(Arch::kForensicTransfer);
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  auto serial = TrainEnsemble(factory, train, val, cfg, seeds, 1);
  auto parallel = TrainEnsemble(factory, train, val, cfg, seeds, 3);
  ASSERT_EQ(serial.size(), 5u);
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(serial[i].model.FlatWeights(), parallel[i].model.FlatWeights());
    EXPECT_EQ(serial[i].model.seed(), seeds[i]);
  }
  for (size_t i = 0; i < 5; ++i)
    for (size_t j = i + 1; j < 5; ++j)
      EXPECT_NE(factory(seeds[i]).FlatWeights(), factory(seeds[j]).FlatWeights());
  std::vector<uint64_t> dup = {1, 1, 2, 3, 4};
  EXPECT_THROW(TrainEnsemble(factory, train, val, cfg, dup), Error);
}

TEST(Checkpoint, RoundTripPreservesPredictions) {
  testing::TempDir dir;
  for (Arch arch : {Arch::kMiniXception, Arch::kForensicTransfer}) {
    ModelOptions opts;
    opts.widths.stem = 8;
    auto model = DetectorModel::Build(arch, PreprocessMethod::kRes3, 32, 12, opts);
    Rng rng(209);
    Tensor x = RandomTensor(rng, {4, 6, 32, 32});
    auto bytes = SerializeCheckpoint(model);
    EXPECT_EQ(bytes, SerializeCheckpoint(model));
    auto back = DeserializeCheckpoint(bytes);
    EXPECT_EQ(back.arch(), arch);
    EXPECT_EQ(back.preprocess(), PreprocessMethod::kRes3);
    EXPECT_EQ(back.seed(), 12u);
    EXPECT_EQ(back.options().widths.stem, 8);
    EXPECT_EQ(back.FlatWeights(), model.FlatWeights());
    EXPECT_EQ(back.Predict(x), model.Predict(x));
    SaveCheckpoint(dir / "m.ckpt", model);
    EXPECT_EQ(LoadCheckpoint(dir / "m.ckpt").FlatWeights(), model.FlatWeights());
    auto truncated = bytes;
    truncated.resize(bytes.size() - 5);
    try {
      DeserializeCheckpoint(truncated);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kDataError);
    }
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(DeserializeCheckpoint(bad_magic), Error);
  }
}

TEST(PrepareInput, ResidualScaling) {
  Rng rng(210);
  auto img = testing::RandomImage(rng, 3, 32, 32);
  auto m1 = DetectorModel::Build(Arch::kMiniXception, PreprocessMethod::kRes1, 32, 1);
  auto m3 = DetectorModel::Build(Arch::kMiniXception, PreprocessMethod::kRes3, 32, 1);
  auto r1 = imageops::ResidualFilter(img, 1);
  auto r3 = imageops::ResidualFilter(img, 3);
  auto p1 = m1.PrepareInput(img), p3 = m3.PrepareInput(img);
  ASSERT_EQ(p1.size(), r1.size());
  for (size_t i = 0; i < p1.size(); ++i) {
    ASSERT_DOUBLE_EQ(p1[i], r1.data()[i]);
    ASSERT_DOUBLE_EQ(p3[i], r3.data()[i] / 4.0);
    ASSERT_LE(std::abs(p3[i]), 1.0);
  }
  auto big = testing::RandomImage(rng, 3, 64, 48);
  auto m = DetectorModel::Build(Arch::kMiniXception, PreprocessMethod::kNone, 32, 1);
  EXPECT_EQ(m.PrepareInput(big).size(), 3u * 32 * 32);
}

}  // namespace
}  // namespace gendet::nnet
