#include <benchmark/benchmark.h>

#include "gendet/common/random.h"
#include "gendet/imageops/perturb.h"
#include "gendet/imageops/transforms.h"
#include "gendet/nnet/layers.h"
#include "gendet/nnet/model.h"
#include "gendet/nnet/tensor.h"

namespace {

using namespace gendet;

imageops::ImageTensor RandomImage(int size, uint64_t seed) {
  Rng rng(seed);
  imageops::ImageTensor img(3, size, size, imageops::ColorSpace::kRgb);
  for (double& v : img.data()) v = rng.Uniform();
  return img;
}

void BM_ResidualFilter(benchmark::State& state) {
  const auto img = RandomImage(static_cast<int>(state.range(0)), 1);
  const int order = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(imageops::ResidualFilter(img, order));
  state.SetItemsProcessed(state.iterations() * img.size());
}
BENCHMARK(BM_ResidualFilter)->Args({256, 1})->Args({256, 3})->Args({1024, 3});

void BM_Cooc(benchmark::State& state) {
  const auto img = RandomImage(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(imageops::CoocTransform(img));
}
BENCHMARK(BM_Cooc)->Arg(32)->Arg(64)->Arg(128);

void BM_JpegRoundTrip(benchmark::State& state) {
  const auto img = RandomImage(static_cast<int>(state.range(0)), 3);
  const auto spec = imageops::PerturbationSpec::Jpeg(50);
  for (auto _ : state) benchmark::DoNotOptimize(imageops::JpegRoundTrip(img, spec));
  state.SetItemsProcessed(state.iterations() * img.size());
}
BENCHMARK(BM_JpegRoundTrip)->Arg(256)->Arg(1024);

void BM_GaussianBlur(benchmark::State& state) {
  const auto img = RandomImage(256, 4);
  const auto spec = imageops::PerturbationSpec::Blur(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(imageops::GaussianBlur(img, spec));
}
BENCHMARK(BM_GaussianBlur)->Arg(3)->Arg(9)->Arg(15);

void BM_Gemm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(5);
  std::vector<double> a(n * n), b(n * n), c(n * n);
  for (double& v : a) v = rng.Uniform();
  for (double& v : b) v = rng.Uniform();
  for (auto _ : state) {
    nnet::Gemm(nnet::Transpose::kNo, nnet::Transpose::kNo, n, n, n, 1.0, a.data(), n, b.data(),
               n, 0.0, c.data(), n);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * 2 * int64_t{n} * n * n);
}
BENCHMARK(BM_Gemm)->Arg(64)->Arg(256)->Arg(512);

void BM_Conv(benchmark::State& state) {
  const int ch = static_cast<int>(state.range(0));
  nnet::Conv2d conv("conv", ch, ch, 3, 1, 1);
  Rng rng(6);
  conv.Initialize(rng, {});
  nnet::Tensor x({32, ch, 32, 32});
  for (double& v : x.values()) v = rng.Normal();
  const bool backward = state.range(1) != 0;
  for (auto _ : state) {
    auto y = conv.Forward(x);
    if (backward) benchmark::DoNotOptimize(conv.Backward(y));
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_Conv)->Args({16, 0})->Args({16, 1})->Args({32, 0})->Args({32, 1});

void BM_ModelStep(benchmark::State& state) {
  const auto arch = state.range(0) == 0 ? nnet::Arch::kMiniXception : nnet::Arch::kForensicTransfer;
  auto model = nnet::DetectorModel::Build(arch, imageops::PreprocessMethod::kNone, 32, 1);
  Rng rng(7);
  auto shape = model.SampleShape();
  shape.n = 32;
  nnet::Tensor x(shape);
  for (double& v : x.values()) v = rng.Uniform();
  std::vector<int> targets(32);
  for (int i = 0; i < 32; ++i) targets[i] = i % 2;
  for (auto _ : state) benchmark::DoNotOptimize(model.Loss(x, targets, true));
}
BENCHMARK(BM_ModelStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
