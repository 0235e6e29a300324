#include <benchmark/benchmark.h>

#include "sigver/ann.hpp"
#include "sigver/dataset.hpp"
#include "sigver/features.hpp"
#include "sigver/preprocess.hpp"
#include "sigver/random.hpp"

using namespace sigver;

namespace {

const raster::GrayImage& sample_image() {
  static const auto img = dataset::render_sample(dataset::writer_style(7, 0), 1, false);
  return img;
}

const raster::BinaryImage& sample_canonical() {
  static const auto img = preprocess::preprocess(sample_image(), preprocess::PreprocessMode::Offline);
  return img;
}

void BM_MedianFilter(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(preprocess::median_filter3(sample_image()));
}
BENCHMARK(BM_MedianFilter);

void BM_ResizeCanonical(benchmark::State& state) {
  const auto cropped = preprocess::crop_to_content(preprocess::binarize(sample_image(), 128));
  for (auto _ : state) benchmark::DoNotOptimize(preprocess::resize_to_canonical(cropped));
}
BENCHMARK(BM_ResizeCanonical);

void BM_Thicken(benchmark::State& state) {
  const auto cropped = preprocess::crop_to_content(preprocess::binarize(sample_image(), 128));
  const auto resized = preprocess::resize_to_canonical(cropped);
  for (auto _ : state) benchmark::DoNotOptimize(preprocess::thicken_to_stability(resized));
}
BENCHMARK(BM_Thicken)->Unit(benchmark::kMillisecond);

void BM_Preprocess(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(preprocess::preprocess(sample_image(), preprocess::PreprocessMode::Offline));
}
BENCHMARK(BM_Preprocess)->Unit(benchmark::kMillisecond);

void BM_Extract(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(features::extract(sample_canonical()));
}
BENCHMARK(BM_Extract);

void BM_LossAndGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto model = ann::init_model(20, 1);
  Rng rng(2);
  ann::Batch batch;
  batch.x = ann::Matrix(n, model.input_dim());
  for (Eigen::Index i = 0; i < batch.x.size(); ++i) batch.x.data()[i] = rng.normal();
  for (int i = 0; i < n; ++i) batch.y.push_back(i % 20);
  for (auto _ : state) benchmark::DoNotOptimize(ann::loss_and_gradient(model, batch));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LossAndGradient)->Arg(60)->Arg(280)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
