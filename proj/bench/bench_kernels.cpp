// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "limner/image.hpp"
#include "limner/kernels.hpp"
#include "limner/shadowfit.hpp"
#include "limner/synth.hpp"

using namespace limner;

namespace {

AnnotationDocument shadow_doc(int n) {
  synth::SyntheticScene s;
  s.width = 1200;
  s.height = 900;
  s.focal_px = 1200;
  s.horizon_y_px = 250;
  s.sun_azimuth_deg = 35;
  synth::Rng rng(1);
  synth::FigureSampling fs;
  fs.n_figures = n;
  s.figure_positions = synth::sample_figures(s, fs, rng);
  return synth::render_annotations(s);
}

template <bool Parallel>
void BM_ShadowGrid(benchmark::State& state) {
  const shadowfit::ShadowProblem p(shadow_doc(static_cast<int>(state.range(0))));
  const auto grid = shadowfit::theta_grid();
  const auto f = [&](double t) { return p.cost(t); };
  for (auto _ : state) {
    auto v = Parallel ? kernels::grid_scan(f, std::span<const double>(grid))
                      : kernels::grid_scan_reference(f, std::span<const double>(grid));
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_ShadowGrid<false>)->Arg(12)->Arg(200);
BENCHMARK(BM_ShadowGrid<true>)->Arg(12)->Arg(200);

std::vector<std::vector<float>> frames(std::size_t n, std::size_t size) {
  synth::Rng rng(2);
  std::vector<std::vector<float>> out(n, std::vector<float>(size));
  for (auto& f : out) {
    for (auto& v : f) v = static_cast<float>(rng.uniform());
  }
  return out;
}

constexpr std::size_t kFrame = 256 * 256 * 3;

void BM_AccumulateReference(benchmark::State& state) {
  const auto fs = frames(32, kFrame);
  for (auto _ : state) {
    kernels::CompensatedAccumulator acc(kFrame);
    for (const auto& f : fs) acc.add_reference(f);
    benchmark::DoNotOptimize(acc.count());
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_AccumulateReference);

void BM_Accumulate(benchmark::State& state) {
  const auto fs = frames(32, kFrame);
  for (auto _ : state) {
    kernels::CompensatedAccumulator acc(kFrame);
    for (const auto& f : fs) acc.add(f);
    benchmark::DoNotOptimize(acc.count());
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_Accumulate);

void BM_AccumulateBatch(benchmark::State& state) {
  const auto fs = frames(32, kFrame);
  for (auto _ : state) {
    kernels::CompensatedAccumulator acc(kFrame);
    acc.add_batch(fs);
    benchmark::DoNotOptimize(acc.count());
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_AccumulateBatch);

template <bool Parallel>
void BM_Resample(benchmark::State& state) {
  synth::Rng rng(3);
  auto img = image::make_image(1024, 768);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng.next() & 0xff);
  const int t = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto out = Parallel ? image::resample_linear(img, image::full_region(img), t, t)
                        : image::resample_linear_reference(img, image::full_region(img), t, t);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Resample<false>)->Arg(128)->Arg(256);
BENCHMARK(BM_Resample<true>)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
