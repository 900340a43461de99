#include <benchmark/benchmark.h>

#include "vforge/batch_plan.hpp"
#include "vforge/flow.hpp"
#include "vforge/mask_ops.hpp"
#include "vforge/random.hpp"
#include "vforge/sequence.hpp"

using namespace vforge;

namespace {

Image noise(Size s, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> px(s.pixels() * 3);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng.index(256));
  return Image(s, std::move(px));
}

Mask disk_mask(Size s, int r) {
  Mask m(s);
  const int cx = s.width / 2, cy = s.height / 2;
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y);
  return m;
}

}  // namespace

static void BM_ApplyMask(benchmark::State& state) {
  const Size s{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  const Image img = noise(s, 1);
  const Mask m = disk_mask(s, s.width / 4);
  for (auto _ : state) benchmark::DoNotOptimize(apply_mask(img, m));
}
BENCHMARK(BM_ApplyMask)->Arg(256)->Arg(720);

static void BM_ExpandBy(benchmark::State& state) {
  const Size s{512, 512};
  const Mask m = disk_mask(s, 80);
  for (auto _ : state) benchmark::DoNotOptimize(expand_by(m, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ExpandBy)->Arg(4)->Arg(32);

static void BM_Hull(benchmark::State& state) {
  const Mask m = disk_mask(Size{512, 512}, 120);
  for (auto _ : state) benchmark::DoNotOptimize(hull(m));
}
BENCHMARK(BM_Hull);

static void BM_BlockMatchFlow(benchmark::State& state) {
  const Size s{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  const Image a = noise(s, 2);
  const Image b = noise(s, 3);
  for (auto _ : state) benchmark::DoNotOptimize(block_match_flow(a, b));
}
BENCHMARK(BM_BlockMatchFlow)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_PlanBatches(benchmark::State& state) {
  SamplePools pools;
  for (int i = 0; i < 500; ++i) {
    pools.image_addmod.push_back("ia" + std::to_string(i));
    pools.image_deletion.push_back("id" + std::to_string(i));
    pools.video_addmod.push_back("va" + std::to_string(i));
    pools.video_deletion.push_back("vd" + std::to_string(i));
  }
  PlanConfig cfg;
  cfg.n_batches = static_cast<std::size_t>(state.range(0));
  cfg.batch_size = 4;
  for (auto _ : state) benchmark::DoNotOptimize(plan_batches(pools, cfg));
}
BENCHMARK(BM_PlanBatches)->Arg(11000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
