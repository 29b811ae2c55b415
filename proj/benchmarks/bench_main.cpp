#include <benchmark/benchmark.h>

#include <random>

#include "musiclite/adder_spec.hpp"
#include "musiclite/characterize.hpp"
#include "musiclite/gk_svd.hpp"
#include "musiclite/pipeline.hpp"

using namespace musiclite;

namespace {

const char* const kAdders[] = {"exact:16", "cla:16", "acla:16:4", "loa:16:4", "trunc:16:2"};

void bm_adder(benchmark::State& state) {
  const AdderModel adder = parse_adder_spec(kAdders[state.range(0)]);
  state.SetLabel(adder.name());
  std::mt19937_64 rng(1);
  std::vector<std::uint64_t> ops(1024);
  for (auto& x : ops) x = rng() & adder.mask();
  std::uint64_t acc = 0;
  for (auto _ : state) {
    for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
      acc += adder.add(ops[i], ops[i + 1]).sum;
    }
  }
  benchmark::DoNotOptimize(acc);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ops.size() - 1));
}
BENCHMARK(bm_adder)->DenseRange(0, 4);

void bm_characterize_sampled(benchmark::State& state) {
  const AdderModel adder = AdderModel::acla(16, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(characterize(adder, Sampled{1 << 16, 7}));
  }
  state.SetItemsProcessed(state.iterations() * (1 << 16));
}
BENCHMARK(bm_characterize_sampled);

void bm_cordic_rotate(benchmark::State& state) {
  const FixedFormat f{16, 13};
  const CordicConfig c(f, AdderModel::ripple(16), 0,
                       state.range(0) != 0 ? ShiftRounding::Nearest : ShiftRounding::Truncate);
  state.SetLabel(state.range(0) != 0 ? "nearest" : "truncate");
  std::int64_t theta = f.quantize(0.3);
  std::int64_t acc = 0;
  for (auto _ : state) {
    const RotationRaw r = c.rotate_raw(4000, -2000, theta);
    acc += r.x;
    theta ^= 1;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(bm_cordic_rotate)->Arg(0)->Arg(1);

void bm_svd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FixedFormat f{16, 13};
  const CordicConfig c(f, AdderModel::ripple(16));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  CMatrix a(n, n);
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k < n; ++k) a(r, k) = {normal(rng), normal(rng)};
  }
  const FixedMatrix fa = FixedMatrix::from_complex(a, f);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svd(fa, c));
  }
}
BENCHMARK(bm_svd)->Arg(4)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void bm_pipeline_run(benchmark::State& state) {
  Scenario s;
  s.scene.snr_db = 10.0;
  const CordicConfig c(s.format, AdderModel::ripple(16));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_pipeline(s, c, RngSpec{1, stream++}));
  }
}
BENCHMARK(bm_pipeline_run)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
