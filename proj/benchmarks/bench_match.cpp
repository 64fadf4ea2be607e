#include <benchmark/benchmark.h>

#include <vector>

#include "bench_util.hpp"
#include "irisbench/match.hpp"

using namespace irisbench;

namespace {

constexpr CodeLayout k4096{8, 128, 4};

// One probe against a rotating set of references, 17 shifts each.
void BM_MatchPrepared4096(benchmark::State& state) {
  Rng rng(11);
  const int refs = static_cast<int>(state.range(0));
  const IrisCode probe_code = bench::random_code(rng, k4096);
  std::vector<IrisCode> ref_codes;
  for (int i = 0; i < refs; ++i) ref_codes.push_back(bench::random_code(rng, k4096));
  const auto probe = PreparedCode::prepare(probe_code, kDefaultMaxShift);
  std::vector<PreparedCode> prepared;
  for (const auto& c : ref_codes) prepared.push_back(PreparedCode::prepare(c, 0));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(match_prepared(probe, prepared[i]));
    if (++i == prepared.size()) i = 0;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MatchPrepared4096)->Arg(1)->Arg(256);

void BM_HammingMatch4096(benchmark::State& state) {
  Rng rng(12);
  const IrisCode a = bench::random_code(rng, k4096);
  const IrisCode b = bench::random_code(rng, k4096);
  for (auto _ : state) benchmark::DoNotOptimize(hamming_match(a, b));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HammingMatch4096);

void BM_Prepare4096(benchmark::State& state) {
  Rng rng(13);
  const IrisCode a = bench::random_code(rng, k4096);
  for (auto _ : state) benchmark::DoNotOptimize(PreparedCode::prepare(a, kDefaultMaxShift));
}
BENCHMARK(BM_Prepare4096);

void BM_Cosine256(benchmark::State& state) {
  Rng rng(14);
  Embedding a, b;
  for (int i = 0; i < 256; ++i) {
    a.values.push_back(rng.normal());
    b.values.push_back(rng.normal());
  }
  for (auto _ : state) benchmark::DoNotOptimize(cosine_match(a, b));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Cosine256);

}  // namespace
