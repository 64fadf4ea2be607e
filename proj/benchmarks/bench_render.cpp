#include <benchmark/benchmark.h>

#include "irisbench/quality.hpp"
#include "irisbench/synth.hpp"

using namespace irisbench;

namespace {

const SubjectModel& subject() {
  static const SubjectModel s = SubjectModel::from_seed("S0000", 42);
  return s;
}

void BM_RenderOcular(benchmark::State& state) {
  CaptureParams p;
  p.gaze_point = 1;
  p.brightness_level = 4;
  SynthConfig config;
  for (auto _ : state) {
    p.noise_seed++;
    benchmark::DoNotOptimize(render_ocular(subject(), p, config));
  }
}
BENCHMARK(BM_RenderOcular)->Unit(benchmark::kMillisecond);

void BM_AnnotateOcular(benchmark::State& state) {
  CaptureParams p;
  p.gaze_point = 3;
  SynthConfig config;
  for (auto _ : state) {
    p.noise_seed++;
    benchmark::DoNotOptimize(annotate_ocular(subject(), p, config));
  }
}
BENCHMARK(BM_AnnotateOcular)->Unit(benchmark::kMicrosecond);

void BM_ScoreQuality(benchmark::State& state) {
  CaptureParams p;
  p.heavy_lash = true;
  SampleRecord r;
  r.sample_id = "x";
  r.gaze_point = p.gaze_point;
  r.annotation = annotate_ocular(subject(), p, SynthConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(score_quality(r));
}
BENCHMARK(BM_ScoreQuality)->Unit(benchmark::kMicrosecond);

}  // namespace
