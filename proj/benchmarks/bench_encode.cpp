#include <benchmark/benchmark.h>

#include "irisbench/encode.hpp"
#include "irisbench/pipeline.hpp"
#include "irisbench/synth.hpp"

using namespace irisbench;

namespace {

struct Scene {
  Image8 image;
  Annotation annotation;
  NormalizedIris norm;
};

const Scene& scene() {
  static const Scene s = [] {
    CaptureParams p;
    p.brightness_level = 5;
    auto [img, ann] = render_ocular(SubjectModel::from_seed("S0000", 7), p, SynthConfig{});
    Scene out{std::move(img), std::move(ann), {}};
    out.norm = normalize_sample(out.image, out.annotation);
    return out;
  }();
  return s;
}

void BM_BBoxCrop(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bbox_crop(scene().image, scene().annotation.iris_bbox));
}
BENCHMARK(BM_BBoxCrop)->Unit(benchmark::kMicrosecond);

void BM_RubberSheet(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(normalize_sample(scene().image, scene().annotation));
}
BENCHMARK(BM_RubberSheet)->Unit(benchmark::kMicrosecond);

void BM_GaborEncode(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gabor_encode(scene().norm));
}
BENCHMARK(BM_GaborEncode)->Unit(benchmark::kMicrosecond);

void BM_OrdinalEncode(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ordinal_encode(scene().norm));
}
BENCHMARK(BM_OrdinalEncode)->Unit(benchmark::kMicrosecond);

void BM_ReferenceEmbed(benchmark::State& state) {
  const Image8 crop = bbox_crop(scene().image, scene().annotation.iris_bbox);
  for (auto _ : state) benchmark::DoNotOptimize(reference_embed(crop));
}
BENCHMARK(BM_ReferenceEmbed)->Unit(benchmark::kMicrosecond);

void BM_ExtractTemplate(benchmark::State& state) {
  const auto method = static_cast<EncodeMethod>(state.range(0));
  state.SetLabel(std::string(to_string(method)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_template(scene().image, scene().annotation, method));
}
BENCHMARK(BM_ExtractTemplate)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

}  // namespace
