#include "irisbench/pipeline.hpp"

#include <unordered_set>

#include "irisbench/error.hpp"
#include "irisbench/parallel.hpp"
#include "irisbench/synth.hpp"

namespace irisbench {

std::string_view to_string(EncodeMethod method) noexcept {
  switch (method) {
    case EncodeMethod::BBox: return "bbox";
    case EncodeMethod::Norm: return "norm";
    case EncodeMethod::Gabor: return "gabor";
    case EncodeMethod::Ordinal: return "ordinal";
  }
  return "?";
}

std::optional<EncodeMethod> parse_encode_method(std::string_view text) noexcept {
  for (auto m : {EncodeMethod::BBox, EncodeMethod::Norm, EncodeMethod::Gabor, EncodeMethod::Ordinal})
    if (to_string(m) == text) return m;
  return std::nullopt;
}

Image8 load_sample_image(const SampleRecord& record, const std::filesystem::path& image_root) {
  if (SynthRef::is_synth_ref(record.image_ref)) {
    auto ref = SynthRef::parse(record.image_ref);
    if (!ref) throw Error(ErrorKind::Parse, "sample '" + record.sample_id + "': malformed synth ref");
    return render_synth_ref(*ref);
  }
  std::filesystem::path p(record.image_ref);
  if (p.is_relative()) p = image_root / p;
  return read_image(p);
}

Image8 unusable_pixels(const Annotation& annotation) {
  Image8 out(annotation.image_width, annotation.image_height, 0);
  auto mark = [&](const RleMask& m) {
    if (m.width() != out.width() || m.height() != out.height())
      throw Error(ErrorKind::ShapeMismatch, "mask size differs from the image size");
    m.for_each_set([&](int x, int y, std::uint8_t) { out.at(x, y) = 1; });
  };
  mark(annotation.occlusion_mask.mask);
  mark(annotation.reflection_mask.mask);
  return out;
}

NormalizedIris normalize_sample(const Image8& image, const Annotation& annotation, int rows, int cols) {
  return rubber_sheet(image, annotation.pupil_ellipse, annotation.iris_ellipse, unusable_pixels(annotation), rows, cols);
}

Template extract_template(const Image8& image, const Annotation& annotation, EncodeMethod method,
                          const PipelineConfig& config) {
  switch (method) {
    case EncodeMethod::BBox: return reference_embed(bbox_crop(image, annotation.iris_bbox, config.crop));
    case EncodeMethod::Norm: {
      const auto norm = normalize_sample(image, annotation, config.norm_rows, config.norm_cols);
      return reference_embed(resize_bilinear(norm.texture, config.crop.out_size, config.crop.out_size));
    }
    case EncodeMethod::Gabor:
      return gabor_encode(normalize_sample(image, annotation, config.norm_rows, config.norm_cols), config.gabor);
    case EncodeMethod::Ordinal:
      return ordinal_encode(normalize_sample(image, annotation, config.norm_rows, config.norm_cols), config.ordinal);
  }
  throw Error(ErrorKind::InvalidSpec, "unknown encode method");
}

TemplateMap encode_records(std::span<const SampleRecord> records, EncodeMethod method, const PipelineConfig& config,
                           const std::filesystem::path& image_root, unsigned workers) {
  for (const auto& r : records)
    if (!r.annotation) throw Error(ErrorKind::MissingAnnotation, "sample '" + r.sample_id + "' has no annotation");
  std::vector<std::optional<Template>> slots(records.size());
  parallel_for(records.size(), workers, [&](std::size_t i) {
    const auto& r = records[i];
    slots[i] = extract_template(load_sample_image(r, image_root), *r.annotation, method, config);
  });
  TemplateMap out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!out.emplace(records[i].sample_id, std::move(*slots[i])).second)
      throw Error(ErrorKind::DuplicateId, "duplicate sample id '" + records[i].sample_id + "'");
  }
  return out;
}

std::vector<SampleRecord> records_in_pairs(std::span<const SampleRecord> records, const PairList& pairs) {
  std::vector<char> used(pairs.ids.size(), 0);
  for (const auto& p : pairs.pairs)
    for (auto idx : {p.probe[0], p.probe[1], p.reference[0], p.reference[1]})
      if (idx != kNoSample) used[idx] = 1;
  std::unordered_set<std::string_view> wanted;
  for (std::size_t i = 0; i < used.size(); ++i)
    if (used[i]) wanted.insert(pairs.ids[i]);
  std::vector<SampleRecord> out;
  for (const auto& r : records)
    if (wanted.contains(r.sample_id)) out.push_back(r);
  return out;
}

}  // namespace irisbench
