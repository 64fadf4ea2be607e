#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "irisbench/encode.hpp"
#include "irisbench/preprocess.hpp"
#include "irisbench/protocols.hpp"
#include "irisbench/records.hpp"
#include "irisbench/templates.hpp"

namespace irisbench {

enum class EncodeMethod { BBox, Norm, Gabor, Ordinal };

std::string_view to_string(EncodeMethod method) noexcept;
std::optional<EncodeMethod> parse_encode_method(std::string_view text) noexcept;

struct PipelineConfig {
  CropConfig crop;
  GaborConfig gabor;
  OrdinalConfig ordinal;
  int norm_rows = kNormRows;
  int norm_cols = kNormCols;
};

/// Pixels behind a record: synth refs are re-rendered, anything else is a
/// file path, relative paths resolved against `image_root`.
Image8 load_sample_image(const SampleRecord& record, const std::filesystem::path& image_root);

/// Full-size raster, nonzero where the occlusion or reflection mask marks
/// a pixel as unusable.
Image8 unusable_pixels(const Annotation& annotation);

NormalizedIris normalize_sample(const Image8& image, const Annotation& annotation, int rows = kNormRows,
                                int cols = kNormCols);

Template extract_template(const Image8& image, const Annotation& annotation, EncodeMethod method,
                          const PipelineConfig& config = {});

/// Templates keyed by sample id. Throws MissingAnnotation for records
/// without an annotation.
TemplateMap encode_records(std::span<const SampleRecord> records, EncodeMethod method, const PipelineConfig& config,
                           const std::filesystem::path& image_root, unsigned workers = 1);

/// Records referenced by a pair list, in input order.
std::vector<SampleRecord> records_in_pairs(std::span<const SampleRecord> records, const PairList& pairs);

}  // namespace irisbench
