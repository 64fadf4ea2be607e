#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "irisbench/geometry.hpp"
#include "irisbench/mask.hpp"

namespace irisbench {

enum class Eye { Left, Right };
enum class Category { Standard, Challenging };
enum class Split { Train, Test };

std::string_view to_string(Eye eye) noexcept;
std::string_view to_string(Category category) noexcept;
std::string_view to_string(Split split) noexcept;
std::optional<Eye> parse_eye(std::string_view text) noexcept;
std::optional<Category> parse_category(std::string_view text) noexcept;
std::optional<Split> parse_split(std::string_view text) noexcept;

inline constexpr int kImageSize = 640;
inline constexpr int kGazePoints = 9;
inline constexpr int kBrightnessLevels = 11;
inline constexpr int kFramesPerLevel = 5;
inline constexpr int kCenterGazePoint = 5;

/// A mask as carried by a manifest: always decoded to RLE in memory, with
/// the external raster path kept when the mask was loaded from one.
struct MaskField {
  RleMask mask;
  std::optional<std::string> source_path;
  bool operator==(const MaskField&) const = default;
};

struct Annotation {
  int image_width = kImageSize;
  int image_height = kImageSize;
  BBox ocular_bbox;
  BBox iris_bbox;
  Ellipse iris_ellipse;
  Ellipse pupil_ellipse;
  MaskField occlusion_mask;   // labels: OcclusionLabel
  MaskField reflection_mask;  // 1 = specular saturation

  /// Geometric and raster-size invariants. Annotations failing this are
  /// treated as failed annotations by the cleaning stage.
  bool valid() const noexcept;

  bool operator==(const Annotation&) const = default;
};

/// Five quality dimensions, each in [0, 1], higher = more challenging.
struct QualityScores {
  double eyelid_occ = 0.0;
  double eyelash_occ = 0.0;
  double pupil_ratio = 0.0;
  double gaze_dev = 0.0;
  double reflection = 0.0;

  bool valid() const noexcept;
  bool operator==(const QualityScores&) const = default;
};

/// Identity class: one subject's one eye. Left and right eyes of a subject
/// are distinct classes.
struct ClassKey {
  std::string subject_id;
  Eye eye = Eye::Left;
  auto operator<=>(const ClassKey&) const = default;
  bool operator==(const ClassKey&) const = default;
};

struct SampleRecord {
  std::string sample_id;
  std::string subject_id;
  Eye eye = Eye::Left;
  int gaze_point = kCenterGazePoint;
  int brightness_level = 0;
  int frame_idx = 0;
  std::string image_ref;
  std::optional<Annotation> annotation;
  std::optional<QualityScores> quality;
  std::optional<Category> category;
  std::optional<Split> split;

  ClassKey class_key() const { return {subject_id, eye}; }

  bool operator==(const SampleRecord&) const = default;
};

}  // namespace irisbench
