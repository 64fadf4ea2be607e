#include "irisbench/records.hpp"

namespace irisbench {

std::string_view to_string(Eye eye) noexcept { return eye == Eye::Left ? "L" : "R"; }

std::string_view to_string(Category category) noexcept {
  return category == Category::Standard ? "standard" : "challenging";
}

std::string_view to_string(Split split) noexcept { return split == Split::Train ? "train" : "test"; }

std::optional<Eye> parse_eye(std::string_view text) noexcept {
  if (text == "L") return Eye::Left;
  if (text == "R") return Eye::Right;
  return std::nullopt;
}

std::optional<Category> parse_category(std::string_view text) noexcept {
  if (text == "standard") return Category::Standard;
  if (text == "challenging") return Category::Challenging;
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view text) noexcept {
  if (text == "train") return Split::Train;
  if (text == "test") return Split::Test;
  return std::nullopt;
}

bool Annotation::valid() const noexcept {
  if (image_width <= 0 || image_height <= 0) return false;
  if (!ocular_bbox.valid() || !iris_bbox.valid()) return false;
  if (!iris_ellipse.valid() || !pupil_ellipse.valid()) return false;
  if (!nested_inside(pupil_ellipse, iris_ellipse)) return false;
  for (const MaskField* m : {&occlusion_mask, &reflection_mask}) {
    if (m->mask.width() != image_width || m->mask.height() != image_height) return false;
  }
  return true;
}

bool QualityScores::valid() const noexcept {
  for (double v : {eyelid_occ, eyelash_occ, pupil_ratio, gaze_dev, reflection})
    if (!(v >= 0.0 && v <= 1.0)) return false;
  return true;
}

}  // namespace irisbench
