#pragma once

#include "irisbench/geometry.hpp"
#include "irisbench/raster.hpp"

namespace irisbench {

struct CropConfig {
  double expand_factor = 1.2;
  int out_size = 112;

  bool valid() const noexcept { return expand_factor >= 1.0 && out_size > 0; }
};

/// Square window used by bbox_crop: side max(w, h) * expand_factor centered
/// on the box center. Pixel indices x0 <= i < x0 + side fall inside.
BBox crop_window(const BBox& iris_bbox, const CropConfig& config) noexcept;

/// Normalization-free front end: crops the expanded square window around
/// the iris box and resamples it bilinearly to out_size x out_size. Source
/// pixels outside the image read as zero. Throws NoOverlap when the box
/// misses the image entirely.
Image8 bbox_crop(const Image8& image, const BBox& iris_bbox, const CropConfig& config = {});

struct NormalizedIris {
  ImageF texture;  // values in [0, 1]
  Image8 validity; // 1 = usable sample
};

inline constexpr int kNormRows = 64;
inline constexpr int kNormCols = 512;

/// Rubber-sheet unwrapping. Row r, column c samples
///   inner(theta) + ((r + 0.5) / rows) * (outer(theta) - inner(theta)),
/// theta = 2 pi c / cols, where inner/outer are the pupil and iris
/// boundary points along the ray at theta. A cell is valid when its sample
/// lies inside the image and the nearest pixel of `occlusion` is zero
/// (an empty occlusion raster means nothing is occluded).
NormalizedIris rubber_sheet(const Image8& image, const Ellipse& pupil, const Ellipse& iris, const Image8& occlusion,
                            int rows = kNormRows, int cols = kNormCols);

/// Center-aligned bilinear resize with edge clamping.
ImageF resize_bilinear(const ImageF& src, int width, int height);

}  // namespace irisbench
