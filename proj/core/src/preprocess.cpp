#include "irisbench/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "irisbench/error.hpp"

namespace irisbench {

BBox crop_window(const BBox& iris_bbox, const CropConfig& config) noexcept {
  const double side = std::max(iris_bbox.w, iris_bbox.h) * config.expand_factor;
  const Point2 c = iris_bbox.center();
  return {c.x - side / 2.0, c.y - side / 2.0, side, side};
}

Image8 bbox_crop(const Image8& image, const BBox& iris_bbox, const CropConfig& config) {
  if (!config.valid()) throw Error(ErrorKind::InvariantViolation, "crop config: expand_factor >= 1, out_size > 0");
  if (!iris_bbox.valid()) throw Error(ErrorKind::InvariantViolation, "crop bbox must have positive size");
  if (iris_bbox.x + iris_bbox.w <= 0.0 || iris_bbox.y + iris_bbox.h <= 0.0 || iris_bbox.x >= image.width() ||
      iris_bbox.y >= image.height())
    throw Error(ErrorKind::NoOverlap, "iris bbox lies outside the image");

  const BBox window = crop_window(iris_bbox, config);
  const int n = config.out_size;
  const double scale = window.w / n;
  Image8 out(n, n);
  for (int j = 0; j < n; ++j) {
    const double sy = window.y + (j + 0.5) * scale - 0.5;
    auto row = out.row(j);
    for (int i = 0; i < n; ++i) {
      const double sx = window.x + (i + 0.5) * scale - 0.5;
      const double v = sample_bilinear_zero(image, sx, sy);
      row[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

NormalizedIris rubber_sheet(const Image8& image, const Ellipse& pupil, const Ellipse& iris, const Image8& occlusion,
                            int rows, int cols) {
  if (rows <= 0 || cols <= 0) throw Error(ErrorKind::ShapeMismatch, "normalized size must be positive");
  if (!pupil.valid() || !iris.valid() || !nested_inside(pupil, iris))
    throw Error(ErrorKind::DegenerateGeometry, "pupil ellipse must lie inside the iris ellipse");
  const bool has_occlusion = !occlusion.empty();
  if (has_occlusion && (occlusion.width() != image.width() || occlusion.height() != image.height()))
    throw Error(ErrorKind::ShapeMismatch, "occlusion mask size differs from image");

  NormalizedIris out{ImageF(cols, rows), Image8(cols, rows)};
  const double max_x = image.width() - 1.0;
  const double max_y = image.height() - 1.0;
  for (int c = 0; c < cols; ++c) {
    const double theta = 2.0 * std::numbers::pi * c / cols;
    const Point2 inner = pupil.boundary_at(theta);
    const Point2 outer = iris.boundary_at(theta);
    for (int r = 0; r < rows; ++r) {
      const double t = (r + 0.5) / rows;
      const double x = inner.x + t * (outer.x - inner.x);
      const double y = inner.y + t * (outer.y - inner.y);
      const bool inside = x >= 0.0 && y >= 0.0 && x <= max_x && y <= max_y;
      bool valid = inside;
      if (inside && has_occlusion) {
        const int px = static_cast<int>(std::lround(x));
        const int py = static_cast<int>(std::lround(y));
        valid = occlusion.at(px, py) == 0;
      }
      out.texture.at(c, r) = inside ? static_cast<float>(sample_bilinear_zero(image, x, y) / 255.0) : 0.0f;
      out.validity.at(c, r) = valid ? 1 : 0;
    }
  }
  return out;
}

ImageF resize_bilinear(const ImageF& src, int width, int height) {
  if (src.empty() || width <= 0 || height <= 0) throw Error(ErrorKind::ShapeMismatch, "resize of empty raster");
  ImageF out(width, height);
  const double sx = static_cast<double>(src.width()) / width;
  const double sy = static_cast<double>(src.height()) / height;
  for (int j = 0; j < height; ++j) {
    const double y = std::clamp((j + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
    const int y0 = static_cast<int>(y);
    const int y1 = std::min(y0 + 1, src.height() - 1);
    const double ty = y - y0;
    for (int i = 0; i < width; ++i) {
      const double x = std::clamp((i + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
      const int x0 = static_cast<int>(x);
      const int x1 = std::min(x0 + 1, src.width() - 1);
      const double tx = x - x0;
      const double top = src.at(x0, y0) * (1.0 - tx) + src.at(x1, y0) * tx;
      const double bottom = src.at(x0, y1) * (1.0 - tx) + src.at(x1, y1) * tx;
      out.at(i, j) = static_cast<float>(top * (1.0 - ty) + bottom * ty);
    }
  }
  return out;
}

}  // namespace irisbench
