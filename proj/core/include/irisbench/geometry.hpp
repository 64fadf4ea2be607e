#pragma once

#include <compare>

namespace irisbench {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

/// Axis-aligned box in pixel coordinates; (x, y) is the top-left corner.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool valid() const noexcept { return w > 0.0 && h > 0.0; }
  Point2 center() const noexcept { return {x + w / 2.0, y + h / 2.0}; }
  bool operator==(const BBox&) const = default;
};

/// Ellipse with semi-major axis `a` along direction `phi` (radians, [0, pi)).
struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double a = 0.0;
  double b = 0.0;
  double phi = 0.0;

  /// a >= b > 0 and phi in [0, pi).
  bool valid() const noexcept;

  bool contains(double x, double y) const noexcept;

  /// Boundary point hit by the ray from the center at angle theta.
  /// Angles (theta and phi) are measured from +x, counterclockwise as the
  /// image is displayed; with y pointing down the ray direction is
  /// (cos theta, -sin theta).
  Point2 boundary_at(double theta) const noexcept;

  /// Tight axis-aligned bounding box.
  BBox bounding_box() const noexcept;

  double area() const noexcept;

  bool operator==(const Ellipse&) const = default;
};

/// Ellipse::contains with the rotation terms computed once, for pixel loops.
class EllipseTest {
 public:
  explicit EllipseTest(const Ellipse& e) noexcept;
  bool contains(double x, double y) const noexcept {
    const double dx = x - cx_;
    const double dy = cy_ - y;
    const double u = (dx * c_ + dy * s_) / a_;
    const double v = (-dx * s_ + dy * c_) / b_;
    return u * u + v * v <= 1.0;
  }

 private:
  double cx_, cy_, a_, b_, c_, s_;
};

/// Annotation nesting rule: center distance + inner.a < outer.a.
bool nested_inside(const Ellipse& inner, const Ellipse& outer) noexcept;

/// Wraps an angle into [0, pi).
double wrap_half_turn(double angle) noexcept;

}  // namespace irisbench
