#include "irisbench/geometry.hpp"

#include <cmath>
#include <numbers>

namespace irisbench {

bool Ellipse::valid() const noexcept {
  return std::isfinite(cx) && std::isfinite(cy) && b > 0.0 && a >= b && phi >= 0.0 && phi < std::numbers::pi;
}

EllipseTest::EllipseTest(const Ellipse& e) noexcept
    : cx_(e.cx), cy_(e.cy), a_(e.a), b_(e.b), c_(std::cos(e.phi)), s_(std::sin(e.phi)) {}

bool Ellipse::contains(double x, double y) const noexcept { return EllipseTest(*this).contains(x, y); }

Point2 Ellipse::boundary_at(double theta) const noexcept {
  const double local = theta - phi;
  const double bc = b * std::cos(local);
  const double as = a * std::sin(local);
  const double r = a * b / std::sqrt(bc * bc + as * as);
  return {cx + r * std::cos(theta), cy - r * std::sin(theta)};
}

BBox Ellipse::bounding_box() const noexcept {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double ex = std::sqrt(a * a * c * c + b * b * s * s);
  const double ey = std::sqrt(a * a * s * s + b * b * c * c);
  return {cx - ex, cy - ey, 2.0 * ex, 2.0 * ey};
}

double Ellipse::area() const noexcept { return std::numbers::pi * a * b; }

bool nested_inside(const Ellipse& inner, const Ellipse& outer) noexcept {
  const double d = std::hypot(inner.cx - outer.cx, inner.cy - outer.cy);
  return d + inner.a < outer.a;
}

double wrap_half_turn(double angle) noexcept {
  double r = std::fmod(angle, std::numbers::pi);
  if (r < 0.0) r += std::numbers::pi;
  if (r >= std::numbers::pi) r = 0.0;
  return r;
}

}  // namespace irisbench
