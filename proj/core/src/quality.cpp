#include "irisbench/quality.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "irisbench/error.hpp"
#include "irisbench/parallel.hpp"

namespace irisbench {

std::string_view to_string(QualityDim dim) noexcept {
  switch (dim) {
    case QualityDim::Eyelid: return "eyelid";
    case QualityDim::Eyelash: return "eyelash";
    case QualityDim::PupilRatio: return "pupil_ratio";
    case QualityDim::GazeDev: return "gaze_dev";
    case QualityDim::Reflection: return "reflection";
  }
  return "?";
}

std::string QualityFlags::to_string() const {
  std::string out;
  for (int d = 0; d < kQualityDims; ++d) {
    if (!has(static_cast<QualityDim>(d))) continue;
    if (!out.empty()) out += '+';
    out += irisbench::to_string(static_cast<QualityDim>(d));
  }
  return out.empty() ? "none" : out;
}

bool QualityThresholds::valid() const noexcept {
  for (double v : {eyelid, eyelash, pupil_ratio, gaze_dev, reflection})
    if (!(v > 0.0 && v < 1.0)) return false;
  return true;
}

double QualityThresholds::get(QualityDim dim) const noexcept {
  switch (dim) {
    case QualityDim::Eyelid: return eyelid;
    case QualityDim::Eyelash: return eyelash;
    case QualityDim::PupilRatio: return pupil_ratio;
    case QualityDim::GazeDev: return gaze_dev;
    case QualityDim::Reflection: return reflection;
  }
  return 0.0;
}

void QualityThresholds::set(QualityDim dim, double value) noexcept {
  switch (dim) {
    case QualityDim::Eyelid: eyelid = value; break;
    case QualityDim::Eyelash: eyelash = value; break;
    case QualityDim::PupilRatio: pupil_ratio = value; break;
    case QualityDim::GazeDev: gaze_dev = value; break;
    case QualityDim::Reflection: reflection = value; break;
  }
}

QualityThresholds QualityThresholds::parse(std::string_view text) {
  QualityThresholds t;
  std::size_t line_no = 0;
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Parse, "thresholds line " + std::to_string(line_no) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto val = trim(line.substr(eq + 1));
    double v = 0.0;
    auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || p != val.data() + val.size())
      throw Error(ErrorKind::Parse, "thresholds line " + std::to_string(line_no) + ": bad number");
    bool known = false;
    for (int d = 0; d < kQualityDims; ++d) {
      if (key == to_string(static_cast<QualityDim>(d))) {
        t.set(static_cast<QualityDim>(d), v);
        known = true;
      }
    }
    if (!known)
      throw Error(ErrorKind::Parse, "thresholds line " + std::to_string(line_no) + ": unknown key '" +
                                        std::string(key) + "'");
  }
  if (!t.valid()) throw Error(ErrorKind::InvariantViolation, "quality thresholds must lie in (0, 1)");
  return t;
}

CleanResult clean(std::vector<SampleRecord> records) {
  CleanResult result;
  result.kept.reserve(records.size());
  for (auto& r : records) {
    if (r.annotation && r.annotation->valid()) {
      result.kept.push_back(std::move(r));
    } else {
      ++result.dropped;
    }
  }
  return result;
}

double gaze_deviation(int gaze_point, const GazeGrid& grid) noexcept {
  constexpr double kDeg = std::numbers::pi / 180.0;
  auto angle = [&](int g) {
    const int row = (g - 1) / 3;
    const int col = (g - 1) % 3;
    const double yaw = (col - 1) * grid.yaw_deg * kDeg;
    const double pitch = (1 - row) * grid.pitch_deg * kDeg;
    // Great-circle angle between the gaze direction and straight ahead.
    return std::acos(std::clamp(std::cos(yaw) * std::cos(pitch), -1.0, 1.0));
  };
  const double corner = angle(1);
  if (corner <= 0.0) return 0.0;
  return std::clamp(angle(gaze_point) / corner, 0.0, 1.0);
}

QualityScores score_quality(const SampleRecord& record, const GazeGrid& grid) {
  if (!record.annotation)
    throw Error(ErrorKind::MissingAnnotation, "sample '" + record.sample_id + "' has no annotation");
  const Annotation& a = *record.annotation;
  const EllipseTest iris(a.iris_ellipse);

  std::uint64_t iris_pixels = 0;
  const BBox box = a.iris_ellipse.bounding_box();
  const int x0 = std::max(0, static_cast<int>(std::floor(box.x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(box.y)));
  const int x1 = std::min(a.image_width - 1, static_cast<int>(std::ceil(box.x + box.w)));
  const int y1 = std::min(a.image_height - 1, static_cast<int>(std::ceil(box.y + box.h)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (iris.contains(x, y)) ++iris_pixels;

  std::uint64_t lid = 0, lash = 0, glare = 0;
  a.occlusion_mask.mask.for_each_set([&](int x, int y, std::uint8_t label) {
    if (!iris.contains(x, y)) return;
    if (label == static_cast<std::uint8_t>(OcclusionLabel::Eyelash)) {
      ++lash;
    } else {
      ++lid;
    }
  });
  a.reflection_mask.mask.for_each_set([&](int x, int y, std::uint8_t) {
    if (iris.contains(x, y)) ++glare;
  });

  auto frac = [&](std::uint64_t n) {
    return iris_pixels == 0 ? 0.0 : std::clamp(static_cast<double>(n) / static_cast<double>(iris_pixels), 0.0, 1.0);
  };
  QualityScores q;
  q.eyelid_occ = frac(lid);
  q.eyelash_occ = frac(lash);
  q.pupil_ratio = std::clamp(a.pupil_ellipse.a / a.iris_ellipse.a, 0.0, 1.0);
  q.gaze_dev = gaze_deviation(record.gaze_point, grid);
  q.reflection = frac(glare);
  return q;
}

CategoryResult categorize(const QualityScores& scores, const QualityThresholds& thresholds) noexcept {
  CategoryResult out;
  const double values[kQualityDims] = {scores.eyelid_occ, scores.eyelash_occ, scores.pupil_ratio, scores.gaze_dev,
                                       scores.reflection};
  for (int d = 0; d < kQualityDims; ++d) {
    if (values[d] > thresholds.get(static_cast<QualityDim>(d))) out.exceeded.set(static_cast<QualityDim>(d));
  }
  out.category = out.exceeded.empty() ? Category::Standard : Category::Challenging;
  return out;
}

void assess_quality(std::span<SampleRecord> records, const QualityThresholds& thresholds, const GazeGrid& grid,
                    unsigned workers) {
  parallel_for(records.size(), workers, [&](std::size_t i) {
    auto& r = records[i];
    r.quality = score_quality(r, grid);
    r.category = categorize(*r.quality, thresholds).category;
  });
}

}  // namespace irisbench
