#include "irisbench/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <list>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "irisbench/error.hpp"
#include "irisbench/parallel.hpp"
#include "irisbench/random.hpp"

namespace irisbench {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kPupilLevel = 14.0;
constexpr double kLashLevel = 32.0;
constexpr double kEyeballRadiusFactor = 1.5;  // eyeball radius in iris radii

struct Glint {
  Point2 center;
  double radius = 0.0;
};

struct Scene {
  Ellipse iris;
  Ellipse pupil;
  Point2 eye;
  double half_width = 0.0;
  double corner_y = 0.0;
  double top_y = 0.0;
  double bottom_y = 0.0;
  double pupil_ratio = 0.5;
  double radial_gamma = 1.0;
  double gain = 1.0;
  std::vector<std::uint32_t> lash_pixels;  // sorted y * width + x
  std::vector<Glint> glints;
};

double upper_lid_y(const Scene& s, double x) noexcept {
  const double t = (x - s.eye.x) / s.half_width;
  return s.top_y + (s.corner_y - s.top_y) * t * t;
}

double lower_lid_y(const Scene& s, double x) noexcept {
  const double t = (x - s.eye.x) / s.half_width;
  return s.bottom_y + (s.corner_y - s.bottom_y) * t * t;
}

bool in_opening(const Scene& s, double x, double y) noexcept {
  if (std::abs(x - s.eye.x) >= s.half_width) return false;
  return y > upper_lid_y(s, x) && y < lower_lid_y(s, x);
}

void add_stroke(std::vector<std::uint32_t>& pixels, Point2 start, double angle, double length) {
  const double dx = std::sin(angle);
  const double dy = std::cos(angle);
  for (double l = 0.0; l <= length; l += 0.5) {
    const int px = static_cast<int>(std::lround(start.x + dx * l));
    const int py = static_cast<int>(std::lround(start.y + dy * l));
    for (int ox = 0; ox <= 1; ++ox) {
      const int x = px + ox;
      if (x >= 0 && x < kImageSize && py >= 0 && py < kImageSize)
        pixels.push_back(static_cast<std::uint32_t>(py * kImageSize + x));
    }
  }
}

Scene build_scene(const SubjectModel& subject, const CaptureParams& params, const SynthConfig& config) {
  Scene s;
  Rng frame(derive_seed(params.noise_seed, "frame"));
  const double radius = subject.iris_radius;

  s.eye = {kImageSize / 2.0 + subject.eye_offset.x + frame.uniform(-2.0, 2.0),
           kImageSize / 2.0 + subject.eye_offset.y + frame.uniform(-2.0, 2.0)};
  if (params.defect == CleaningDefect::OutOfFrame) s.eye.x += (frame.bernoulli(0.5) ? 1.0 : -1.0) * 380.0;

  const auto [yaw, pitch] = gaze_angles_deg(params.gaze_point, config);
  const double eyeball = kEyeballRadiusFactor * radius;
  const Point2 center{s.eye.x + eyeball * std::sin(yaw * kDeg), s.eye.y - eyeball * std::sin(pitch * kDeg)};

  // Foreshortening axis combines the camera tilt (vertical) with the gaze
  // offset; the major axis is perpendicular to it.
  const double fx = std::sin(yaw * kDeg);
  const double fy = std::sin(config.camera_tilt_deg * kDeg) + std::sin(pitch * kDeg);
  const double phi = (fx == 0.0 && fy == 0.0) ? 0.0 : wrap_half_turn(std::atan2(fy, fx) + kPi / 2.0);
  const double ratio = off_axis_ratio(params.gaze_point, config);

  s.iris = {center.x, center.y, radius, radius * ratio, phi};
  s.pupil_ratio = pupil_ratio_for_level(params.brightness_level);
  s.pupil = {center.x, center.y, radius * s.pupil_ratio, radius * ratio * s.pupil_ratio, phi};
  s.radial_gamma = std::exp(0.8 * (s.pupil_ratio - 0.475));
  s.gain = 0.55 + 0.06 * params.brightness_level;

  // Lids follow vertical gaze partially.
  const double lift = center.y - s.eye.y;
  s.half_width = subject.lid_half_width * radius;
  s.corner_y = s.eye.y;
  s.top_y = s.eye.y - (subject.aperture_upper + frame.uniform(-0.04, 0.04)) * radius + 0.6 * lift;
  s.bottom_y = s.eye.y + (subject.aperture_lower + frame.uniform(-0.04, 0.04)) * radius + 0.4 * lift;
  const double droop_amount = frame.uniform(0.40, 0.70);
  if (params.droop) s.top_y += droop_amount * radius;
  if (params.defect == CleaningDefect::ClosedEye) {
    s.top_y = s.corner_y + 0.1 * radius;
    s.bottom_y = s.top_y;
  }

  const int lash_count = params.heavy_lash ? 150 : 14;
  for (int i = 0; i < lash_count; ++i) {
    const double x0 = center.x + frame.uniform(-1.1, 1.1) * radius;
    const double side = x0 < s.eye.x ? -1.0 : 1.0;
    const double angle = frame.uniform(-0.45, 0.45) + 0.2 * side;
    const double length = params.heavy_lash ? frame.uniform(0.30, 0.60) * radius : frame.uniform(0.08, 0.22) * radius;
    if (std::abs(x0 - s.eye.x) >= s.half_width) continue;
    add_stroke(s.lash_pixels, {x0, upper_lid_y(s, x0)}, angle, length);
  }
  std::sort(s.lash_pixels.begin(), s.lash_pixels.end());
  s.lash_pixels.erase(std::unique(s.lash_pixels.begin(), s.lash_pixels.end()), s.lash_pixels.end());

  {
    const double r = frame.uniform(2.5, 4.5);
    const double ang = frame.uniform(0.0, 2.0 * kPi);
    const double off = frame.uniform(0.2, 0.9) * s.pupil.a;
    s.glints.push_back({{center.x + off * std::cos(ang), center.y - off * std::sin(ang)}, r});
  }
  const double glare_r = frame.uniform(0.32, 0.45) * radius;
  const double glare_ang = frame.uniform(0.0, 2.0 * kPi);
  const double glare_off = frame.uniform(0.0, 0.5) * radius;
  if (params.glare)
    s.glints.push_back({{center.x + glare_off * std::cos(glare_ang), center.y - glare_off * std::sin(glare_ang)},
                        glare_r});
  return s;
}

bool in_glint(const Scene& s, double x, double y) noexcept {
  for (const auto& g : s.glints) {
    const double dx = x - g.center.x;
    const double dy = y - g.center.y;
    if (dx * dx + dy * dy <= g.radius * g.radius) return true;
  }
  return false;
}

struct PixelWindow {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open, clipped to the image
  bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
};

PixelWindow clip_box(const BBox& box) {
  PixelWindow w;
  w.x0 = std::clamp(static_cast<int>(std::floor(box.x)), 0, kImageSize);
  w.y0 = std::clamp(static_cast<int>(std::floor(box.y)), 0, kImageSize);
  w.x1 = std::clamp(static_cast<int>(std::ceil(box.x + box.w)) + 1, 0, kImageSize);
  w.y1 = std::clamp(static_cast<int>(std::ceil(box.y + box.h)) + 1, 0, kImageSize);
  return w;
}

Annotation annotate_scene(const Scene& s) {
  Annotation a;
  a.image_width = kImageSize;
  a.image_height = kImageSize;
  a.iris_ellipse = s.iris;
  a.pupil_ellipse = s.pupil;
  a.iris_bbox = s.iris.bounding_box();
  const double top = std::min(s.top_y, s.corner_y);
  const double bottom = std::max(s.bottom_y, s.corner_y + 1.0);
  a.ocular_bbox = {s.eye.x - s.half_width, top, 2.0 * s.half_width, bottom - top};

  const PixelWindow iw = clip_box(a.iris_bbox);
  if (iw.empty()) {
    a.occlusion_mask.mask = RleMask(kImageSize, kImageSize);
  } else {
    Image8 patch(iw.x1 - iw.x0, iw.y1 - iw.y0);
    Image8 lashes(patch.width(), patch.height());
    for (std::uint32_t p : s.lash_pixels) {
      const int x = static_cast<int>(p % kImageSize) - iw.x0;
      const int y = static_cast<int>(p / kImageSize) - iw.y0;
      if (lashes.contains(x, y)) lashes.at(x, y) = 1;
    }
    const EllipseTest iris(s.iris);
    for (int y = iw.y0; y < iw.y1; ++y) {
      for (int x = iw.x0; x < iw.x1; ++x) {
        if (!iris.contains(x, y)) continue;
        std::uint8_t label = 0;
        if (!in_opening(s, x, y)) {
          label = static_cast<std::uint8_t>(OcclusionLabel::Eyelid);
        } else if (lashes.at(x - iw.x0, y - iw.y0)) {
          label = static_cast<std::uint8_t>(OcclusionLabel::Eyelash);
        }
        patch.at(x - iw.x0, y - iw.y0) = label;
      }
    }
    a.occlusion_mask.mask = RleMask::from_patch(kImageSize, kImageSize, iw.x0, iw.y0, patch);
  }

  BBox glint_box{};
  bool any = false;
  for (const auto& g : s.glints) {
    const BBox b{g.center.x - g.radius, g.center.y - g.radius, 2 * g.radius, 2 * g.radius};
    if (!any) {
      glint_box = b;
      any = true;
    } else {
      const double x0 = std::min(glint_box.x, b.x), y0 = std::min(glint_box.y, b.y);
      const double x1 = std::max(glint_box.x + glint_box.w, b.x + b.w);
      const double y1 = std::max(glint_box.y + glint_box.h, b.y + b.h);
      glint_box = {x0, y0, x1 - x0, y1 - y0};
    }
  }
  const PixelWindow gw = any ? clip_box(glint_box) : PixelWindow{};
  if (gw.empty()) {
    a.reflection_mask.mask = RleMask(kImageSize, kImageSize);
  } else {
    Image8 patch(gw.x1 - gw.x0, gw.y1 - gw.y0);
    for (int y = gw.y0; y < gw.y1; ++y)
      for (int x = gw.x0; x < gw.x1; ++x)
        if (in_glint(s, x, y)) patch.at(x - gw.x0, y - gw.y0) = 1;
    a.reflection_mask.mask = RleMask::from_patch(kImageSize, kImageSize, gw.x0, gw.y0, patch);
  }
  return a;
}

// Approximately Gaussian unit-variance noise from one 64-bit hash
// (Irwin-Hall sum of four 16-bit uniforms).
double hashed_noise(std::uint64_t seed, std::uint64_t index) noexcept {
  const std::uint64_t h = splitmix64(seed ^ (index * 0xd1342543de82ef95ULL));
  const double sum = static_cast<double>(h & 0xffff) + static_cast<double>((h >> 16) & 0xffff) +
                     static_cast<double>((h >> 32) & 0xffff) + static_cast<double>(h >> 48);
  return (sum / 65536.0 - 2.0) * std::numbers::sqrt3;
}

Image8 render_scene(const Scene& s, const SubjectModel& subject, const CaptureParams& params,
                    const SynthConfig& config) {
  const auto texture = subject.texture(params.eye);
  const int eye_idx = params.eye == Eye::Left ? 0 : 1;
  const double iris_level = subject.iris_level[eye_idx];
  const double contrast = subject.iris_contrast[eye_idx];
  const double pigment = subject.pigment_contrast[eye_idx];
  const double c = std::cos(s.iris.phi);
  const double sn = std::sin(s.iris.phi);
  const double rho = s.pupil_ratio;
  const std::uint64_t noise_seed = derive_seed(params.noise_seed, "sensor");

  Image8 image(kImageSize, kImageSize);
  for (int y = 0; y < kImageSize; ++y) {
    auto row = image.row(y);
    const double skin = subject.skin_level * (1.0 + 0.06 * (y - s.eye.y) / kImageSize);
    for (int x = 0; x < kImageSize; ++x) {
      double v = skin;
      if (in_opening(s, x, y)) {
        const double dx = x - s.iris.cx;
        const double dy = s.iris.cy - y;
        const double un = (dx * c + dy * sn) / s.iris.a;
        const double vn = (-dx * sn + dy * c) / s.iris.b;
        const double r2 = un * un + vn * vn;
        if (r2 <= 1.0) {
          const double r = std::sqrt(r2);
          if (r <= rho) {
            v = kPupilLevel;
          } else {
            const double t = (r - rho) / (1.0 - rho);
            const double tissue = std::pow(t, s.radial_gamma);
            const double angle = std::atan2(vn, un) + s.iris.phi;
            const double limbus = t > 0.85 ? 1.0 - 0.25 * (t - 0.85) / 0.15 : 1.0;
            v = (iris_level + contrast * texture->sample(tissue, angle) + pigment * texture->pigment(tissue, angle)) *
                limbus;
          }
        } else {
          const double corner = std::abs(x - s.eye.x) / s.half_width;
          v = subject.sclera_level * (1.0 - 0.25 * corner * corner);
        }
      } else if (std::abs(x - s.eye.x) < s.half_width) {
        const double yu = upper_lid_y(s, x);
        if (y <= yu && y > yu - 3.0) v = 0.45 * skin;  // lid margin
      }
      v *= s.gain;
      v += config.noise_sigma * hashed_noise(noise_seed, static_cast<std::uint64_t>(y) * kImageSize + x);
      row[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  for (std::uint32_t p : s.lash_pixels) {
    const double v = kLashLevel * s.gain + config.noise_sigma * hashed_noise(noise_seed, p);
    image.pixels()[p] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  for (const auto& g : s.glints) {
    const BBox b{g.center.x - g.radius, g.center.y - g.radius, 2 * g.radius, 2 * g.radius};
    const PixelWindow w = clip_box(b);
    for (int y = w.y0; y < w.y1; ++y)
      for (int x = w.x0; x < w.x1; ++x)
        if (in_glint(s, x, y)) image.at(x, y) = 255;
  }

  if (params.defect == CleaningDefect::MotionBlur) {
    constexpr int kHalf = 12;
    Image8 blurred(kImageSize, kImageSize);
    for (int y = 0; y < kImageSize; ++y) {
      auto src = image.row(y);
      auto dst = blurred.row(y);
      for (int x = 0; x < kImageSize; ++x) {
        int sum = 0, n = 0;
        for (int k = std::max(0, x - kHalf); k <= std::min(kImageSize - 1, x + kHalf); ++k) {
          sum += src[static_cast<std::size_t>(k)];
          ++n;
        }
        dst[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>((sum + n / 2) / n);
      }
    }
    image = std::move(blurred);
  }
  return image;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view defect_name(CleaningDefect d) noexcept {
  switch (d) {
    case CleaningDefect::None: return "none";
    case CleaningDefect::ClosedEye: return "closed";
    case CleaningDefect::OutOfFrame: return "out_of_frame";
    case CleaningDefect::MotionBlur: return "motion_blur";
  }
  return "none";
}

std::string sample_name(const std::string& subject, Eye eye, int gaze, int level, int frame) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "_%s_g%d_b%02d_f%d", eye == Eye::Left ? "L" : "R", gaze, level, frame);
  return subject + buf;
}

}  // namespace

namespace {

struct TextureComponent {
  double amplitude, radial_freq, radial_phase, angular_phase;
  int angular_freq;
};

// Tabulates sum_k radial_k(s) * angular_k(psi), scaled to zero mean and
// unit variance.
std::vector<float> tabulate(const std::vector<TextureComponent>& comps) {
  constexpr int rows = IrisTexture::kRadialSamples + 1;
  constexpr int cols = IrisTexture::kAngularSamples;
  const std::size_t k_n = comps.size();
  std::vector<double> radial(static_cast<std::size_t>(rows) * k_n);
  std::vector<double> angular(static_cast<std::size_t>(cols) * k_n);
  for (int j = 0; j < rows; ++j) {
    const double s = static_cast<double>(j) / IrisTexture::kRadialSamples;
    for (std::size_t k = 0; k < k_n; ++k)
      radial[j * k_n + k] = comps[k].amplitude * std::cos(2.0 * kPi * comps[k].radial_freq * s + comps[k].radial_phase);
  }
  for (int i = 0; i < cols; ++i) {
    const double psi = 2.0 * kPi * i / cols;
    for (std::size_t k = 0; k < k_n; ++k)
      angular[i * k_n + k] = std::cos(comps[k].angular_freq * psi + comps[k].angular_phase);
  }
  std::vector<double> values(static_cast<std::size_t>(rows) * cols);
  double sum = 0.0, sum2 = 0.0;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < k_n; ++k) v += radial[j * k_n + k] * angular[i * k_n + k];
      values[static_cast<std::size_t>(j) * cols + i] = v;
      sum += v;
      sum2 += v * v;
    }
  }
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  const double sd = std::sqrt(std::max(sum2 / n - mean * mean, 1e-12));
  std::vector<float> table(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) table[i] = static_cast<float>((values[i] - mean) / sd);
  return table;
}

}  // namespace

IrisTexture IrisTexture::generate(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "texture"));
  std::vector<TextureComponent> comps(48);
  for (auto& c : comps) {
    c.angular_freq = rng.uniform_int(8, 32);  // 2..8 cycles per quadrant
    c.radial_freq = rng.uniform(0.4, 2.5);
    c.amplitude = rng.uniform(0.5, 1.0) / std::sqrt(c.angular_freq / 8.0);
    c.radial_phase = rng.uniform(0.0, 2.0 * kPi);
    c.angular_phase = rng.uniform(0.0, 2.0 * kPi);
  }
  Rng prng(derive_seed(seed, "pigment"));
  std::vector<TextureComponent> coarse(8);
  for (auto& c : coarse) {
    c.angular_freq = prng.uniform_int(1, 4);
    c.radial_freq = prng.uniform(0.2, 1.0);
    c.amplitude = prng.uniform(0.5, 1.0);
    c.radial_phase = prng.uniform(0.0, 2.0 * kPi);
    c.angular_phase = prng.uniform(0.0, 2.0 * kPi);
  }
  IrisTexture tex;
  tex.table_ = tabulate(comps);
  tex.pigment_ = tabulate(coarse);
  return tex;
}

double IrisTexture::lookup(const std::vector<float>& table, double radial, double angle) noexcept {
  const double fr = std::clamp(radial, 0.0, 1.0) * kRadialSamples;
  int j0 = static_cast<int>(fr);
  if (j0 >= kRadialSamples) j0 = kRadialSamples - 1;
  const double tr = fr - j0;
  double fa = angle / (2.0 * kPi) * kAngularSamples;
  fa -= std::floor(fa / kAngularSamples) * kAngularSamples;
  int i0 = static_cast<int>(fa);
  if (i0 >= kAngularSamples) i0 = 0;
  const double ta = fa - i0;
  const int i1 = (i0 + 1) % kAngularSamples;
  const float* r0 = table.data() + static_cast<std::size_t>(j0) * kAngularSamples;
  const float* r1 = r0 + kAngularSamples;
  const double top = r0[i0] * (1.0 - ta) + r0[i1] * ta;
  const double bottom = r1[i0] * (1.0 - ta) + r1[i1] * ta;
  return top * (1.0 - tr) + bottom * tr;
}

SubjectModel SubjectModel::from_seed(std::string subject_id, std::uint64_t identity_seed) {
  SubjectModel m;
  m.subject_id = std::move(subject_id);
  m.identity_seed = identity_seed;
  Rng rng(derive_seed(identity_seed, "subject"));
  m.iris_radius = rng.uniform(88.0, 104.0);
  m.eye_offset = {rng.uniform(-14.0, 14.0), rng.uniform(-10.0, 10.0)};
  m.skin_level = rng.uniform(125.0, 175.0);
  m.sclera_level = rng.uniform(190.0, 222.0);
  const double iris_base = rng.uniform(60.0, 125.0);
  for (int e = 0; e < 2; ++e) {
    m.iris_level[e] = iris_base + rng.uniform(-8.0, 8.0);
    m.iris_contrast[e] = rng.uniform(24.0, 34.0);
  }
  m.aperture_upper = rng.uniform(0.80, 0.95);
  m.aperture_lower = rng.uniform(0.90, 1.05);
  m.lid_half_width = rng.uniform(1.9, 2.3);
  for (int e = 0; e < 2; ++e) m.pigment_contrast[e] = rng.uniform(18.0, 30.0);
  return m;
}

std::uint64_t SubjectModel::texture_seed(Eye eye) const noexcept {
  return derive_seed(identity_seed, eye == Eye::Left ? "eye-L" : "eye-R");
}

std::shared_ptr<const IrisTexture> SubjectModel::texture(Eye eye) const {
  // Small LRU cache; textures are pure functions of their seed.
  static std::mutex mutex;
  static std::list<std::pair<std::uint64_t, std::shared_ptr<const IrisTexture>>> lru;
  constexpr std::size_t kCapacity = 64;
  const std::uint64_t seed = texture_seed(eye);
  {
    std::lock_guard lock(mutex);
    for (auto it = lru.begin(); it != lru.end(); ++it) {
      if (it->first == seed) {
        lru.splice(lru.begin(), lru, it);
        return lru.front().second;
      }
    }
  }
  auto tex = std::make_shared<const IrisTexture>(IrisTexture::generate(seed));
  std::lock_guard lock(mutex);
  lru.emplace_front(seed, tex);
  if (lru.size() > kCapacity) lru.pop_back();
  return tex;
}

double pupil_ratio_for_level(int level) noexcept { return 0.65 - 0.035 * level; }

std::pair<double, double> gaze_angles_deg(int gaze_point, const SynthConfig& config) noexcept {
  const int row = (gaze_point - 1) / 3;
  const int col = (gaze_point - 1) % 3;
  return {(col - 1) * config.gaze_yaw_deg, (1 - row) * config.gaze_pitch_deg};
}

double off_axis_ratio(int gaze_point, const SynthConfig& config) noexcept {
  const auto [yaw, pitch] = gaze_angles_deg(gaze_point, config);
  return std::cos(config.camera_tilt_deg * kDeg) * std::cos(yaw * kDeg) * std::cos(pitch * kDeg);
}

Annotation annotate_ocular(const SubjectModel& subject, const CaptureParams& params, const SynthConfig& config) {
  return annotate_scene(build_scene(subject, params, config));
}

std::pair<Image8, Annotation> render_ocular(const SubjectModel& subject, const CaptureParams& params,
                                            const SynthConfig& config) {
  const Scene scene = build_scene(subject, params, config);
  return {render_scene(scene, subject, params, config), annotate_scene(scene)};
}

std::string SynthRef::format() const {
  std::string q;
  if (params.droop) q += "droop+";
  if (params.heavy_lash) q += "lash+";
  if (params.glare) q += "glare+";
  if (q.empty()) {
    q = "none";
  } else {
    q.pop_back();
  }
  return "synth:v1;id=" + hex64(identity_seed) + ";eye=" + std::string(to_string(params.eye)) +
         ";gaze=" + std::to_string(params.gaze_point) + ";level=" + std::to_string(params.brightness_level) +
         ";frame=" + std::to_string(params.frame_idx) + ";noise=" + hex64(params.noise_seed) + ";q=" + q +
         ";defect=" + std::string(defect_name(params.defect)) + ";tilt=" + real(config.camera_tilt_deg) +
         ";yaw=" + real(config.gaze_yaw_deg) + ";pitch=" + real(config.gaze_pitch_deg) +
         ";sigma=" + real(config.noise_sigma);
}

bool SynthRef::is_synth_ref(std::string_view text) noexcept { return text.starts_with("synth:"); }

std::optional<SynthRef> SynthRef::parse(std::string_view text) {
  if (!text.starts_with("synth:v1;")) return std::nullopt;
  text.remove_prefix(9);
  SynthRef ref;
  int seen = 0;
  auto parse_hex = [](std::string_view v, std::uint64_t& out) {
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out, 16);
    return ec == std::errc() && p == v.data() + v.size();
  };
  auto parse_int = [](std::string_view v, int& out) {
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    return ec == std::errc() && p == v.data() + v.size();
  };
  auto parse_real = [](std::string_view v, double& out) {
    std::string s(v);
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && !s.empty();
  };
  while (!text.empty()) {
    const auto semi = text.find(';');
    const std::string_view item = text.substr(0, semi);
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) return std::nullopt;
    const std::string_view key = item.substr(0, eq);
    const std::string_view val = item.substr(eq + 1);
    bool ok = true;
    if (key == "id") {
      ok = parse_hex(val, ref.identity_seed);
    } else if (key == "eye") {
      auto e = parse_eye(val);
      ok = e.has_value();
      if (ok) ref.params.eye = *e;
    } else if (key == "gaze") {
      ok = parse_int(val, ref.params.gaze_point) && ref.params.gaze_point >= 1 && ref.params.gaze_point <= 9;
    } else if (key == "level") {
      ok = parse_int(val, ref.params.brightness_level) && ref.params.brightness_level >= 0 &&
           ref.params.brightness_level <= 10;
    } else if (key == "frame") {
      ok = parse_int(val, ref.params.frame_idx) && ref.params.frame_idx >= 0 && ref.params.frame_idx <= 4;
    } else if (key == "noise") {
      ok = parse_hex(val, ref.params.noise_seed);
    } else if (key == "q") {
      if (val != "none") {
        std::string_view rest = val;
        while (!rest.empty() && ok) {
          const auto plus = rest.find('+');
          const auto flag = rest.substr(0, plus);
          rest = plus == std::string_view::npos ? std::string_view{} : rest.substr(plus + 1);
          if (flag == "droop") {
            ref.params.droop = true;
          } else if (flag == "lash") {
            ref.params.heavy_lash = true;
          } else if (flag == "glare") {
            ref.params.glare = true;
          } else {
            ok = false;
          }
        }
      }
    } else if (key == "defect") {
      if (val == "none") {
        ref.params.defect = CleaningDefect::None;
      } else if (val == "closed") {
        ref.params.defect = CleaningDefect::ClosedEye;
      } else if (val == "out_of_frame") {
        ref.params.defect = CleaningDefect::OutOfFrame;
      } else if (val == "motion_blur") {
        ref.params.defect = CleaningDefect::MotionBlur;
      } else {
        ok = false;
      }
    } else if (key == "tilt") {
      ok = parse_real(val, ref.config.camera_tilt_deg);
    } else if (key == "yaw") {
      ok = parse_real(val, ref.config.gaze_yaw_deg);
    } else if (key == "pitch") {
      ok = parse_real(val, ref.config.gaze_pitch_deg);
    } else if (key == "sigma") {
      ok = parse_real(val, ref.config.noise_sigma);
    } else {
      ok = false;
    }
    if (!ok) return std::nullopt;
    ++seen;
  }
  if (seen != 12) return std::nullopt;
  return ref;
}

Image8 render_synth_ref(const SynthRef& ref) {
  const SubjectModel subject = SubjectModel::from_seed({}, ref.identity_seed);
  return render_ocular(subject, ref.params, ref.config).first;
}

std::vector<SampleRecord> generate_session(const SubjectModel& subject, const SessionOptions& options) {
  std::vector<SampleRecord> records;
  records.reserve(2 * kGazePoints * kBrightnessLevels * kFramesPerLevel);
  for (Eye eye : {Eye::Left, Eye::Right}) {
    for (int gaze = 1; gaze <= kGazePoints; ++gaze) {
      for (int level = 0; level < kBrightnessLevels; ++level) {
        for (int frame = 0; frame < kFramesPerLevel; ++frame) {
          SampleRecord r;
          r.sample_id = sample_name(subject.subject_id, eye, gaze, level, frame);
          r.subject_id = subject.subject_id;
          r.eye = eye;
          r.gaze_point = gaze;
          r.brightness_level = level;
          r.frame_idx = frame;

          CaptureParams p;
          p.eye = eye;
          p.gaze_point = gaze;
          p.brightness_level = level;
          p.frame_idx = frame;
          p.noise_seed = derive_seed(mix_seed(options.seed, fnv1a(r.sample_id)), "capture");
          Rng q(derive_seed(p.noise_seed, "quality"));
          p.droop = q.bernoulli(options.config.quality.droop);
          p.heavy_lash = q.bernoulli(options.config.quality.heavy_lash);
          p.glare = q.bernoulli(options.config.quality.glare);

          r.annotation = annotate_ocular(subject, p, options.config);
          r.image_ref = SynthRef{subject.identity_seed, p, options.config}.format();
          records.push_back(std::move(r));
        }
      }
    }
  }
  return records;
}

std::vector<SampleRecord> generate_corpus(int subject_count, const SessionOptions& options, unsigned workers) {
  std::vector<std::vector<SampleRecord>> sessions(static_cast<std::size_t>(std::max(subject_count, 0)));
  parallel_for(sessions.size(), workers, [&](std::size_t i) {
    char id[32];
    std::snprintf(id, sizeof id, "S%04zu", i);
    const auto seed = derive_seed(mix_seed(options.seed, i), "identity");
    sessions[i] = generate_session(SubjectModel::from_seed(id, seed), options);
  });
  std::vector<SampleRecord> all;
  for (auto& s : sessions) std::move(s.begin(), s.end(), std::back_inserter(all));
  return all;
}

std::vector<SampleRecord> inject_degradations(std::vector<SampleRecord> records, const CleaningProfile& profile,
                                              std::uint64_t seed) {
  for (auto& r : records) {
    Rng rng(derive_seed(mix_seed(seed, fnv1a(r.sample_id)), "cleaning"));
    const bool closed = rng.bernoulli(profile.closed_eye);
    const bool out = rng.bernoulli(profile.out_of_frame);
    const bool blur = rng.bernoulli(profile.motion_blur);
    CleaningDefect defect = CleaningDefect::None;
    if (closed) {
      defect = CleaningDefect::ClosedEye;
    } else if (out) {
      defect = CleaningDefect::OutOfFrame;
    } else if (blur) {
      defect = CleaningDefect::MotionBlur;
    }
    if (defect == CleaningDefect::None) continue;
    r.annotation.reset();
    if (auto ref = SynthRef::parse(r.image_ref)) {
      ref->params.defect = defect;
      r.image_ref = ref->format();
    }
  }
  return records;
}

void materialize_images(std::span<SampleRecord> records, const std::filesystem::path& out_dir,
                        const std::string& extension, unsigned workers) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + (out_dir / "images").string());
  parallel_for(records.size(), workers, [&](std::size_t i) {
    auto& r = records[i];
    const auto ref = SynthRef::parse(r.image_ref);
    if (!ref) return;
    const std::string rel = "images/" + r.sample_id + extension;
    write_image(render_synth_ref(*ref), out_dir / rel);
    r.image_ref = rel;
  });
}

}  // namespace irisbench
