#pragma once

// Reference implementations used to check the library. Written straight from
// the definitions, without sharing code with core/.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "irisbench/random.hpp"
#include "irisbench/raster.hpp"
#include "irisbench/records.hpp"
#include "irisbench/templates.hpp"

namespace oracle {

inline irisbench::IrisCode random_code(irisbench::Rng& rng, irisbench::CodeLayout layout, double valid = 0.85,
                                       irisbench::CodeKind kind = irisbench::CodeKind::Gabor) {
  irisbench::IrisCode c;
  c.kind = kind;
  c.layout = layout;
  c.bits = irisbench::BitVector(layout.bit_count());
  c.mask = irisbench::BitVector(layout.bit_count());
  for (std::size_t i = 0; i < layout.bit_count(); ++i) {
    c.bits.set(i, rng.bernoulli(0.5));
    c.mask.set(i, rng.bernoulli(valid));
  }
  return c;
}

// Bit of b rotated by s grid columns: column c reads column c - s.
inline std::size_t rotated_source(const irisbench::CodeLayout& L, std::size_t index, int s) {
  const std::size_t bpp = L.bits_per_position;
  const std::size_t row = index / (L.cols * bpp);
  const std::size_t rest = index % (L.cols * bpp);
  const long long col = static_cast<long long>(rest / bpp);
  const std::size_t k = rest % bpp;
  const long long cols = L.cols;
  const long long src_col = ((col - s) % cols + cols) % cols;
  return row * L.cols * bpp + static_cast<std::size_t>(src_col) * bpp + k;
}

struct NaiveScore {
  bool ok = false;  // false: every shift skipped
  double similarity = 0.0;
  int best_shift = 0;
  std::size_t valid_bits = 0;
};

inline NaiveScore naive_hamming(const irisbench::IrisCode& a, const irisbench::IrisCode& b, int max_shift,
                                double min_valid_fraction) {
  const std::size_t n = a.layout.bit_count();
  NaiveScore best;
  std::uint64_t best_diff = 0, best_joint = 0;
  for (int s = -max_shift; s <= max_shift; ++s) {
    std::uint64_t diff = 0, joint = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rotated_source(a.layout, i, s);
      if (a.mask.get(i) && b.mask.get(j)) {
        ++joint;
        if (a.bits.get(i) != b.bits.get(j)) ++diff;
      }
    }
    if (joint == 0 || static_cast<double>(joint) < min_valid_fraction * static_cast<double>(n)) continue;
    bool take = false;
    if (!best.ok) {
      take = true;
    } else {
      // Compare diff/joint exactly; ties go to smaller |s|, then negative.
      const auto lhs = static_cast<unsigned __int128>(diff) * best_joint;
      const auto rhs = static_cast<unsigned __int128>(best_diff) * joint;
      if (lhs < rhs) {
        take = true;
      } else if (lhs == rhs) {
        const int as = std::abs(s), ab = std::abs(best.best_shift);
        take = as < ab || (as == ab && s < best.best_shift);
      }
    }
    if (take) {
      best.ok = true;
      best_diff = diff;
      best_joint = joint;
      best.best_shift = s;
    }
  }
  if (best.ok) {
    best.similarity = 1.0 - static_cast<double>(best_diff) / static_cast<double>(best_joint);
    best.valid_bits = best_joint;
  }
  return best;
}

struct SweepPoint {
  bool insufficient = false;
  double threshold = 0.0;
  double achieved_far = 0.0;
  double frr = 0.0;
};

// Sweeps every candidate threshold (impostor scores and +inf) and keeps the
// smallest one whose FAR meets the target.
inline SweepPoint sweep_frr_at_far(std::vector<double> genuine, std::vector<double> impostor, double far_target) {
  SweepPoint out;
  const double n_imp = static_cast<double>(impostor.size());
  if (impostor.empty() || n_imp * far_target < 1.0 - 1e-9) {
    out.insufficient = true;
    return out;
  }
  std::sort(genuine.begin(), genuine.end());
  std::sort(impostor.begin(), impostor.end());
  std::vector<double> candidates = impostor;
  candidates.push_back(std::numeric_limits<double>::infinity());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (double t : candidates) {  // ascending, so the first hit is the minimum
    const auto accepted_imp = impostor.end() - std::lower_bound(impostor.begin(), impostor.end(), t);
    const double far = static_cast<double>(accepted_imp) / n_imp;
    if (far <= far_target) {
      const auto rejected_gen = std::lower_bound(genuine.begin(), genuine.end(), t) - genuine.begin();
      out.threshold = t;
      out.achieved_far = far;
      out.frr = static_cast<double>(rejected_gen) / static_cast<double>(genuine.size());
      return out;
    }
  }
  return out;  // unreachable: +inf always qualifies
}

// Bilinear sample on an explicitly zero-padded copy of the image, pixel
// centers at integer coordinates.
class PaddedImage {
 public:
  PaddedImage(const irisbench::Image8& image, int pad) : pad_(pad), w_(image.width() + 2 * pad),
        data_(static_cast<std::size_t>(w_) * static_cast<std::size_t>(image.height() + 2 * pad), 0.0) {
    for (int y = 0; y < image.height(); ++y)
      for (int x = 0; x < image.width(); ++x) at(x + pad, y + pad) = image.at(x, y);
    h_ = image.height() + 2 * pad;
  }

  double sample(double x, double y) const {
    x += pad_;
    y += pad_;
    const double fx = std::floor(x), fy = std::floor(y);
    const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
    const double tx = x - fx, ty = y - fy;
    auto px = [&](int xi, int yi) {
      if (xi < 0 || yi < 0 || xi >= w_ || yi >= h_) return 0.0;
      return data_[static_cast<std::size_t>(yi) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(xi)];
    };
    return (1 - tx) * (1 - ty) * px(x0, y0) + tx * (1 - ty) * px(x0 + 1, y0) + (1 - tx) * ty * px(x0, y0 + 1) +
           tx * ty * px(x0 + 1, y0 + 1);
  }

 private:
  double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + x]; }
  int pad_;
  int w_;
  int h_ = 0;
  std::vector<double> data_;
};

inline irisbench::SampleRecord make_record(const std::string& subject, irisbench::Eye eye, int gaze, int level,
                                           int frame) {
  irisbench::SampleRecord r;
  r.subject_id = subject;
  r.eye = eye;
  r.gaze_point = gaze;
  r.brightness_level = level;
  r.frame_idx = frame;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s_%s_g%d_b%02d_f%d", subject.c_str(), eye == irisbench::Eye::Left ? "L" : "R",
                gaze, level, frame);
  r.sample_id = buf;
  r.image_ref = std::string("images/") + buf + ".pgm";
  return r;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("irisbench_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
