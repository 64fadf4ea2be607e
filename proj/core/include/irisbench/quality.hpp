#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irisbench/records.hpp"

namespace irisbench {

enum class QualityDim : std::uint8_t { Eyelid = 0, Eyelash = 1, PupilRatio = 2, GazeDev = 3, Reflection = 4 };
inline constexpr int kQualityDims = 5;
std::string_view to_string(QualityDim dim) noexcept;

/// Set of quality dimensions, one bit per QualityDim.
class QualityFlags {
 public:
  constexpr QualityFlags() = default;
  constexpr explicit QualityFlags(std::uint8_t bits) : bits_(bits) {}
  constexpr QualityFlags(std::initializer_list<QualityDim> dims) {
    for (auto d : dims) set(d);
  }

  constexpr void set(QualityDim d) noexcept { bits_ |= static_cast<std::uint8_t>(1u << static_cast<int>(d)); }
  constexpr bool has(QualityDim d) const noexcept { return bits_ & (1u << static_cast<int>(d)); }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr std::uint8_t bits() const noexcept { return bits_; }
  /// True when every flag here is also in `other`.
  constexpr bool subset_of(QualityFlags other) const noexcept { return (bits_ & ~other.bits_) == 0; }
  constexpr bool operator==(const QualityFlags&) const = default;

  std::string to_string() const;

 private:
  std::uint8_t bits_ = 0;
};

struct QualityThresholds {
  double eyelid = 0.20;
  double eyelash = 0.15;
  double pupil_ratio = 0.62;
  double gaze_dev = 0.90;
  double reflection = 0.10;

  /// Every threshold strictly inside (0, 1).
  bool valid() const noexcept;
  double get(QualityDim dim) const noexcept;
  void set(QualityDim dim, double value) noexcept;

  /// Parses "key=value" lines (keys: eyelid, eyelash, pupil_ratio,
  /// gaze_dev, reflection; '#' starts a comment) over the defaults.
  static QualityThresholds parse(std::string_view text);
};

/// Angular layout of the 3x3 fixation grid used to derive gaze deviation.
struct GazeGrid {
  double yaw_deg = 15.0;
  double pitch_deg = 10.0;
};

struct CleanResult {
  std::vector<SampleRecord> kept;
  std::size_t dropped = 0;
};

/// Keeps records with a present, valid annotation, preserving order.
CleanResult clean(std::vector<SampleRecord> records);

/// Angular distance of a gaze point from point 5, normalized so the
/// center is 0 and the corners are 1.
double gaze_deviation(int gaze_point, const GazeGrid& grid = {}) noexcept;

/// Annotation-only quality scoring; reads masks but never pixels.
QualityScores score_quality(const SampleRecord& record, const GazeGrid& grid = {});

struct CategoryResult {
  Category category = Category::Standard;
  QualityFlags exceeded;
};

/// Challenging iff some score is strictly above its threshold.
CategoryResult categorize(const QualityScores& scores, const QualityThresholds& thresholds) noexcept;

/// Scores and categorizes every record (annotation required) in place.
void assess_quality(std::span<SampleRecord> records, const QualityThresholds& thresholds, const GazeGrid& grid = {},
                    unsigned workers = 1);

}  // namespace irisbench
