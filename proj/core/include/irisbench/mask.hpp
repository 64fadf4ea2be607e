#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "irisbench/raster.hpp"

namespace irisbench {

/// Occlusion labels stored in an annotation's occlusion mask.
enum class OcclusionLabel : std::uint8_t { Clear = 0, Eyelid = 1, Eyelash = 2 };

/// Run-length encoded label raster, scanned row-major. Zero-label runs
/// dominate ocular masks, so this is the in-memory and on-disk form.
class RleMask {
 public:
  struct Run {
    std::uint8_t label = 0;
    std::uint32_t length = 0;
    bool operator==(const Run&) const = default;
  };

  RleMask() = default;
  RleMask(int width, int height);

  static RleMask from_raster(const Image8& raster);

  /// Mask of size width x height that is zero except for `patch` placed
  /// with its top-left corner at (x0, y0); the patch must fit inside.
  static RleMask from_patch(int width, int height, int x0, int y0, const Image8& patch);

  /// Text form "<W>x<H>:" followed by runs; each run is a label letter
  /// ('a' = 0, 'b' = 1, ...) immediately followed by its decimal length.
  static RleMask parse(std::string_view text);
  std::string to_string() const;

  Image8 decode() const;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::vector<Run>& runs() const noexcept { return runs_; }
  bool all_clear() const noexcept;

  /// Calls fn(x, y, label) for every pixel with a nonzero label.
  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    std::uint64_t pos = 0;
    const auto w = static_cast<std::uint64_t>(width_);
    for (const Run& r : runs_) {
      if (r.label != 0) {
        for (std::uint64_t p = pos; p < pos + r.length; ++p)
          fn(static_cast<int>(p % w), static_cast<int>(p / w), r.label);
      }
      pos += r.length;
    }
  }

  bool operator==(const RleMask&) const = default;

 private:
  void append(std::uint8_t label, std::uint32_t length);

  int width_ = 0;
  int height_ = 0;
  std::vector<Run> runs_;
};

}  // namespace irisbench
