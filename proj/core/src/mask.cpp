#include "irisbench/mask.hpp"

#include <charconv>

#include "irisbench/error.hpp"

namespace irisbench {

RleMask::RleMask(int width, int height) : width_(width), height_(height) {
  const auto total = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  if (total > 0) runs_.push_back({0, static_cast<std::uint32_t>(total)});
}

void RleMask::append(std::uint8_t label, std::uint32_t length) {
  if (length == 0) return;
  if (!runs_.empty() && runs_.back().label == label) {
    runs_.back().length += length;
  } else {
    runs_.push_back({label, length});
  }
}

RleMask RleMask::from_raster(const Image8& raster) {
  RleMask mask;
  mask.width_ = raster.width();
  mask.height_ = raster.height();
  for (std::uint8_t v : raster.pixels()) mask.append(v, 1);
  return mask;
}

RleMask RleMask::from_patch(int width, int height, int x0, int y0, const Image8& patch) {
  if (x0 < 0 || y0 < 0 || x0 + patch.width() > width || y0 + patch.height() > height)
    throw Error(ErrorKind::ShapeMismatch, "RLE patch outside mask bounds");
  RleMask mask;
  mask.width_ = width;
  mask.height_ = height;
  const auto w = static_cast<std::uint32_t>(width);
  mask.append(0, static_cast<std::uint32_t>(y0) * w);
  for (int y = 0; y < patch.height(); ++y) {
    mask.append(0, static_cast<std::uint32_t>(x0));
    for (std::uint8_t v : patch.row(y)) mask.append(v, 1);
    mask.append(0, static_cast<std::uint32_t>(width - x0 - patch.width()));
  }
  mask.append(0, static_cast<std::uint32_t>(height - y0 - patch.height()) * w);
  return mask;
}

RleMask RleMask::parse(std::string_view text) {
  auto fail = [&](const char* what) {
    return Error(ErrorKind::Parse, std::string("RLE mask: ") + what);
  };
  const auto colon = text.find(':');
  const auto cross = text.find('x');
  if (colon == std::string_view::npos || cross == std::string_view::npos || cross > colon)
    throw fail("missing <W>x<H>: header");
  RleMask mask;
  auto parse_int = [&](std::string_view s, auto& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw fail("bad integer");
  };
  parse_int(text.substr(0, cross), mask.width_);
  parse_int(text.substr(cross + 1, colon - cross - 1), mask.height_);
  if (mask.width_ < 0 || mask.height_ < 0) throw fail("negative size");
  std::size_t i = colon + 1;
  std::uint64_t total = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c < 'a' || c > 'z') throw fail("expected label letter");
    std::size_t j = i + 1;
    while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
    std::uint32_t length = 0;
    parse_int(text.substr(i + 1, j - i - 1), length);
    mask.append(static_cast<std::uint8_t>(c - 'a'), length);
    total += length;
    i = j;
  }
  if (total != static_cast<std::uint64_t>(mask.width_) * static_cast<std::uint64_t>(mask.height_))
    throw fail("run lengths do not cover the raster");
  return mask;
}

std::string RleMask::to_string() const {
  std::string out = std::to_string(width_) + "x" + std::to_string(height_) + ":";
  for (const Run& r : runs_) {
    out.push_back(static_cast<char>('a' + r.label));
    out += std::to_string(r.length);
  }
  return out;
}

Image8 RleMask::decode() const {
  Image8 raster(width_, height_);
  auto px = raster.pixels();
  std::size_t pos = 0;
  for (const Run& r : runs_) {
    for (std::uint32_t k = 0; k < r.length; ++k) px[pos + k] = r.label;
    pos += r.length;
  }
  return raster;
}

bool RleMask::all_clear() const noexcept {
  for (const Run& r : runs_)
    if (r.label != 0) return false;
  return true;
}

}  // namespace irisbench
