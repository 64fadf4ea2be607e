#include "irisbench/raster.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "irisbench/error.hpp"

namespace irisbench {
namespace {

template <typename T>
double bilinear_zero(const Raster<T>& image, double x, double y) noexcept {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const double tx = x - fx;
  const double ty = y - fy;
  if (fx < -1.0 || fy < -1.0 || fx >= image.width() || fy >= image.height()) return 0.0;
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  auto px = [&](int xx, int yy) -> double {
    return image.contains(xx, yy) ? static_cast<double>(image.at(xx, yy)) : 0.0;
  };
  const double top = px(x0, y0) * (1.0 - tx) + px(x0 + 1, y0) * tx;
  const double bottom = px(x0, y0 + 1) * (1.0 - tx) + px(x0 + 1, y0 + 1) * tx;
  return top * (1.0 - ty) + bottom * ty;
}

std::string lowercase_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return f;
}

}  // namespace

double sample_bilinear_zero(const Image8& image, double x, double y) noexcept {
  return bilinear_zero(image, x, y);
}

double sample_bilinear_zero(const ImageF& image, double x, double y) noexcept {
  return bilinear_zero(image, x, y);
}

Image8 read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw Error(ErrorKind::Io, path.string() + ": not a binary PGM");
  auto next_int = [&]() {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    int v = 0;
    if (!(in >> v)) throw Error(ErrorKind::Io, path.string() + ": malformed PGM header");
    return v;
  };
  const int width = next_int();
  const int height = next_int();
  const int maxval = next_int();
  if (width <= 0 || height <= 0 || maxval != 255)
    throw Error(ErrorKind::Io, path.string() + ": only 8-bit PGM is supported");
  in.get();
  Image8 image(width, height);
  in.read(reinterpret_cast<char*>(image.pixels().data()), static_cast<std::streamsize>(image.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.size()))
    throw Error(ErrorKind::Io, path.string() + ": truncated PGM");
  return image;
}

void write_pgm(const Image8& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels().data()), static_cast<std::streamsize>(image.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

Image8 read_png(const std::filesystem::path& path) {
  auto file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::Io, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorKind::Io, "libpng init failed");
  }
  Image8 image;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::Io, path.string() + ": corrupt PNG");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  image = Image8(width, height);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = image.row(y).data();
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void write_png(const Image8& image, const std::filesystem::path& path) {
  auto file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::Io, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::Io, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::Io, "write failed for " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height(); ++y)
    png_write_row(png, const_cast<png_bytep>(image.row(y).data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image8 read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  in.close();
  if (magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
  if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G')
    return read_png(path);
  throw Error(ErrorKind::Io, path.string() + ": unsupported image format (PGM or PNG expected)");
}

void write_image(const Image8& image, const std::filesystem::path& path) {
  if (lowercase_extension(path) == ".png") {
    write_png(image, path);
  } else {
    write_pgm(image, path);
  }
}

}  // namespace irisbench
