#include "irisbench/encode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "irisbench/error.hpp"

namespace irisbench {
namespace {

struct BandSignals {
  int bands = 0;
  int cols = 0;
  int rows_per_band = 0;
  std::vector<double> signal;    // bands x cols, invalid cells filled with the band mean
  std::vector<int> valid_count;  // bands x cols, valid rows per column
};

BandSignals band_average(const NormalizedIris& norm, int bands) {
  const int rows = norm.texture.height();
  const int cols = norm.texture.width();
  if (rows == 0 || cols == 0 || norm.validity.width() != cols || norm.validity.height() != rows)
    throw Error(ErrorKind::ShapeMismatch, "normalized iris texture and validity differ in size");
  if (rows % bands != 0) throw Error(ErrorKind::ShapeMismatch, "grid rows must divide the normalized height");
  BandSignals out;
  out.bands = bands;
  out.cols = cols;
  out.rows_per_band = rows / bands;
  out.signal.assign(static_cast<std::size_t>(bands) * cols, 0.0);
  out.valid_count.assign(static_cast<std::size_t>(bands) * cols, 0);
  for (int b = 0; b < bands; ++b) {
    double sum = 0.0;
    long n = 0;
    std::vector<double> col_sum(static_cast<std::size_t>(cols), 0.0);
    for (int r = b * out.rows_per_band; r < (b + 1) * out.rows_per_band; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (!norm.validity.at(c, r)) continue;
        col_sum[static_cast<std::size_t>(c)] += norm.texture.at(c, r);
        ++out.valid_count[static_cast<std::size_t>(b) * cols + c];
      }
    }
    for (int c = 0; c < cols; ++c) {
      sum += col_sum[static_cast<std::size_t>(c)];
      n += out.valid_count[static_cast<std::size_t>(b) * cols + c];
    }
    const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    for (int c = 0; c < cols; ++c) {
      const auto idx = static_cast<std::size_t>(b) * cols + c;
      const int missing = out.rows_per_band - out.valid_count[idx];
      out.signal[idx] = (col_sum[static_cast<std::size_t>(c)] + missing * mean) / out.rows_per_band;
    }
  }
  return out;
}

int wrap(int i, int n) noexcept {
  i %= n;
  return i < 0 ? i + n : i;
}

double support_fraction(const BandSignals& s, int band, int center, int lo, int hi) {
  long valid = 0;
  for (int d = lo; d <= hi; ++d) valid += s.valid_count[static_cast<std::size_t>(band) * s.cols + wrap(center + d, s.cols)];
  return static_cast<double>(valid) / (static_cast<double>(hi - lo + 1) * s.rows_per_band);
}

void check_grid(const NormalizedIris& norm, int grid_rows, int grid_cols) {
  if (grid_rows <= 0 || grid_cols <= 0 || norm.texture.width() % grid_cols != 0)
    throw Error(ErrorKind::ShapeMismatch, "grid columns must divide the normalized width");
}

}  // namespace

IrisCode gabor_encode(const NormalizedIris& norm, const GaborConfig& config) {
  check_grid(norm, config.grid_rows, config.grid_cols);
  const BandSignals s = band_average(norm, config.grid_rows);
  const int step = s.cols / config.grid_cols;

  struct Kernel {
    int half = 0;
    std::vector<double> re, im;  // index d + half
  };
  std::vector<Kernel> kernels;
  for (double lambda : config.wavelengths) {
    const double sigma = lambda * config.sigma_per_wavelength;
    Kernel k;
    k.half = static_cast<int>(std::ceil(3.0 * sigma));
    const int n = 2 * k.half + 1;
    k.re.resize(static_cast<std::size_t>(n));
    k.im.resize(static_cast<std::size_t>(n));
    std::vector<double> env(static_cast<std::size_t>(n));
    double sum_env = 0.0, sum_re = 0.0;
    for (int d = 0; d <= k.half; ++d) {
      const double g = std::exp(-0.5 * d * d / (sigma * sigma));
      const double w = 2.0 * std::numbers::pi * d / lambda;
      for (int sign : {-1, 1}) {
        const auto idx = static_cast<std::size_t>(k.half + sign * d);
        env[idx] = g;
        k.re[idx] = g * std::cos(w);
        k.im[idx] = sign * g * std::sin(w);
      }
    }
    for (int i = 0; i < n; ++i) {
      sum_env += env[static_cast<std::size_t>(i)];
      sum_re += k.re[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i) k.re[static_cast<std::size_t>(i)] -= env[static_cast<std::size_t>(i)] * sum_re / sum_env;
    kernels.push_back(std::move(k));
  }

  IrisCode code;
  code.kind = CodeKind::Gabor;
  code.layout = config.layout();
  code.bits = BitVector(code.layout.bit_count());
  code.mask = BitVector(code.layout.bit_count());
  const std::size_t bpp = code.layout.bits_per_position;
  for (int b = 0; b < config.grid_rows; ++b) {
    const double* sig = s.signal.data() + static_cast<std::size_t>(b) * s.cols;
    for (int j = 0; j < config.grid_cols; ++j) {
      const int center = j * step;
      const std::size_t base = (static_cast<std::size_t>(b) * config.grid_cols + j) * bpp;
      for (std::size_t w = 0; w < kernels.size(); ++w) {
        const Kernel& k = kernels[w];
        double re = 0.0, im = 0.0;
        for (int d = -k.half; d <= k.half; ++d) {
          const double v = sig[wrap(center + d, s.cols)];
          re += k.re[static_cast<std::size_t>(d + k.half)] * v;
          im += k.im[static_cast<std::size_t>(d + k.half)] * v;
        }
        const bool valid = support_fraction(s, b, center, -k.half, k.half) >= config.min_valid_fraction;
        code.bits.set(base + 2 * w, re >= 0.0);
        code.bits.set(base + 2 * w + 1, im >= 0.0);
        code.mask.set(base + 2 * w, valid);
        code.mask.set(base + 2 * w + 1, valid);
      }
    }
  }
  return code;
}

IrisCode ordinal_encode(const NormalizedIris& norm, const OrdinalConfig& config) {
  check_grid(norm, config.grid_rows, config.grid_cols);
  const BandSignals s = band_average(norm, config.grid_rows);
  const int step = s.cols / config.grid_cols;

  // Every lobe shares one normalized weight vector, so lobe sums over a
  // constant signal are bitwise equal and zero-sum filters cancel exactly.
  const int half = static_cast<int>(std::ceil(3.0 * config.lobe_sigma));
  std::vector<double> lobe(static_cast<std::size_t>(2 * half + 1));
  double total = 0.0;
  for (int d = -half; d <= half; ++d) {
    lobe[static_cast<std::size_t>(d + half)] = std::exp(-0.5 * d * d / (config.lobe_sigma * config.lobe_sigma));
    total += lobe[static_cast<std::size_t>(d + half)];
  }
  for (double& w : lobe) w /= total;
  const int spacing = static_cast<int>(std::lround(config.lobe_spacing));
  const int di_off = spacing / 2;

  auto lobe_sum = [&](const double* sig, int center) {
    double acc = 0.0;
    for (int d = -half; d <= half; ++d) acc += lobe[static_cast<std::size_t>(d + half)] * sig[wrap(center + d, s.cols)];
    return acc;
  };

  IrisCode code;
  code.kind = CodeKind::Ordinal;
  code.layout = config.layout();
  code.bits = BitVector(code.layout.bit_count());
  code.mask = BitVector(code.layout.bit_count());
  for (int b = 0; b < config.grid_rows; ++b) {
    const double* sig = s.signal.data() + static_cast<std::size_t>(b) * s.cols;
    for (int j = 0; j < config.grid_cols; ++j) {
      const int c = j * step;
      const std::size_t base = (static_cast<std::size_t>(b) * config.grid_cols + j) * 2;
      const double di = lobe_sum(sig, c - di_off) - lobe_sum(sig, c + di_off);
      const double left = lobe_sum(sig, c - spacing);
      const double mid = lobe_sum(sig, c);
      const double right = lobe_sum(sig, c + spacing);
      const double tri = left - 2.0 * mid + right;
      code.bits.set(base, di > 0.0);
      code.bits.set(base + 1, tri > 0.0);
      code.mask.set(base, support_fraction(s, b, c, -di_off - half, di_off + half) >= config.min_valid_fraction);
      code.mask.set(base + 1, support_fraction(s, b, c, -spacing - half, spacing + half) >= config.min_valid_fraction);
    }
  }
  return code;
}

namespace {

// Row i of the result holds the fractional coverage of source pixels by
// output cell i when `src` pixels are split into `dst` equal cells.
std::vector<double> area_weights(int src, int dst) {
  std::vector<double> w(static_cast<std::size_t>(dst) * src, 0.0);
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    const double lo = i * scale;
    const double hi = (i + 1) * scale;
    for (int p = static_cast<int>(std::floor(lo)); p < std::min(src, static_cast<int>(std::ceil(hi))); ++p) {
      const double overlap = std::min(hi, p + 1.0) - std::max(lo, static_cast<double>(p));
      if (overlap > 0.0) w[static_cast<std::size_t>(i) * src + p] = overlap / scale;
    }
  }
  return w;
}

template <typename T>
Embedding embed_raster(const Raster<T>& image) {
  if (image.empty()) throw Error(ErrorKind::ShapeMismatch, "cannot embed an empty image");
  const int w = image.width();
  const int h = image.height();
  const auto wx = area_weights(w, kEmbedGrid);
  const auto wy = area_weights(h, kEmbedGrid);
  std::vector<double> rows(static_cast<std::size_t>(kEmbedGrid) * w, 0.0);  // 16 x w
  for (int i = 0; i < kEmbedGrid; ++i)
    for (int y = 0; y < h; ++y) {
      const double weight = wy[static_cast<std::size_t>(i) * h + y];
      if (weight == 0.0) continue;
      auto src = image.row(y);
      for (int x = 0; x < w; ++x) rows[static_cast<std::size_t>(i) * w + x] += weight * static_cast<double>(src[static_cast<std::size_t>(x)]);
    }
  Embedding e;
  e.values.assign(kEmbedGrid * kEmbedGrid, 0.0);
  for (int i = 0; i < kEmbedGrid; ++i)
    for (int j = 0; j < kEmbedGrid; ++j) {
      double acc = 0.0;
      for (int x = 0; x < w; ++x) acc += wx[static_cast<std::size_t>(j) * w + x] * rows[static_cast<std::size_t>(i) * w + x];
      e.values[static_cast<std::size_t>(i) * kEmbedGrid + j] = acc;
    }
  double mean = 0.0, scale = 0.0;
  for (double v : e.values) {
    mean += v;
    scale = std::max(scale, std::abs(v));
  }
  mean /= static_cast<double>(e.values.size());
  double norm2 = 0.0;
  for (double& v : e.values) {
    v -= mean;
    norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  if (norm <= 1e-9 * std::max(1.0, scale)) {
    std::fill(e.values.begin(), e.values.end(), 0.0);
    e.values[0] = 1.0;
    return e;
  }
  for (double& v : e.values) v /= norm;
  return e;
}

}  // namespace

Embedding reference_embed(const Image8& image) { return embed_raster(image); }
Embedding reference_embed(const ImageF& image) { return embed_raster(image); }

std::map<std::string, Embedding> import_embeddings(const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec) && std::filesystem::file_size(path, ec) == 0) return {};
  TemplateMap store = load_templates(path);
  std::map<std::string, Embedding> out;
  std::size_t dims = 0;
  for (auto& [id, t] : store) {
    auto* e = std::get_if<Embedding>(&t);
    if (!e) throw Error(ErrorKind::DimMismatch, path.string() + ": store does not hold embeddings");
    if (dims == 0) dims = e->dims();
    if (e->dims() != dims || dims == 0) throw Error(ErrorKind::DimMismatch, "embedding '" + id + "' dims differ");
    const double n = e->norm();
    if (n == 0.0) throw Error(ErrorKind::InvariantViolation, "embedding '" + id + "' is the zero vector");
    if (std::abs(n - 1.0) > 1e-6)
      for (double& v : e->values) v /= n;
    out.emplace(id, std::move(*e));
  }
  return out;
}

}  // namespace irisbench
