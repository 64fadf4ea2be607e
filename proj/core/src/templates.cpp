#include "irisbench/templates.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "irisbench/error.hpp"

namespace irisbench {

BitVector::BitVector(std::size_t size, bool value)
    : size_(size), words_((size + 63) / 64, value ? ~std::uint64_t{0} : 0) {
  if (value && (size & 63)) words_.back() &= (std::uint64_t{1} << (size & 63)) - 1;
}

std::size_t BitVector::count() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

BitVector BitVector::from_words(std::vector<std::uint64_t> words, std::size_t size) {
  if (words.size() != (size + 63) / 64) throw Error(ErrorKind::ShapeMismatch, "bit vector word count mismatch");
  BitVector v;
  v.size_ = size;
  v.words_ = std::move(words);
  if (size & 63) v.words_.back() &= (std::uint64_t{1} << (size & 63)) - 1;
  return v;
}

bool IrisCode::valid() const noexcept {
  return layout.bit_count() > 0 && bits.size() == layout.bit_count() && mask.size() == layout.bit_count();
}

IrisCode IrisCode::rotated(int shift) const {
  IrisCode out = *this;
  const auto cols = static_cast<long>(layout.cols);
  const std::size_t bpp = layout.bits_per_position;
  long s = shift % cols;
  if (s < 0) s += cols;
  for (std::size_t r = 0; r < layout.rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      const long src = (c - s + cols) % cols;
      for (std::size_t k = 0; k < bpp; ++k) {
        const std::size_t dst_i = (r * layout.cols + static_cast<std::size_t>(c)) * bpp + k;
        const std::size_t src_i = (r * layout.cols + static_cast<std::size_t>(src)) * bpp + k;
        out.bits.set(dst_i, bits.get(src_i));
        out.mask.set(dst_i, mask.get(src_i));
      }
    }
  }
  return out;
}

double Embedding::norm() const noexcept {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

bool Embedding::valid() const noexcept { return !values.empty() && std::abs(norm() - 1.0) <= 1e-6; }

TemplateKind kind_of(const Template& t) noexcept {
  if (const auto* code = std::get_if<IrisCode>(&t))
    return code->kind == CodeKind::Gabor ? TemplateKind::Gabor : TemplateKind::Ordinal;
  return TemplateKind::Embedding;
}

namespace {

constexpr std::array<char, 4> kMagic = {'I', 'R', 'T', 'B'};
constexpr std::uint8_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw Error(ErrorKind::Io, "cannot write " + path.string());
  }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  template <typename T>
  void le(T value) {
    std::array<unsigned char, sizeof(T)> buf{};
    std::uint64_t v = 0;
    std::memcpy(&v, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(buf.data(), buf.size());
  }
  void finish() {
    out_.flush();
    if (!out_) throw Error(ErrorKind::Io, "write failed for " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw Error(ErrorKind::Io, "cannot open " + path.string());
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n))
      throw Error(ErrorKind::Io, path_.string() + ": truncated template store");
  }
  template <typename T>
  T le() {
    std::array<unsigned char, sizeof(T)> buf{};
    bytes(buf.data(), buf.size());
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    T out;
    std::memcpy(&out, &v, sizeof(T));
    return out;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

}  // namespace

void save_templates(const TemplateMap& templates, const std::filesystem::path& path, TemplateKind empty_kind) {
  TemplateKind kind = empty_kind;
  CodeLayout layout;
  std::size_t dims = 0;
  if (!templates.empty()) {
    const Template& first = templates.begin()->second;
    kind = kind_of(first);
    if (const auto* code = std::get_if<IrisCode>(&first)) {
      layout = code->layout;
    } else {
      dims = std::get<Embedding>(first).dims();
    }
    for (const auto& [id, t] : templates) {
      if (kind_of(t) != kind) throw Error(ErrorKind::MixedKinds, "template '" + id + "' differs in kind");
      if (const auto* code = std::get_if<IrisCode>(&t)) {
        if (code->layout != layout || !code->valid())
          throw Error(ErrorKind::MixedKinds, "template '" + id + "' differs in layout");
      } else if (std::get<Embedding>(t).dims() != dims) {
        throw Error(ErrorKind::MixedKinds, "template '" + id + "' differs in dimensionality");
      }
    }
  }

  Writer w(path);
  w.bytes(kMagic.data(), kMagic.size());
  w.le<std::uint8_t>(kVersion);
  w.le<std::uint8_t>(static_cast<std::uint8_t>(kind));
  if (kind == TemplateKind::Embedding) {
    w.le<std::uint32_t>(static_cast<std::uint32_t>(dims));
  } else {
    w.le<std::uint32_t>(layout.rows);
    w.le<std::uint32_t>(layout.cols);
    w.le<std::uint32_t>(layout.bits_per_position);
  }
  w.le<std::uint64_t>(templates.size());
  for (const auto& [id, t] : templates) {
    w.le<std::uint32_t>(static_cast<std::uint32_t>(id.size()));
    w.bytes(id.data(), id.size());
    if (const auto* code = std::get_if<IrisCode>(&t)) {
      for (auto word : code->bits.words()) w.le<std::uint64_t>(word);
      for (auto word : code->mask.words()) w.le<std::uint64_t>(word);
    } else {
      for (double v : std::get<Embedding>(t).values) w.le<double>(v);
    }
  }
  w.finish();
}

TemplateMap load_templates(const std::filesystem::path& path) {
  Reader r(path);
  std::array<char, 4> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw Error(ErrorKind::Io, path.string() + ": not a template store");
  const auto version = r.le<std::uint8_t>();
  if (version != kVersion) throw Error(ErrorKind::Io, path.string() + ": unsupported store version");
  const auto kind_byte = r.le<std::uint8_t>();
  if (kind_byte > 2) throw Error(ErrorKind::Io, path.string() + ": unknown template kind");
  const auto kind = static_cast<TemplateKind>(kind_byte);
  CodeLayout layout;
  std::size_t dims = 0;
  if (kind == TemplateKind::Embedding) {
    dims = r.le<std::uint32_t>();
  } else {
    layout.rows = r.le<std::uint32_t>();
    layout.cols = r.le<std::uint32_t>();
    layout.bits_per_position = r.le<std::uint32_t>();
  }
  const auto count = r.le<std::uint64_t>();
  TemplateMap out;
  const std::size_t nbits = layout.bit_count();
  const std::size_t nwords = (nbits + 63) / 64;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto id_len = r.le<std::uint32_t>();
    std::string id(id_len, '\0');
    r.bytes(id.data(), id.size());
    if (kind == TemplateKind::Embedding) {
      Embedding e;
      e.values.resize(dims);
      for (auto& v : e.values) v = r.le<double>();
      out.emplace(std::move(id), std::move(e));
    } else {
      std::vector<std::uint64_t> bits(nwords), mask(nwords);
      for (auto& w : bits) w = r.le<std::uint64_t>();
      for (auto& w : mask) w = r.le<std::uint64_t>();
      IrisCode code;
      code.kind = kind == TemplateKind::Gabor ? CodeKind::Gabor : CodeKind::Ordinal;
      code.layout = layout;
      code.bits = BitVector::from_words(std::move(bits), nbits);
      code.mask = BitVector::from_words(std::move(mask), nbits);
      out.emplace(std::move(id), std::move(code));
    }
  }
  if (!r.at_end()) throw Error(ErrorKind::Io, path.string() + ": trailing bytes after last record");
  return out;
}

}  // namespace irisbench
