#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace irisbench {

enum class CodeKind : std::uint8_t { Gabor = 0, Ordinal = 1 };
enum class TemplateKind : std::uint8_t { Gabor = 0, Ordinal = 1, Embedding = 2 };

/// Bit layout of an iris code: bit index ((row * cols) + col) * bits_per_position + k.
/// Angular shifts rotate whole grid columns inside each row.
struct CodeLayout {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t bits_per_position = 0;

  std::size_t bit_count() const noexcept {
    return static_cast<std::size_t>(rows) * cols * bits_per_position;
  }
  std::size_t bits_per_row() const noexcept { return static_cast<std::size_t>(cols) * bits_per_position; }
  bool operator==(const CodeLayout&) const = default;
};

/// Fixed-length packed bit sequence; bit i lives in word i / 64 at bit i % 64.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size, bool value = false);

  std::size_t size() const noexcept { return size_; }
  bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool value) noexcept {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= bit;
    } else {
      words_[i >> 6] &= ~bit;
    }
  }
  std::size_t count() const noexcept;

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }
  static BitVector from_words(std::vector<std::uint64_t> words, std::size_t size);

  bool operator==(const BitVector&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct IrisCode {
  CodeKind kind = CodeKind::Gabor;
  CodeLayout layout;
  BitVector bits;
  BitVector mask;  // 1 = valid

  /// Length of bits and mask equals layout.bit_count().
  bool valid() const noexcept;

  /// Rotation by `shift` grid columns: result column c takes column
  /// (c - shift) mod cols, independently in every row.
  IrisCode rotated(int shift) const;

  bool operator==(const IrisCode&) const = default;
};

struct Embedding {
  std::vector<double> values;

  std::size_t dims() const noexcept { return values.size(); }
  double norm() const noexcept;
  /// Unit-norm within 1e-6.
  bool valid() const noexcept;
  bool operator==(const Embedding&) const = default;
};

using Template = std::variant<IrisCode, Embedding>;
using TemplateMap = std::map<std::string, Template>;

TemplateKind kind_of(const Template& t) noexcept;

/// Template store ("IRTB"): magic, version byte, kind byte, layout or dims
/// header, u64 record count, then records of (u32 id length, id bytes,
/// payload). Code payloads are bit words then mask words (u64 each);
/// embedding payloads are f64 values. All integers little-endian.
///
/// `empty_kind` selects the kind byte written for an empty map.
void save_templates(const TemplateMap& templates, const std::filesystem::path& path,
                    TemplateKind empty_kind = TemplateKind::Embedding);
TemplateMap load_templates(const std::filesystem::path& path);

}  // namespace irisbench
