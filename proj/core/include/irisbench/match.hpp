#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "irisbench/protocols.hpp"
#include "irisbench/templates.hpp"

namespace irisbench {

struct MatchScore {
  double similarity = 0.0;
  int best_shift = 0;
  std::size_t valid_bits = 0;
  bool operator==(const MatchScore&) const = default;
};

inline constexpr int kDefaultMaxShift = 8;
inline constexpr double kDefaultMinValidFraction = 0.25;

/// Rotation-compensated masked fractional Hamming distance, reported as
/// similarity 1 - min HD. Shift s compares a against b.rotated(s). Shifts
/// are tried in the order 0, -1, +1, -2, +2, ... and only a strictly lower
/// HD replaces the current best. Shifts whose joint valid count falls below
/// min_valid_fraction * bit_count are skipped; if every shift is skipped
/// the call throws InsufficientOverlap.
MatchScore hamming_match(const IrisCode& a, const IrisCode& b, int max_shift = kDefaultMaxShift,
                         double min_valid_fraction = kDefaultMinValidFraction);

MatchScore cosine_match(const Embedding& a, const Embedding& b);

/// Code with every rotation in [-max_shift, max_shift] unpacked into
/// row-padded words, so a comparison is pure XOR/AND/popcount.
class PreparedCode {
 public:
  static PreparedCode prepare(const IrisCode& code, int max_shift);

  int max_shift() const noexcept { return max_shift_; }
  const IrisCode& code() const noexcept { return *source_; }
  std::size_t words() const noexcept { return words_; }
  const std::uint64_t* bits(int shift) const noexcept { return bits_.data() + slot(shift) * words_; }
  const std::uint64_t* mask(int shift) const noexcept { return mask_.data() + slot(shift) * words_; }

 private:
  std::size_t slot(int shift) const noexcept { return static_cast<std::size_t>(shift + max_shift_); }

  const IrisCode* source_ = nullptr;
  int max_shift_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> mask_;
};

/// Same result as hamming_match(probe.code(), reference.code(), ...) with
/// max_shift taken from the probe preparation; the reference only needs
/// its unrotated words. The underlying codes must outlive the prepared
/// forms.
MatchScore match_prepared(const PreparedCode& probe, const PreparedCode& reference,
                          double min_valid_fraction = kDefaultMinValidFraction);

struct MatchConfig {
  int max_shift = kDefaultMaxShift;
  double min_valid_fraction = kDefaultMinValidFraction;
  unsigned workers = 1;
};

struct ScoreRow {
  std::uint32_t probe = 0;      // index into ScoreSheet::ids
  std::uint32_t reference = 0;
  bool genuine = false;
  MatchScore score;
  bool operator==(const ScoreRow&) const = default;
};

/// Scores in pair order. Dual-eye pair lists yield two rows per pair, the
/// left-eye comparison first.
struct ScoreSheet {
  std::vector<std::string> ids;
  std::vector<ScoreRow> rows;

  const std::string& id(std::uint32_t index) const { return ids.at(index); }
  bool operator==(const ScoreSheet&) const = default;
};

/// Similarity recorded for a pair that cannot be matched: the lowest value
/// the template kind can produce.
double failure_similarity(TemplateKind kind) noexcept;

ScoreSheet match_pairs(const PairList& pairs, const TemplateMap& templates, const MatchConfig& config = {});

/// CSV: probe_id,reference_id,label,similarity,best_shift,valid_bits with
/// similarities printed to 17 significant digits.
void write_scores(std::ostream& out, const ScoreSheet& scores);
void save_scores(const ScoreSheet& scores, const std::filesystem::path& path);
ScoreSheet read_scores(std::istream& in);
ScoreSheet load_scores(const std::filesystem::path& path);

}  // namespace irisbench
