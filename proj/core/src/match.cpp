#include "irisbench/match.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#if defined(__AVX512F__) && defined(__AVX512VPOPCNTDQ__)
#include <immintrin.h>
#define IRISBENCH_AVX512_POPCNT 1
#endif

#include "irisbench/error.hpp"
#include "irisbench/parallel.hpp"

namespace irisbench {

namespace {

struct Counts {
  std::uint64_t diff = 0;
  std::uint64_t joint = 0;
};

Counts masked_counts(const std::uint64_t* a, const std::uint64_t* am, const std::uint64_t* b, const std::uint64_t* bm,
                     std::size_t words) noexcept {
  Counts c;
  for (std::size_t w = 0; w < words; ++w) {
    const std::uint64_t m = am[w] & bm[w];
    c.joint += static_cast<std::uint64_t>(std::popcount(m));
    c.diff += static_cast<std::uint64_t>(std::popcount((a[w] ^ b[w]) & m));
  }
  return c;
}

// Counts for every probe rotation against one reference, written to
// out[k] for shift slot k (slot k holds rotation k - max_shift).
void shift_counts(const PreparedCode& probe, const std::uint64_t* b, const std::uint64_t* bm, Counts* out) noexcept;

#ifdef IRISBENCH_AVX512_POPCNT
// Reference held in registers across all shifts; NB blocks of 8 words.
template <int NB>
void shift_counts_avx512(const PreparedCode& probe, const std::uint64_t* b, const std::uint64_t* bm,
                         Counts* out) noexcept {
  __m512i rb[NB], rm[NB];
  for (int i = 0; i < NB; ++i) {
    rb[i] = _mm512_loadu_si512(b + 8 * i);
    rm[i] = _mm512_loadu_si512(bm + 8 * i);
  }
  const int max_shift = probe.max_shift();
  for (int s = -max_shift; s <= max_shift; ++s) {
    const std::uint64_t* a = probe.bits(s);
    const std::uint64_t* am = probe.mask(s);
    __m512i diff = _mm512_setzero_si512();
    __m512i joint = _mm512_setzero_si512();
    for (int i = 0; i < NB; ++i) {
      const __m512i m = _mm512_and_si512(_mm512_loadu_si512(am + 8 * i), rm[i]);
      const __m512i x = _mm512_xor_si512(_mm512_loadu_si512(a + 8 * i), rb[i]);
      joint = _mm512_add_epi64(joint, _mm512_popcnt_epi64(m));
      diff = _mm512_add_epi64(diff, _mm512_popcnt_epi64(_mm512_and_si512(x, m)));
    }
    out[s + max_shift] = {static_cast<std::uint64_t>(_mm512_reduce_add_epi64(diff)),
                          static_cast<std::uint64_t>(_mm512_reduce_add_epi64(joint))};
  }
}
#endif

void shift_counts(const PreparedCode& probe, const std::uint64_t* b, const std::uint64_t* bm, Counts* out) noexcept {
  const std::size_t words = probe.words();
#ifdef IRISBENCH_AVX512_POPCNT
  if (words % 8 == 0) {
    switch (words / 8) {
      case 1: return shift_counts_avx512<1>(probe, b, bm, out);
      case 2: return shift_counts_avx512<2>(probe, b, bm, out);
      case 4: return shift_counts_avx512<4>(probe, b, bm, out);
      case 8: return shift_counts_avx512<8>(probe, b, bm, out);
      default: break;
    }
  }
#endif
  const int max_shift = probe.max_shift();
  for (int s = -max_shift; s <= max_shift; ++s) out[s + max_shift] = masked_counts(probe.bits(s), probe.mask(s), b, bm, words);
}

void check_pair(const IrisCode& a, const IrisCode& b) {
  if (!a.valid() || !b.valid()) throw Error(ErrorKind::LayoutMismatch, "iris code length disagrees with its layout");
  if (a.kind != b.kind) throw Error(ErrorKind::LayoutMismatch, "iris codes of different kinds");
  if (!(a.layout == b.layout)) throw Error(ErrorKind::LayoutMismatch, "iris codes of different layouts");
}

// n bits starting at bit pos, n in [1, 64].
std::uint64_t read_bits(const std::vector<std::uint64_t>& words, std::size_t pos, std::size_t n) noexcept {
  const std::size_t i = pos >> 6;
  const unsigned sh = pos & 63;
  std::uint64_t v = words[i] >> sh;
  if (sh != 0 && i + 1 < words.size()) v |= words[i + 1] << (64 - sh);
  return n == 64 ? v : v & ((std::uint64_t{1} << n) - 1);
}

// ORs n bits of value into a zeroed region starting at bit pos.
void write_bits(std::vector<std::uint64_t>& words, std::size_t pos, std::uint64_t value, std::size_t n) noexcept {
  const std::size_t i = pos >> 6;
  const unsigned sh = pos & 63;
  words[i] |= value << sh;
  if (sh != 0 && sh + n > 64) words[i + 1] |= value >> (64 - sh);
}

}  // namespace

PreparedCode PreparedCode::prepare(const IrisCode& code, int max_shift) {
  if (!code.valid()) throw Error(ErrorKind::LayoutMismatch, "iris code length disagrees with its layout");
  if (max_shift < 0) throw Error(ErrorKind::InvalidSpec, "max_shift must be non-negative");
  PreparedCode p;
  p.source_ = &code;
  p.max_shift_ = max_shift;
  const std::size_t row_bits = code.layout.bits_per_row();
  const std::size_t row_words = (row_bits + 63) / 64;
  p.words_ = row_words * code.layout.rows;
  const std::size_t slots = 2 * static_cast<std::size_t>(max_shift) + 1;
  p.bits_.assign(slots * p.words_, 0);
  p.mask_.assign(slots * p.words_, 0);
  const std::size_t rb = row_bits;
  // Each row is laid out twice in a row so any rotation is a plain window read.
  std::vector<std::uint64_t> twice_bits((2 * rb + 63) / 64 + 1);
  std::vector<std::uint64_t> twice_mask(twice_bits.size());
  for (std::size_t r = 0; r < code.layout.rows; ++r) {
    std::fill(twice_bits.begin(), twice_bits.end(), 0);
    std::fill(twice_mask.begin(), twice_mask.end(), 0);
    for (std::size_t q = 0; q < rb; q += 64) {
      const std::size_t n = std::min<std::size_t>(64, rb - q);
      const std::size_t src = r * rb + q;
      write_bits(twice_bits, q, read_bits(code.bits.words(), src, n), n);
      write_bits(twice_bits, rb + q, read_bits(code.bits.words(), src, n), n);
      write_bits(twice_mask, q, read_bits(code.mask.words(), src, n), n);
      write_bits(twice_mask, rb + q, read_bits(code.mask.words(), src, n), n);
    }
    for (int s = -max_shift; s <= max_shift; ++s) {
      // Output column c reads source column (c - s), so output bit q reads
      // source bit q - s * bits_per_position inside the same row.
      const long long step = static_cast<long long>(s) * code.layout.bits_per_position;
      const long long rbl = static_cast<long long>(rb);
      const auto offset = static_cast<std::size_t>(((-step) % rbl + rbl) % rbl);
      std::uint64_t* out_bits = p.bits_.data() + p.slot(s) * p.words_ + r * row_words;
      std::uint64_t* out_mask = p.mask_.data() + p.slot(s) * p.words_ + r * row_words;
      for (std::size_t w = 0; w < row_words; ++w) {
        const std::size_t n = std::min<std::size_t>(64, rb - 64 * w);
        out_bits[w] = read_bits(twice_bits, offset + 64 * w, n);
        out_mask[w] = read_bits(twice_mask, offset + 64 * w, n);
      }
    }
  }
  return p;
}

MatchScore match_prepared(const PreparedCode& probe, const PreparedCode& reference, double min_valid_fraction) {
  check_pair(probe.code(), reference.code());
  const std::size_t n_bits = reference.code().layout.bit_count();
  const double floor_bits = min_valid_fraction * static_cast<double>(n_bits);
  const int max_shift = probe.max_shift();

  // a against b rotated by s equals a rotated by -s against b.
  constexpr int kStackSlots = 33;
  Counts stack_counts[kStackSlots];
  std::vector<Counts> heap_counts;
  Counts* counts = stack_counts;
  if (2 * max_shift + 1 > kStackSlots) {
    heap_counts.resize(static_cast<std::size_t>(2 * max_shift + 1));
    counts = heap_counts.data();
  }
  shift_counts(probe, reference.bits(0), reference.mask(0), counts);

  bool found = false;
  std::uint64_t best_diff = 0, best_joint = 1;
  int best_shift = 0;
  for (int k = 0; k <= 2 * max_shift; ++k) {
    const int s = (k % 2 == 1) ? -(k + 1) / 2 : k / 2;
    const auto [diff, joint] = counts[max_shift - s];
    if (joint == 0 || static_cast<double>(joint) < floor_bits) continue;
    if (!found || diff * best_joint < best_diff * joint) {
      found = true;
      best_diff = diff;
      best_joint = joint;
      best_shift = s;
    }
  }
  if (!found) throw Error(ErrorKind::InsufficientOverlap, "no shift leaves enough jointly valid bits");
  return {1.0 - static_cast<double>(best_diff) / static_cast<double>(best_joint), best_shift,
          static_cast<std::size_t>(best_joint)};
}

MatchScore hamming_match(const IrisCode& a, const IrisCode& b, int max_shift, double min_valid_fraction) {
  check_pair(a, b);
  const PreparedCode pa = PreparedCode::prepare(a, max_shift);
  const PreparedCode pb = PreparedCode::prepare(b, 0);
  return match_prepared(pa, pb, min_valid_fraction);
}

MatchScore cosine_match(const Embedding& a, const Embedding& b) {
  if (a.dims() != b.dims())
    throw Error(ErrorKind::DimMismatch, "embedding dims " + std::to_string(a.dims()) + " vs " + std::to_string(b.dims()));
  double dot = 0.0;
  for (std::size_t i = 0; i < a.dims(); ++i) dot += a.values[i] * b.values[i];
  return {std::clamp(dot, -1.0, 1.0), 0, a.dims()};
}

double failure_similarity(TemplateKind kind) noexcept { return kind == TemplateKind::Embedding ? -1.0 : 0.0; }

ScoreSheet match_pairs(const PairList& pairs, const TemplateMap& templates, const MatchConfig& config) {
  ScoreSheet sheet;
  sheet.ids = pairs.ids;
  if (pairs.pairs.empty()) return sheet;

  const bool dual = pairs.dual();
  std::vector<const Template*> lookup(pairs.ids.size(), nullptr);
  std::vector<char> used(pairs.ids.size(), 0);
  auto resolve = [&](std::uint32_t idx) {
    if (idx == kNoSample || idx >= pairs.ids.size()) throw Error(ErrorKind::Parse, "pair refers to a missing sample slot");
    if (lookup[idx]) return;
    auto it = templates.find(pairs.ids[idx]);
    if (it == templates.end()) throw Error(ErrorKind::MissingTemplate, "no template for '" + pairs.ids[idx] + "'");
    lookup[idx] = &it->second;
    used[idx] = 1;
  };
  for (const auto& p : pairs.pairs) {
    resolve(p.probe[0]);
    resolve(p.reference[0]);
    if (dual) {
      resolve(p.probe[1]);
      resolve(p.reference[1]);
    }
  }

  std::optional<TemplateKind> kind;
  for (std::size_t i = 0; i < lookup.size(); ++i) {
    if (!lookup[i]) continue;
    const TemplateKind k = kind_of(*lookup[i]);
    if (kind && *kind != k) throw Error(ErrorKind::MixedKinds, "pair list mixes template kinds");
    kind = k;
  }
  const double sentinel = failure_similarity(*kind);

  std::vector<PreparedCode> prepared;
  if (*kind != TemplateKind::Embedding) {
    prepared.resize(lookup.size());
    parallel_for(lookup.size(), config.workers, [&](std::size_t i) {
      if (used[i]) prepared[i] = PreparedCode::prepare(std::get<IrisCode>(*lookup[i]), config.max_shift);
    });
  }

  const std::size_t per_pair = dual ? 2 : 1;
  sheet.rows.resize(pairs.pairs.size() * per_pair);
  // Visiting pairs grouped by probe keeps the probe's rotations in cache;
  // every result still lands in its own slot.
  std::vector<std::uint32_t> order(pairs.pairs.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return pairs.pairs[x].probe[0] < pairs.pairs[y].probe[0];
  });
  parallel_for(order.size(), config.workers, [&](std::size_t k) {
    const std::size_t i = order[k];
    const PairEntry& p = pairs.pairs[i];
    for (std::size_t side = 0; side < per_pair; ++side) {
      ScoreRow& row = sheet.rows[i * per_pair + side];
      row.probe = p.probe[side];
      row.reference = p.reference[side];
      row.genuine = p.genuine;
      try {
        if (*kind == TemplateKind::Embedding) {
          row.score = cosine_match(std::get<Embedding>(*lookup[row.probe]), std::get<Embedding>(*lookup[row.reference]));
        } else {
          row.score = match_prepared(prepared[row.probe], prepared[row.reference], config.min_valid_fraction);
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InsufficientOverlap) throw;
        row.score = {sentinel, 0, 0};
      }
    }
  });
  return sheet;
}

namespace {

constexpr std::string_view kScoresHeader = "probe_id,reference_id,label,similarity,best_shift,valid_bits";

}  // namespace

void write_scores(std::ostream& out, const ScoreSheet& scores) {
  out << kScoresHeader << '\n';
  char buf[64];
  for (const auto& r : scores.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.score.similarity);
    out << scores.id(r.probe) << ',' << scores.id(r.reference) << ',' << (r.genuine ? '1' : '0') << ',' << buf << ','
        << r.score.best_shift << ',' << r.score.valid_bits << '\n';
  }
}

void save_scores(const ScoreSheet& scores, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_scores(out, scores);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

ScoreSheet read_scores(std::istream& in) {
  ScoreSheet sheet;
  std::string line;
  if (!std::getline(in, line) || line != kScoresHeader)
    throw Error(ErrorKind::Parse, "scores line 1: expected header '" + std::string(kScoresHeader) + "'");
  std::unordered_map<std::string, std::uint32_t> index;
  auto intern = [&](std::string_view id) {
    auto [it, inserted] = index.try_emplace(std::string(id), static_cast<std::uint32_t>(sheet.ids.size()));
    if (inserted) sheet.ids.emplace_back(id);
    return it->second;
  };
  std::size_t line_no = 1;
  std::string_view parts[6];
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](const char* what) {
      return Error(ErrorKind::Parse, "scores line " + std::to_string(line_no) + ": " + what);
    };
    std::string_view rest(line);
    std::size_t n = 0;
    for (;;) {
      const auto comma = rest.find(',');
      if (n == 6) throw fail("too many fields");
      parts[n++] = rest.substr(0, comma);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (n != 6) throw fail("expected 6 fields");
    if (parts[0].empty() || parts[1].empty()) throw fail("empty id");
    if (parts[2] != "0" && parts[2] != "1") throw fail("label must be 0 or 1");
    ScoreRow row;
    row.probe = intern(parts[0]);
    row.reference = intern(parts[1]);
    row.genuine = parts[2] == "1";
    auto parse = [&](std::string_view text, auto& value) {
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc{} || ptr != text.data() + text.size()) throw fail("bad number");
    };
    parse(parts[3], row.score.similarity);
    parse(parts[4], row.score.best_shift);
    parse(parts[5], row.score.valid_bits);
    sheet.rows.push_back(row);
  }
  return sheet;
}

ScoreSheet load_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  return read_scores(in);
}

}  // namespace irisbench
