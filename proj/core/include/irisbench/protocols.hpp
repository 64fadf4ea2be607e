#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irisbench/quality.hpp"
#include "irisbench/records.hpp"

namespace irisbench {

enum class ProtocolName { Occlusion, Dilation, Light, Angle, Control, Fix, Select, Any };
enum class Task { Verification, Identification };
enum class EyeMode { Left, Right, Dual };

inline constexpr std::array<ProtocolName, 8> kAllProtocols = {
    ProtocolName::Occlusion, ProtocolName::Dilation, ProtocolName::Light, ProtocolName::Angle,
    ProtocolName::Control,   ProtocolName::Fix,      ProtocolName::Select, ProtocolName::Any};

std::string_view to_string(ProtocolName name) noexcept;
std::string_view to_string(Task task) noexcept;
std::string_view to_string(EyeMode mode) noexcept;
std::optional<ProtocolName> parse_protocol_name(std::string_view text) noexcept;
std::optional<Task> parse_task(std::string_view text) noexcept;
std::optional<EyeMode> parse_eye_mode(std::string_view text) noexcept;

/// Occlusion, dilation, light, angle and control isolate one factor; fix,
/// select and any are the general protocols.
bool is_factor_protocol(ProtocolName name) noexcept;

inline constexpr std::size_t kGenuineCap = 1'500'000;
inline constexpr std::size_t kFactorImpostorCap = 2'000'000;
inline constexpr std::size_t kGeneralImpostorCap = 3'000'000;
inline constexpr std::size_t kProbesPerClassCap = 100;

struct ProtocolCaps {
  std::size_t genuine = kGenuineCap;
  std::optional<std::size_t> impostor;  // unset: default for the protocol family
  std::size_t probes_per_class = kProbesPerClassCap;
  bool operator==(const ProtocolCaps&) const = default;
};

struct ProtocolSpec {
  ProtocolName name = ProtocolName::Any;
  Task task = Task::Verification;
  EyeMode eye_mode = EyeMode::Left;
  std::uint64_t seed = 0;
  ProtocolCaps caps;
  QualityThresholds thresholds;

  std::size_t impostor_cap() const noexcept;

  /// Throws InvalidSpec for undefined combinations and caps above the
  /// protocol limits.
  void validate() const;

  std::string to_json() const;
  static ProtocolSpec from_json(std::string_view text);
};

inline constexpr std::uint32_t kNoSample = std::numeric_limits<std::uint32_t>::max();

/// Sample indices refer to PairList::ids. In single-eye mode the second
/// slot of each side is kNoSample; in dual mode slot 0 is the left eye.
struct PairEntry {
  std::array<std::uint32_t, 2> probe{kNoSample, kNoSample};
  std::array<std::uint32_t, 2> reference{kNoSample, kNoSample};
  bool genuine = false;
  bool operator==(const PairEntry&) const = default;
};

struct PairList {
  ProtocolSpec spec;
  std::vector<std::string> ids;
  std::vector<PairEntry> pairs;
  std::vector<std::string> warnings;  // not serialized

  bool dual() const noexcept { return spec.eye_mode == EyeMode::Dual; }
  const std::string& id(std::uint32_t index) const { return ids.at(index); }
  std::size_t genuine_count() const noexcept;
};

/// Pairs file: "# " + spec JSON, a column header, then one row per pair:
/// probe_id[,probe_id_r],reference_id[,reference_id_r],label.
void write_pairs(std::ostream& out, const PairList& pairs);
void save_pairs(const PairList& pairs, const std::filesystem::path& path);
PairList read_pairs(std::istream& in);
PairList load_pairs(const std::filesystem::path& path);

/// Subject-disjoint split. Subjects are shuffled with a seeded draw and the
/// first round(ratio * n), clamped to [1, n - 1], become train.
std::vector<SampleRecord> split_dataset(std::vector<SampleRecord> records, double ratio, std::uint64_t seed);

/// Quality flags of a scored record; throws InvariantViolation when the
/// record has not been scored.
QualityFlags quality_flags(const SampleRecord& record, const QualityThresholds& thresholds);

/// Per-sample pool membership for the probe / reference side.
bool probe_side_ok(ProtocolName name, const SampleRecord& record, const QualityThresholds& thresholds);
bool reference_side_ok(ProtocolName name, const SampleRecord& record, const QualityThresholds& thresholds);
/// Joint constraint on the two sides (gaze relations).
bool gaze_relation_ok(ProtocolName name, int probe_gaze, int reference_gaze) noexcept;

/// Full verification predicate for one single-eye pair, including the
/// label. Used by tests and by `protocol build --check`.
bool verification_pair_ok(const ProtocolSpec& spec, const SampleRecord& probe, const SampleRecord& reference,
                          bool genuine);

/// Records with split == train are ignored; records without a split are
/// treated as test data.
PairList build_verification(const ProtocolSpec& spec, std::span<const SampleRecord> records);

/// Gallery plus probes, materialized as the probe x gallery cross product.
/// The gallery draw depends only on the seed, the eye mode and the records.
PairList build_identification(const ProtocolSpec& spec, std::span<const SampleRecord> records);

PairList build_protocol(const ProtocolSpec& spec, std::span<const SampleRecord> records);

}  // namespace irisbench
