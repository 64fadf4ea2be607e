#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irisbench/match.hpp"

namespace irisbench {

struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

struct DetPoint {
  double far_target = 0.0;
  double achieved_far = 0.0;
  double frr = 0.0;
  double threshold = 0.0;  // +inf when no finite threshold meets the target
  bool operator==(const DetPoint&) const = default;
};

/// Accept iff similarity >= t, where t is the smallest value among the
/// impostor scores and +inf whose FAR does not exceed far_target. Throws
/// InsufficientImpostors when impostor count * far_target < 1 and
/// EmptyGenuine when there are no genuine scores.
DetPoint frr_at_far(const ScoreSet& scores, double far_target);

/// Sorted copy of a score set for evaluating many operating points.
class SortedScores {
 public:
  explicit SortedScores(const ScoreSet& scores);
  DetPoint at(double far_target) const;
  std::size_t genuine_count() const noexcept { return genuine_.size(); }
  std::size_t impostor_count() const noexcept { return impostor_.size(); }

 private:
  std::vector<double> genuine_;   // ascending
  std::vector<double> impostor_;  // descending
};

bool dual_fuse_verification(bool left_accept, bool right_accept) noexcept;

/// Dual-eye identification succeeds only when both eyes rank the true
/// subject first.
bool dual_rank1(const std::string& left_top_subject, const std::string& right_top_subject,
                const std::string& true_subject) noexcept;

/// Probes x gallery similarity matrix, row-major.
struct IdentificationMatrix {
  std::vector<std::string> gallery_ids;
  std::vector<std::string> gallery_classes;
  std::vector<std::string> probe_classes;
  std::vector<double> scores;
};

/// Column of the highest similarity; ties go to the smallest gallery id.
std::size_t top1_index(std::span<const double> row, std::span<const std::string> gallery_ids);

/// Fraction of probes whose top-1 gallery entry has the probe's class.
/// Throws EmptyGallery.
double rank1(const IdentificationMatrix& matrix);

struct OperatingPoint {
  double far_target = 0.0;
  std::optional<DetPoint> det;          // empty when impostors are too few
  std::optional<double> threshold_r;    // dual verification only
  bool operator==(const OperatingPoint&) const = default;
};

struct EvalResult {
  std::string protocol;
  std::string eye_mode;
  std::string task;
  std::size_t n_genuine = 0;
  std::size_t n_impostor = 0;
  std::vector<OperatingPoint> points;
  std::optional<double> rank1;
  bool operator==(const EvalResult&) const = default;
};

/// Verification over a score sheet. Dual sheets hold two rows per pair
/// (left then right); each eye gets its own threshold from its own
/// impostor scores and a pair is accepted only when both eyes accept.
EvalResult evaluate_verification(const ProtocolSpec& spec, const ScoreSheet& scores, std::span<const double> far_targets);

/// Rank-1 over an identification score sheet. Rows are grouped by probe;
/// a row's label says whether its gallery entry has the probe's class.
EvalResult evaluate_identification(const ProtocolSpec& spec, const ScoreSheet& scores);

}  // namespace irisbench
