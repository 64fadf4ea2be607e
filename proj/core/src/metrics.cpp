#include "irisbench/metrics.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

#include "irisbench/error.hpp"

namespace irisbench {

SortedScores::SortedScores(const ScoreSet& scores) : genuine_(scores.genuine), impostor_(scores.impostor) {
  std::sort(genuine_.begin(), genuine_.end());
  std::sort(impostor_.begin(), impostor_.end(), std::greater<>());
}

DetPoint SortedScores::at(double far_target) const {
  if (genuine_.empty()) throw Error(ErrorKind::EmptyGenuine, "no genuine scores");
  const double n_imp = static_cast<double>(impostor_.size());
  if (n_imp * far_target < 1.0 - 1e-9)
    throw Error(ErrorKind::InsufficientImpostors, std::to_string(impostor_.size()) + " impostor scores cannot resolve FAR " +
                                                      std::to_string(far_target));
  // Walk candidate thresholds from +inf downward; the accepted impostor
  // count only grows, so the last candidate within budget is the minimum.
  double threshold = std::numeric_limits<double>::infinity();
  std::size_t accepted = 0;
  std::size_t i = 0;
  while (i < impostor_.size()) {
    const double v = impostor_[i];
    std::size_t j = i;
    while (j < impostor_.size() && impostor_[j] == v) ++j;
    if (static_cast<double>(j) / n_imp > far_target) break;
    threshold = v;
    accepted = j;
    i = j;
  }
  DetPoint p;
  p.far_target = far_target;
  p.threshold = threshold;
  p.achieved_far = static_cast<double>(accepted) / n_imp;
  const auto below = std::lower_bound(genuine_.begin(), genuine_.end(), threshold) - genuine_.begin();
  p.frr = static_cast<double>(below) / static_cast<double>(genuine_.size());
  return p;
}

DetPoint frr_at_far(const ScoreSet& scores, double far_target) { return SortedScores(scores).at(far_target); }

bool dual_fuse_verification(bool left_accept, bool right_accept) noexcept { return left_accept && right_accept; }

bool dual_rank1(const std::string& left_top_subject, const std::string& right_top_subject,
                const std::string& true_subject) noexcept {
  return left_top_subject == true_subject && right_top_subject == true_subject;
}

std::size_t top1_index(std::span<const double> row, std::span<const std::string> gallery_ids) {
  if (row.empty()) throw Error(ErrorKind::EmptyGallery, "empty gallery");
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] > row[best] || (row[j] == row[best] && gallery_ids[j] < gallery_ids[best])) best = j;
  }
  return best;
}

double rank1(const IdentificationMatrix& m) {
  const std::size_t g = m.gallery_ids.size();
  if (g == 0) throw Error(ErrorKind::EmptyGallery, "empty gallery");
  if (m.gallery_classes.size() != g || m.scores.size() != m.probe_classes.size() * g)
    throw Error(ErrorKind::ShapeMismatch, "identification matrix shape disagrees with its labels");
  if (m.probe_classes.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t p = 0; p < m.probe_classes.size(); ++p) {
    const std::span<const double> row(m.scores.data() + p * g, g);
    if (m.gallery_classes[top1_index(row, m.gallery_ids)] == m.probe_classes[p]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(m.probe_classes.size());
}

namespace {

void check_sheet(const ProtocolSpec& spec, const ScoreSheet& scores) {
  if (spec.eye_mode == EyeMode::Dual && scores.rows.size() % 2 != 0)
    throw Error(ErrorKind::ShapeMismatch, "dual-eye score sheet needs two rows per pair");
}

OperatingPoint insufficient(double far) {
  OperatingPoint op;
  op.far_target = far;
  return op;
}

}  // namespace

EvalResult evaluate_verification(const ProtocolSpec& spec, const ScoreSheet& scores, std::span<const double> far_targets) {
  check_sheet(spec, scores);
  EvalResult out;
  out.protocol = to_string(spec.name);
  out.eye_mode = to_string(spec.eye_mode);
  out.task = to_string(Task::Verification);

  if (spec.eye_mode != EyeMode::Dual) {
    ScoreSet set;
    for (const auto& r : scores.rows) (r.genuine ? set.genuine : set.impostor).push_back(r.score.similarity);
    out.n_genuine = set.genuine.size();
    out.n_impostor = set.impostor.size();
    if (set.genuine.empty()) throw Error(ErrorKind::EmptyGenuine, "no genuine scores");
    const SortedScores sorted(set);
    for (double far : far_targets) {
      try {
        OperatingPoint op;
        op.far_target = far;
        op.det = sorted.at(far);
        out.points.push_back(op);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InsufficientImpostors) throw;
        out.points.push_back(insufficient(far));
      }
    }
    return out;
  }

  ScoreSet left, right;
  for (std::size_t i = 0; i < scores.rows.size(); i += 2) {
    const auto& l = scores.rows[i];
    const auto& r = scores.rows[i + 1];
    if (l.genuine != r.genuine) throw Error(ErrorKind::ShapeMismatch, "left and right rows of a pair disagree on label");
    (l.genuine ? left.genuine : left.impostor).push_back(l.score.similarity);
    (r.genuine ? right.genuine : right.impostor).push_back(r.score.similarity);
  }
  out.n_genuine = left.genuine.size();
  out.n_impostor = left.impostor.size();
  if (left.genuine.empty()) throw Error(ErrorKind::EmptyGenuine, "no genuine scores");
  const SortedScores sorted_l(left), sorted_r(right);
  for (double far : far_targets) {
    DetPoint dl, dr;
    try {
      dl = sorted_l.at(far);
      dr = sorted_r.at(far);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientImpostors) throw;
      out.points.push_back(insufficient(far));
      continue;
    }
    std::size_t gen_reject = 0, imp_accept = 0;
    for (std::size_t i = 0; i < scores.rows.size(); i += 2) {
      const bool accept = dual_fuse_verification(scores.rows[i].score.similarity >= dl.threshold,
                                                 scores.rows[i + 1].score.similarity >= dr.threshold);
      if (scores.rows[i].genuine) {
        gen_reject += accept ? 0 : 1;
      } else {
        imp_accept += accept ? 1 : 0;
      }
    }
    OperatingPoint op;
    op.far_target = far;
    op.det = DetPoint{far, static_cast<double>(imp_accept) / static_cast<double>(out.n_impostor),
                      static_cast<double>(gen_reject) / static_cast<double>(out.n_genuine), dl.threshold};
    op.threshold_r = dr.threshold;
    out.points.push_back(op);
  }
  return out;
}

EvalResult evaluate_identification(const ProtocolSpec& spec, const ScoreSheet& scores) {
  check_sheet(spec, scores);
  EvalResult out;
  out.protocol = to_string(spec.name);
  out.eye_mode = to_string(spec.eye_mode);
  out.task = to_string(Task::Identification);
  const bool dual = spec.eye_mode == EyeMode::Dual;
  const std::size_t stride = dual ? 2 : 1;

  struct Best {
    const ScoreRow* row[2] = {nullptr, nullptr};
  };
  // Keyed by probe sample index (left eye in dual mode); map order keeps
  // the evaluation independent of row order.
  std::map<std::pair<std::uint32_t, std::uint32_t>, Best> best;
  auto better = [&](const ScoreRow& cand, const ScoreRow* cur) {
    if (!cur) return true;
    if (cand.score.similarity != cur->score.similarity) return cand.score.similarity > cur->score.similarity;
    return scores.id(cand.reference) < scores.id(cur->reference);
  };
  for (std::size_t i = 0; i < scores.rows.size(); i += stride) {
    const auto key = std::make_pair(scores.rows[i].probe, dual ? scores.rows[i + 1].probe : kNoSample);
    Best& b = best[key];
    for (std::size_t side = 0; side < stride; ++side) {
      const ScoreRow& row = scores.rows[i + side];
      (row.genuine ? out.n_genuine : out.n_impostor) += side == 0 ? 1 : 0;
      if (better(row, b.row[side])) b.row[side] = &row;
    }
  }
  if (best.empty()) throw Error(ErrorKind::EmptyGallery, "no identification scores");
  std::size_t correct = 0;
  for (const auto& [key, b] : best) {
    const bool left_ok = b.row[0]->genuine;
    const bool ok = dual ? dual_fuse_verification(left_ok, b.row[1]->genuine) : left_ok;
    correct += ok ? 1 : 0;
  }
  out.rank1 = static_cast<double>(correct) / static_cast<double>(best.size());
  return out;
}

}  // namespace irisbench
