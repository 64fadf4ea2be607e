#include "irisbench/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "irisbench/error.hpp"
#include "irisbench/random.hpp"

namespace irisbench {

std::string_view to_string(ProtocolName name) noexcept {
  switch (name) {
    case ProtocolName::Occlusion: return "occlusion";
    case ProtocolName::Dilation: return "dilation";
    case ProtocolName::Light: return "light";
    case ProtocolName::Angle: return "angle";
    case ProtocolName::Control: return "control";
    case ProtocolName::Fix: return "fix";
    case ProtocolName::Select: return "select";
    case ProtocolName::Any: return "any";
  }
  return "?";
}

std::string_view to_string(Task task) noexcept {
  return task == Task::Verification ? "verification" : "identification";
}

std::string_view to_string(EyeMode mode) noexcept {
  switch (mode) {
    case EyeMode::Left: return "left";
    case EyeMode::Right: return "right";
    case EyeMode::Dual: return "dual";
  }
  return "?";
}

std::optional<ProtocolName> parse_protocol_name(std::string_view text) noexcept {
  for (auto n : kAllProtocols)
    if (to_string(n) == text) return n;
  return std::nullopt;
}

std::optional<Task> parse_task(std::string_view text) noexcept {
  if (text == "verification") return Task::Verification;
  if (text == "identification") return Task::Identification;
  return std::nullopt;
}

std::optional<EyeMode> parse_eye_mode(std::string_view text) noexcept {
  for (auto m : {EyeMode::Left, EyeMode::Right, EyeMode::Dual})
    if (to_string(m) == text) return m;
  return std::nullopt;
}

bool is_factor_protocol(ProtocolName name) noexcept {
  switch (name) {
    case ProtocolName::Fix:
    case ProtocolName::Select:
    case ProtocolName::Any: return false;
    default: return true;
  }
}

std::size_t ProtocolSpec::impostor_cap() const noexcept {
  if (caps.impostor) return *caps.impostor;
  return is_factor_protocol(name) ? kFactorImpostorCap : kGeneralImpostorCap;
}

void ProtocolSpec::validate() const {
  if (task == Task::Identification && name == ProtocolName::Dilation)
    throw Error(ErrorKind::InvalidSpec, "protocol 'dilation' is not defined for identification");
  if (eye_mode == EyeMode::Dual && name == ProtocolName::Select)
    throw Error(ErrorKind::InvalidSpec, "protocol 'select' has no dual-eye mode");
  const std::size_t imp_limit = is_factor_protocol(name) ? kFactorImpostorCap : kGeneralImpostorCap;
  if (caps.genuine > kGenuineCap)
    throw Error(ErrorKind::InvalidSpec, "genuine cap above " + std::to_string(kGenuineCap));
  if (impostor_cap() > imp_limit)
    throw Error(ErrorKind::InvalidSpec, "impostor cap above " + std::to_string(imp_limit) + " for '" +
                                            std::string(to_string(name)) + "'");
  if (caps.probes_per_class > kProbesPerClassCap)
    throw Error(ErrorKind::InvalidSpec, "probe cap above " + std::to_string(kProbesPerClassCap));
  if (!thresholds.valid()) throw Error(ErrorKind::InvalidSpec, "quality thresholds must lie in (0, 1)");
}

std::size_t PairList::genuine_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const PairEntry& p) { return p.genuine; }));
}

std::vector<SampleRecord> split_dataset(std::vector<SampleRecord> records, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorKind::InvalidSpec, "split ratio must lie in (0, 1)");
  std::set<std::string> subject_set;
  for (const auto& r : records) subject_set.insert(r.subject_id);
  if (subject_set.size() < 2)
    throw Error(ErrorKind::TooFewSubjects, "split needs at least 2 subjects, got " + std::to_string(subject_set.size()));
  std::vector<std::string> subjects(subject_set.begin(), subject_set.end());
  const auto n = static_cast<long>(subjects.size());
  Rng rng(derive_seed(seed, "split"));
  for (std::size_t i = subjects.size() - 1; i > 0; --i) std::swap(subjects[i], subjects[rng.below(i + 1)]);
  const long n_train = std::clamp(std::lround(ratio * static_cast<double>(n)), 1L, n - 1);
  const std::set<std::string> train(subjects.begin(), subjects.begin() + n_train);
  for (auto& r : records) r.split = train.contains(r.subject_id) ? Split::Train : Split::Test;
  return records;
}

QualityFlags quality_flags(const SampleRecord& record, const QualityThresholds& thresholds) {
  if (!record.quality)
    throw Error(ErrorKind::InvariantViolation, "sample '" + record.sample_id + "' has no quality scores");
  return categorize(*record.quality, thresholds).exceeded;
}

namespace {

bool select_gaze_allowed(Eye eye, int gaze) noexcept {
  if (eye == Eye::Left) return gaze % 3 != 0;  // drops 3, 6, 9
  return gaze % 3 != 1;                        // drops 1, 4, 7
}

const QualityFlags kOcclusionDims{QualityDim::Eyelid, QualityDim::Eyelash};
const QualityFlags kPupilOnly{QualityDim::PupilRatio};

}  // namespace

bool probe_side_ok(ProtocolName name, const SampleRecord& record, const QualityThresholds& thresholds) {
  switch (name) {
    case ProtocolName::Fix:
    case ProtocolName::Any: return true;
    case ProtocolName::Select: return select_gaze_allowed(record.eye, record.gaze_point);
    default: break;
  }
  const QualityFlags f = quality_flags(record, thresholds);
  switch (name) {
    case ProtocolName::Occlusion: return !f.empty() && f.subset_of(kOcclusionDims);
    case ProtocolName::Dilation:
    case ProtocolName::Light: return f == kPupilOnly;
    default: return f.empty();
  }
}

bool reference_side_ok(ProtocolName name, const SampleRecord& record, const QualityThresholds& thresholds) {
  if (name == ProtocolName::Light) return quality_flags(record, thresholds).empty();
  return probe_side_ok(name, record, thresholds);
}

bool gaze_relation_ok(ProtocolName name, int probe_gaze, int reference_gaze) noexcept {
  switch (name) {
    case ProtocolName::Angle: return probe_gaze != reference_gaze;
    case ProtocolName::Select:
    case ProtocolName::Any: return true;
    default: return probe_gaze == reference_gaze;
  }
}

bool verification_pair_ok(const ProtocolSpec& spec, const SampleRecord& probe, const SampleRecord& reference,
                          bool genuine) {
  if (spec.eye_mode == EyeMode::Dual) return false;
  const Eye eye = spec.eye_mode == EyeMode::Left ? Eye::Left : Eye::Right;
  if (probe.eye != eye || reference.eye != eye) return false;
  if (probe.split == Split::Train || reference.split == Split::Train) return false;
  if (probe.sample_id == reference.sample_id) return false;
  if (!probe_side_ok(spec.name, probe, spec.thresholds)) return false;
  if (!reference_side_ok(spec.name, reference, spec.thresholds)) return false;
  if (!gaze_relation_ok(spec.name, probe.gaze_point, reference.gaze_point)) return false;
  return genuine == (probe.class_key() == reference.class_key());
}

namespace {

// A unit is one sample (single-eye mode) or one simultaneous L/R group
// (dual mode). Units are sorted class-major, then by sample id.
struct Unit {
  std::array<std::uint32_t, 2> ids{kNoSample, kNoSample};
  std::uint32_t klass = 0;
  int gaze = 0;
  std::uint64_t hash = 0;
  bool probe_ok = false;
  bool ref_ok = false;
  bool standard = false;
};

struct UnitSet {
  std::vector<std::string> ids;
  std::vector<std::string> class_names;
  std::vector<Unit> units;
};

UnitSet collect_units(const ProtocolSpec& spec, std::span<const SampleRecord> records) {
  std::vector<const SampleRecord*> usable;
  for (const auto& r : records) {
    if (r.split == Split::Train) continue;
    if (spec.eye_mode == EyeMode::Left && r.eye != Eye::Left) continue;
    if (spec.eye_mode == EyeMode::Right && r.eye != Eye::Right) continue;
    usable.push_back(&r);
  }
  std::sort(usable.begin(), usable.end(),
            [](const SampleRecord* a, const SampleRecord* b) { return a->sample_id < b->sample_id; });
  for (std::size_t i = 1; i < usable.size(); ++i)
    if (usable[i]->sample_id == usable[i - 1]->sample_id)
      throw Error(ErrorKind::DuplicateId, "duplicate sample id '" + usable[i]->sample_id + "'");

  UnitSet out;
  out.ids.reserve(usable.size());
  for (const auto* r : usable) out.ids.push_back(r->sample_id);

  auto side_flags = [&](const SampleRecord& r, Unit& u, bool first) {
    const bool p = probe_side_ok(spec.name, r, spec.thresholds);
    const bool q = reference_side_ok(spec.name, r, spec.thresholds);
    const bool s = quality_flags(r, spec.thresholds).empty();
    u.probe_ok = first ? p : (u.probe_ok && p);
    u.ref_ok = first ? q : (u.ref_ok && q);
    u.standard = first ? s : (u.standard && s);
  };

  std::map<std::string, std::uint32_t> class_index;
  std::vector<std::pair<std::string, Unit>> keyed;
  if (spec.eye_mode != EyeMode::Dual) {
    for (std::uint32_t i = 0; i < usable.size(); ++i) {
      const auto& r = *usable[i];
      Unit u;
      u.ids[0] = i;
      u.gaze = r.gaze_point;
      u.hash = fnv1a(r.sample_id);
      side_flags(r, u, true);
      keyed.emplace_back(r.subject_id + (r.eye == Eye::Left ? "/L" : "/R"), u);
    }
  } else {
    using GroupKey = std::tuple<std::string, int, int, int>;
    std::map<GroupKey, std::array<std::uint32_t, 2>> groups;
    for (std::uint32_t i = 0; i < usable.size(); ++i) {
      const auto& r = *usable[i];
      auto [it, inserted] = groups.try_emplace(GroupKey{r.subject_id, r.gaze_point, r.brightness_level, r.frame_idx},
                                               std::array<std::uint32_t, 2>{kNoSample, kNoSample});
      auto& slot = it->second[r.eye == Eye::Left ? 0 : 1];
      if (slot != kNoSample)
        throw Error(ErrorKind::DuplicateId, "two '" + std::string(to_string(r.eye)) + "' samples share capture slot of '" +
                                                r.sample_id + "'");
      slot = i;
    }
    for (const auto& [key, slots] : groups) {
      if (slots[0] == kNoSample || slots[1] == kNoSample) continue;
      Unit u;
      u.ids = slots;
      u.gaze = std::get<1>(key);
      u.hash = mix_seed(fnv1a(out.ids[slots[0]]), fnv1a(out.ids[slots[1]]));
      side_flags(*usable[slots[0]], u, true);
      side_flags(*usable[slots[1]], u, false);
      keyed.emplace_back(std::get<0>(key), u);
    }
  }
  for (const auto& [name, u] : keyed) class_index.emplace(name, 0);
  for (std::uint32_t k = 0; auto& [name, idx] : class_index) {
    idx = k++;
    out.class_names.push_back(name);
  }
  for (auto& [name, u] : keyed) {
    u.klass = class_index.at(name);
    out.units.push_back(u);
  }
  std::stable_sort(out.units.begin(), out.units.end(), [](const Unit& a, const Unit& b) {
    if (a.klass != b.klass) return a.klass < b.klass;
    return a.ids[0] < b.ids[0];
  });
  return out;
}

struct Ranked {
  std::uint64_t hash;
  std::uint64_t order;
  std::uint32_t a;
  std::uint32_t b;
  bool operator<(const Ranked& o) const noexcept { return std::tie(hash, order) < std::tie(o.hash, o.order); }
};

// Keeps the `cap` candidates with the smallest hash without storing the
// rest of the candidate stream.
class BoundedRanking {
 public:
  explicit BoundedRanking(std::size_t cap) : cap_(cap) {}

  void offer(const Ranked& r) {
    if (cap_ == 0) return;
    if (heap_.size() < cap_) {
      heap_.push(r);
    } else if (r < heap_.top()) {
      heap_.pop();
      heap_.push(r);
    }
  }

  std::vector<Ranked> take() {
    std::vector<Ranked> out;
    out.reserve(heap_.size());
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  std::size_t cap_;
  std::priority_queue<Ranked> heap_;
};

PairEntry make_entry(const Unit& p, const Unit& r, bool genuine) {
  PairEntry e;
  e.probe = p.ids;
  e.reference = r.ids;
  e.genuine = genuine;
  return e;
}

std::string constraint_text(ProtocolName name) {
  switch (name) {
    case ProtocolName::Occlusion: return "eyelid/eyelash-only challenging samples";
    case ProtocolName::Dilation: return "pupil-only challenging samples";
    case ProtocolName::Light: return "pupil-only challenging probes with standard references";
    case ProtocolName::Angle: return "standard samples at differing gaze points";
    case ProtocolName::Control: return "standard samples";
    case ProtocolName::Fix: return "samples sharing a gaze point";
    case ProtocolName::Select: return "samples at the allowed gaze points";
    case ProtocolName::Any: return "test samples";
  }
  return "?";
}

[[noreturn]] void empty_pool(ProtocolName name, const std::string& what) {
  throw Error(ErrorKind::EmptyPool, "protocol '" + std::string(to_string(name)) + "': " + what + " (" +
                                        constraint_text(name) + ")");
}

}  // namespace

PairList build_verification(const ProtocolSpec& spec, std::span<const SampleRecord> records) {
  spec.validate();
  if (spec.task != Task::Verification) throw Error(ErrorKind::InvalidSpec, "spec task is not verification");
  UnitSet set = collect_units(spec, records);
  const bool ordered = spec.name == ProtocolName::Light;

  std::vector<std::uint32_t> probes, refs;
  for (std::uint32_t i = 0; i < set.units.size(); ++i) {
    if (set.units[i].probe_ok) probes.push_back(i);
    if (set.units[i].ref_ok) refs.push_back(i);
  }
  if (probes.empty() || refs.empty()) empty_pool(spec.name, "no sample satisfies the pool constraint");

  const std::uint64_t gen_seed = derive_seed(spec.seed, "genuine:" + std::string(to_string(spec.name)));
  const std::uint64_t imp_seed = derive_seed(spec.seed, "impostor:" + std::string(to_string(spec.name)));
  auto pair_hash = [](std::uint64_t seed, const Unit& a, const Unit& b) { return mix_seed(mix_seed(seed, a.hash), b.hash); };

  BoundedRanking genuine(spec.caps.genuine);
  BoundedRanking impostor(spec.impostor_cap());
  std::uint64_t order = 0;
  auto consider = [&](std::uint32_t ia, std::uint32_t ib) {
    const Unit& a = set.units[ia];
    const Unit& b = set.units[ib];
    if (!gaze_relation_ok(spec.name, a.gaze, b.gaze)) return;
    if (a.klass == b.klass)
      genuine.offer({pair_hash(gen_seed, a, b), order++, ia, ib});
    else
      impostor.offer({pair_hash(imp_seed, a, b), 0, ia, ib});
  };
  if (ordered) {
    for (auto ia : probes)
      for (auto ib : refs) consider(ia, ib);
  } else {
    // Same-class pairs come out in class-major lexicographic order because
    // units are sorted that way.
    for (std::size_t x = 0; x < probes.size(); ++x)
      for (std::size_t y = x + 1; y < probes.size(); ++y) consider(probes[x], probes[y]);
  }

  PairList out;
  out.spec = spec;
  out.ids = std::move(set.ids);
  auto gen = genuine.take();
  std::sort(gen.begin(), gen.end(), [](const Ranked& a, const Ranked& b) { return a.order < b.order; });
  auto imp = impostor.take();
  if (gen.empty()) empty_pool(spec.name, "no genuine pair satisfies the pairing rule");
  if (imp.empty()) empty_pool(spec.name, "no impostor pair satisfies the pairing rule");
  out.pairs.reserve(gen.size() + imp.size());
  for (const auto& r : gen) out.pairs.push_back(make_entry(set.units[r.a], set.units[r.b], true));
  for (const auto& r : imp) out.pairs.push_back(make_entry(set.units[r.a], set.units[r.b], false));
  return out;
}

PairList build_identification(const ProtocolSpec& spec, std::span<const SampleRecord> records) {
  spec.validate();
  if (spec.task != Task::Identification) throw Error(ErrorKind::InvalidSpec, "spec task is not identification");
  UnitSet set = collect_units(spec, records);
  PairList out;
  out.spec = spec;

  const std::uint64_t gallery_seed = derive_seed(spec.seed, "gallery");
  const std::uint64_t probe_seed = derive_seed(spec.seed, "probes:" + std::string(to_string(spec.name)));
  const std::size_t n_classes = set.class_names.size();

  std::vector<std::optional<std::uint32_t>> gallery(n_classes);
  for (std::uint32_t i = 0; i < set.units.size(); ++i) {
    const Unit& u = set.units[i];
    if (!u.standard || u.gaze != kCenterGazePoint) continue;
    auto& g = gallery[u.klass];
    if (!g || mix_seed(gallery_seed, u.hash) < mix_seed(gallery_seed, set.units[*g].hash)) g = i;
  }
  std::vector<std::uint32_t> gallery_units;
  for (std::size_t k = 0; k < n_classes; ++k) {
    if (gallery[k]) {
      gallery_units.push_back(*gallery[k]);
    } else {
      out.warnings.push_back("class " + set.class_names[k] + " has no standard gaze-5 sample; dropped");
    }
  }
  if (gallery_units.empty()) throw Error(ErrorKind::EmptyGallery, "no class has an eligible gallery sample");

  std::vector<std::uint32_t> probe_units;
  for (std::size_t k = 0; k < n_classes; ++k) {
    if (!gallery[k]) continue;
    const Unit& g = set.units[*gallery[k]];
    std::vector<std::pair<std::uint64_t, std::uint32_t>> eligible;
    for (std::uint32_t i = 0; i < set.units.size(); ++i) {
      const Unit& u = set.units[i];
      if (u.klass != k || i == *gallery[k] || !u.probe_ok) continue;
      if (!gaze_relation_ok(spec.name, u.gaze, g.gaze)) continue;
      eligible.emplace_back(mix_seed(probe_seed, u.hash), i);
    }
    if (eligible.size() > spec.caps.probes_per_class) {
      std::nth_element(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(spec.caps.probes_per_class),
                       eligible.end());
      eligible.resize(spec.caps.probes_per_class);
    }
    std::vector<std::uint32_t> chosen;
    for (const auto& e : eligible) chosen.push_back(e.second);
    std::sort(chosen.begin(), chosen.end());
    probe_units.insert(probe_units.end(), chosen.begin(), chosen.end());
  }
  if (probe_units.empty()) empty_pool(spec.name, "no probe satisfies the pool constraint");

  out.ids = std::move(set.ids);
  out.pairs.reserve(probe_units.size() * gallery_units.size());
  for (auto p : probe_units)
    for (auto g : gallery_units)
      out.pairs.push_back(make_entry(set.units[p], set.units[g], set.units[p].klass == set.units[g].klass));
  return out;
}

PairList build_protocol(const ProtocolSpec& spec, std::span<const SampleRecord> records) {
  return spec.task == Task::Verification ? build_verification(spec, records) : build_identification(spec, records);
}

}  // namespace irisbench
