#include "irisbench/manifest.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "irisbench/error.hpp"

namespace irisbench {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 11> kKeys = {
    "sample_id", "subject_id", "eye", "gaze_point", "brightness_level", "frame_idx",
    "image_ref", "annotation", "quality", "category", "split"};

struct LineContext {
  std::size_t line = 0;
  std::string sample_id;
};

[[noreturn]] void parse_fail(const LineContext& ctx, const std::string& what) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(ctx.line) + ": " + what);
}

[[noreturn]] void invariant_fail(const LineContext& ctx, const std::string& field) {
  throw Error(ErrorKind::InvariantViolation,
              "sample '" + ctx.sample_id + "' (line " + std::to_string(ctx.line) + "): field " + field);
}

const json& require(const json& obj, const char* key, const LineContext& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(ctx, std::string("missing key '") + key + "'");
  return *it;
}

double get_number(const json& obj, const char* key, const LineContext& ctx) {
  const json& v = require(obj, key, ctx);
  if (!v.is_number()) parse_fail(ctx, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const char* key, const LineContext& ctx) {
  const json& v = require(obj, key, ctx);
  if (!v.is_number_integer()) parse_fail(ctx, std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const char* key, const LineContext& ctx) {
  const json& v = require(obj, key, ctx);
  if (!v.is_string()) parse_fail(ctx, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

json bbox_to_json(const BBox& b) { return {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}}; }

BBox bbox_from_json(const json& j, const LineContext& ctx) {
  if (!j.is_object()) parse_fail(ctx, "bbox must be an object");
  return {get_number(j, "x", ctx), get_number(j, "y", ctx), get_number(j, "w", ctx), get_number(j, "h", ctx)};
}

json ellipse_to_json(const Ellipse& e) {
  return {{"cx", e.cx}, {"cy", e.cy}, {"a", e.a}, {"b", e.b}, {"phi", e.phi}};
}

Ellipse ellipse_from_json(const json& j, const LineContext& ctx) {
  if (!j.is_object()) parse_fail(ctx, "ellipse must be an object");
  return {get_number(j, "cx", ctx), get_number(j, "cy", ctx), get_number(j, "a", ctx), get_number(j, "b", ctx),
          get_number(j, "phi", ctx)};
}

json mask_to_json(const MaskField& m) {
  if (m.source_path) return {{"path", *m.source_path}};
  return {{"rle", m.mask.to_string()}};
}

// External rasters: 0 = clear. For occlusion masks 2 marks eyelash and any
// other nonzero value marks eyelid; for reflection masks nonzero = 1.
MaskField mask_from_json(const json& j, bool occlusion, const std::filesystem::path& base_dir,
                         const LineContext& ctx) {
  if (!j.is_object()) parse_fail(ctx, "mask must be an object");
  MaskField field;
  if (auto it = j.find("rle"); it != j.end()) {
    if (!it->is_string()) parse_fail(ctx, "mask 'rle' must be a string");
    try {
      field.mask = RleMask::parse(it->get<std::string>());
    } catch (const Error& e) {
      parse_fail(ctx, e.what());
    }
    return field;
  }
  if (auto it = j.find("path"); it != j.end()) {
    if (!it->is_string()) parse_fail(ctx, "mask 'path' must be a string");
    field.source_path = it->get<std::string>();
    std::filesystem::path p(*field.source_path);
    if (p.is_relative()) p = base_dir / p;
    Image8 raster = read_image(p);
    for (auto& v : raster.pixels()) {
      if (v == 0) continue;
      v = occlusion ? (v == 2 ? std::uint8_t{2} : std::uint8_t{1}) : std::uint8_t{1};
    }
    field.mask = RleMask::from_raster(raster);
    return field;
  }
  parse_fail(ctx, "mask needs 'rle' or 'path'");
}

json annotation_to_json(const Annotation& a) {
  return {{"width", a.image_width},
          {"height", a.image_height},
          {"ocular_bbox", bbox_to_json(a.ocular_bbox)},
          {"iris_bbox", bbox_to_json(a.iris_bbox)},
          {"iris_ellipse", ellipse_to_json(a.iris_ellipse)},
          {"pupil_ellipse", ellipse_to_json(a.pupil_ellipse)},
          {"occlusion_mask", mask_to_json(a.occlusion_mask)},
          {"reflection_mask", mask_to_json(a.reflection_mask)}};
}

Annotation annotation_from_json(const json& j, const std::filesystem::path& base_dir, const LineContext& ctx) {
  if (!j.is_object()) parse_fail(ctx, "annotation must be an object");
  Annotation a;
  a.image_width = get_int(j, "width", ctx);
  a.image_height = get_int(j, "height", ctx);
  a.ocular_bbox = bbox_from_json(require(j, "ocular_bbox", ctx), ctx);
  a.iris_bbox = bbox_from_json(require(j, "iris_bbox", ctx), ctx);
  a.iris_ellipse = ellipse_from_json(require(j, "iris_ellipse", ctx), ctx);
  a.pupil_ellipse = ellipse_from_json(require(j, "pupil_ellipse", ctx), ctx);
  a.occlusion_mask = mask_from_json(require(j, "occlusion_mask", ctx), true, base_dir, ctx);
  a.reflection_mask = mask_from_json(require(j, "reflection_mask", ctx), false, base_dir, ctx);
  return a;
}

json quality_to_json(const QualityScores& q) {
  return {{"eyelid_occ", q.eyelid_occ},
          {"eyelash_occ", q.eyelash_occ},
          {"pupil_ratio", q.pupil_ratio},
          {"gaze_dev", q.gaze_dev},
          {"reflection", q.reflection}};
}

QualityScores quality_from_json(const json& j, const LineContext& ctx) {
  if (!j.is_object()) parse_fail(ctx, "quality must be an object");
  QualityScores q;
  const std::pair<const char*, double*> fields[] = {{"eyelid_occ", &q.eyelid_occ},
                                                    {"eyelash_occ", &q.eyelash_occ},
                                                    {"pupil_ratio", &q.pupil_ratio},
                                                    {"gaze_dev", &q.gaze_dev},
                                                    {"reflection", &q.reflection}};
  for (auto [key, dst] : fields) {
    *dst = get_number(j, key, ctx);
    if (!(*dst >= 0.0 && *dst <= 1.0)) invariant_fail(ctx, std::string("quality.") + key);
  }
  return q;
}

SampleRecord record_from_json(const json& j, const std::filesystem::path& base_dir, LineContext& ctx) {
  if (!j.is_object()) parse_fail(ctx, "record must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) parse_fail(ctx, "unknown key '" + key + "'");
  }
  SampleRecord r;
  r.sample_id = get_string(j, "sample_id", ctx);
  ctx.sample_id = r.sample_id;
  if (r.sample_id.empty()) invariant_fail(ctx, "sample_id");
  r.subject_id = get_string(j, "subject_id", ctx);
  if (r.subject_id.empty()) invariant_fail(ctx, "subject_id");
  auto eye = parse_eye(get_string(j, "eye", ctx));
  if (!eye) invariant_fail(ctx, "eye");
  r.eye = *eye;
  r.gaze_point = get_int(j, "gaze_point", ctx);
  if (r.gaze_point < 1 || r.gaze_point > kGazePoints) invariant_fail(ctx, "gaze_point");
  r.brightness_level = get_int(j, "brightness_level", ctx);
  if (r.brightness_level < 0 || r.brightness_level >= kBrightnessLevels) invariant_fail(ctx, "brightness_level");
  r.frame_idx = get_int(j, "frame_idx", ctx);
  if (r.frame_idx < 0 || r.frame_idx >= kFramesPerLevel) invariant_fail(ctx, "frame_idx");
  r.image_ref = get_string(j, "image_ref", ctx);

  auto optional_field = [&](const char* key) -> const json* {
    auto it = j.find(key);
    return (it == j.end() || it->is_null()) ? nullptr : &*it;
  };
  if (const json* a = optional_field("annotation")) r.annotation = annotation_from_json(*a, base_dir, ctx);
  if (const json* q = optional_field("quality")) r.quality = quality_from_json(*q, ctx);
  if (const json* c = optional_field("category")) {
    if (!c->is_string()) parse_fail(ctx, "'category' must be a string");
    r.category = parse_category(c->get<std::string>());
    if (!r.category) invariant_fail(ctx, "category");
  }
  if (const json* s = optional_field("split")) {
    if (!s->is_string()) parse_fail(ctx, "'split' must be a string");
    r.split = parse_split(s->get<std::string>());
    if (!r.split) invariant_fail(ctx, "split");
  }
  return r;
}

json record_to_json(const SampleRecord& r) {
  json j = json::object();
  j["sample_id"] = r.sample_id;
  j["subject_id"] = r.subject_id;
  j["eye"] = std::string(to_string(r.eye));
  j["gaze_point"] = r.gaze_point;
  j["brightness_level"] = r.brightness_level;
  j["frame_idx"] = r.frame_idx;
  j["image_ref"] = r.image_ref;
  j["annotation"] = r.annotation ? annotation_to_json(*r.annotation) : json(nullptr);
  j["quality"] = r.quality ? quality_to_json(*r.quality) : json(nullptr);
  j["category"] = r.category ? json(std::string(to_string(*r.category))) : json(nullptr);
  j["split"] = r.split ? json(std::string(to_string(*r.split))) : json(nullptr);
  return j;
}

}  // namespace

std::vector<SampleRecord> parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  std::vector<SampleRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  LineContext ctx;
  while (std::getline(in, line)) {
    ++ctx.line;
    ctx.sample_id.clear();
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      parse_fail(ctx, e.what());
    }
    SampleRecord r = record_from_json(j, base_dir, ctx);
    if (!seen.insert(r.sample_id).second)
      throw Error(ErrorKind::DuplicateId,
                  "sample id '" + r.sample_id + "' repeated at line " + std::to_string(ctx.line));
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SampleRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + path.string());
  return parse_manifest(in, path.parent_path());
}

std::string serialize_record(const SampleRecord& record) { return record_to_json(record).dump(); }

void write_manifest(std::ostream& out, std::span<const SampleRecord> records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

void save_manifest(std::span<const SampleRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write manifest " + path.string());
  write_manifest(out, records);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace irisbench
