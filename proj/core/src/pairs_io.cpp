#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "irisbench/error.hpp"
#include "irisbench/protocols.hpp"

namespace irisbench {

using nlohmann::json;

std::string ProtocolSpec::to_json() const {
  json j;
  j["name"] = to_string(name);
  j["task"] = to_string(task);
  j["eye_mode"] = to_string(eye_mode);
  j["seed"] = seed;
  j["caps"] = {{"genuine", caps.genuine},
               {"impostor", caps.impostor ? json(*caps.impostor) : json(nullptr)},
               {"probes_per_class", caps.probes_per_class}};
  j["thresholds"] = {{"eyelid", thresholds.eyelid},
                     {"eyelash", thresholds.eyelash},
                     {"pupil_ratio", thresholds.pupil_ratio},
                     {"gaze_dev", thresholds.gaze_dev},
                     {"reflection", thresholds.reflection}};
  return j.dump();
}

ProtocolSpec ProtocolSpec::from_json(std::string_view text) {
  ProtocolSpec s;
  try {
    const json j = json::parse(text);
    auto need = []<typename T>(std::optional<T> v, std::string_view what) {
      if (!v) throw Error(ErrorKind::Parse, "protocol spec: bad " + std::string(what));
      return *v;
    };
    s.name = need(parse_protocol_name(j.at("name").get<std::string>()), "name");
    s.task = need(parse_task(j.at("task").get<std::string>()), "task");
    s.eye_mode = need(parse_eye_mode(j.at("eye_mode").get<std::string>()), "eye_mode");
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto& c = j.at("caps");
    s.caps.genuine = c.at("genuine").get<std::size_t>();
    if (!c.at("impostor").is_null()) s.caps.impostor = c.at("impostor").get<std::size_t>();
    s.caps.probes_per_class = c.at("probes_per_class").get<std::size_t>();
    const auto& t = j.at("thresholds");
    s.thresholds.eyelid = t.at("eyelid").get<double>();
    s.thresholds.eyelash = t.at("eyelash").get<double>();
    s.thresholds.pupil_ratio = t.at("pupil_ratio").get<double>();
    s.thresholds.gaze_dev = t.at("gaze_dev").get<double>();
    s.thresholds.reflection = t.at("reflection").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("protocol spec: ") + e.what());
  }
  return s;
}

namespace {

std::string header_line(bool dual) {
  return dual ? "probe_id,probe_id_r,reference_id,reference_id_r,label" : "probe_id,reference_id,label";
}

}  // namespace

void write_pairs(std::ostream& out, const PairList& pairs) {
  const bool dual = pairs.dual();
  out << "# " << pairs.spec.to_json() << '\n' << header_line(dual) << '\n';
  for (const auto& p : pairs.pairs) {
    out << pairs.id(p.probe[0]);
    if (dual) out << ',' << pairs.id(p.probe[1]);
    out << ',' << pairs.id(p.reference[0]);
    if (dual) out << ',' << pairs.id(p.reference[1]);
    out << ',' << (p.genuine ? '1' : '0') << '\n';
  }
}

void save_pairs(const PairList& pairs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_pairs(out, pairs);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

PairList read_pairs(std::istream& in) {
  PairList out;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw Error(ErrorKind::Parse, "pairs line 1: expected '# ' followed by the protocol spec");
  out.spec = ProtocolSpec::from_json(std::string_view(line).substr(2));
  const bool dual = out.dual();
  ++line_no;
  if (!std::getline(in, line) || line != header_line(dual))
    throw Error(ErrorKind::Parse, "pairs line 2: expected header '" + header_line(dual) + "'");

  std::unordered_map<std::string, std::uint32_t> index;
  auto intern = [&](std::string_view id) {
    auto [it, inserted] = index.try_emplace(std::string(id), static_cast<std::uint32_t>(out.ids.size()));
    if (inserted) out.ids.emplace_back(id);
    return it->second;
  };
  const std::size_t fields = dual ? 5 : 3;
  std::vector<std::string_view> parts;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    parts.clear();
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      parts.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (parts.size() != fields || (parts.back() != "0" && parts.back() != "1"))
      throw Error(ErrorKind::Parse, "pairs line " + std::to_string(line_no) + ": malformed row");
    for (std::size_t i = 0; i + 1 < fields; ++i)
      if (parts[i].empty()) throw Error(ErrorKind::Parse, "pairs line " + std::to_string(line_no) + ": empty id");
    PairEntry e;
    if (dual) {
      e.probe = {intern(parts[0]), intern(parts[1])};
      e.reference = {intern(parts[2]), intern(parts[3])};
    } else {
      e.probe[0] = intern(parts[0]);
      e.reference[0] = intern(parts[1]);
    }
    e.genuine = parts.back() == "1";
    out.pairs.push_back(e);
  }
  return out;
}

PairList load_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  return read_pairs(in);
}

}  // namespace irisbench
