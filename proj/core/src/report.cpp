#include "irisbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "irisbench/error.hpp"

namespace irisbench {

using nlohmann::ordered_json;

namespace {

ordered_json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number(const ordered_json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::Parse, "report: bad number '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

std::string report_json(const std::vector<EvalResult>& results) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) {
    ordered_json j;
    j["protocol"] = r.protocol;
    j["eye_mode"] = r.eye_mode;
    j["task"] = r.task;
    j["n_genuine"] = r.n_genuine;
    j["n_impostor"] = r.n_impostor;
    ordered_json points = ordered_json::array();
    for (const auto& p : r.points) {
      ordered_json pj;
      pj["far_target"] = p.far_target;
      if (p.det) {
        pj["achieved_far"] = p.det->achieved_far;
        pj["frr"] = p.det->frr;
        pj["threshold"] = number_or_inf(p.det->threshold);
      } else {
        pj["achieved_far"] = nullptr;
        pj["frr"] = nullptr;
        pj["threshold"] = nullptr;
      }
      if (p.threshold_r) pj["threshold_r"] = number_or_inf(*p.threshold_r);
      points.push_back(std::move(pj));
    }
    j["points"] = std::move(points);
    if (r.rank1) j["rank1"] = *r.rank1;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<EvalResult> parse_report_json(std::string_view text) {
  std::vector<EvalResult> out;
  try {
    const auto arr = ordered_json::parse(text);
    if (!arr.is_array()) throw Error(ErrorKind::Parse, "report: expected a JSON array");
    for (const auto& j : arr) {
      EvalResult r;
      r.protocol = j.at("protocol").get<std::string>();
      r.eye_mode = j.at("eye_mode").get<std::string>();
      r.task = j.at("task").get<std::string>();
      r.n_genuine = j.at("n_genuine").get<std::size_t>();
      r.n_impostor = j.at("n_impostor").get<std::size_t>();
      for (const auto& pj : j.at("points")) {
        OperatingPoint p;
        p.far_target = pj.at("far_target").get<double>();
        if (!pj.at("frr").is_null()) {
          p.det = DetPoint{p.far_target, pj.at("achieved_far").get<double>(), pj.at("frr").get<double>(),
                           read_number(pj.at("threshold"))};
        }
        if (pj.contains("threshold_r")) p.threshold_r = read_number(pj.at("threshold_r"));
        r.points.push_back(p);
      }
      if (j.contains("rank1")) r.rank1 = j.at("rank1").get<double>();
      out.push_back(std::move(r));
    }
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("report: ") + e.what());
  }
  return out;
}

std::vector<EvalResult> load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_report_json(ss.str());
}

std::string report_table(const std::vector<EvalResult>& results) {
  std::set<double, std::greater<>> fars;
  bool any_rank1 = false;
  for (const auto& r : results) {
    for (const auto& p : r.points) fars.insert(p.far_target);
    any_rank1 = any_rank1 || r.rank1.has_value();
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head = {"protocol", "eye", "task"};
  char buf[64];
  for (double f : fars) {
    std::snprintf(buf, sizeof buf, "FRR@%g", f);
    head.emplace_back(buf);
  }
  if (any_rank1) head.emplace_back("rank1");
  rows.push_back(head);
  for (const auto& r : results) {
    std::vector<std::string> row = {r.protocol, r.eye_mode, r.task};
    for (double f : fars) {
      auto it = std::find_if(r.points.begin(), r.points.end(), [&](const OperatingPoint& p) { return p.far_target == f; });
      if (it == r.points.end() || !it->det) {
        row.emplace_back("-");
      } else {
        std::snprintf(buf, sizeof buf, "%.2f", 100.0 * it->det->frr);
        row.emplace_back(buf);
      }
    }
    if (any_rank1) {
      if (r.rank1) {
        std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *r.rank1);
        row.emplace_back(buf);
      } else {
        row.emplace_back("-");
      }
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      const auto& cell = rows[i][c];
      if (c > 0) out += "  ";
      if (c < 3) {
        out += cell + std::string(width[c] - cell.size(), ' ');
      } else {
        out += std::string(width[c] - cell.size(), ' ') + cell;
      }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c > 0 ? 2 : 0);
      out += std::string(total, '-') + '\n';
    }
  }
  return out;
}

}  // namespace irisbench
