#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "irisbench/metrics.hpp"

namespace irisbench {

/// JSON array of results. Unresolvable operating points carry null
/// achieved_far/frr/threshold; an infinite threshold is written as "inf".
std::string report_json(const std::vector<EvalResult>& results);
std::vector<EvalResult> parse_report_json(std::string_view text);

/// Plain-text table: one row per (protocol, eye mode, task), one FRR column
/// per FAR target (largest first), plus a rank-1 column when any result
/// has one.
std::string report_table(const std::vector<EvalResult>& results);

std::vector<EvalResult> load_report(const std::filesystem::path& path);

}  // namespace irisbench
