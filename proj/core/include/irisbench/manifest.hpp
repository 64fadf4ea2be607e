#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "irisbench/records.hpp"

namespace irisbench {

/// JSON Lines manifest, one SampleRecord per line.
///
/// Scalar fields are validated on load (ParseError carries the 1-based
/// line number, InvariantViolation names the sample and field) and
/// duplicate sample ids are rejected. Annotation geometry is parsed but
/// not judged here; failed annotations are the cleaning stage's business.
///
/// Masks are accepted inline as {"rle": "..."} or as {"path": "..."}
/// pointing to an 8-bit raster, resolved relative to `base_dir`.
std::vector<SampleRecord> parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {});
std::vector<SampleRecord> load_manifest(const std::filesystem::path& path);

std::string serialize_record(const SampleRecord& record);
void write_manifest(std::ostream& out, std::span<const SampleRecord> records);
void save_manifest(std::span<const SampleRecord> records, const std::filesystem::path& path);

}  // namespace irisbench
