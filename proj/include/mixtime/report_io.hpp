#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mixtime {

extern const char* const kToolVersion;
extern const int kCsvHeaderVersion;

// 17 significant digits, enough to round-trip any double bit-faithfully.
std::string fmt17(double v);

std::string sha256_hex(const std::string& bytes);

// Sorted keys, minimal whitespace. Hash input and the manifest parameter block
// both use this form so repeated runs agree byte for byte.
std::string canonical_json(const nlohmann::json& j);
std::string config_hash(const nlohmann::json& config);

struct RunManifest {
  std::string tool_version;
  std::string config_sha256;
  std::string subcommand;
  nlohmann::json parameters;
  std::string timestamp;  // UTC; embedded in JSON reports only, never in CSV
};

RunManifest make_manifest(const std::string& subcommand, const nlohmann::json& config,
                          nlohmann::json parameters);

nlohmann::json manifest_json(const RunManifest& m);

// '#'-prefixed header block (version, tool, config hash, subcommand,
// parameters) followed by the column row. Timestamps are excluded so two runs
// of the same config produce identical bytes.
std::string csv_header(const RunManifest& m, const std::vector<std::string>& columns);

std::string csv_escape(const std::string& field);

// Write-to-temp-then-rename in the target directory.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace mixtime
