#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fk {

/// Write via temp file + rename, so readers never see partial artifacts.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

/// 17 significant digits, enough to round-trip a double exactly.
std::string format_double(double v);

/// One CSV line; doubles go through format_double.
std::string csv_row(const std::vector<std::string>& cells);

std::string read_file(const std::filesystem::path& path);

/// FNV-1a of the canonical (sorted-key) JSON dump, 16 hex digits.
std::string json_hash(const nlohmann::json& j);

/// manifest.json content for a run: version, subcommand, resolved config,
/// and the config hash.
nlohmann::json make_manifest(const std::string& subcommand, const nlohmann::json& config);

void write_manifest(const std::filesystem::path& dir, const std::string& subcommand,
                    const nlohmann::json& config);

}  // namespace fk
