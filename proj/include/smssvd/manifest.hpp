#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

namespace smssvd {

inline constexpr const char* kToolVersion = "0.1.0";

// 64-bit FNV-1a content hash, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string file_digest(const std::filesystem::path& path);

// Provenance record written next to every command's outputs. Outputs are
// fully determined by (command_line, config, seed, input digests); the
// timestamp is informational only.
struct RunManifest {
  std::string command_line;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::map<std::string, std::string> inputs;   // relative path -> digest
  std::map<std::string, std::string> outputs;  // relative path -> digest
  std::string timestamp_utc;

  nlohmann::json to_json() const;
};

std::string current_timestamp_utc();
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace smssvd
