#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace uds::io {

/// File-system or document problems (CLI exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run depends on. The output directory is where results go,
/// not what they are, so it is left out of the hash.
struct RunConfig {
  std::string command;
  nlohmann::json schedule;
  nlohmann::json options = nlohmann::json::object();
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string format = "csv";

  nlohmann::json to_json() const;  // without the output directory
  std::string hash() const;        // 16 hex digits, FNV-1a over the canonical dump
};

std::string fnv1a_hex(const std::string& bytes);

/// Shortest round-trip decimal form of a double.
std::string num(double v);

nlohmann::json read_json_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

}  // namespace uds::io
