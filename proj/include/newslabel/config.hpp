#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace newslabel {

// Flat, sectioned key = value configuration. Keys are addressed as
// "section.name"; every key can be overridden from the command line.
class PipelineConfig {
 public:
  PipelineConfig() = default;

  static PipelineConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_real(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;  // comma separated
  std::vector<double> get_real_list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& key,
                                         const std::vector<std::int64_t>& fallback) const;

  std::uint64_t seed() const { return static_cast<std::uint64_t>(get_int("run.seed", 1)); }
  std::filesystem::path output_dir() const;

  // resolved key/value echo embedded into every report
  nlohmann::ordered_json echo() const;

  // shared validation: referenced files exist, thresholds in range
  void validate() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace newslabel
