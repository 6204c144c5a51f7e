#include "newslabel/config.hpp"

#include <algorithm>
#include <fstream>

#include "newslabel/errors.hpp"

namespace newslabel {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

}  // namespace

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  PipelineConfig config;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("bad section header on line " + std::to_string(line_no));
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) throw ConfigError("empty section name on line " + std::to_string(line_no));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key = value on line " + std::to_string(line_no));
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key on line " + std::to_string(line_no));
    if (section.empty()) throw ConfigError("key outside any section on line " + std::to_string(line_no));
    config.values_[section + "." + key] = value;
  }
  return config;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key.find('.') == std::string::npos) {
    throw ConfigError("config key '" + key + "' must be section.name");
  }
  values_[key] = value;
}

bool PipelineConfig::has(const std::string& key) const {
  auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

std::string PipelineConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() || it->second.empty() ? fallback : it->second;
}

std::string PipelineConfig::require_string(const std::string& key) const {
  if (!has(key)) throw ConfigError("missing required config key '" + key + "'");
  return values_.at(key);
}

std::int64_t PipelineConfig::get_int(const std::string& key, std::int64_t fallback) const {
  if (!has(key)) return fallback;
  try {
    return std::stoll(values_.at(key));
  } catch (...) {
    throw ConfigError("config key '" + key + "' is not an integer: '" + values_.at(key) + "'");
  }
}

double PipelineConfig::get_real(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  try {
    return std::stod(values_.at(key));
  } catch (...) {
    throw ConfigError("config key '" + key + "' is not a number: '" + values_.at(key) + "'");
  }
}

bool PipelineConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = values_.at(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: '" + values_.at(key) + "'");
}

std::vector<std::string> PipelineConfig::get_list(const std::string& key) const {
  std::vector<std::string> items;
  if (!has(key)) return items;
  const std::string& value = values_.at(key);
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const std::string item =
        trim(comma == std::string::npos ? value.substr(start) : value.substr(start, comma - start));
    if (!item.empty()) items.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

std::vector<double> PipelineConfig::get_real_list(const std::string& key,
                                                  const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : get_list(key)) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw ConfigError("config key '" + key + "' has a non-numeric item: '" + item + "'");
    }
  }
  return out;
}

std::vector<std::int64_t> PipelineConfig::get_int_list(
    const std::string& key, const std::vector<std::int64_t>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::int64_t> out;
  for (const auto& item : get_list(key)) {
    try {
      out.push_back(std::stoll(item));
    } catch (...) {
      throw ConfigError("config key '" + key + "' has a non-integer item: '" + item + "'");
    }
  }
  return out;
}

std::filesystem::path PipelineConfig::output_dir() const {
  return get_string("paths.output_dir", "out");
}

nlohmann::ordered_json PipelineConfig::echo() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

void PipelineConfig::validate() const {
  for (const char* key : {"paths.corpus", "paths.stopwords", "paths.suffixes"}) {
    if (has(key) && !std::filesystem::exists(values_.at(key))) {
      throw ConfigError("config key '" + std::string(key) + "' points at missing file '" +
                        values_.at(key) + "'");
    }
  }
  for (const char* key : {"autolabel.split_threshold", "multilabel.threshold"}) {
    if (has(key)) {
      const double th = get_real(key, 0.5);
      if (th <= 0.0 || th >= 1.0) {
        throw ConfigError("config key '" + std::string(key) + "' must be in (0, 1)");
      }
    }
  }
  for (const double th : get_real_list("autolabel.thresholds", {})) {
    if (th <= 0.0 || th >= 1.0) {
      throw ConfigError("autolabel.thresholds entries must be in (0, 1)");
    }
  }
}

}  // namespace newslabel
