#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

namespace riskroute {

/// `key = value` text with `#` comments, one pair per line.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in, const std::string& source);
  static KeyValueFile load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;

  const std::string& source() const { return source_; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
};

}  // namespace riskroute
