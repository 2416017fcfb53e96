#include "riskroute/kvfile.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "riskroute/error.hpp"
#include "riskroute/util.hpp"

namespace riskroute {

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text.substr(start));
      return parts;
    }
    parts.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(std::string_view field, std::string_view what) {
  const std::string text = trim(field);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DataError(fmt::format("{}: '{}' is not a number", what, text));
  }
  return value;
}

std::uint64_t parse_count(std::string_view field, std::string_view what) {
  const std::string text = trim(field);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(fmt::format("{}: '{}' is not a non-negative integer", what, text));
  }
  return value;
}

std::string fixed(double value, int decimals) {
  std::string text = fmt::format("{:.{}f}", value, decimals);
  // "-0.00" reads badly in reports.
  if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) {
    text.erase(0, 1);
  }
  return text;
}

std::string exact(double value) { return fmt::format("{}", value); }

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source) {
  KeyValueFile file;
  file.source_ = source;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw DataError(fmt::format("{}:{}: expected 'key = value'", source, row));
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw DataError(fmt::format("{}:{}: empty key", source, row));
    if (!file.values_.emplace(key, value).second) {
      throw DataError(fmt::format("{}:{}: duplicate key '{}'", source, row, key));
    }
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return parse(in, path.string());
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueFile::require(const std::string& key) const {
  auto value = get(key);
  if (!value) throw DataError(fmt::format("{}: missing key '{}'", source_, key));
  return *value;
}

double KeyValueFile::number(const std::string& key) const {
  return parse_number(require(key), fmt::format("{}: {}", source_, key));
}

double KeyValueFile::number_or(const std::string& key, double fallback) const {
  return contains(key) ? number(key) : fallback;
}

}  // namespace riskroute
