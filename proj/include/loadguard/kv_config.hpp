#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loadguard/error.hpp"

namespace loadguard {

enum class ConfigErrc { Syntax, MissingKey, BadValue, Io };
using ConfigError = TypedError<ConfigErrc>;

// Plain-text "key = value" configuration. Blank lines and lines starting
// with '#' are ignored. Keys may repeat; order is preserved.
class KvConfig {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  static KvConfig parse(std::string_view text, std::string source = "<string>");
  static KvConfig load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  const std::vector<Entry>& entries() const { return entries_; }

  bool contains(std::string_view key) const;
  // Last occurrence wins for scalar lookups.
  std::optional<std::string> find(std::string_view key) const;
  std::vector<const Entry*> all(std::string_view key) const;

  std::string get_string(std::string_view key) const;
  double get_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;

 private:
  const Entry* last(std::string_view key) const;

  std::string source_;
  std::vector<Entry> entries_;
};

// Strict numeric parsing shared by all text formats: the whole token must be
// consumed and the value must be finite.
std::optional<double> parse_double(std::string_view token);
std::optional<std::int64_t> parse_int(std::string_view token);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

std::vector<std::string_view> split_ws(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace loadguard
