#include "loadguard/kv_config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace loadguard {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto start = text.find_first_not_of(" \t\r\n", pos);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t\r\n", start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(start, end - start));
    pos = end;
  }
  return out;
}

std::optional<double> parse_double(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_int(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  std::int64_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

KvConfig KvConfig::parse(std::string_view text, std::string source) {
  KvConfig cfg;
  cfg.source_ = std::move(source);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    ++line_no;
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(ConfigErrc::Syntax, cfg.source_ + ":" + std::to_string(line_no) +
                                                ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(ConfigErrc::Syntax,
                        cfg.source_ + ":" + std::to_string(line_no) + ": empty key");
    }
    cfg.entries_.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
  }
  return cfg;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigErrc::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const KvConfig::Entry* KvConfig::last(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return &*it;
  }
  return nullptr;
}

bool KvConfig::contains(std::string_view key) const { return last(key) != nullptr; }

std::optional<std::string> KvConfig::find(std::string_view key) const {
  if (const auto* e = last(key)) return e->value;
  return std::nullopt;
}

std::vector<const KvConfig::Entry*> KvConfig::all(std::string_view key) const {
  std::vector<const Entry*> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(&e);
  }
  return out;
}

std::string KvConfig::get_string(std::string_view key) const {
  const auto* e = last(key);
  if (!e) throw ConfigError(ConfigErrc::MissingKey, source_ + ": missing key '" + std::string(key) + "'");
  return e->value;
}

double KvConfig::get_double(std::string_view key) const {
  const auto* e = last(key);
  if (!e) throw ConfigError(ConfigErrc::MissingKey, source_ + ": missing key '" + std::string(key) + "'");
  const auto v = parse_double(e->value);
  if (!v) {
    throw ConfigError(ConfigErrc::BadValue, source_ + ":" + std::to_string(e->line) + ": '" +
                                                e->key + "' is not a number");
  }
  return *v;
}

double KvConfig::get_double(std::string_view key, double fallback) const {
  return contains(key) ? get_double(key) : fallback;
}

std::int64_t KvConfig::get_int(std::string_view key) const {
  const auto* e = last(key);
  if (!e) throw ConfigError(ConfigErrc::MissingKey, source_ + ": missing key '" + std::string(key) + "'");
  const auto v = parse_int(e->value);
  if (!v) {
    throw ConfigError(ConfigErrc::BadValue, source_ + ":" + std::to_string(e->line) + ": '" +
                                                e->key + "' is not an integer");
  }
  return *v;
}

std::int64_t KvConfig::get_int(std::string_view key, std::int64_t fallback) const {
  return contains(key) ? get_int(key) : fallback;
}

}  // namespace loadguard
