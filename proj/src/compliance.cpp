#include "loadguard/compliance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "loadguard/kv_config.hpp"

namespace loadguard::compliance {

namespace {

void check_ordered(std::span<const TimedMass> stream) {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].t_ms < stream[i - 1].t_ms) {
      throw ComplianceError(ComplianceErrc::InvalidStream, "sample timestamps must be non-decreasing");
    }
  }
  for (const auto& s : stream) {
    if (!std::isfinite(s.kg)) throw ComplianceError(ComplianceErrc::InvalidStream, "non-finite sample");
  }
}

WeighResult mean_and_variance(std::span<const TimedMass> samples) {
  WeighResult r;
  r.samples = samples.size();
  double sum = 0.0;
  for (const auto& s : samples) sum += s.kg;
  r.mass_kg = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (const auto& s : samples) ss += (s.kg - r.mass_kg) * (s.kg - r.mass_kg);
    r.variance = ss / static_cast<double>(samples.size() - 1);
  }
  return r;
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

WeighResult static_weigh(std::span<const TimedMass> stream, double window_s) {
  if (!positive(window_s)) throw ComplianceError(ComplianceErrc::InvalidStream, "window must be > 0");
  check_ordered(stream);
  const auto window_ms = static_cast<std::int64_t>(std::llround(window_s * 1000.0));
  if (stream.empty() || stream.back().t_ms - stream.front().t_ms < window_ms) {
    const double have = stream.empty() ? 0.0 : (stream.back().t_ms - stream.front().t_ms) / 1000.0;
    throw ComplianceError(ComplianceErrc::InsufficientDuration,
                          "static weighing needs " + format_double(window_s) + " s of data, got " +
                              format_double(have) + " s");
  }
  const std::int64_t cutoff = stream.back().t_ms - window_ms;
  const auto first = std::find_if(stream.begin(), stream.end(),
                                  [cutoff](const TimedMass& s) { return s.t_ms > cutoff; });
  return mean_and_variance(std::span<const TimedMass>(first, stream.end()));
}

WeighResult wim_weigh(std::span<const TimedMass> segment) {
  if (segment.empty()) {
    throw ComplianceError(ComplianceErrc::NoVehicleDetected, "no samples in pass-over segment");
  }
  check_ordered(segment);
  return mean_and_variance(segment);
}

std::string_view to_string(Jurisdiction j) noexcept {
  switch (j) {
    case Jurisdiction::Kenya: return "kenya";
    case Jurisdiction::NewZealand: return "nz";
    case Jurisdiction::US: return "us";
  }
  return "?";
}

std::string_view to_string(VerificationKind k) noexcept {
  switch (k) {
    case VerificationKind::FirstTime: return "first_time";
    case VerificationKind::ReVerification: return "re_verification";
    case VerificationKind::Acceptance: return "acceptance";
  }
  return "?";
}

std::optional<Jurisdiction> parse_jurisdiction(std::string_view s) noexcept {
  if (s == "kenya" || s == "Kenya") return Jurisdiction::Kenya;
  if (s == "nz" || s == "NewZealand" || s == "new_zealand") return Jurisdiction::NewZealand;
  if (s == "us" || s == "US") return Jurisdiction::US;
  return std::nullopt;
}

std::optional<VerificationKind> parse_verification_kind(std::string_view s) noexcept {
  if (s == "first_time") return VerificationKind::FirstTime;
  if (s == "re_verification") return VerificationKind::ReVerification;
  if (s == "acceptance") return VerificationKind::Acceptance;
  return std::nullopt;
}

void ToleranceRule::validate() const {
  auto bad = [](const char* msg) { throw ComplianceError(ComplianceErrc::InvalidRule, msg); };
  if (const auto* t = std::get_if<AnchorTable>(&schedule)) {
    if (t->anchors.empty()) bad("anchor table is empty");
    for (std::size_t i = 0; i < t->anchors.size(); ++i) {
      if (!positive(t->anchors[i].first) || !positive(t->anchors[i].second)) {
        bad("anchor capacities and errors must be > 0");
      }
      if (i > 0 && !(t->anchors[i].first > t->anchors[i - 1].first)) {
        bad("anchor capacities must be strictly increasing");
      }
    }
  } else if (const auto* b = std::get_if<FlatBand>(&schedule)) {
    if (!(b->min_t >= 0.0) || !(b->max_t >= b->min_t) || !positive(b->max_error_kg)) {
      bad("band needs 0 <= min <= max and error > 0");
    }
  } else if (const auto* p = std::get_if<PercentOfLoad>(&schedule)) {
    if (!positive(p->percent)) bad("percentage must be > 0");
  }
}

std::vector<ToleranceRule> builtin_rules() {
  std::vector<ToleranceRule> rules;
  rules.push_back({Jurisdiction::Kenya, VerificationKind::FirstTime,
                   AnchorTable{{{80.0, 10.0}, {400.0, 40.0}}}});
  rules.push_back({Jurisdiction::Kenya, VerificationKind::ReVerification,
                   AnchorTable{{{80.0, 20.0}, {400.0, 80.0}}}});
  for (auto kind : {VerificationKind::FirstTime, VerificationKind::ReVerification,
                    VerificationKind::Acceptance}) {
    rules.push_back({Jurisdiction::NewZealand, kind, FlatBand{10.0, 40.0, 40.0}});
  }
  rules.push_back({Jurisdiction::US, VerificationKind::Acceptance, PercentOfLoad{0.1}});
  return rules;
}

ToleranceRule find_rule(std::span<const ToleranceRule> rules, Jurisdiction j, VerificationKind k) {
  for (const auto& r : rules) {
    if (r.jurisdiction == j && r.kind == k) return r;
  }
  throw ComplianceError(ComplianceErrc::UnknownRule, "no tolerance rule for " +
                                                         std::string(to_string(j)) + "/" +
                                                         std::string(to_string(k)));
}

ToleranceRule builtin_rule(Jurisdiction j, VerificationKind k) {
  const auto rules = builtin_rules();
  return find_rule(rules, j, k);
}

double max_permissible_error(const ToleranceRule& rule, double t) {
  rule.validate();
  auto uncovered = [&] {
    return ComplianceError(ComplianceErrc::UncoveredCapacity,
                           format_double(t) + " t is outside the " +
                               std::string(to_string(rule.jurisdiction)) + " rule's range");
  };
  if (!std::isfinite(t) || t < 0.0) throw uncovered();

  if (const auto* table = std::get_if<AnchorTable>(&rule.schedule)) {
    const auto& a = table->anchors;
    if (t < a.front().first || t > a.back().first) throw uncovered();
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
      const auto [c0, e0] = a[i];
      const auto [c1, e1] = a[i + 1];
      if (t == c0) return e0;
      if (t < c1) return e0 + (e1 - e0) * (t - c0) / (c1 - c0);
    }
    return a.back().second;
  }
  if (const auto* band = std::get_if<FlatBand>(&rule.schedule)) {
    if (t < band->min_t || t > band->max_t) throw uncovered();
    return band->max_error_kg;
  }
  const auto& pct = std::get<PercentOfLoad>(rule.schedule);
  if (!(t > 0.0)) throw uncovered();
  return t * 1000.0 * pct.percent / 100.0;
}

ComplianceResult check_compliance(double measured_kg, double reference_kg,
                                  const ToleranceRule& rule, std::optional<double> basis_t) {
  if (!positive(reference_kg)) {
    throw ComplianceError(ComplianceErrc::InvalidStream, "reference mass must be > 0");
  }
  ComplianceResult r;
  r.tolerance_kg = max_permissible_error(rule, basis_t.value_or(reference_kg / 1000.0));
  r.error_kg = measured_kg - reference_kg;
  r.margin_kg = r.tolerance_kg - std::abs(r.error_kg);
  r.pass = std::abs(r.error_kg) <= r.tolerance_kg;
  return r;
}

void AxleConfiguration::validate() const {
  if (code.empty()) throw ComplianceError(ComplianceErrc::InvalidRule, "axle configuration needs a code");
  if (axle_count < 2) throw ComplianceError(ComplianceErrc::InvalidRule, "axle_count must be >= 2");
  if (!positive(gvw_limit_kg)) throw ComplianceError(ComplianceErrc::InvalidRule, "gvw_limit must be > 0");
}

std::vector<AxleConfiguration> builtin_axle_configurations() {
  return {
      {"2", 2, 18000.0},
      {"2A", 2, 18000.0},
      {"6A", 6, 56000.0},
      {"7", 7, 56000.0},
  };
}

const AxleConfiguration& find_axle_configuration(std::span<const AxleConfiguration> table,
                                                 std::string_view code) {
  for (const auto& c : table) {
    if (c.code == code) return c;
  }
  throw ComplianceError(ComplianceErrc::UnknownAxleConfig,
                        "unknown axle configuration '" + std::string(code) + "'");
}

GvwResult gvw_limit(const AxleConfiguration& config, double measured_total_kg) {
  config.validate();
  return {measured_total_kg <= config.gvw_limit_kg, config.gvw_limit_kg - measured_total_kg};
}

void merge_axle_configurations(std::vector<AxleConfiguration>& table, const KvConfig& cfg) {
  for (const auto* e : cfg.all("axle_config")) {
    const auto parts = split_ws(e->value);
    const auto count = parts.size() == 3 ? parse_int(parts[1]) : std::nullopt;
    const auto limit = parts.size() == 3 ? parse_double(parts[2]) : std::nullopt;
    if (!count || !limit) {
      throw ConfigError(ConfigErrc::BadValue, cfg.source() + ":" + std::to_string(e->line) +
                                                  ": expected 'axle_config = <code> <axles> <kg>'");
    }
    AxleConfiguration c{std::string(parts[0]), static_cast<int>(*count), *limit};
    c.validate();
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& x) { return x.code == c.code; });
    if (it != table.end()) *it = c;
    else table.push_back(c);
  }
}

void merge_tolerance_rules(std::vector<ToleranceRule>& rules, const KvConfig& cfg) {
  using Key = std::pair<Jurisdiction, VerificationKind>;
  std::map<Key, ToleranceRule> parsed;

  auto head = [&](const KvConfig::Entry& e, std::size_t want) {
    const auto parts = split_ws(e.value);
    const auto j = parts.size() == want ? parse_jurisdiction(parts[0]) : std::nullopt;
    const auto k = parts.size() == want ? parse_verification_kind(parts[1]) : std::nullopt;
    if (!j || !k) {
      throw ConfigError(ConfigErrc::BadValue, cfg.source() + ":" + std::to_string(e.line) + ": bad '" +
                                                  e.key + "' entry");
    }
    return std::make_tuple(Key{*j, *k}, parts);
  };
  auto number = [&](const KvConfig::Entry& e, std::string_view tok) {
    const auto v = parse_double(tok);
    if (!v) {
      throw ConfigError(ConfigErrc::BadValue,
                        cfg.source() + ":" + std::to_string(e.line) + ": bad number in '" + e.key + "'");
    }
    return *v;
  };

  for (const auto& e : cfg.entries()) {
    if (e.key == "tolerance.anchor") {
      auto [key, parts] = head(e, 4);
      auto& rule = parsed[key];
      rule.jurisdiction = key.first;
      rule.kind = key.second;
      if (!std::holds_alternative<AnchorTable>(rule.schedule)) rule.schedule = AnchorTable{};
      std::get<AnchorTable>(rule.schedule).anchors.emplace_back(number(e, parts[2]), number(e, parts[3]));
    } else if (e.key == "tolerance.band") {
      auto [key, parts] = head(e, 5);
      parsed[key] = {key.first, key.second,
                     FlatBand{number(e, parts[2]), number(e, parts[3]), number(e, parts[4])}};
    } else if (e.key == "tolerance.percent") {
      auto [key, parts] = head(e, 3);
      parsed[key] = {key.first, key.second, PercentOfLoad{number(e, parts[2])}};
    }
  }
  for (auto& [key, rule] : parsed) {
    rule.validate();
    auto it = std::find_if(rules.begin(), rules.end(), [&](const ToleranceRule& r) {
      return r.jurisdiction == key.first && r.kind == key.second;
    });
    if (it != rules.end()) *it = rule;
    else rules.push_back(rule);
  }
}

}  // namespace loadguard::compliance
