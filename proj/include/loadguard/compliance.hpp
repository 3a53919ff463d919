#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "loadguard/error.hpp"

namespace loadguard {
class KvConfig;
}

namespace loadguard::compliance {

enum class ComplianceErrc {
  InsufficientDuration,
  NoVehicleDetected,
  UncoveredCapacity,
  UnknownRule,
  InvalidRule,
  InvalidStream,
  UnknownAxleConfig,
};
using ComplianceError = TypedError<ComplianceErrc>;

inline constexpr double kStaticWindowS = 15.0;

struct TimedMass {
  std::int64_t t_ms = 0;
  double kg = 0.0;
};

struct WeighResult {
  double mass_kg = 0.0;
  double variance = 0.0;  // sample variance of the samples used (kg^2)
  std::size_t samples = 0;
};

// Trailing-window mean. The stream must cover at least `window_s`
// (last.t - first.t); the window holds samples with t > last.t - window.
WeighResult static_weigh(std::span<const TimedMass> stream, double window_s = kStaticWindowS);

// Mean and variance over a pass-over segment.
WeighResult wim_weigh(std::span<const TimedMass> segment);

enum class Jurisdiction { Kenya, NewZealand, US };
enum class VerificationKind { FirstTime, ReVerification, Acceptance };

std::string_view to_string(Jurisdiction j) noexcept;
std::string_view to_string(VerificationKind k) noexcept;
std::optional<Jurisdiction> parse_jurisdiction(std::string_view s) noexcept;
std::optional<VerificationKind> parse_verification_kind(std::string_view s) noexcept;

// Maximum error interpolated linearly between (capacity t, max error kg)
// anchors; capacities outside the anchors are not covered.
struct AnchorTable {
  std::vector<std::pair<double, double>> anchors;
};
// One max error for every load in [min_t, max_t].
struct FlatBand {
  double min_t = 0.0;
  double max_t = 0.0;
  double max_error_kg = 0.0;
};
// Max error as a percentage of the load itself.
struct PercentOfLoad {
  double percent = 0.0;
};

struct ToleranceRule {
  Jurisdiction jurisdiction = Jurisdiction::Kenya;
  VerificationKind kind = VerificationKind::ReVerification;
  std::variant<AnchorTable, FlatBand, PercentOfLoad> schedule;

  void validate() const;
};

// Built-in tolerance schedules:
//   Kenya first-time          80 t -> 10 kg, 400 t -> 40 kg
//   Kenya re-verification     80 t -> 20 kg, 400 t -> 80 kg
//   New Zealand (any kind)    40 kg for 10-40 t
//   US acceptance             0.1 % of load
std::vector<ToleranceRule> builtin_rules();
ToleranceRule find_rule(std::span<const ToleranceRule> rules, Jurisdiction j, VerificationKind k);
ToleranceRule builtin_rule(Jurisdiction j, VerificationKind k);

// `capacity_or_load_t` is the weighbridge capacity for anchor tables and the
// load for band/percentage rules, in tonnes.
double max_permissible_error(const ToleranceRule& rule, double capacity_or_load_t);

struct ComplianceResult {
  bool pass = false;
  double error_kg = 0.0;       // measured - reference
  double tolerance_kg = 0.0;
  double margin_kg = 0.0;      // tolerance - |error|; negative on failure
};

// Pass iff |measured - reference| <= tolerance (inclusive). When
// `basis_t` is not given the reference load in tonnes is used.
ComplianceResult check_compliance(double measured_kg, double reference_kg,
                                  const ToleranceRule& rule,
                                  std::optional<double> basis_t = std::nullopt);

struct AxleConfiguration {
  std::string code;
  int axle_count = 2;
  double gvw_limit_kg = 0.0;

  void validate() const;
};

struct GvwResult {
  bool pass = false;
  double margin_kg = 0.0;  // limit - measured
};

std::vector<AxleConfiguration> builtin_axle_configurations();
const AxleConfiguration& find_axle_configuration(std::span<const AxleConfiguration> table,
                                                 std::string_view code);
GvwResult gvw_limit(const AxleConfiguration& config, double measured_total_kg);

// Config text extends or overrides the tables:
//   axle_config = <code> <axle_count> <gvw_limit_kg>
//   tolerance.anchor = <jurisdiction> <kind> <capacity_t> <max_error_kg>   (repeatable)
//   tolerance.band = <jurisdiction> <kind> <min_t> <max_t> <max_error_kg>
//   tolerance.percent = <jurisdiction> <kind> <percent>
void merge_axle_configurations(std::vector<AxleConfiguration>& table, const KvConfig& cfg);
void merge_tolerance_rules(std::vector<ToleranceRule>& rules, const KvConfig& cfg);

}  // namespace loadguard::compliance
