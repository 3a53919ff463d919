#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loadguard/adc.hpp"
#include "loadguard/error.hpp"
#include "loadguard/sensor_model.hpp"

namespace loadguard {
class KvConfig;
}

namespace loadguard::calib {

enum class CalibrationErrc {
  InsufficientSamples,
  DegenerateCalibration,
  InvertedWiring,
  InvalidKnownMass,
  InvalidState,
};
using CalibrationError = TypedError<CalibrationErrc>;

inline constexpr int kDefaultTareSamples = 16;
inline constexpr double kDefaultTempWarnDeltaC = 10.0;

struct ReferencePoint {
  double known_mass_kg = 0.0;
  std::int64_t observed_code = 0;

  friend bool operator==(const ReferencePoint&, const ReferencePoint&) = default;
};

// Tare plus two-point scale. Immutable once built by calibrate().
struct CalibrationState {
  std::int64_t tare_code = 0;
  double scale_kg_per_lsb = 0.0;
  double calibrated_at_temp_c = 20.0;
  std::vector<ReferencePoint> reference_points;

  void validate() const;
  friend bool operator==(const CalibrationState&, const CalibrationState&) = default;
};

struct MassReading {
  double kg = 0.0;
  bool below_zero = false;
};

// Mean of the non-saturated codes, rounded half away from zero.
std::int64_t tare(std::span<const adc::AdcFrame> samples);

CalibrationState calibrate(std::int64_t tare_code, double known_mass_kg,
                           std::int64_t code_at_mass, double temperature_c = 20.0);

MassReading code_to_mass(std::int64_t code, const CalibrationState& cal) noexcept;

bool temperature_drift_exceeded(const CalibrationState& cal, double operating_temp_c,
                                double max_delta_c = kDefaultTempWarnDeltaC) noexcept;

// Runs the tare / known-weight procedure against a simulated cell: averages
// `samples` zero-load frames, then `samples` frames at `known_mass_kg`.
CalibrationState calibrate_simulated(const sensor::LoadCellSpec& spec,
                                     const adc::AdcConfig& adc, double known_mass_kg,
                                     double temperature_c, std::uint64_t seed,
                                     int samples = kDefaultTareSamples);

// Text form: tare_code, scale, calibrated_at_temp, and one or more
// `reference_point = <kg> <code>` lines, each key behind `prefix`.
std::string serialize(const CalibrationState& cal, std::string_view prefix = "");
CalibrationState deserialize(const KvConfig& cfg, std::string_view prefix = "");

// Stable 64-bit FNV-1a over the serialized form, as 16 hex digits.
std::string fingerprint(const CalibrationState& cal);
std::string fingerprint(std::span<const CalibrationState> cals);

}  // namespace loadguard::calib
