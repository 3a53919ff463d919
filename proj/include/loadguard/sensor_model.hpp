#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "loadguard/adc.hpp"
#include "loadguard/error.hpp"

namespace loadguard {
class KvConfig;
}

namespace loadguard::sensor {

enum class SensorErrc { InvalidSpec, NegativeLoad, MechanicalOverrange };
using SensorError = TypedError<SensorErrc>;

// Loads above this multiple of rated capacity are treated as destructive.
inline constexpr double kMechanicalOverrangeFactor = 1.5;

// Electrical and physical parameters of one bridge-type load cell.
// Defaults describe a generic 120 kg, 2 mV/V cell at 5 V excitation with
// no offset, drift or noise; they are not measured values.
struct LoadCellSpec {
  double capacity_kg = 120.0;
  double rated_output_mv_per_v = 2.0;
  double excitation_v = 5.0;
  double zero_offset_mv = 0.0;
  double nonlinearity = 0.0;       // fraction of full scale at capacity
  double noise_sigma_mv = 0.0;
  double temp_coeff_zero_mv_per_c = 0.0;
  double temp_coeff_span_per_c = 0.0;
  double reference_temp_c = 20.0;

  void validate() const;
  double full_scale_mv() const noexcept { return excitation_v * rated_output_mv_per_v; }
};

struct BridgeReading {
  double differential_mv = 0.0;
  double temperature_c = 20.0;
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const BridgeReading&, const BridgeReading&) = default;
};

// Keys (optionally behind `prefix`): capacity, rated_output, excitation,
// zero_offset, nonlinearity, noise_sigma, temp_coeff_zero, temp_coeff_span,
// reference_temp. Missing keys keep the value from `base`.
LoadCellSpec load_cell_spec_from_config(const KvConfig& cfg, std::string_view prefix = "",
                                        const LoadCellSpec& base = {});

// Noise-free bridge output:
//   v = FS * f * (1 + span_tc * dT) + nonlinearity * FS * f^2 + zero_offset + zero_tc * dT
// with FS = excitation * rated_output, f = mass / capacity, dT = T - T_ref.
BridgeReading bridge_output(const LoadCellSpec& spec, double applied_mass_kg,
                            double temperature_c, std::int64_t timestamp_ms = 0);

// Additive Gaussian noise (sigma = spec.noise_sigma_mv) on the bridge voltage.
BridgeReading add_noise(const BridgeReading& reading, const LoadCellSpec& spec,
                        std::uint64_t rng_seed);
BridgeReading add_noise(const BridgeReading& reading, const LoadCellSpec& spec,
                        std::mt19937_64& rng);

adc::AdcFrame quantize(const BridgeReading& reading, const adc::AdcConfig& adc);
double dequantize_mv(std::int32_t code, const adc::AdcConfig& adc) noexcept;

}  // namespace loadguard::sensor
