#include "loadguard/sensor_model.hpp"

#include <cmath>
#include <string>

#include "loadguard/kv_config.hpp"

namespace loadguard::sensor {

void LoadCellSpec::validate() const {
  auto fail = [](const char* msg) { throw SensorError(SensorErrc::InvalidSpec, msg); };
  if (!(capacity_kg > 0.0)) fail("capacity must be > 0");
  if (!(excitation_v > 0.0)) fail("excitation must be > 0");
  if (!(rated_output_mv_per_v > 0.0)) fail("rated_output must be > 0");
  if (!(noise_sigma_mv >= 0.0)) fail("noise_sigma must be >= 0");
  if (!(std::abs(nonlinearity) < 0.05)) fail("|nonlinearity| must be < 0.05");
  if (!std::isfinite(zero_offset_mv) || !std::isfinite(temp_coeff_zero_mv_per_c) ||
      !std::isfinite(temp_coeff_span_per_c) || !std::isfinite(reference_temp_c)) {
    fail("non-finite parameter");
  }
}

LoadCellSpec load_cell_spec_from_config(const KvConfig& cfg, std::string_view prefix,
                                        const LoadCellSpec& base) {
  const std::string p(prefix);
  LoadCellSpec s = base;
  s.capacity_kg = cfg.get_double(p + "capacity", s.capacity_kg);
  s.rated_output_mv_per_v = cfg.get_double(p + "rated_output", s.rated_output_mv_per_v);
  s.excitation_v = cfg.get_double(p + "excitation", s.excitation_v);
  s.zero_offset_mv = cfg.get_double(p + "zero_offset", s.zero_offset_mv);
  s.nonlinearity = cfg.get_double(p + "nonlinearity", s.nonlinearity);
  s.noise_sigma_mv = cfg.get_double(p + "noise_sigma", s.noise_sigma_mv);
  s.temp_coeff_zero_mv_per_c = cfg.get_double(p + "temp_coeff_zero", s.temp_coeff_zero_mv_per_c);
  s.temp_coeff_span_per_c = cfg.get_double(p + "temp_coeff_span", s.temp_coeff_span_per_c);
  s.reference_temp_c = cfg.get_double(p + "reference_temp", s.reference_temp_c);
  s.validate();
  return s;
}

BridgeReading bridge_output(const LoadCellSpec& spec, double applied_mass_kg,
                            double temperature_c, std::int64_t timestamp_ms) {
  spec.validate();
  if (!(applied_mass_kg >= 0.0)) {
    throw SensorError(SensorErrc::NegativeLoad, "applied mass must be >= 0 (compression only)");
  }
  if (applied_mass_kg > kMechanicalOverrangeFactor * spec.capacity_kg) {
    throw SensorError(SensorErrc::MechanicalOverrange,
                      "applied mass " + std::to_string(applied_mass_kg) +
                          " kg exceeds 150% of cell capacity");
  }
  const double fs = spec.full_scale_mv();
  const double f = applied_mass_kg / spec.capacity_kg;
  const double dt = temperature_c - spec.reference_temp_c;

  double v = fs * f;
  if (spec.temp_coeff_span_per_c != 0.0) v *= 1.0 + spec.temp_coeff_span_per_c * dt;
  v += spec.nonlinearity * fs * f * f;
  v += spec.zero_offset_mv;
  v += spec.temp_coeff_zero_mv_per_c * dt;
  return BridgeReading{v, temperature_c, timestamp_ms};
}

BridgeReading add_noise(const BridgeReading& reading, const LoadCellSpec& spec,
                        std::mt19937_64& rng) {
  if (spec.noise_sigma_mv == 0.0) return reading;
  std::normal_distribution<double> dist(0.0, spec.noise_sigma_mv);
  BridgeReading out = reading;
  out.differential_mv += dist(rng);
  return out;
}

BridgeReading add_noise(const BridgeReading& reading, const LoadCellSpec& spec,
                        std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return add_noise(reading, spec, rng);
}

adc::AdcFrame quantize(const BridgeReading& reading, const adc::AdcConfig& config) {
  config.validate();
  const double scaled = reading.differential_mv / config.full_scale_mv() * adc::kCodeSpan;
  std::int32_t code = 0;
  if (!(scaled < static_cast<double>(adc::kCodeMax))) {
    code = adc::kCodeMax;  // also catches +inf / NaN
  } else if (scaled <= static_cast<double>(adc::kCodeMin)) {
    code = adc::kCodeMin;
  } else {
    code = static_cast<std::int32_t>(std::llround(scaled));
  }
  return adc::AdcFrame::make(code, config.gain);
}

double dequantize_mv(std::int32_t code, const adc::AdcConfig& config) noexcept {
  return static_cast<double>(code) * config.lsb_mv();
}

}  // namespace loadguard::sensor
