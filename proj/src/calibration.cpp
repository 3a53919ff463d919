#include "loadguard/calibration.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "loadguard/kv_config.hpp"

namespace loadguard::calib {

void CalibrationState::validate() const {
  if (!(scale_kg_per_lsb > 0.0) || !std::isfinite(scale_kg_per_lsb)) {
    throw CalibrationError(CalibrationErrc::InvalidState, "scale must be > 0");
  }
  if (reference_points.empty()) {
    throw CalibrationError(CalibrationErrc::InvalidState,
                           "calibration needs at least one reference point");
  }
}

std::int64_t tare(std::span<const adc::AdcFrame> samples) {
  std::int64_t sum = 0;
  std::int64_t n = 0;
  for (const auto& f : samples) {
    if (f.saturated) continue;
    sum += f.code;
    ++n;
  }
  if (n == 0) {
    throw CalibrationError(CalibrationErrc::InsufficientSamples,
                           "tare needs at least one non-saturated sample");
  }
  return std::llround(static_cast<double>(sum) / static_cast<double>(n));
}

CalibrationState calibrate(std::int64_t tare_code, double known_mass_kg,
                           std::int64_t code_at_mass, double temperature_c) {
  if (!(known_mass_kg > 0.0) || !std::isfinite(known_mass_kg)) {
    throw CalibrationError(CalibrationErrc::InvalidKnownMass, "known mass must be > 0");
  }
  const std::int64_t delta = code_at_mass - tare_code;
  if (delta == 0) {
    throw CalibrationError(CalibrationErrc::DegenerateCalibration,
                           "code at known mass equals tare code");
  }
  if (delta < 0) {
    throw CalibrationError(CalibrationErrc::InvertedWiring,
                           "code decreases under load; check bridge polarity");
  }
  CalibrationState cal;
  cal.tare_code = tare_code;
  cal.scale_kg_per_lsb = known_mass_kg / static_cast<double>(delta);
  cal.calibrated_at_temp_c = temperature_c;
  cal.reference_points.push_back({known_mass_kg, code_at_mass});
  return cal;
}

MassReading code_to_mass(std::int64_t code, const CalibrationState& cal) noexcept {
  const double kg = cal.scale_kg_per_lsb * static_cast<double>(code - cal.tare_code);
  if (kg < 0.0) return {0.0, true};
  return {kg, false};
}

bool temperature_drift_exceeded(const CalibrationState& cal, double operating_temp_c,
                                double max_delta_c) noexcept {
  return std::abs(operating_temp_c - cal.calibrated_at_temp_c) > max_delta_c;
}

CalibrationState calibrate_simulated(const sensor::LoadCellSpec& spec,
                                     const adc::AdcConfig& adc, double known_mass_kg,
                                     double temperature_c, std::uint64_t seed, int samples) {
  if (samples < 1) {
    throw CalibrationError(CalibrationErrc::InsufficientSamples, "samples must be >= 1");
  }
  std::mt19937_64 rng(seed);
  auto collect = [&](double mass) {
    std::vector<adc::AdcFrame> frames;
    frames.reserve(static_cast<std::size_t>(samples));
    const auto clean = sensor::bridge_output(spec, mass, temperature_c);
    for (int i = 0; i < samples; ++i) {
      frames.push_back(sensor::quantize(sensor::add_noise(clean, spec, rng), adc));
    }
    return tare(frames);
  };
  const auto zero = collect(0.0);
  const auto loaded = collect(known_mass_kg);
  return calibrate(zero, known_mass_kg, loaded, temperature_c);
}

std::string serialize(const CalibrationState& cal, std::string_view prefix) {
  const std::string p(prefix);
  std::string out;
  out += p + "tare_code = " + std::to_string(cal.tare_code) + "\n";
  out += p + "scale = " + format_double(cal.scale_kg_per_lsb) + "\n";
  out += p + "calibrated_at_temp = " + format_double(cal.calibrated_at_temp_c) + "\n";
  for (const auto& rp : cal.reference_points) {
    out += p + "reference_point = " + format_double(rp.known_mass_kg) + " " +
           std::to_string(rp.observed_code) + "\n";
  }
  return out;
}

CalibrationState deserialize(const KvConfig& cfg, std::string_view prefix) {
  const std::string p(prefix);
  CalibrationState cal;
  cal.tare_code = cfg.get_int(p + "tare_code");
  cal.scale_kg_per_lsb = cfg.get_double(p + "scale");
  cal.calibrated_at_temp_c = cfg.get_double(p + "calibrated_at_temp", 20.0);
  for (const auto* e : cfg.all(p + "reference_point")) {
    const auto parts = split_ws(e->value);
    const auto mass = parts.size() == 2 ? parse_double(parts[0]) : std::nullopt;
    const auto code = parts.size() == 2 ? parse_int(parts[1]) : std::nullopt;
    if (!mass || !code) {
      throw ConfigError(ConfigErrc::BadValue, cfg.source() + ":" + std::to_string(e->line) +
                                                  ": expected 'reference_point = <kg> <code>'");
    }
    cal.reference_points.push_back({*mass, *code});
  }
  cal.validate();
  return cal;
}

namespace {

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string fingerprint(const CalibrationState& cal) { return fnv1a_hex(serialize(cal)); }

std::string fingerprint(std::span<const CalibrationState> cals) {
  std::string text;
  for (std::size_t i = 0; i < cals.size(); ++i) {
    text += serialize(cals[i], "cell" + std::to_string(i) + ".");
  }
  return fnv1a_hex(text);
}

}  // namespace loadguard::calib
