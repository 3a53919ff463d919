#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "loadguard/error.hpp"

namespace loadguard::adc {

inline constexpr std::int32_t kCodeMax = (1 << 23) - 1;  //  8388607
inline constexpr std::int32_t kCodeMin = -(1 << 23);     // -8388608
inline constexpr double kCodeSpan = 8388608.0;          // 2^23

enum class Channel { A, B };

// The three input/gain selections an HX711 supports. Pulse counts are the
// total clocks per read that select this configuration for the next one.
enum class GainSelect : std::uint8_t {
  A128 = 25,
  B32 = 26,
  A64 = 27,
};

enum class AdcErrc { InvalidGainChannel, InvalidConfig };
using AdcError = TypedError<AdcErrc>;

// Throws AdcError for combinations the converter cannot be set to
// (channel A only takes 128/64, channel B only 32).
GainSelect make_gain_select(Channel channel, int gain);
int gain_of(GainSelect g) noexcept;
Channel channel_of(GainSelect g) noexcept;
int pulse_count(GainSelect g) noexcept;
std::optional<GainSelect> gain_select_from_pulses(int pulses) noexcept;
std::optional<GainSelect> gain_select_from_gain(int gain) noexcept;
std::string_view to_string(GainSelect g) noexcept;

struct AdcConfig {
  double vref = 5.0;  // V, analog supply the bridge excitation is tied to
  GainSelect gain = GainSelect::A128;
  double sample_rate = 10.0;  // samples/s

  void validate() const;
  // Differential input (mV) that maps to code 2^23: 0.5 * vref / gain.
  double full_scale_mv() const noexcept;
  double lsb_mv() const noexcept { return full_scale_mv() / kCodeSpan; }
};

// One conversion result. `saturated` is true whenever the code sits on a
// rail, matching the converter's own clamp-to-rail behaviour.
struct AdcFrame {
  std::int32_t code = 0;
  GainSelect next_gain = GainSelect::A128;
  bool saturated = false;
  bool data_ready = true;

  static AdcFrame make(std::int32_t code, GainSelect next_gain, bool data_ready = true);

  friend bool operator==(const AdcFrame&, const AdcFrame&) = default;
};

constexpr bool in_code_range(std::int64_t code) noexcept {
  return code >= kCodeMin && code <= kCodeMax;
}
constexpr bool is_rail(std::int64_t code) noexcept {
  return code == kCodeMin || code == kCodeMax;
}

}  // namespace loadguard::adc
