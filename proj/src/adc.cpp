#include "loadguard/adc.hpp"

namespace loadguard::adc {

GainSelect make_gain_select(Channel channel, int gain) {
  if (channel == Channel::A && gain == 128) return GainSelect::A128;
  if (channel == Channel::A && gain == 64) return GainSelect::A64;
  if (channel == Channel::B && gain == 32) return GainSelect::B32;
  throw AdcError(AdcErrc::InvalidGainChannel,
                 std::string("gain ") + std::to_string(gain) + " is not available on channel " +
                     (channel == Channel::A ? "A" : "B"));
}

int gain_of(GainSelect g) noexcept {
  switch (g) {
    case GainSelect::A128: return 128;
    case GainSelect::B32: return 32;
    case GainSelect::A64: return 64;
  }
  return 0;
}

Channel channel_of(GainSelect g) noexcept {
  return g == GainSelect::B32 ? Channel::B : Channel::A;
}

int pulse_count(GainSelect g) noexcept { return static_cast<int>(g); }

std::optional<GainSelect> gain_select_from_pulses(int pulses) noexcept {
  switch (pulses) {
    case 25: return GainSelect::A128;
    case 26: return GainSelect::B32;
    case 27: return GainSelect::A64;
    default: return std::nullopt;
  }
}

std::optional<GainSelect> gain_select_from_gain(int gain) noexcept {
  switch (gain) {
    case 128: return GainSelect::A128;
    case 32: return GainSelect::B32;
    case 64: return GainSelect::A64;
    default: return std::nullopt;
  }
}

std::string_view to_string(GainSelect g) noexcept {
  switch (g) {
    case GainSelect::A128: return "A128";
    case GainSelect::B32: return "B32";
    case GainSelect::A64: return "A64";
  }
  return "?";
}

void AdcConfig::validate() const {
  if (!(vref > 0.0)) throw AdcError(AdcErrc::InvalidConfig, "vref must be > 0");
  if (!(sample_rate > 0.0)) throw AdcError(AdcErrc::InvalidConfig, "sample_rate must be > 0");
  if (!gain_select_from_pulses(static_cast<int>(gain))) {
    throw AdcError(AdcErrc::InvalidGainChannel, "unknown gain selection");
  }
}

double AdcConfig::full_scale_mv() const noexcept {
  return 0.5 * vref * 1000.0 / gain_of(gain);
}

AdcFrame AdcFrame::make(std::int32_t code, GainSelect next_gain, bool data_ready) {
  return AdcFrame{code, next_gain, is_rail(code), data_ready};
}

}  // namespace loadguard::adc
