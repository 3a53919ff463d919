#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "loadguard/adc.hpp"
#include "loadguard/error.hpp"

// Logical model of the HX711 two-wire read cycle: 24 data clocks (MSB first,
// two's complement) followed by 1-3 extra clocks that pick the gain/channel
// for the next conversion. Timing is not modelled; `data_ready` stands in
// for DOUT having gone low before the first clock.
namespace loadguard::hx711 {

enum class CodecErrc { Truncated, Malformed, InvalidSymbol, CodeOutOfRange };
using CodecError = TypedError<CodecErrc>;

inline constexpr int kDataBits = 24;

struct BitTrace {
  bool data_ready = true;
  // Level of DOUT sampled on each clock pulse. After the 24th pulse the chip
  // drives DOUT high until the next conversion completes.
  std::vector<bool> pulses;

  friend bool operator==(const BitTrace&, const BitTrace&) = default;
};

BitTrace encode_frame(const adc::AdcFrame& frame);
adc::AdcFrame decode_frame(const BitTrace& trace);

// Text form used by trace files: one frame per line, '0'/'1' per pulse.
std::string format_trace(const BitTrace& trace);
BitTrace parse_trace(std::string_view line);

}  // namespace loadguard::hx711
