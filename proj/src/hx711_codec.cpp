#include "loadguard/hx711_codec.hpp"

#include <cstdint>

namespace loadguard::hx711 {

BitTrace encode_frame(const adc::AdcFrame& frame) {
  if (!adc::in_code_range(frame.code)) {
    throw CodecError(CodecErrc::CodeOutOfRange,
                     "code " + std::to_string(frame.code) + " outside signed 24-bit range");
  }
  BitTrace trace;
  trace.data_ready = frame.data_ready;
  const int total = adc::pulse_count(frame.next_gain);
  trace.pulses.reserve(static_cast<std::size_t>(total));
  const auto raw = static_cast<std::uint32_t>(frame.code) & 0xFFFFFFu;
  for (int bit = kDataBits - 1; bit >= 0; --bit) {
    trace.pulses.push_back(((raw >> bit) & 1u) != 0);
  }
  for (int i = kDataBits; i < total; ++i) trace.pulses.push_back(true);
  return trace;
}

adc::AdcFrame decode_frame(const BitTrace& trace) {
  const auto n = static_cast<int>(trace.pulses.size());
  if (n < kDataBits) {
    throw CodecError(CodecErrc::Truncated,
                     "truncated frame: " + std::to_string(n) + " of 24 data pulses");
  }
  const auto gain = adc::gain_select_from_pulses(n);
  if (!gain) {
    throw CodecError(CodecErrc::Malformed,
                     "malformed frame: " + std::to_string(n) + " pulses (expected 25, 26 or 27)");
  }
  std::uint32_t raw = 0;
  for (int i = 0; i < kDataBits; ++i) {
    raw = (raw << 1) | (trace.pulses[static_cast<std::size_t>(i)] ? 1u : 0u);
  }
  // Sign-extend bit 23.
  if ((raw & 0x800000u) != 0) raw |= 0xFF000000u;
  return adc::AdcFrame::make(static_cast<std::int32_t>(raw), *gain, trace.data_ready);
}

std::string format_trace(const BitTrace& trace) {
  std::string out;
  out.reserve(trace.pulses.size());
  for (bool b : trace.pulses) out.push_back(b ? '1' : '0');
  return out;
}

BitTrace parse_trace(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
    line.remove_suffix(1);
  }
  BitTrace trace;
  trace.pulses.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c != '0' && c != '1') {
      throw CodecError(CodecErrc::InvalidSymbol,
                       "invalid symbol at column " + std::to_string(i + 1));
    }
    trace.pulses.push_back(c == '1');
  }
  return trace;
}

}  // namespace loadguard::hx711
