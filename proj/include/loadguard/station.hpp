#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "loadguard/calibration.hpp"
#include "loadguard/cog_engine.hpp"
#include "loadguard/compliance.hpp"
#include "loadguard/error.hpp"

namespace loadguard {
class KvConfig;
}

namespace loadguard::station {

enum class ParseErrc {
  FieldCount,
  BadStationId,
  NotNumeric,
  CodeOutOfRange,
  InvalidGain,
  InvalidCellIndex,
  BadFlag,
  OutOfOrder,
};

// Wire-format parse failure; `line()` is 1-based, 0 when unknown.
class ParseError : public TypedError<ParseErrc> {
 public:
  ParseError(ParseErrc kind, int line, const std::string& what)
      : TypedError(kind, (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class SessionErrc { IncompleteStation, StationMismatch, InvalidConfig, RecordMismatch, Io };
using SessionError = TypedError<SessionErrc>;

inline constexpr int kMaxCells = 4;

// Wire record: station_id,cell_index,timestamp_ms,adc_code,gain,saturated
struct SensorFrameRecord {
  std::string station_id;
  int cell_index = 0;
  std::int64_t timestamp_ms = 0;
  std::int32_t adc_code = 0;
  int gain = 128;
  bool saturated = false;

  friend bool operator==(const SensorFrameRecord&, const SensorFrameRecord&) = default;
};

SensorFrameRecord parse_frame_record(std::string_view line, int cell_count = kMaxCells,
                                     int line_no = 0);
std::string format_frame_record(const SensorFrameRecord& r);

// Stateful line reader: counts lines and enforces non-decreasing timestamps
// per (station, cell). One instance per input sequence; not thread-safe.
class Ingestor {
 public:
  explicit Ingestor(int cell_count = kMaxCells);

  // Blank lines and '#' comments are skipped and yield std::nullopt.
  std::optional<SensorFrameRecord> ingest(std::string_view line);
  int line_number() const noexcept { return line_no_; }

 private:
  int cell_count_;
  int line_no_ = 0;
  std::map<std::pair<std::string, int>, std::int64_t> last_ts_;
};

std::vector<SensorFrameRecord> ingest_all(std::istream& in, int cell_count = kMaxCells);
std::vector<SensorFrameRecord> ingest_file(const std::filesystem::path& path,
                                           int cell_count = kMaxCells);

enum class WeighMode { Static, Wim };
std::string_view to_string(WeighMode m) noexcept;
std::optional<WeighMode> parse_weigh_mode(std::string_view s) noexcept;

struct StationConfig {
  std::string station_id = "st1";
  int cell_count = 4;  // 4, or 2 for left/right two-cell mode
  cog::DeckGeometry geometry;
  cog::AlertPolicy policy = cog::AlertPolicy::prototype2();
  std::vector<calib::CalibrationState> calibrations;  // one per cell
  std::optional<double> operating_temp_c;
  double temp_warn_delta_c = calib::kDefaultTempWarnDeltaC;
  std::vector<compliance::ToleranceRule> tolerance_rules = compliance::builtin_rules();
  std::vector<compliance::AxleConfiguration> axle_configs =
      compliance::builtin_axle_configurations();

  void validate() const;
};

// Keys: station_id, cells, wheelbase, track, breadth, policy,
// overload_threshold, quadrant_threshold, operating_temp, temp_warn_delta,
// cellN.<calibration keys>, axle_config, tolerance.*
StationConfig load_station_config(const KvConfig& cfg);
StationConfig load_station_config(const std::filesystem::path& path);

struct ToleranceRequest {
  compliance::Jurisdiction jurisdiction = compliance::Jurisdiction::Kenya;
  compliance::VerificationKind kind = compliance::VerificationKind::ReVerification;
  double reference_kg = 0.0;
  std::optional<double> basis_t;
};

struct SessionOptions {
  WeighMode mode = WeighMode::Static;
  double static_window_s = compliance::kStaticWindowS;
  std::optional<ToleranceRequest> tolerance;
  std::optional<std::string> axle_config;
};

using Assessment = std::variant<cog::LoadAssessment, cog::TwoCellAssessment>;

struct WeighRecord {
  std::string record_id;
  std::string recorded_at;  // wall clock, UTC
  std::string station_id;
  std::int64_t started_at_ms = 0;
  std::int64_t ended_at_ms = 0;
  WeighMode mode = WeighMode::Static;
  int cell_count = 4;
  std::vector<double> cell_mass_kg;
  std::vector<double> cell_variance;
  cog::DeckGeometry geometry;
  cog::AlertPolicy policy;
  std::string calibration_fingerprint;
  Assessment assessment;
  std::optional<ToleranceRequest> tolerance_request;
  std::optional<compliance::ComplianceResult> tolerance;
  std::optional<std::string> axle_config;
  std::optional<compliance::GvwResult> gvw;
  std::vector<std::string> warnings;

  // Overload/imbalance, or a failed tolerance/GVW check.
  bool alarm() const noexcept;
};

// Converts codes to mass per cell, weighs each cell in the selected mode,
// then runs the load assessment and any requested compliance checks.
WeighRecord run_session(std::span<const SensorFrameRecord> frames, const StationConfig& config,
                        const SessionOptions& options);

nlohmann::json to_json(const WeighRecord& r);
WeighRecord weigh_record_from_json(const nlohmann::json& j);
nlohmann::json assessment_to_json(const Assessment& a);

// Recomputes the assessment from the record's stored cell masses, geometry
// and policy.
Assessment reassess(const WeighRecord& r);

// One-line key=value summary for scripts.
std::string summary_line(const WeighRecord& r);
std::vector<std::string> render_lcd(const WeighRecord& r);

inline constexpr int kExitSafe = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAlarm = 2;
inline int exit_code_for(const WeighRecord& r) { return r.alarm() ? kExitAlarm : kExitSafe; }

// Append-only newline-delimited JSON store. Appends are serialized.
class RecordStore {
 public:
  explicit RecordStore(std::filesystem::path file);

  // Resolves <data_dir>/records.jsonl; data_dir comes from the argument,
  // else $LOADGUARD_DATA_DIR, else ./loadguard-data.
  static RecordStore open_default(const std::optional<std::filesystem::path>& data_dir = {});

  // Assigns record_id and recorded_at, writes one line, returns the stored record.
  WeighRecord append(WeighRecord record);
  std::vector<WeighRecord> load_all() const;
  std::vector<std::string> raw_lines() const;
  const std::filesystem::path& path() const { return file_; }

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
};

// Persisted line minus the fields that vary between identical runs.
std::string canonical_line(const std::string& json_line);

}  // namespace loadguard::station
