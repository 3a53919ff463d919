#include "loadguard/station.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>

#include "loadguard/kv_config.hpp"

namespace loadguard::station {

using nlohmann::json;

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

bool valid_station_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-' || c == '.';
  });
}

// Digits only, optional leading '-'.
std::optional<std::int64_t> strict_int(std::string_view tok) {
  if (tok.empty()) return std::nullopt;
  const auto digits = tok.front() == '-' ? tok.substr(1) : tok;
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  return parse_int(tok);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

const cog::AlertFlags* four_cell_flags(const Assessment& a) {
  if (const auto* f = std::get_if<cog::LoadAssessment>(&a)) return &f->flags;
  return nullptr;
}

double total_of(const Assessment& a) {
  return std::visit([](const auto& x) { return x.w_total; }, a);
}

cog::Longitudinal parse_longitudinal(const std::string& s) {
  if (s == "FRONT-HEAVY") return cog::Longitudinal::FrontHeavy;
  if (s == "REAR-HEAVY") return cog::Longitudinal::RearHeavy;
  return cog::Longitudinal::Balanced;
}

cog::Lateral parse_lateral(const std::string& s) {
  if (s == "LEFT-HEAVY") return cog::Lateral::LeftHeavy;
  if (s == "RIGHT-HEAVY") return cog::Lateral::RightHeavy;
  return cog::Lateral::Balanced;
}

Assessment assessment_from_json(const json& j) {
  if (j.at("kind") == "two_cell") {
    cog::TwoCellAssessment a;
    a.reading = {j.at("w_left").get<double>(), j.at("w_right").get<double>()};
    a.w_total = j.at("w_total").get<double>();
    if (!j.at("lateral_offset_m").is_null()) a.lateral_offset_m = j.at("lateral_offset_m").get<double>();
    a.overloaded = j.at("overloaded").get<bool>();
    a.lateral = parse_lateral(j.at("lateral").get<std::string>());
    return a;
  }
  cog::LoadAssessment a;
  a.reading = cog::FourCellReading::from_array(j.at("reading").get<std::array<double, 4>>());
  a.w_total = j.at("w_total").get<double>();
  if (const auto& c = j.at("cog"); !c.is_null()) {
    a.cog = cog::CogPosition{c.at("x_m").get<double>(), c.at("y_m").get<double>(),
                             c.at("y_from_centreline_m").get<double>()};
  }
  a.w_front = j.at("w_front").get<double>();
  a.w_rear = j.at("w_rear").get<double>();
  a.w_left = j.at("w_left").get<double>();
  a.w_right = j.at("w_right").get<double>();
  a.quadrant_pct = j.at("quadrant_pct").get<std::array<double, 4>>();
  a.flags.overloaded = j.at("overloaded").get<bool>();
  for (const auto& name : j.at("imbalanced")) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (name == cog::kQuadrantNames[i]) a.flags.imbalanced[i] = true;
    }
  }
  a.flags.longitudinal = parse_longitudinal(j.at("longitudinal").get<std::string>());
  a.flags.lateral = parse_lateral(j.at("lateral").get<std::string>());
  return a;
}

}  // namespace

SensorFrameRecord parse_frame_record(std::string_view line, int cell_count, int line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto fields = split_commas(line);
  if (fields.size() != 6) {
    throw ParseError(ParseErrc::FieldCount, line_no,
                     "expected 6 comma-separated fields, got " + std::to_string(fields.size()));
  }
  SensorFrameRecord r;
  if (!valid_station_id(fields[0])) {
    throw ParseError(ParseErrc::BadStationId, line_no, "invalid station id");
  }
  r.station_id = std::string(fields[0]);

  const auto cell = strict_int(fields[1]);
  const auto ts = strict_int(fields[2]);
  const auto code = strict_int(fields[3]);
  const auto gain = strict_int(fields[4]);
  if (!cell || !ts || !code || !gain) {
    throw ParseError(ParseErrc::NotNumeric, line_no, "non-numeric field");
  }
  if (*cell < 0 || *cell >= cell_count) {
    throw ParseError(ParseErrc::InvalidCellIndex, line_no,
                     "cell index " + std::to_string(*cell) + " outside 0.." +
                         std::to_string(cell_count - 1));
  }
  if (*ts < 0) throw ParseError(ParseErrc::NotNumeric, line_no, "timestamp must be >= 0");
  if (!adc::in_code_range(*code)) {
    throw ParseError(ParseErrc::CodeOutOfRange, line_no,
                     "ADC code " + std::to_string(*code) + " outside signed 24-bit range");
  }
  if (!adc::gain_select_from_gain(static_cast<int>(std::clamp<std::int64_t>(*gain, -1, 1024)))) {
    throw ParseError(ParseErrc::InvalidGain, line_no, "gain must be 128, 64 or 32");
  }
  if (fields[5] != "0" && fields[5] != "1") {
    throw ParseError(ParseErrc::BadFlag, line_no, "saturated flag must be 0 or 1");
  }
  r.cell_index = static_cast<int>(*cell);
  r.timestamp_ms = *ts;
  r.adc_code = static_cast<std::int32_t>(*code);
  r.gain = static_cast<int>(*gain);
  r.saturated = fields[5] == "1";
  return r;
}

std::string format_frame_record(const SensorFrameRecord& r) {
  return r.station_id + "," + std::to_string(r.cell_index) + "," + std::to_string(r.timestamp_ms) +
         "," + std::to_string(r.adc_code) + "," + std::to_string(r.gain) + "," +
         (r.saturated ? "1" : "0");
}

Ingestor::Ingestor(int cell_count) : cell_count_(cell_count) {
  if (cell_count < 1 || cell_count > kMaxCells) {
    throw SessionError(SessionErrc::InvalidConfig, "cell count must be 1..4");
  }
}

std::optional<SensorFrameRecord> Ingestor::ingest(std::string_view line) {
  ++line_no_;
  const auto t = trim(line);
  if (t.empty() || t.front() == '#') return std::nullopt;
  auto rec = parse_frame_record(line, cell_count_, line_no_);
  const auto key = std::make_pair(rec.station_id, rec.cell_index);
  const auto it = last_ts_.find(key);
  if (it != last_ts_.end() && rec.timestamp_ms < it->second) {
    throw ParseError(ParseErrc::OutOfOrder, line_no_,
                     "timestamp " + std::to_string(rec.timestamp_ms) + " precedes " +
                         std::to_string(it->second) + " for " + rec.station_id + "/cell " +
                         std::to_string(rec.cell_index));
  }
  last_ts_[key] = rec.timestamp_ms;
  return rec;
}

std::vector<SensorFrameRecord> ingest_all(std::istream& in, int cell_count) {
  Ingestor ing(cell_count);
  std::vector<SensorFrameRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto rec = ing.ingest(line)) out.push_back(std::move(*rec));
  }
  return out;
}

std::vector<SensorFrameRecord> ingest_file(const std::filesystem::path& path, int cell_count) {
  std::ifstream in(path);
  if (!in) throw SessionError(SessionErrc::Io, "cannot open " + path.string());
  return ingest_all(in, cell_count);
}

std::string_view to_string(WeighMode m) noexcept { return m == WeighMode::Static ? "static" : "wim"; }

std::optional<WeighMode> parse_weigh_mode(std::string_view s) noexcept {
  if (s == "static") return WeighMode::Static;
  if (s == "wim") return WeighMode::Wim;
  return std::nullopt;
}

void StationConfig::validate() const {
  if (cell_count != 2 && cell_count != 4) {
    throw SessionError(SessionErrc::InvalidConfig, "station must have 2 or 4 cells");
  }
  if (static_cast<int>(calibrations.size()) != cell_count) {
    throw SessionError(SessionErrc::InvalidConfig, "need one calibration per cell");
  }
  for (const auto& c : calibrations) c.validate();
  geometry.validate();
  policy.validate();
}

StationConfig load_station_config(const KvConfig& cfg) {
  StationConfig sc;
  sc.station_id = cfg.find("station_id").value_or(sc.station_id);
  if (!valid_station_id(sc.station_id)) {
    throw SessionError(SessionErrc::InvalidConfig, "invalid station_id '" + sc.station_id + "'");
  }
  sc.cell_count = static_cast<int>(cfg.get_int("cells", 4));
  sc.geometry.wheelbase_m = cfg.get_double("wheelbase", sc.geometry.wheelbase_m);
  sc.geometry.track_m = cfg.get_double("track", sc.geometry.track_m);
  sc.geometry.breadth_m = cfg.get_double("breadth", sc.geometry.track_m);
  if (const auto p = cfg.find("policy")) {
    sc.policy = cog::AlertPolicy::preset(*p);
  } else {
    sc.policy = sc.cell_count == 2 ? cog::AlertPolicy::prototype1() : cog::AlertPolicy::prototype2();
  }
  sc.policy.overload_threshold_kg = cfg.get_double("overload_threshold", sc.policy.overload_threshold_kg);
  sc.policy.quadrant_threshold_pct = cfg.get_double("quadrant_threshold", sc.policy.quadrant_threshold_pct);
  if (cfg.contains("operating_temp")) sc.operating_temp_c = cfg.get_double("operating_temp");
  sc.temp_warn_delta_c = cfg.get_double("temp_warn_delta", sc.temp_warn_delta_c);
  if (sc.cell_count == 2 || sc.cell_count == 4) {
    for (int i = 0; i < sc.cell_count; ++i) {
      sc.calibrations.push_back(calib::deserialize(cfg, "cell" + std::to_string(i) + "."));
    }
  }
  compliance::merge_axle_configurations(sc.axle_configs, cfg);
  compliance::merge_tolerance_rules(sc.tolerance_rules, cfg);
  sc.validate();
  return sc;
}

StationConfig load_station_config(const std::filesystem::path& path) {
  return load_station_config(KvConfig::load(path));
}

bool WeighRecord::alarm() const noexcept {
  bool a = false;
  if (const auto* f = four_cell_flags(assessment)) a = f->alarm();
  if (const auto* t = std::get_if<cog::TwoCellAssessment>(&assessment)) a = t->overloaded;
  if (tolerance && !tolerance->pass) a = true;
  if (gvw && !gvw->pass) a = true;
  return a;
}

WeighRecord run_session(std::span<const SensorFrameRecord> frames, const StationConfig& config,
                        const SessionOptions& options) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.cell_count);
  std::vector<std::vector<compliance::TimedMass>> streams(n);
  std::vector<std::size_t> saturated(n, 0);
  std::vector<std::size_t> seen(n, 0);
  std::optional<std::int64_t> first_ts;
  std::optional<std::int64_t> last_ts;

  for (const auto& f : frames) {
    if (f.station_id != config.station_id) {
      throw SessionError(SessionErrc::StationMismatch,
                         "frame from station '" + f.station_id + "' in session for '" +
                             config.station_id + "'");
    }
    if (f.cell_index < 0 || f.cell_index >= config.cell_count) {
      throw SessionError(SessionErrc::InvalidConfig, "frame for unconfigured cell " +
                                                         std::to_string(f.cell_index));
    }
    const auto cell = static_cast<std::size_t>(f.cell_index);
    ++seen[cell];
    first_ts = std::min(first_ts.value_or(f.timestamp_ms), f.timestamp_ms);
    last_ts = std::max(last_ts.value_or(f.timestamp_ms), f.timestamp_ms);
    if (f.saturated || adc::is_rail(f.adc_code)) {
      ++saturated[cell];
      continue;
    }
    streams[cell].push_back(
        {f.timestamp_ms, calib::code_to_mass(f.adc_code, config.calibrations[cell]).kg});
  }

  WeighRecord rec;
  rec.station_id = config.station_id;
  rec.mode = options.mode;
  rec.cell_count = config.cell_count;
  rec.geometry = config.geometry;
  rec.policy = config.policy;
  rec.calibration_fingerprint = calib::fingerprint(config.calibrations);

  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] == 0) {
      throw SessionError(SessionErrc::IncompleteStation, "no frames for cell " + std::to_string(i));
    }
    if (streams[i].empty()) {
      throw SessionError(SessionErrc::IncompleteStation,
                         "every frame for cell " + std::to_string(i) + " is saturated");
    }
    const auto w = options.mode == WeighMode::Static
                       ? compliance::static_weigh(streams[i], options.static_window_s)
                       : compliance::wim_weigh(streams[i]);
    rec.cell_mass_kg.push_back(w.mass_kg);
    rec.cell_variance.push_back(w.variance);
    if (saturated[i] > 0) {
      rec.warnings.push_back("cell" + std::to_string(i) + ": dropped " + std::to_string(saturated[i]) +
                             " saturated frames");
    }
    if (config.operating_temp_c &&
        calib::temperature_drift_exceeded(config.calibrations[i], *config.operating_temp_c,
                                          config.temp_warn_delta_c)) {
      rec.warnings.push_back("cell" + std::to_string(i) + ": operating temperature " +
                             format_double(*config.operating_temp_c) + " C is more than " +
                             format_double(config.temp_warn_delta_c) + " C from calibration (" +
                             format_double(config.calibrations[i].calibrated_at_temp_c) + " C)");
    }
  }
  rec.started_at_ms = first_ts.value_or(0);
  rec.ended_at_ms = last_ts.value_or(0);
  rec.assessment = reassess(rec);

  const double total = total_of(rec.assessment);
  if (options.tolerance) {
    const auto& t = *options.tolerance;
    const auto rule = compliance::find_rule(config.tolerance_rules, t.jurisdiction, t.kind);
    rec.tolerance_request = t;
    rec.tolerance = compliance::check_compliance(total, t.reference_kg, rule, t.basis_t);
  }
  if (options.axle_config) {
    const auto& axle = compliance::find_axle_configuration(config.axle_configs, *options.axle_config);
    rec.axle_config = *options.axle_config;
    rec.gvw = compliance::gvw_limit(axle, total);
  }
  return rec;
}

Assessment reassess(const WeighRecord& r) {
  if (r.cell_count == 2 && r.cell_mass_kg.size() == 2) {
    return cog::assess_two_cell({r.cell_mass_kg[0], r.cell_mass_kg[1]}, r.geometry, r.policy);
  }
  if (r.cell_count == 4 && r.cell_mass_kg.size() == 4) {
    return cog::assess_four_cell({r.cell_mass_kg[0], r.cell_mass_kg[1], r.cell_mass_kg[2], r.cell_mass_kg[3]},
                                 r.geometry, r.policy);
  }
  throw SessionError(SessionErrc::RecordMismatch, "record cell data is inconsistent");
}

json assessment_to_json(const Assessment& a) {
  if (const auto* t = std::get_if<cog::TwoCellAssessment>(&a)) {
    return json{
        {"kind", "two_cell"},
        {"w_left", t->reading.w_left},
        {"w_right", t->reading.w_right},
        {"w_total", t->w_total},
        {"lateral_offset_m", t->lateral_offset_m ? json(*t->lateral_offset_m) : json(nullptr)},
        {"overloaded", t->overloaded},
        {"lateral", cog::to_string(t->lateral)},
    };
  }
  const auto& f = std::get<cog::LoadAssessment>(a);
  json imbalanced = json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    if (f.flags.imbalanced[i]) imbalanced.push_back(cog::kQuadrantNames[i]);
  }
  json cog_json = nullptr;
  if (f.cog) {
    cog_json = {{"x_m", f.cog->x_m}, {"y_m", f.cog->y_m}, {"y_from_centreline_m", f.cog->y_from_centreline_m}};
  }
  return json{
      {"kind", "four_cell"},
      {"reading", f.reading.as_array()},
      {"w_total", f.w_total},
      {"cog", cog_json},
      {"w_front", f.w_front},
      {"w_rear", f.w_rear},
      {"w_left", f.w_left},
      {"w_right", f.w_right},
      {"quadrant_pct", f.quadrant_pct},
      {"overloaded", f.flags.overloaded},
      {"imbalanced", imbalanced},
      {"longitudinal", cog::to_string(f.flags.longitudinal)},
      {"lateral", cog::to_string(f.flags.lateral)},
  };
}

json to_json(const WeighRecord& r) {
  json j{
      {"record_id", r.record_id},
      {"recorded_at", r.recorded_at},
      {"station_id", r.station_id},
      {"started_at_ms", r.started_at_ms},
      {"ended_at_ms", r.ended_at_ms},
      {"mode", to_string(r.mode)},
      {"cells", r.cell_count},
      {"cell_mass_kg", r.cell_mass_kg},
      {"cell_variance", r.cell_variance},
      {"geometry",
       {{"wheelbase_m", r.geometry.wheelbase_m},
        {"track_m", r.geometry.track_m},
        {"breadth_m", r.geometry.breadth_m}}},
      {"policy",
       {{"name", r.policy.name},
        {"overload_threshold_kg", r.policy.overload_threshold_kg},
        {"quadrant_threshold_pct", r.policy.quadrant_threshold_pct}}},
      {"calibration", r.calibration_fingerprint},
      {"assessment", assessment_to_json(r.assessment)},
      {"warnings", r.warnings},
  };
  if (r.tolerance && r.tolerance_request) {
    const auto& q = *r.tolerance_request;
    const auto& t = *r.tolerance;
    j["tolerance"] = {
        {"jurisdiction", compliance::to_string(q.jurisdiction)},
        {"kind", compliance::to_string(q.kind)},
        {"reference_kg", q.reference_kg},
        {"basis_t", q.basis_t ? json(*q.basis_t) : json(nullptr)},
        {"pass", t.pass},
        {"error_kg", t.error_kg},
        {"tolerance_kg", t.tolerance_kg},
        {"margin_kg", t.margin_kg},
    };
  }
  if (r.gvw && r.axle_config) {
    j["gvw"] = {{"axle_config", *r.axle_config}, {"pass", r.gvw->pass}, {"margin_kg", r.gvw->margin_kg}};
  }
  return j;
}

WeighRecord weigh_record_from_json(const json& j) {
  try {
    WeighRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.recorded_at = j.at("recorded_at").get<std::string>();
    r.station_id = j.at("station_id").get<std::string>();
    r.started_at_ms = j.at("started_at_ms").get<std::int64_t>();
    r.ended_at_ms = j.at("ended_at_ms").get<std::int64_t>();
    const auto mode = parse_weigh_mode(j.at("mode").get<std::string>());
    if (!mode) throw SessionError(SessionErrc::RecordMismatch, "unknown weighing mode");
    r.mode = *mode;
    r.cell_count = j.at("cells").get<int>();
    r.cell_mass_kg = j.at("cell_mass_kg").get<std::vector<double>>();
    r.cell_variance = j.at("cell_variance").get<std::vector<double>>();
    const auto& g = j.at("geometry");
    r.geometry = {g.at("wheelbase_m").get<double>(), g.at("track_m").get<double>(),
                  g.at("breadth_m").get<double>()};
    const auto& p = j.at("policy");
    r.policy = {p.at("name").get<std::string>(), p.at("overload_threshold_kg").get<double>(),
                p.at("quadrant_threshold_pct").get<double>()};
    r.calibration_fingerprint = j.at("calibration").get<std::string>();
    r.assessment = assessment_from_json(j.at("assessment"));
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (j.contains("tolerance")) {
      const auto& t = j.at("tolerance");
      ToleranceRequest q;
      const auto jur = compliance::parse_jurisdiction(t.at("jurisdiction").get<std::string>());
      const auto kind = compliance::parse_verification_kind(t.at("kind").get<std::string>());
      if (!jur || !kind) throw SessionError(SessionErrc::RecordMismatch, "unknown tolerance rule");
      q.jurisdiction = *jur;
      q.kind = *kind;
      q.reference_kg = t.at("reference_kg").get<double>();
      if (!t.at("basis_t").is_null()) q.basis_t = t.at("basis_t").get<double>();
      r.tolerance_request = q;
      r.tolerance = compliance::ComplianceResult{t.at("pass").get<bool>(), t.at("error_kg").get<double>(),
                                                 t.at("tolerance_kg").get<double>(),
                                                 t.at("margin_kg").get<double>()};
    }
    if (j.contains("gvw")) {
      const auto& g2 = j.at("gvw");
      r.axle_config = g2.at("axle_config").get<std::string>();
      r.gvw = compliance::GvwResult{g2.at("pass").get<bool>(), g2.at("margin_kg").get<double>()};
    }
    return r;
  } catch (const json::exception& e) {
    throw SessionError(SessionErrc::RecordMismatch, std::string("malformed weigh record: ") + e.what());
  }
}

std::string summary_line(const WeighRecord& r) {
  std::string s = std::string("status=") + (r.alarm() ? "ALARM" : "SAFE");
  if (!r.record_id.empty()) s += " record=" + r.record_id;
  s += " station=" + r.station_id + " mode=" + std::string(to_string(r.mode));
  s += " total_kg=" + fmt3(total_of(r.assessment));

  std::vector<std::string> flags;
  if (const auto* f = std::get_if<cog::LoadAssessment>(&r.assessment)) {
    if (f->cog) s += " x_cg_m=" + fmt3(f->cog->x_m) + " y_cg_m=" + fmt3(f->cog->y_m);
    if (f->flags.overloaded) flags.emplace_back("OVERLOAD");
    for (std::size_t i = 0; i < 4; ++i) {
      if (f->flags.imbalanced[i]) flags.push_back("IMBALANCE:" + std::string(cog::kQuadrantNames[i]));
    }
  } else {
    const auto& t = std::get<cog::TwoCellAssessment>(r.assessment);
    if (t.lateral_offset_m) s += " offset_m=" + fmt3(*t.lateral_offset_m);
    if (t.overloaded) flags.emplace_back("OVERLOAD");
  }
  if (r.tolerance && !r.tolerance->pass) flags.emplace_back("TOLERANCE");
  if (r.gvw && !r.gvw->pass) flags.emplace_back("GVW");
  s += " flags=";
  if (flags.empty()) s += "none";
  for (std::size_t i = 0; i < flags.size(); ++i) s += (i ? "," : "") + flags[i];
  if (r.tolerance) s += std::string(" tolerance=") + (r.tolerance->pass ? "pass" : "fail");
  if (r.gvw) s += std::string(" gvw=") + (r.gvw->pass ? "pass" : "fail");
  return s;
}

std::vector<std::string> render_lcd(const WeighRecord& r) {
  auto lines = std::visit([&](const auto& a) { return cog::render_lcd(a, r.policy); }, r.assessment);
  if (r.tolerance) {
    lines.push_back("TOL " + std::string(r.tolerance->pass ? "PASS" : "FAIL") + " err " +
                    fmt3(r.tolerance->error_kg) + " kg, limit " + fmt3(r.tolerance->tolerance_kg) + " kg");
  }
  if (r.gvw) {
    lines.push_back("GVW " + std::string(r.gvw->pass ? "PASS" : "FAIL") + " (" + r.axle_config.value_or("?") +
                    ") margin " + fmt3(r.gvw->margin_kg) + " kg");
  }
  for (const auto& w : r.warnings) lines.push_back("WARN " + w);
  return lines;
}

RecordStore::RecordStore(std::filesystem::path file) : file_(std::move(file)) {}

RecordStore RecordStore::open_default(const std::optional<std::filesystem::path>& data_dir) {
  std::filesystem::path dir;
  if (data_dir) {
    dir = *data_dir;
  } else if (const char* env = std::getenv("LOADGUARD_DATA_DIR"); env && *env) {
    dir = env;
  } else {
    dir = "loadguard-data";
  }
  return RecordStore(dir / "records.jsonl");
}

std::vector<std::string> RecordStore::raw_lines() const {
  std::vector<std::string> lines;
  std::ifstream in(file_);
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

WeighRecord RecordStore::append(WeighRecord record) {
  std::lock_guard lock(mutex_);
  const auto count = raw_lines().size();
  char id[32];
  std::snprintf(id, sizeof id, "rec-%06zu", count + 1);
  record.record_id = id;
  record.recorded_at = utc_now();
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  std::ofstream out(file_, std::ios::app);
  if (!out) throw SessionError(SessionErrc::Io, "cannot append to " + file_.string());
  out << to_json(record).dump() << '\n';
  out.flush();
  if (!out) throw SessionError(SessionErrc::Io, "write failed for " + file_.string());
  return record;
}

std::vector<WeighRecord> RecordStore::load_all() const {
  std::lock_guard lock(mutex_);
  std::vector<WeighRecord> out;
  int n = 0;
  for (const auto& line : raw_lines()) {
    ++n;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SessionError(SessionErrc::RecordMismatch,
                         file_.string() + ":" + std::to_string(n) + ": " + e.what());
    }
    out.push_back(weigh_record_from_json(j));
  }
  return out;
}

std::string canonical_line(const std::string& json_line) {
  auto j = json::parse(json_line);
  j.erase("record_id");
  j.erase("recorded_at");
  return j.dump();
}

}  // namespace loadguard::station
