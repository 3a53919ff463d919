// loadguard command-line front end.
//
// Exit status: 0 safe / pass, 2 overload, imbalance or failed compliance
// check, 1 operational error (bad input, usage, I/O).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "loadguard/calibration.hpp"
#include "loadguard/compliance.hpp"
#include "loadguard/hx711_codec.hpp"
#include "loadguard/kv_config.hpp"
#include "loadguard/scenario.hpp"
#include "loadguard/station.hpp"

namespace fs = std::filesystem;
using namespace loadguard;

namespace {

std::string fmt3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void print_lines(const std::vector<std::string>& lines) {
  for (const auto& l : lines) std::cout << l << '\n';
}

struct SimulateArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  bool lcd = false;
};

int cmd_simulate(const SimulateArgs& a) {
  auto file = scenario::load_scenario(fs::path(a.scenario));
  if (a.seed) file.scenario.noise_seed = *a.seed;
  const auto cals = scenario::calibrate_cells(file.specs, file.adc, file.scenario.noise_seed);
  const auto result =
      scenario::run_end_to_end(file.scenario, file.specs, cals, file.policy, file.adc);

  std::string line = std::string("status=") + (result.flags.alarm() ? "ALARM" : "SAFE");
  line += " total_kg=" + fmt3(result.w_total);
  if (result.cog) line += " x_cg_m=" + fmt3(result.cog->x_m) + " y_cg_m=" + fmt3(result.cog->y_m);
  if (scenario::total_mass(file.scenario) > 0.0) {
    const auto truth = scenario::centroid(file.scenario);
    line += " true_x_m=" + fmt3(truth.x_m) + " true_y_m=" + fmt3(truth.y_m);
  }
  line += " true_total_kg=" + fmt3(scenario::total_mass(file.scenario));
  std::string flags;
  if (result.flags.overloaded) flags = "OVERLOAD";
  for (std::size_t i = 0; i < 4; ++i) {
    if (!result.flags.imbalanced[i]) continue;
    if (!flags.empty()) flags += ",";
    flags += "IMBALANCE:" + std::string(cog::kQuadrantNames[i]);
  }
  line += " flags=" + (flags.empty() ? std::string("none") : flags);
  std::cout << line << '\n';

  for (std::size_t i = 0; i < 4; ++i) {
    if (calib::temperature_drift_exceeded(cals[i], file.scenario.temperature_c)) {
      std::cerr << "warning: cell" << i << " operating "
                << format_double(file.scenario.temperature_c - cals[i].calibrated_at_temp_c)
                << " C away from its calibration temperature\n";
    }
  }
  if (a.lcd) print_lines(cog::render_lcd(result, file.policy));
  return result.flags.alarm() ? station::kExitAlarm : station::kExitSafe;
}

struct CalibrateArgs {
  std::optional<std::string> spec;
  std::optional<std::string> tare_frames;
  std::optional<std::string> loaded_frames;
  double known_mass = 0.0;
  int cell = 0;
  double temperature = 20.0;
  std::uint64_t seed = 0;
  int samples = calib::kDefaultTareSamples;
  std::string prefix;
  std::optional<std::string> out;
};

std::vector<adc::AdcFrame> frames_for_cell(const std::string& path, int cell) {
  std::vector<adc::AdcFrame> frames;
  for (const auto& r : station::ingest_file(path)) {
    if (r.cell_index != cell) continue;
    auto f = adc::AdcFrame::make(r.adc_code, *adc::gain_select_from_gain(r.gain));
    f.saturated = f.saturated || r.saturated;
    frames.push_back(f);
  }
  return frames;
}

int cmd_calibrate(const CalibrateArgs& a) {
  calib::CalibrationState cal;
  if (a.spec) {
    const auto cfg = KvConfig::load(*a.spec);
    const auto spec = sensor::load_cell_spec_from_config(cfg);
    adc::AdcConfig adc;
    adc.vref = cfg.get_double("adc.vref", adc.vref);
    cal = calib::calibrate_simulated(spec, adc, a.known_mass, a.temperature, a.seed, a.samples);
  } else {
    if (!a.tare_frames || !a.loaded_frames) {
      std::cerr << "error: calibrate needs --spec, or both --tare and --loaded frame files\n";
      return station::kExitError;
    }
    const auto zero = calib::tare(frames_for_cell(*a.tare_frames, a.cell));
    const auto loaded = calib::tare(frames_for_cell(*a.loaded_frames, a.cell));
    cal = calib::calibrate(zero, a.known_mass, loaded, a.temperature);
  }
  const auto text = calib::serialize(cal, a.prefix);
  if (a.out) {
    std::ofstream out(*a.out);
    if (!out) {
      std::cerr << "error: cannot write " << *a.out << '\n';
      return station::kExitError;
    }
    out << text;
  } else {
    std::cout << text;
  }
  std::cerr << "calibrated: tare_code=" << cal.tare_code
            << " scale_kg_per_lsb=" << format_double(cal.scale_kg_per_lsb)
            << " fingerprint=" << calib::fingerprint(cal) << '\n';
  return station::kExitSafe;
}

struct WeighArgs {
  std::string mode = "static";
  std::string station;
  std::string frames;
  std::optional<std::string> data_dir;
  std::optional<std::string> jurisdiction;
  std::string verification = "re_verification";
  std::optional<double> reference_kg;
  std::optional<double> basis_t;
  std::optional<std::string> axle_config;
  bool lcd = false;
};

int cmd_weigh(const WeighArgs& a) {
  const auto mode = station::parse_weigh_mode(a.mode);
  if (!mode) {
    std::cerr << "error: --mode must be static or wim\n";
    return station::kExitError;
  }
  const auto config = station::load_station_config(fs::path(a.station));
  const auto frames = station::ingest_file(a.frames, config.cell_count);

  station::SessionOptions opts;
  opts.mode = *mode;
  opts.axle_config = a.axle_config;
  if (a.jurisdiction || a.reference_kg) {
    if (!a.jurisdiction || !a.reference_kg) {
      std::cerr << "error: tolerance check needs both --jurisdiction and --reference-kg\n";
      return station::kExitError;
    }
    const auto j = compliance::parse_jurisdiction(*a.jurisdiction);
    const auto k = compliance::parse_verification_kind(a.verification);
    if (!j || !k) {
      std::cerr << "error: unknown jurisdiction or verification kind\n";
      return station::kExitError;
    }
    opts.tolerance = station::ToleranceRequest{*j, *k, *a.reference_kg, a.basis_t};
  }

  auto store = station::RecordStore::open_default(
      a.data_dir ? std::optional<fs::path>(*a.data_dir) : std::nullopt);
  const auto rec = store.append(station::run_session(frames, config, opts));
  std::cout << station::summary_line(rec) << '\n';
  if (a.lcd) print_lines(station::render_lcd(rec));
  return station::exit_code_for(rec);
}

struct AssessArgs {
  std::string record_file;
  std::optional<std::string> id;
  bool lcd = false;
};

int cmd_assess(const AssessArgs& a) {
  station::RecordStore store{fs::path(a.record_file)};
  const auto lines = store.raw_lines();
  if (lines.empty()) {
    std::cerr << "error: no records in " << a.record_file << '\n';
    return station::kExitError;
  }
  std::optional<std::string> chosen;
  for (const auto& line : lines) {
    const auto j = nlohmann::json::parse(line);
    if (!a.id || j.value("record_id", "") == *a.id) chosen = line;
  }
  if (!chosen) {
    std::cerr << "error: record " << *a.id << " not found\n";
    return station::kExitError;
  }
  const auto stored = nlohmann::json::parse(*chosen);
  const auto rec = station::weigh_record_from_json(stored);
  const auto recomputed = station::assessment_to_json(station::reassess(rec));
  if (recomputed != stored.at("assessment")) {
    std::cerr << "error: stored assessment for " << rec.record_id
              << " does not match a fresh assessment of its cell masses\n";
    return station::kExitError;
  }
  std::cout << station::summary_line(rec) << '\n';
  if (a.lcd) print_lines(station::render_lcd(rec));
  return station::exit_code_for(rec);
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << '\n';
    return station::kExitError;
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      const auto frame = hx711::decode_frame(hx711::parse_trace(t));
      std::cout << "line=" << line_no << " code=" << frame.code
                << " next_gain=" << adc::to_string(frame.next_gain)
                << " saturated=" << (frame.saturated ? 1 : 0) << '\n';
    } catch (const hx711::CodecError& e) {
      std::cerr << path << ":" << line_no << ": " << e.what() << '\n';
      return station::kExitError;
    }
  }
  return station::kExitSafe;
}

struct RulesArgs {
  std::optional<std::string> jurisdiction;
  std::optional<std::string> verification;
  std::optional<double> capacity_t;
  std::optional<std::string> config;
  std::optional<std::string> axle_config;
  std::optional<double> measured_kg;
};

void print_rule(const compliance::ToleranceRule& r) {
  std::cout << "rule jurisdiction=" << compliance::to_string(r.jurisdiction)
            << " kind=" << compliance::to_string(r.kind) << " schedule=";
  if (const auto* t = std::get_if<compliance::AnchorTable>(&r.schedule)) {
    std::cout << "linear";
    for (const auto& [cap, err] : t->anchors) {
      std::cout << ' ' << format_double(cap) << "t:" << format_double(err) << "kg";
    }
  } else if (const auto* b = std::get_if<compliance::FlatBand>(&r.schedule)) {
    std::cout << "band " << format_double(b->min_t) << "-" << format_double(b->max_t)
              << "t:" << format_double(b->max_error_kg) << "kg";
  } else {
    std::cout << "percent " << format_double(std::get<compliance::PercentOfLoad>(r.schedule).percent)
              << "%";
  }
  std::cout << '\n';
}

int cmd_rules(const RulesArgs& a) {
  auto rules = compliance::builtin_rules();
  auto axles = compliance::builtin_axle_configurations();
  if (a.config) {
    const auto cfg = KvConfig::load(*a.config);
    compliance::merge_tolerance_rules(rules, cfg);
    compliance::merge_axle_configurations(axles, cfg);
  }

  if (a.axle_config) {
    const auto& cfg = compliance::find_axle_configuration(axles, *a.axle_config);
    if (!a.measured_kg) {
      std::cout << "axle_config code=" << cfg.code << " axles=" << cfg.axle_count
                << " gvw_limit_kg=" << format_double(cfg.gvw_limit_kg) << '\n';
      return station::kExitSafe;
    }
    const auto r = compliance::gvw_limit(cfg, *a.measured_kg);
    std::cout << "gvw code=" << cfg.code << " limit_kg=" << format_double(cfg.gvw_limit_kg)
              << " measured_kg=" << format_double(*a.measured_kg)
              << " result=" << (r.pass ? "pass" : "fail")
              << " margin_kg=" << format_double(r.margin_kg) << '\n';
    return r.pass ? station::kExitSafe : station::kExitAlarm;
  }

  std::optional<compliance::Jurisdiction> j;
  if (a.jurisdiction) {
    j = compliance::parse_jurisdiction(*a.jurisdiction);
    if (!j) {
      std::cerr << "error: unknown jurisdiction '" << *a.jurisdiction << "'\n";
      return station::kExitError;
    }
  }
  std::optional<compliance::VerificationKind> k;
  if (a.verification) {
    k = compliance::parse_verification_kind(*a.verification);
    if (!k) {
      std::cerr << "error: unknown verification kind '" << *a.verification << "'\n";
      return station::kExitError;
    }
  }

  if (a.capacity_t) {
    if (!j || !k) {
      std::cerr << "error: --capacity-t needs --jurisdiction and --verification\n";
      return station::kExitError;
    }
    const auto rule = compliance::find_rule(rules, *j, *k);
    std::cout << "max_permissible_error jurisdiction=" << compliance::to_string(*j)
              << " kind=" << compliance::to_string(*k) << " capacity_t=" << format_double(*a.capacity_t)
              << " kg=" << format_double(compliance::max_permissible_error(rule, *a.capacity_t)) << '\n';
    return station::kExitSafe;
  }

  for (const auto& r : rules) {
    if (j && r.jurisdiction != *j) continue;
    if (k && r.kind != *k) continue;
    print_rule(r);
  }
  if (!j && !k) {
    for (const auto& c : axles) {
      std::cout << "axle_config code=" << c.code << " axles=" << c.axle_count
                << " gvw_limit_kg=" << format_double(c.gvw_limit_kg) << '\n';
    }
  }
  return station::kExitSafe;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loadguard: load-cell overload and imbalance monitor"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a deck scenario through the full signal chain");
  simulate->add_option("scenario", sim.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "Override the scenario noise seed");
  simulate->add_flag("--lcd", sim.lcd, "Also print the LCD-style display");

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Tare + known-weight calibration of one cell");
  calibrate->add_option("--spec", cal.spec, "Load-cell spec file (simulated calibration)")
      ->check(CLI::ExistingFile);
  calibrate->add_option("--tare", cal.tare_frames, "Zero-load frame file (wire format)")
      ->check(CLI::ExistingFile);
  calibrate->add_option("--loaded", cal.loaded_frames, "Known-weight frame file (wire format)")
      ->check(CLI::ExistingFile);
  calibrate->add_option("--known-mass", cal.known_mass, "Known mass in kg")->required();
  calibrate->add_option("--cell", cal.cell, "Cell index in the frame files")->check(CLI::Range(0, 3));
  calibrate->add_option("--temperature", cal.temperature, "Temperature during calibration (C)");
  calibrate->add_option("--seed", cal.seed, "Noise seed for --spec");
  calibrate->add_option("--samples", cal.samples, "Samples averaged per point for --spec")
      ->check(CLI::PositiveNumber);
  calibrate->add_option("--prefix", cal.prefix, "Key prefix, e.g. cell0.");
  calibrate->add_option("-o,--out", cal.out, "Write calibration here instead of stdout");

  WeighArgs weigh;
  auto* weigh_cmd = app.add_subcommand("weigh", "Weigh a recorded session and persist the record");
  weigh_cmd->add_option("--mode", weigh.mode, "static or wim")
      ->check(CLI::IsMember({"static", "wim"}));
  weigh_cmd->add_option("--station", weigh.station, "Station config file")->required()->check(CLI::ExistingFile);
  weigh_cmd->add_option("--frames", weigh.frames, "Sensor frame file (wire format)")
      ->required()
      ->check(CLI::ExistingFile);
  weigh_cmd->add_option("--data-dir", weigh.data_dir, "Record directory (default $LOADGUARD_DATA_DIR)");
  weigh_cmd->add_option("--jurisdiction", weigh.jurisdiction, "kenya, nz or us");
  weigh_cmd->add_option("--verification", weigh.verification, "first_time, re_verification or acceptance");
  weigh_cmd->add_option("--reference-kg", weigh.reference_kg, "Reference mass for the tolerance check");
  weigh_cmd->add_option("--basis-t", weigh.basis_t, "Weighbridge capacity in tonnes for capacity-based rules");
  weigh_cmd->add_option("--axle-config", weigh.axle_config, "Axle configuration code for the GVW check");
  weigh_cmd->add_flag("--lcd", weigh.lcd, "Also print the LCD-style display");

  AssessArgs assess;
  auto* assess_cmd = app.add_subcommand("assess", "Re-check a stored weigh record");
  assess_cmd->add_option("record", assess.record_file, "records.jsonl file")->required()->check(CLI::ExistingFile);
  assess_cmd->add_option("--id", assess.id, "Record id (default: last record)");
  assess_cmd->add_flag("--lcd", assess.lcd, "Also print the LCD-style display");

  std::string trace_file;
  auto* replay = app.add_subcommand("replay", "Decode an HX711 bit-trace file");
  replay->add_option("trace", trace_file, "Trace file, one frame per line")->required();

  RulesArgs rules;
  auto* rules_cmd = app.add_subcommand("rules", "Show tolerance rules and GVW limits");
  rules_cmd->add_option("--jurisdiction", rules.jurisdiction, "kenya, nz or us");
  rules_cmd->add_option("--verification", rules.verification, "first_time, re_verification or acceptance");
  rules_cmd->add_option("--capacity-t", rules.capacity_t, "Capacity or load (t) to evaluate");
  rules_cmd->add_option("--config", rules.config, "Extra rule/axle table file")->check(CLI::ExistingFile);
  rules_cmd->add_option("--axle-config", rules.axle_config, "Axle configuration code");
  rules_cmd->add_option("--measured-kg", rules.measured_kg, "Gross weight to check against --axle-config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return station::kExitError;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*calibrate) return cmd_calibrate(cal);
    if (*weigh_cmd) return cmd_weigh(weigh);
    if (*assess_cmd) return cmd_assess(assess);
    if (*replay) return cmd_replay(trace_file);
    if (*rules_cmd) return cmd_rules(rules);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return station::kExitError;
  }
  return station::kExitError;
}
