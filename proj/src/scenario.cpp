#include "loadguard/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "loadguard/kv_config.hpp"

namespace loadguard::scenario {

namespace {

void check_placement(const Placement& p, const cog::DeckGeometry& g) {
  const bool ok = std::isfinite(p.mass_kg) && p.mass_kg > 0.0 && p.x_m >= 0.0 &&
                  p.x_m <= g.wheelbase_m && p.y_m >= 0.0 && p.y_m <= g.track_m;
  if (!ok) {
    throw ScenarioError(ScenarioErrc::InvalidPlacement,
                        "placement " + format_double(p.mass_kg) + " kg at (" + format_double(p.x_m) +
                            ", " + format_double(p.y_m) + ") is off the deck or non-positive");
  }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::vector<compliance::TimedMass> synthesize(double mass, double duration_s, double sigma,
                                              double rate_hz, std::uint64_t seed) {
  if (!(rate_hz > 0.0) || !(duration_s >= 0.0) || !(sigma >= 0.0)) {
    throw ScenarioError(ScenarioErrc::InvalidScenario, "invalid stream parameters");
  }
  const double period_ms = 1000.0 / rate_hz;
  const auto n = static_cast<std::size_t>(std::floor(duration_s * rate_hz + 1e-9)) + 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
  std::vector<compliance::TimedMass> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * period_ms));
    out.push_back({t, mass + (sigma > 0.0 ? noise(rng) : 0.0)});
  }
  return out;
}

}  // namespace

cog::FourCellReading corner_loads(const Scenario& s) {
  s.geometry.validate();
  const double L = s.geometry.wheelbase_m;
  const double T = s.geometry.track_m;
  auto w = s.curb.as_array();
  for (const auto& p : s.placements) {
    check_placement(p, s.geometry);
    const double rear = p.x_m / L;
    const double left = p.y_m / T;
    w[0] += p.mass_kg * (1.0 - rear) * left;
    w[1] += p.mass_kg * (1.0 - rear) * (1.0 - left);
    w[2] += p.mass_kg * rear * left;
    w[3] += p.mass_kg * rear * (1.0 - left);
  }
  return cog::FourCellReading::from_array(w);
}

double total_mass(const Scenario& s) noexcept {
  double m = s.curb.w_fl + s.curb.w_fr + s.curb.w_rl + s.curb.w_rr;
  for (const auto& p : s.placements) m += p.mass_kg;
  return m;
}

Centroid centroid(const Scenario& s) {
  s.geometry.validate();
  const double L = s.geometry.wheelbase_m;
  const double T = s.geometry.track_m;
  // Curb contributes as a point mass at the CoG its corner readings imply.
  double m = s.curb.w_fl + s.curb.w_fr + s.curb.w_rl + s.curb.w_rr;
  double mx = (s.curb.w_rl + s.curb.w_rr) * L;
  double my = (s.curb.w_fl + s.curb.w_rl) * T;
  for (const auto& p : s.placements) {
    check_placement(p, s.geometry);
    m += p.mass_kg;
    mx += p.mass_kg * p.x_m;
    my += p.mass_kg * p.y_m;
  }
  if (!(m > 0.0)) throw ScenarioError(ScenarioErrc::UndefinedCentroid, "scenario has zero total mass");
  return {mx / m, my / m};
}

std::uint64_t cell_seed(std::uint64_t scenario_seed, std::size_t cell) noexcept {
  return splitmix64(scenario_seed ^ splitmix64(cell + 1));
}

CellCalibrations calibrate_cells(const CellSpecs& specs, const adc::AdcConfig& adc,
                                 std::uint64_t seed) {
  CellCalibrations cals;
  for (std::size_t i = 0; i < 4; ++i) {
    cals[i] = calib::calibrate_simulated(specs[i], adc, specs[i].capacity_kg,
                                         specs[i].reference_temp_c, cell_seed(seed, i + 16));
  }
  return cals;
}

cog::LoadAssessment run_end_to_end(const Scenario& s, const CellSpecs& specs,
                                   const CellCalibrations& cals, const cog::AlertPolicy& policy,
                                   const adc::AdcConfig& adc) {
  for (const auto& c : cals) c.validate();
  const auto loads = corner_loads(s).as_array();
  std::array<double, 4> recovered{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto clean = sensor::bridge_output(specs[i], loads[i], s.temperature_c);
    const auto noisy = sensor::add_noise(clean, specs[i], cell_seed(s.noise_seed, i));
    const auto frame = sensor::quantize(noisy, adc);
    recovered[i] = calib::code_to_mass(frame.code, cals[i]).kg;
  }
  return cog::assess_four_cell(cog::FourCellReading::from_array(recovered), s.geometry, policy);
}

std::vector<cog::LoadAssessment> run_batch(std::span<const Scenario> scenarios,
                                           const CellSpecs& specs, const CellCalibrations& cals,
                                           const cog::AlertPolicy& policy,
                                           const adc::AdcConfig& adc, unsigned threads) {
  std::vector<cog::LoadAssessment> out(scenarios.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, scenarios.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        out[i] = run_end_to_end(scenarios[i], specs, cals, policy, adc);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

std::vector<compliance::TimedMass> synthesize_static_stream(double true_mass_kg,
                                                            const StreamParams& p,
                                                            std::uint64_t seed) {
  return synthesize(true_mass_kg, p.static_duration_s, p.noise_sigma_kg, p.sample_rate_hz, seed);
}

std::vector<compliance::TimedMass> synthesize_wim_stream(double true_mass_kg,
                                                         const StreamParams& p,
                                                         std::uint64_t seed) {
  return synthesize(true_mass_kg, p.wim_duration_s, p.noise_sigma_kg * p.wim_noise_factor,
                    p.sample_rate_hz, splitmix64(seed ^ 0x5749'4d00ull));
}

ScenarioFile load_scenario(const KvConfig& cfg) {
  ScenarioFile f;
  auto& s = f.scenario;
  s.geometry.wheelbase_m = cfg.get_double("wheelbase", s.geometry.wheelbase_m);
  s.geometry.track_m = cfg.get_double("track", s.geometry.track_m);
  s.geometry.breadth_m = cfg.get_double("breadth", s.geometry.track_m);
  s.geometry.validate();
  s.noise_seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  s.temperature_c = cfg.get_double("temperature", s.temperature_c);

  auto bad = [&](const KvConfig::Entry& e, const char* what) {
    return ConfigError(ConfigErrc::BadValue,
                       cfg.source() + ":" + std::to_string(e.line) + ": " + what);
  };
  if (const auto curb = cfg.all("curb"); !curb.empty()) {
    const auto* e = curb.back();
    const auto parts = split_ws(e->value);
    if (parts.size() != 4) throw bad(*e, "expected 'curb = FL FR RL RR'");
    std::array<double, 4> w{};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto v = parse_double(parts[i]);
      if (!v || *v < 0.0) throw bad(*e, "curb weights must be numbers >= 0");
      w[i] = *v;
    }
    s.curb = cog::FourCellReading::from_array(w);
  }
  for (const auto* e : cfg.all("place")) {
    const auto parts = split_ws(e->value);
    if (parts.size() != 3) throw bad(*e, "expected 'place = mass x y'");
    const auto m = parse_double(parts[0]);
    const auto x = parse_double(parts[1]);
    const auto y = parse_double(parts[2]);
    if (!m || !x || !y) throw bad(*e, "placement values must be numbers");
    Placement p{*m, *x, *y};
    check_placement(p, s.geometry);
    s.placements.push_back(p);
  }

  if (const auto name = cfg.find("policy")) {
    f.policy = cog::AlertPolicy::preset(*name);
  } else {
    f.policy = cog::AlertPolicy::prototype2();
  }
  f.policy.overload_threshold_kg = cfg.get_double("overload_threshold", f.policy.overload_threshold_kg);
  f.policy.quadrant_threshold_pct = cfg.get_double("quadrant_threshold", f.policy.quadrant_threshold_pct);
  f.policy.validate();

  const auto shared = sensor::load_cell_spec_from_config(cfg, "cell.");
  for (std::size_t i = 0; i < 4; ++i) {
    f.specs[i] = sensor::load_cell_spec_from_config(cfg, "cell" + std::to_string(i) + ".", shared);
  }

  f.adc.vref = cfg.get_double("adc.vref", f.adc.vref);
  f.adc.sample_rate = cfg.get_double("adc.sample_rate", f.adc.sample_rate);
  if (const auto g = cfg.find("adc.gain")) {
    const auto gain = parse_int(*g);
    const auto sel = gain ? adc::gain_select_from_gain(static_cast<int>(*gain)) : std::nullopt;
    if (!sel) throw ConfigError(ConfigErrc::BadValue, cfg.source() + ": adc.gain must be 128, 64 or 32");
    f.adc.gain = *sel;
  }
  f.adc.validate();
  return f;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  return load_scenario(KvConfig::load(path));
}

}  // namespace loadguard::scenario
