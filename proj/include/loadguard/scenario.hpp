#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "loadguard/adc.hpp"
#include "loadguard/calibration.hpp"
#include "loadguard/cog_engine.hpp"
#include "loadguard/compliance.hpp"
#include "loadguard/error.hpp"
#include "loadguard/sensor_model.hpp"

namespace loadguard {
class KvConfig;
}

// Forward statics for a rigid four-support deck: point masses placed on the
// deck are split onto the corner cells bilinearly. Coordinates: x from the
// front axle line rearward in [0, L], y from the right wheel line leftward
// in [0, T].
namespace loadguard::scenario {

enum class ScenarioErrc { InvalidPlacement, UndefinedCentroid, InvalidScenario };
using ScenarioError = TypedError<ScenarioErrc>;

struct Placement {
  double mass_kg = 0.0;
  double x_m = 0.0;
  double y_m = 0.0;
};

struct Scenario {
  cog::DeckGeometry geometry;
  std::vector<Placement> placements;
  cog::FourCellReading curb;  // as-measured vehicle weight per corner
  std::uint64_t noise_seed = 0;
  double temperature_c = 20.0;
};

cog::FourCellReading corner_loads(const Scenario& s);

struct Centroid {
  double x_m = 0.0;
  double y_m = 0.0;
};
Centroid centroid(const Scenario& s);

double total_mass(const Scenario& s) noexcept;

using CellSpecs = std::array<sensor::LoadCellSpec, 4>;
using CellCalibrations = std::array<calib::CalibrationState, 4>;

// Each cell's noise stream is seeded from (scenario seed, cell index).
std::uint64_t cell_seed(std::uint64_t scenario_seed, std::size_t cell) noexcept;

// Zero-load / full-capacity calibration of each cell through the simulated
// signal chain, at that cell's reference temperature.
CellCalibrations calibrate_cells(const CellSpecs& specs, const adc::AdcConfig& adc,
                                 std::uint64_t seed);

// corner_loads -> bridge_output -> noise -> quantize -> code_to_mass -> assess.
cog::LoadAssessment run_end_to_end(const Scenario& s, const CellSpecs& specs,
                                   const CellCalibrations& cals, const cog::AlertPolicy& policy,
                                   const adc::AdcConfig& adc = {});

// Same as run_end_to_end over many scenarios on `threads` workers. Output
// order follows input order and does not depend on scheduling.
std::vector<cog::LoadAssessment> run_batch(std::span<const Scenario> scenarios,
                                           const CellSpecs& specs, const CellCalibrations& cals,
                                           const cog::AlertPolicy& policy,
                                           const adc::AdcConfig& adc = {}, unsigned threads = 0);

// Synthetic mass streams for weighing-mode comparisons.
struct StreamParams {
  double sample_rate_hz = 10.0;
  double noise_sigma_kg = 1.0;
  double static_duration_s = 15.0;  // span covered by a static stream
  double wim_duration_s = 1.5;      // pass-over time
  double wim_noise_factor = 5.0;    // WIM noise amplification
};

std::vector<compliance::TimedMass> synthesize_static_stream(double true_mass_kg,
                                                            const StreamParams& p,
                                                            std::uint64_t seed);
std::vector<compliance::TimedMass> synthesize_wim_stream(double true_mass_kg,
                                                         const StreamParams& p,
                                                         std::uint64_t seed);

// Scenario file (key = value):
//   wheelbase, track, breadth     deck geometry (m)
//   curb = FL FR RL RR            curb weights (kg), default 0
//   place = mass x y              repeatable
//   seed, temperature
//   policy = prototype2 | overload_threshold/quadrant_threshold
//   cell.<key>                    LoadCellSpec keys applied to all four cells
//   cellN.<key>                   per-cell overrides, N in 0..3
struct ScenarioFile {
  Scenario scenario;
  CellSpecs specs;
  cog::AlertPolicy policy;
  adc::AdcConfig adc;
};
ScenarioFile load_scenario(const KvConfig& cfg);
ScenarioFile load_scenario(const std::filesystem::path& path);

}  // namespace loadguard::scenario
