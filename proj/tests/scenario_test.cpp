#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "loadguard/kv_config.hpp"
#include "loadguard/scenario.hpp"

using namespace loadguard;
using scenario::Placement;
using scenario::Scenario;

namespace {

Scenario base(double L = 2.0, double T = 1.5) {
  Scenario s;
  s.geometry = {L, T, T};
  return s;
}

Scenario random_scenario(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dim(0.5, 4.0);
  Scenario s = base(dim(rng), dim(rng));
  std::uniform_real_distribution<double> mass(0.5, 120.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(0, 6);
  s.curb = {unit(rng) * 40.0, unit(rng) * 40.0, unit(rng) * 40.0, unit(rng) * 40.0};
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    s.placements.push_back({mass(rng), unit(rng) * s.geometry.wheelbase_m, unit(rng) * s.geometry.track_m});
  }
  if (n == 0 && s.curb.w_fl == 0.0) s.placements.push_back({1.0, 0.0, 0.0});
  s.noise_seed = rng();
  return s;
}

scenario::CellSpecs ideal_specs(double noise = 0.0, double capacity = 120.0) {
  scenario::CellSpecs specs;
  for (auto& s : specs) {
    s.capacity_kg = capacity;
    s.noise_sigma_mv = noise;
  }
  return specs;
}

}  // namespace

TEST(CornerLoads, CentredMassSplitsEvenly) {
  auto s = base();
  s.placements.push_back({100.0, 1.0, 0.75});
  const auto r = scenario::corner_loads(s);
  EXPECT_EQ(r, (cog::FourCellReading{25, 25, 25, 25}));
  s.curb = {10, 20, 30, 40};
  EXPECT_EQ(scenario::corner_loads(s), (cog::FourCellReading{35, 45, 55, 65}));
}

TEST(CornerLoads, RearLeftCornerTakesEverything) {
  auto s = base();
  s.placements.push_back({80.0, 2.0, 1.5});
  EXPECT_EQ(scenario::corner_loads(s), (cog::FourCellReading{0, 0, 80, 0}));
}

TEST(CornerLoads, Superposition) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto s = random_scenario(rng);
    auto accum = s;
    accum.placements.clear();
    auto sum = scenario::corner_loads(accum).as_array();
    for (const auto& p : s.placements) {
      auto single = base(s.geometry.wheelbase_m, s.geometry.track_m);
      single.placements.push_back(p);
      const auto w = scenario::corner_loads(single).as_array();
      for (std::size_t k = 0; k < 4; ++k) sum[k] += w[k];
    }
    const auto together = scenario::corner_loads(s).as_array();
    for (std::size_t k = 0; k < 4; ++k) ASSERT_NEAR(together[k], sum[k], 1e-12 * (1.0 + sum[k]));
  }
}

TEST(CornerLoads, ConservesMass) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_scenario(rng);
    const auto r = scenario::corner_loads(s);
    ASSERT_NEAR(r.w_fl + r.w_fr + r.w_rl + r.w_rr, scenario::total_mass(s), 1e-12 * scenario::total_mass(s));
  }
}

TEST(CornerLoads, RejectsOffDeckPlacement) {
  for (const Placement p : {Placement{10, -0.1, 0.5}, Placement{10, 2.1, 0.5}, Placement{10, 1.0, 1.6},
                            Placement{0, 1.0, 0.5}, Placement{-5, 1.0, 0.5}}) {
    auto s = base();
    s.placements.push_back(p);
    try {
      scenario::corner_loads(s);
      FAIL();
    } catch (const scenario::ScenarioError& e) {
      EXPECT_EQ(e.kind(), scenario::ScenarioErrc::InvalidPlacement);
    }
  }
}

TEST(Centroid, SinglePlacementAndSymmetry) {
  auto s = base();
  s.placements.push_back({42.0, 0.3, 1.1});
  const auto c = scenario::centroid(s);
  EXPECT_DOUBLE_EQ(c.x_m, 0.3);
  EXPECT_DOUBLE_EQ(c.y_m, 1.1);

  auto sym = base();
  sym.placements.push_back({10.0, 0.0, 0.0});
  sym.placements.push_back({10.0, 2.0, 1.5});
  const auto m = scenario::centroid(sym);
  EXPECT_DOUBLE_EQ(m.x_m, 1.0);
  EXPECT_DOUBLE_EQ(m.y_m, 0.75);

  EXPECT_THROW(scenario::centroid(base()), scenario::ScenarioError);
}

TEST(Centroid, MatchesEngineCogOnNoiseFreeLoads) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_scenario(rng);
    const auto a = cog::assess_four_cell(scenario::corner_loads(s), s.geometry, cog::AlertPolicy::prototype2());
    const auto c = scenario::centroid(s);
    ASSERT_NEAR(a.cog->x_m, c.x_m, 1e-9);
    ASSERT_NEAR(a.cog->y_m, c.y_m, 1e-9);
  }
}

TEST(EndToEnd, FiveHundredKilogramsIsOverloaded) {
  auto s = base();
  s.curb = {60, 60, 60, 60};
  s.placements.push_back({260.0, 1.0, 0.75});
  const auto specs = ideal_specs();
  const auto cals = scenario::calibrate_cells(specs, {}, 0);
  const auto a = scenario::run_end_to_end(s, specs, cals, cog::AlertPolicy::prototype2());
  EXPECT_NEAR(a.w_total, 500.0, 4 * cals[0].scale_kg_per_lsb);
  EXPECT_TRUE(a.flags.overloaded);
}

TEST(EndToEnd, CurbOnlyReproducesCurbCog) {
  auto s = base();
  s.curb = {30, 50, 40, 20};
  const auto specs = ideal_specs();
  const auto cals = scenario::calibrate_cells(specs, {}, 0);
  const auto a = scenario::run_end_to_end(s, specs, cals, cog::AlertPolicy::prototype2());
  const auto curb = cog::assess_four_cell(s.curb, s.geometry, cog::AlertPolicy::prototype2());
  // Each corner is recovered within 1 LSB, so the CoG moves by well under a millimetre.
  EXPECT_NEAR(a.cog->x_m, curb.cog->x_m, 1e-4);
  EXPECT_NEAR(a.cog->y_m, curb.cog->y_m, 1e-4);
}

TEST(EndToEnd, DeterministicForSeed) {
  std::mt19937_64 rng(12);
  const auto specs = ideal_specs(0.002, 600.0);
  const auto cals = scenario::calibrate_cells(specs, {}, 3);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_scenario(rng);
    const auto a = scenario::run_end_to_end(s, specs, cals, cog::AlertPolicy::prototype2());
    const auto b = scenario::run_end_to_end(s, specs, cals, cog::AlertPolicy::prototype2());
    ASSERT_EQ(a.reading, b.reading);
  }
}

TEST(EndToEnd, NoisyTotalIsUnbiased) {
  auto s = base();
  s.curb = {50, 55, 60, 65};
  s.placements.push_back({80.0, 1.3, 0.4});
  const auto specs = ideal_specs(0.002);  // about 0.024 kg per cell
  const auto cals = scenario::calibrate_cells(ideal_specs(), {}, 0);
  const double truth = scenario::total_mass(s);
  const int n = 1000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int seed = 0; seed < n; ++seed) {
    s.noise_seed = static_cast<std::uint64_t>(seed);
    const double w = scenario::run_end_to_end(s, specs, cals, cog::AlertPolicy::prototype2()).w_total;
    sum += w;
    sum_sq += w * w;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1));
  // Quantization may bias each cell by up to one LSB.
  EXPECT_NEAR(mean, truth, 3.0 * sd / std::sqrt(double(n)) + 4 * cals[0].scale_kg_per_lsb);
}

TEST(EndToEnd, AddingMassNeverClearsOverload) {
  std::mt19937_64 rng(13);
  const auto specs = ideal_specs(0.0, 600.0);
  const auto cals = scenario::calibrate_cells(specs, {}, 0);
  const auto policy = cog::AlertPolicy{"test", 150.0, 30.0};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    auto s = base();
    s.placements.push_back({100.0 + 100.0 * unit(rng), 2.0 * unit(rng), 1.5 * unit(rng)});
    bool was_overloaded = false;
    for (int k = 0; k < 5; ++k) {
      const auto a = scenario::run_end_to_end(s, specs, cals, policy);
      if (was_overloaded) ASSERT_TRUE(a.flags.overloaded);
      was_overloaded = a.flags.overloaded;
      s.placements.push_back({5.0 + 10.0 * unit(rng), 2.0 * unit(rng), 1.5 * unit(rng)});
    }
  }
}

TEST(EndToEnd, MechanicalOverrangePropagates) {
  auto s = base();
  s.placements.push_back({200.0, 2.0, 1.5});  // 200 kg on one 120 kg cell
  const auto specs = ideal_specs();
  const auto cals = scenario::calibrate_cells(specs, {}, 0);
  EXPECT_THROW(scenario::run_end_to_end(s, specs, cals, cog::AlertPolicy::prototype2()), sensor::SensorError);
}

TEST(Batch, ParallelMatchesSequential) {
  std::mt19937_64 rng(14);
  std::vector<Scenario> scenarios;
  for (int i = 0; i < 200; ++i) scenarios.push_back(random_scenario(rng));
  const auto specs = ideal_specs(0.001, 600.0);
  const auto cals = scenario::calibrate_cells(specs, {}, 0);
  const auto seq = scenario::run_batch(scenarios, specs, cals, cog::AlertPolicy::prototype2(), {}, 1);
  const auto par = scenario::run_batch(scenarios, specs, cals, cog::AlertPolicy::prototype2(), {}, 4);
  ASSERT_EQ(seq.size(), par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    ASSERT_EQ(seq[i].reading, par[i].reading);
    ASSERT_EQ(seq[i].w_total, par[i].w_total);
  }
}

TEST(ScenarioFile, LoadsShippedExamples) {
  const std::string dir = std::string(LOADGUARD_SOURCE_DIR) + "/data/scenarios/";
  const auto f = scenario::load_scenario(dir + "overload.cfg");
  EXPECT_EQ(f.scenario.placements.size(), 1u);
  EXPECT_EQ(f.scenario.noise_seed, 11u);
  EXPECT_EQ(f.policy.overload_threshold_kg, 400.0);
  EXPECT_EQ(f.specs[2].noise_sigma_mv, 0.0005);
  EXPECT_EQ(scenario::total_mass(f.scenario), 500.0);
}

TEST(ScenarioFile, PerCellOverridesAndErrors) {
  const auto f = scenario::load_scenario(KvConfig::parse(
      "wheelbase = 3\ntrack = 2\ncell.capacity = 200\ncell3.capacity = 150\nadc.gain = 64\n"));
  EXPECT_EQ(f.specs[0].capacity_kg, 200.0);
  EXPECT_EQ(f.specs[3].capacity_kg, 150.0);
  EXPECT_EQ(f.adc.gain, adc::GainSelect::A64);
  EXPECT_EQ(f.scenario.geometry.breadth_m, 2.0);
  EXPECT_THROW(scenario::load_scenario(KvConfig::parse("place = 10 5 0.5\n")), scenario::ScenarioError);
  EXPECT_THROW(scenario::load_scenario(KvConfig::parse("curb = 1 2 3\n")), ConfigError);
  EXPECT_THROW(scenario::load_scenario(KvConfig::parse("adc.gain = 100\n")), ConfigError);
}
