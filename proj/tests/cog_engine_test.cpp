#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "loadguard/cog_engine.hpp"

using namespace loadguard;
using cog::AlertPolicy;
using cog::DeckGeometry;
using cog::FourCellReading;
using cog::TwoCellReading;

namespace {

DeckGeometry deck(double L = 2.0, double T = 1.5, double B = 1.5) { return {L, T, B}; }

std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(LOADGUARD_GOLDEN_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string joined(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

// Readings on a 1/1024 kg grid below 2^20 kg: every partial sum is exact.
FourCellReading grid_reading(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> q(0, std::int64_t{1} << 30);
  return {q(rng) / 1024.0, q(rng) / 1024.0, q(rng) / 1024.0, q(rng) / 1024.0};
}

FourCellReading any_reading(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.0, 5000.0);
  return {w(rng), w(rng), w(rng), w(rng)};
}

}  // namespace

TEST(TwoCell, TotalWeight) {
  EXPECT_EQ(cog::total_weight_two_cell({0.0, 0.0}), 0.0);
  EXPECT_EQ(cog::total_weight_two_cell({5.0, 4.5}), 9.5);
  EXPECT_DOUBLE_EQ(cog::total_weight_two_cell({3.2, 1.8}), 5.0);
}

TEST(TwoCell, LateralOffset) {
  EXPECT_EQ(cog::lateral_offset_two_cell({4.0, 4.0}, deck(2, 1.5, 1.2)), 0.0);
  EXPECT_DOUBLE_EQ(cog::lateral_offset_two_cell({5.0, 0.0}, deck(2, 1.5, 2.0)), 1.0);
  // (3 - 1) / 4 * 0.8 / 2
  EXPECT_DOUBLE_EQ(cog::lateral_offset_two_cell({3.0, 1.0}, deck(2, 1.5, 0.8)), 0.2);
  try {
    cog::lateral_offset_two_cell({0.0, 0.0}, deck());
    FAIL();
  } catch (const cog::CogError& e) {
    EXPECT_EQ(e.kind(), cog::CogErrc::UndefinedCog);
  }
}

TEST(TwoCell, AssessmentThreshold) {
  const auto p1 = AlertPolicy::prototype1();
  EXPECT_EQ(p1.overload_threshold_kg, 9.5);
  EXPECT_FALSE(cog::assess_two_cell({5.0, 4.5}, deck(), p1).overloaded);
  EXPECT_TRUE(cog::assess_two_cell({5.0, 4.51}, deck(), p1).overloaded);
  const auto a = cog::assess_two_cell({3.0, 1.0}, deck(2, 1.5, 0.8), p1);
  EXPECT_EQ(a.lateral, cog::Lateral::LeftHeavy);
  EXPECT_DOUBLE_EQ(*a.lateral_offset_m, 0.2);
  EXPECT_FALSE(cog::assess_two_cell({0.0, 0.0}, deck(), p1).lateral_offset_m.has_value());
  EXPECT_THROW(cog::assess_two_cell({-1.0, 2.0}, deck(), p1), cog::CogError);
}

TEST(FourCell, UniformLoad) {
  const auto a = cog::assess_four_cell({50, 50, 50, 50}, deck(2.0, 1.5), AlertPolicy::prototype2());
  ASSERT_TRUE(a.cog);
  EXPECT_EQ(a.cog->x_m, 1.0);
  EXPECT_EQ(a.cog->y_m, 0.75);
  EXPECT_EQ(a.cog->y_from_centreline_m, 0.0);
  for (double pct : a.quadrant_pct) EXPECT_EQ(pct, 25.0);
  EXPECT_FALSE(a.flags.overloaded);
  EXPECT_FALSE(a.flags.any_imbalance());
  EXPECT_EQ(a.flags.longitudinal, cog::Longitudinal::Balanced);
  EXPECT_EQ(a.flags.lateral, cog::Lateral::Balanced);
}

TEST(FourCell, RearBiasedOverload) {
  const auto a = cog::assess_four_cell({100, 100, 150, 150}, deck(2.0, 1.5), AlertPolicy::prototype2());
  EXPECT_EQ(a.w_total, 500.0);
  EXPECT_TRUE(a.flags.overloaded);
  EXPECT_DOUBLE_EQ(a.cog->x_m, 300.0 * 2.0 / 500.0);
  EXPECT_EQ(a.flags.longitudinal, cog::Longitudinal::RearHeavy);
}

TEST(FourCell, QuadrantFlagAndHeaviness) {
  const auto a = cog::assess_four_cell({40, 10, 30, 20}, deck(), AlertPolicy::prototype2());
  EXPECT_EQ(a.quadrant_pct[0], 40.0);
  EXPECT_TRUE(a.flags.imbalanced[0]);
  EXPECT_FALSE(a.flags.imbalanced[1]);
  EXPECT_FALSE(a.flags.imbalanced[2]);  // exactly 30 % is not flagged
  EXPECT_FALSE(a.flags.imbalanced[3]);
  EXPECT_EQ(a.w_left, 70.0);
  EXPECT_EQ(a.w_right, 30.0);
  EXPECT_EQ(a.flags.lateral, cog::Lateral::LeftHeavy);
  EXPECT_EQ(a.flags.longitudinal, cog::Longitudinal::Balanced);
}

TEST(FourCell, EquationsByDirectEvaluation) {
  const FourCellReading r{12.0, 30.0, 25.0, 33.0};
  const double L = 2.4, T = 1.3;
  const auto a = cog::assess_four_cell(r, deck(L, T), AlertPolicy::prototype2());
  const double total = 12.0 + 30.0 + 25.0 + 33.0;
  EXPECT_DOUBLE_EQ(a.w_total, total);
  EXPECT_DOUBLE_EQ(a.cog->x_m, (25.0 + 33.0) * L / total);
  EXPECT_DOUBLE_EQ(a.cog->y_m, (12.0 + 25.0) * T / total);
  EXPECT_DOUBLE_EQ(a.cog->y_from_centreline_m, (12.0 + 25.0) * T / total - T / 2);
  EXPECT_EQ(a.w_front, 42.0);
  EXPECT_EQ(a.w_rear, 58.0);
  EXPECT_EQ(a.w_left, 37.0);
  EXPECT_EQ(a.w_right, 63.0);
  EXPECT_DOUBLE_EQ(a.quadrant_pct[3], 33.0);
  EXPECT_TRUE(a.flags.imbalanced[3]);
  EXPECT_FALSE(a.flags.imbalanced[1]);  // FR is exactly 30 %
  EXPECT_EQ(a.flags.longitudinal, cog::Longitudinal::RearHeavy);
  EXPECT_EQ(a.flags.lateral, cog::Lateral::RightHeavy);
}

TEST(FourCell, ZeroTotalLeavesCogUndefined) {
  const auto a = cog::assess_four_cell({0, 0, 0, 0}, deck(), AlertPolicy::prototype2());
  EXPECT_EQ(a.w_total, 0.0);
  EXPECT_FALSE(a.cog.has_value());
  for (double p : a.quadrant_pct) EXPECT_EQ(p, 0.0);
  EXPECT_FALSE(a.flags.alarm());
}

TEST(FourCell, InvalidInputs) {
  try {
    cog::assess_four_cell({1, -0.5, 1, 1}, deck(), AlertPolicy::prototype2());
    FAIL();
  } catch (const cog::CogError& e) {
    EXPECT_EQ(e.kind(), cog::CogErrc::InvalidReading);
  }
  EXPECT_THROW(cog::assess_four_cell({1, NAN, 1, 1}, deck(), AlertPolicy::prototype2()), cog::CogError);
  EXPECT_THROW(cog::assess_four_cell({1, 1, 1, 1}, deck(0.0, 1.0), AlertPolicy::prototype2()), cog::CogError);
  EXPECT_THROW(cog::assess_four_cell({1, 1, 1, 1}, deck(), AlertPolicy{"x", 0.0, 30.0}), cog::CogError);
  EXPECT_THROW(AlertPolicy::preset("prototype9"), cog::CogError);
}

TEST(FourCell, ThresholdBoundaries) {
  const auto p2 = AlertPolicy::prototype2();
  EXPECT_FALSE(cog::assess_four_cell({100, 100, 100, 100}, deck(), p2).flags.overloaded);
  EXPECT_TRUE(cog::assess_four_cell({100, 100, 100, 100.1}, deck(), p2).flags.overloaded);
  EXPECT_FALSE(cog::assess_four_cell({30, 25, 25, 20}, deck(), p2).flags.imbalanced[0]);
  EXPECT_TRUE(cog::assess_four_cell({30.1, 25, 25, 19.9}, deck(), p2).flags.imbalanced[0]);
}

TEST(CogProperties, SectorConsistencyExactOnGrid) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5000; ++i) {
    const auto a = cog::assess_four_cell(grid_reading(rng), deck(), AlertPolicy::prototype2());
    ASSERT_EQ(a.w_front + a.w_rear, a.w_total);
    ASSERT_EQ(a.w_left + a.w_right, a.w_total);
  }
}

TEST(CogProperties, SectorConsistencyArbitraryDoubles) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5000; ++i) {
    const auto a = cog::assess_four_cell(any_reading(rng), deck(), AlertPolicy::prototype2());
    ASSERT_EQ(a.w_front + a.w_rear, a.w_total);
    // Two different summation orders of four doubles: at most a couple of ulps apart.
    ASSERT_LE(std::abs(a.w_left + a.w_right - a.w_total), 4.0 * std::numeric_limits<double>::epsilon() * a.w_total);
  }
}

TEST(CogProperties, CogWithinDeckAndPercentagesSumTo100) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dim(0.1, 20.0);
  for (int i = 0; i < 5000; ++i) {
    auto r = any_reading(rng);
    if (i % 5 == 0) r.w_fl = 0.0;
    if (i % 7 == 0) r.w_rr = 0.0;
    const auto g = deck(dim(rng), dim(rng));
    const auto a = cog::assess_four_cell(r, g, AlertPolicy::prototype2());
    ASSERT_TRUE(a.cog);
    ASSERT_GE(a.cog->x_m, 0.0);
    ASSERT_LE(a.cog->x_m, g.wheelbase_m);
    ASSERT_GE(a.cog->y_m, 0.0);
    ASSERT_LE(a.cog->y_m, g.track_m);
    ASSERT_NEAR(a.quadrant_pct[0] + a.quadrant_pct[1] + a.quadrant_pct[2] + a.quadrant_pct[3], 100.0, 1e-9);
  }
}

TEST(CogProperties, LimitCases) {
  const auto g = deck(2.7, 1.9);
  const auto rear = cog::assess_four_cell({0, 0, 13.3, 7.1}, g, AlertPolicy::prototype2());
  EXPECT_EQ(rear.cog->x_m, g.wheelbase_m);
  const auto front = cog::assess_four_cell({13.3, 7.1, 0, 0}, g, AlertPolicy::prototype2());
  EXPECT_EQ(front.cog->x_m, 0.0);
  const auto left = cog::assess_four_cell({3.3, 0, 9.1, 0}, g, AlertPolicy::prototype2());
  EXPECT_EQ(left.cog->y_m, g.track_m);
}

TEST(CogProperties, ScaleEquivariance) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> kdist(0.01, 100.0);
  const auto p2 = AlertPolicy::prototype2();
  for (int i = 0; i < 3000; ++i) {
    const auto r = grid_reading(rng);
    const auto base = cog::assess_four_cell(r, deck(), p2);
    // Powers of two scale exactly, so every derived quantity must match bit for bit.
    const double k2 = std::ldexp(1.0, static_cast<int>(i % 9) - 4);
    const auto s2 = cog::assess_four_cell({r.w_fl * k2, r.w_fr * k2, r.w_rl * k2, r.w_rr * k2}, deck(), p2);
    ASSERT_EQ(s2.cog->x_m, base.cog->x_m);
    ASSERT_EQ(s2.cog->y_m, base.cog->y_m);
    ASSERT_EQ(s2.quadrant_pct, base.quadrant_pct);
    ASSERT_EQ(s2.flags.longitudinal, base.flags.longitudinal);
    ASSERT_EQ(s2.flags.lateral, base.flags.lateral);
    ASSERT_EQ(s2.flags.overloaded, s2.w_total > p2.overload_threshold_kg);

    const double k = kdist(rng);
    const auto sk = cog::assess_four_cell({r.w_fl * k, r.w_fr * k, r.w_rl * k, r.w_rr * k}, deck(), p2);
    ASSERT_NEAR(sk.cog->x_m, base.cog->x_m, 1e-12);
    ASSERT_NEAR(sk.cog->y_m, base.cog->y_m, 1e-12);
    for (std::size_t q = 0; q < 4; ++q) ASSERT_NEAR(sk.quadrant_pct[q], base.quadrant_pct[q], 1e-10);
    ASSERT_EQ(sk.flags.overloaded, sk.w_total > p2.overload_threshold_kg);
  }
}

TEST(CogProperties, TwoCellFourCellConsistency) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dim(0.2, 5.0);
  for (int i = 0; i < 3000; ++i) {
    const auto r = any_reading(rng);
    const double T = dim(rng);
    const auto g = deck(2.0, T, T);
    const auto four = cog::assess_four_cell(r, g, AlertPolicy::prototype2());
    const double offset = cog::lateral_offset_two_cell({four.w_left, four.w_right}, g);
    // Algebraically: Y_cg - T/2 = (W_L - W_R) / W_total * T / 2.
    ASSERT_NEAR(four.cog->y_from_centreline_m, offset, 1e-12 * T);
  }
}

TEST(Classify, SafeWhenNoFlags) {
  const auto p2 = AlertPolicy::prototype2();
  const auto a = cog::assess_four_cell({50, 50, 50, 50}, deck(), p2);
  EXPECT_EQ(cog::classify(a, p2), std::vector<std::string>{"SAFE"});
  // Heaviness alone is not an alert.
  const auto b = cog::assess_four_cell({60, 60, 50, 50}, deck(), p2);
  EXPECT_EQ(cog::classify(b, p2), std::vector<std::string>{"SAFE"});
}

TEST(Classify, GoldenOverloadOnly) {
  const auto p2 = AlertPolicy::prototype2();
  const auto a = cog::assess_four_cell({110, 110, 140, 140}, deck(), p2);
  EXPECT_EQ(joined(cog::classify(a, p2)), read_golden("classify_overload.txt"));
}

TEST(Classify, GoldenTwoQuadrantsInFixedOrder) {
  const auto p2 = AlertPolicy::prototype2();
  const auto a = cog::assess_four_cell({10, 35, 20, 35}, deck(), p2);
  EXPECT_EQ(joined(cog::classify(a, p2)), read_golden("classify_two_quadrants.txt"));
}

TEST(Classify, GoldenLcdRendering) {
  const auto p2 = AlertPolicy::prototype2();
  const auto a = cog::assess_four_cell({100, 100, 150, 150}, deck(2.0, 1.5), p2);
  EXPECT_EQ(joined(cog::render_lcd(a, p2)), read_golden("lcd_four_cell.txt"));
  const auto p1 = AlertPolicy::prototype1();
  const auto t = cog::assess_two_cell({5.0, 4.6}, deck(2.0, 1.5, 1.0), p1);
  EXPECT_EQ(joined(cog::render_lcd(t, p1)), read_golden("lcd_two_cell.txt"));
}
