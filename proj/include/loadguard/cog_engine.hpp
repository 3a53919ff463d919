#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loadguard/error.hpp"

namespace loadguard::cog {

enum class CogErrc { UndefinedCog, InvalidReading, InvalidGeometry, InvalidPolicy };
using CogError = TypedError<CogErrc>;

// Deck/vehicle dimensions in metres.
//   wheelbase: front-to-rear cell distance (L)
//   track:     left-to-right cell distance on the four-cell deck (T)
//   breadth:   spacing of the two cells in two-cell mode (B)
struct DeckGeometry {
  double wheelbase_m = 2.0;
  double track_m = 1.5;
  double breadth_m = 1.5;

  void validate() const;
};

struct TwoCellReading {
  double w_left = 0.0;
  double w_right = 0.0;
};

// Corner readings in kg. Index order everywhere is FL, FR, RL, RR.
struct FourCellReading {
  double w_fl = 0.0;
  double w_fr = 0.0;
  double w_rl = 0.0;
  double w_rr = 0.0;

  std::array<double, 4> as_array() const { return {w_fl, w_fr, w_rl, w_rr}; }
  static FourCellReading from_array(const std::array<double, 4>& w) {
    return {w[0], w[1], w[2], w[3]};
  }
  friend bool operator==(const FourCellReading&, const FourCellReading&) = default;
};

enum class Quadrant { FL = 0, FR = 1, RL = 2, RR = 3 };
inline constexpr std::array<std::string_view, 4> kQuadrantNames = {"FL", "FR", "RL", "RR"};

struct AlertPolicy {
  std::string name = "custom";
  double overload_threshold_kg = 400.0;
  double quadrant_threshold_pct = 30.0;

  void validate() const;

  // Two 5 kg cells, unsafe above 9.5 kg. No quadrant rule in two-cell mode,
  // so the quadrant threshold is parked at 100 % where a strict > never fires.
  static AlertPolicy prototype1() { return {"prototype1", 9.5, 100.0}; }
  // Four 120 kg cells, alert above 400 kg or any quadrant above 30 %.
  static AlertPolicy prototype2() { return {"prototype2", 400.0, 30.0}; }
  // Throws CogError(InvalidPolicy) for unknown names.
  static AlertPolicy preset(std::string_view name);
};

enum class Longitudinal { Balanced, FrontHeavy, RearHeavy };
enum class Lateral { Balanced, LeftHeavy, RightHeavy };

std::string_view to_string(Longitudinal v) noexcept;
std::string_view to_string(Lateral v) noexcept;

struct CogPosition {
  double x_m = 0.0;                // from the front axle line, rearward
  double y_m = 0.0;                // from the right wheel line, leftward
  double y_from_centreline_m = 0.0;  // y - T/2, positive toward the left
};

struct AlertFlags {
  bool overloaded = false;
  std::array<bool, 4> imbalanced{};  // FL, FR, RL, RR
  Longitudinal longitudinal = Longitudinal::Balanced;
  Lateral lateral = Lateral::Balanced;

  bool any_imbalance() const noexcept {
    return imbalanced[0] || imbalanced[1] || imbalanced[2] || imbalanced[3];
  }
  // Conditions that make a weighing unsafe (heaviness alone is informational).
  bool alarm() const noexcept { return overloaded || any_imbalance(); }

  friend bool operator==(const AlertFlags&, const AlertFlags&) = default;
};

struct LoadAssessment {
  FourCellReading reading;
  double w_total = 0.0;
  std::optional<CogPosition> cog;  // empty when w_total == 0
  double w_front = 0.0;
  double w_rear = 0.0;
  double w_left = 0.0;
  double w_right = 0.0;
  std::array<double, 4> quadrant_pct{};
  AlertFlags flags;
};

struct TwoCellAssessment {
  TwoCellReading reading;
  double w_total = 0.0;
  std::optional<double> lateral_offset_m;  // from centreline, + toward left cell
  bool overloaded = false;
  Lateral lateral = Lateral::Balanced;
};

double total_weight_two_cell(const TwoCellReading& r) noexcept;
// x = (W_L - W_R) / W_total * B / 2. Throws CogError(UndefinedCog) for W_total == 0.
double lateral_offset_two_cell(const TwoCellReading& r, const DeckGeometry& geom);
TwoCellAssessment assess_two_cell(const TwoCellReading& r, const DeckGeometry& geom,
                                  const AlertPolicy& policy);

LoadAssessment assess_four_cell(const FourCellReading& r, const DeckGeometry& geom,
                                const AlertPolicy& policy);

// Alert lines, or {"SAFE"} when nothing fired.
std::vector<std::string> classify(const LoadAssessment& a, const AlertPolicy& policy);
std::vector<std::string> classify(const TwoCellAssessment& a, const AlertPolicy& policy);

// Multi-line display text: totals, CoG, sectors, quadrant shares, then the
// classify() lines.
std::vector<std::string> render_lcd(const LoadAssessment& a, const AlertPolicy& policy);
std::vector<std::string> render_lcd(const TwoCellAssessment& a, const AlertPolicy& policy);

}  // namespace loadguard::cog
