#include "loadguard/cog_engine.hpp"

#include <cmath>
#include <cstdio>

namespace loadguard::cog {

namespace {

bool valid_mass(double w) { return std::isfinite(w) && w >= 0.0; }

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

std::string fmt2(const char* pattern, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// Offsets that round to zero print as +0.000.
double signed_mm(double m) { return std::abs(m) < 0.0005 ? 0.0 : m; }

}  // namespace

void DeckGeometry::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(wheelbase_m) || !ok(track_m) || !ok(breadth_m)) {
    throw CogError(CogErrc::InvalidGeometry, "deck dimensions must be positive");
  }
}

void AlertPolicy::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(overload_threshold_kg) || !ok(quadrant_threshold_pct)) {
    throw CogError(CogErrc::InvalidPolicy, "policy thresholds must be positive");
  }
}

AlertPolicy AlertPolicy::preset(std::string_view name) {
  if (name == "prototype1") return prototype1();
  if (name == "prototype2") return prototype2();
  throw CogError(CogErrc::InvalidPolicy, "unknown policy preset '" + std::string(name) + "'");
}

std::string_view to_string(Longitudinal v) noexcept {
  switch (v) {
    case Longitudinal::FrontHeavy: return "FRONT-HEAVY";
    case Longitudinal::RearHeavy: return "REAR-HEAVY";
    case Longitudinal::Balanced: break;
  }
  return "BALANCED";
}

std::string_view to_string(Lateral v) noexcept {
  switch (v) {
    case Lateral::LeftHeavy: return "LEFT-HEAVY";
    case Lateral::RightHeavy: return "RIGHT-HEAVY";
    case Lateral::Balanced: break;
  }
  return "BALANCED";
}

double total_weight_two_cell(const TwoCellReading& r) noexcept { return r.w_right + r.w_left; }

double lateral_offset_two_cell(const TwoCellReading& r, const DeckGeometry& geom) {
  const double total = total_weight_two_cell(r);
  if (!(total > 0.0)) {
    throw CogError(CogErrc::UndefinedCog, "centre of gravity undefined for zero total weight");
  }
  return (r.w_left - r.w_right) / total * (geom.breadth_m / 2.0);
}

TwoCellAssessment assess_two_cell(const TwoCellReading& r, const DeckGeometry& geom,
                                  const AlertPolicy& policy) {
  geom.validate();
  policy.validate();
  if (!valid_mass(r.w_left) || !valid_mass(r.w_right)) {
    throw CogError(CogErrc::InvalidReading, "cell readings must be finite and >= 0");
  }
  TwoCellAssessment a;
  a.reading = r;
  a.w_total = total_weight_two_cell(r);
  if (a.w_total > 0.0) a.lateral_offset_m = lateral_offset_two_cell(r, geom);
  a.overloaded = a.w_total > policy.overload_threshold_kg;
  if (r.w_left > r.w_right) a.lateral = Lateral::LeftHeavy;
  else if (r.w_right > r.w_left) a.lateral = Lateral::RightHeavy;
  return a;
}

LoadAssessment assess_four_cell(const FourCellReading& r, const DeckGeometry& geom,
                                const AlertPolicy& policy) {
  geom.validate();
  policy.validate();
  const auto w = r.as_array();
  for (double v : w) {
    if (!valid_mass(v)) throw CogError(CogErrc::InvalidReading, "cell readings must be finite and >= 0");
  }

  LoadAssessment a;
  a.reading = r;
  a.w_front = r.w_fl + r.w_fr;
  a.w_rear = r.w_rl + r.w_rr;
  a.w_left = r.w_fl + r.w_rl;
  a.w_right = r.w_fr + r.w_rr;
  a.w_total = a.w_front + a.w_rear;

  if (a.w_total > 0.0) {
    // Ratios first: they are <= 1 after rounding, which keeps the CoG
    // inside [0, L] x [0, T] exactly.
    CogPosition cog;
    cog.x_m = (a.w_rear / a.w_total) * geom.wheelbase_m;
    cog.y_m = (a.w_left / a.w_total) * geom.track_m;
    cog.y_from_centreline_m = cog.y_m - geom.track_m / 2.0;
    a.cog = cog;
    for (std::size_t i = 0; i < 4; ++i) {
      a.quadrant_pct[i] = (w[i] * 100.0) / a.w_total;
      a.flags.imbalanced[i] = a.quadrant_pct[i] > policy.quadrant_threshold_pct;
    }
  }

  a.flags.overloaded = a.w_total > policy.overload_threshold_kg;
  if (a.w_front > a.w_rear) a.flags.longitudinal = Longitudinal::FrontHeavy;
  else if (a.w_rear > a.w_front) a.flags.longitudinal = Longitudinal::RearHeavy;
  if (a.w_left > a.w_right) a.flags.lateral = Lateral::LeftHeavy;
  else if (a.w_right > a.w_left) a.flags.lateral = Lateral::RightHeavy;
  return a;
}

std::vector<std::string> classify(const LoadAssessment& a, const AlertPolicy& policy) {
  std::vector<std::string> lines;
  if (a.flags.overloaded) {
    lines.push_back(fmt2("OVERLOAD total=%.2f kg limit=%.2f kg", a.w_total,
                         policy.overload_threshold_kg));
  }
  if (a.flags.any_imbalance()) {
    std::string line = "IMBALANCE";
    for (std::size_t i = 0; i < 4; ++i) {
      if (!a.flags.imbalanced[i]) continue;
      line += " ";
      line += kQuadrantNames[i];
      line += fmt("=%.1f%%", a.quadrant_pct[i]);
    }
    line += fmt(" limit=%.1f%%", policy.quadrant_threshold_pct);
    lines.push_back(line);
  }
  if (lines.empty()) lines.emplace_back("SAFE");
  return lines;
}

std::vector<std::string> classify(const TwoCellAssessment& a, const AlertPolicy& policy) {
  if (a.overloaded) {
    return {fmt2("OVERLOAD total=%.2f kg limit=%.2f kg", a.w_total, policy.overload_threshold_kg)};
  }
  return {"SAFE"};
}

std::vector<std::string> render_lcd(const LoadAssessment& a, const AlertPolicy& policy) {
  std::vector<std::string> lines;
  lines.push_back(fmt("TOTAL   %9.2f kg", a.w_total));
  if (a.cog) {
    lines.push_back(fmt2("CoG X   %9.3f m  Y %7.3f m", a.cog->x_m, a.cog->y_m));
    lines.push_back(fmt("CoG off %+9.3f m from centreline", signed_mm(a.cog->y_from_centreline_m)));
  } else {
    lines.emplace_back("CoG     undefined");
  }
  lines.push_back(fmt2("FRONT   %9.2f kg  REAR  %9.2f kg", a.w_front, a.w_rear));
  lines.push_back(fmt2("LEFT    %9.2f kg  RIGHT %9.2f kg", a.w_left, a.w_right));
  lines.push_back(fmt2("FL %5.1f%%  FR %5.1f%%", a.quadrant_pct[0], a.quadrant_pct[1]));
  lines.push_back(fmt2("RL %5.1f%%  RR %5.1f%%", a.quadrant_pct[2], a.quadrant_pct[3]));
  lines.push_back(std::string(to_string(a.flags.longitudinal)) + " / " +
                  std::string(to_string(a.flags.lateral)));
  for (auto& l : classify(a, policy)) lines.push_back(std::move(l));
  return lines;
}

std::vector<std::string> render_lcd(const TwoCellAssessment& a, const AlertPolicy& policy) {
  std::vector<std::string> lines;
  lines.push_back(fmt("TOTAL   %9.2f kg", a.w_total));
  lines.push_back(fmt2("LEFT    %9.2f kg  RIGHT %9.2f kg", a.reading.w_left, a.reading.w_right));
  if (a.lateral_offset_m) {
    lines.push_back(fmt("CoG off %+9.3f m from centreline", signed_mm(*a.lateral_offset_m)));
  } else {
    lines.emplace_back("CoG     undefined");
  }
  lines.emplace_back(to_string(a.lateral));
  for (auto& l : classify(a, policy)) lines.push_back(std::move(l));
  return lines;
}

}  // namespace loadguard::cog
