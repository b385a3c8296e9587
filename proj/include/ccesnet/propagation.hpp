#pragma once

#include <span>
#include <string>
#include <vector>

#include "ccesnet/equilibrium.hpp"
#include "ccesnet/types.hpp"

namespace ccesnet {

/// Productivity shock z; unlisted sectors stay at 1.
struct ShockScenario {
  Vector z;
  std::string label;
};

enum class Baseline { leontief, cces };
const char* to_string(Baseline b);

struct WelfareReport {
  double delta_star = 1.0;
  double delta_f = 0.0;
  /// Primary input embodied in each sector's final demand, current minus projected.
  Vector delta_v;
  double total_primary_input = 0.0;
  double final_demand_total = 0.0;
  /// Focus sector (usually the shocked one); -1 when none was given.
  int focus_sector = -1;
  double gross_output_current = 0.0;
  double value_added_current = 0.0;
  double gross_output_projected = 0.0;
  double value_added_projected = 0.0;
  Baseline baseline = Baseline::cces;
};

/// Estimate of the spectral radius of |S| by power iteration.
double spectral_radius(const Matrix& S, int steps = 200);

/// [I - S]^{-1} by LU after a spectral-radius check; throws
/// productivity_infeasible when the radius is not below 1.
Matrix leontief_inverse(const Matrix& S);

/// Earnable final demand and primary-input redistribution of moving from
/// `current` to `projected`. Final demand `f` is nominal at current prices;
/// the projected bundle is revalued by pi / p.
WelfareReport welfare(const EquilibriumState& current, const EquilibriumState& projected, const Vector& pi,
                      const Vector& f, int focus_sector = -1);

/// Prices and shares when physical coefficients stay at the current state.
EquilibriumState leontief_projection(const EquilibriumState& current, const Vector& z);

WelfareReport leontief_baseline(const Economy& econ, const EquilibriumState& current, const Vector& z,
                                const Vector& f, int focus_sector = -1);

/// Index of the sector with the largest |z - 1|, or -1 for a null shock.
int shocked_sector(const Vector& z);

struct LogAbsEntry {
  int sector = 0;
  double value = 0.0;
  bool zero = false;
};

/// ln|dv_j| per sector, in the order given; exact zeros are flagged instead
/// of mapped to -inf.
std::vector<LogAbsEntry> primary_redistribution_profile(const WelfareReport& report,
                                                        std::span<const int> order);

}  // namespace ccesnet
