#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccesnet/equilibrium.hpp"
#include "ccesnet/io_data.hpp"
#include "ccesnet/types.hpp"

namespace ccesnet {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct GeneratorConfig {
  int n = 50;
  double density = 0.3;
  std::vector<Interval> sigma_ranges{{-3.0, -0.1}, {0.1, 4.0}};
  /// Draws closer than this to sigma = 1 are rejected (0 disables the gap).
  double pole_gap = 0.05;
  Interval theta_range{0.9, 1.15};
  /// Reference primary-input share per column; keeps the economy productive.
  Interval primary_share{0.25, 0.6};
  double dirichlet_concentration = 2.0;
  double p0 = 1.05;
  std::uint64_t seed = 7;
  /// 1 = incidence strictly follows the hidden order; 0 = no preference.
  double triangular_bias = 0.9;
  int max_retries = 20;
};

/// A self-consistent two-state economy with its ground truth.
struct SyntheticEconomy {
  std::vector<std::string> sector_ids;
  Economy economy;
  TwoStateData data;
  std::vector<int> hidden_order;
  /// Economy-wide order used to arrange every sector's nests (the stream
  /// order of the generated incidence).
  std::vector<int> nest_order;
  Vector final_demand_reference;
  Vector final_demand_current;
  int retries = 0;
};

void validate(const GeneratorConfig& cfg);

SyntheticEconomy generate_economy(const GeneratorConfig& cfg);

/// Multiplicative lognormal noise on nonzero shares, columns renormalised.
TwoStateData perturb(const TwoStateData& data, double noise, std::uint64_t seed);

/// Three-period nominal tables whose merged states reproduce `data` exactly:
/// reference gross output solves x = A x + f_ref at unit prices, current
/// gross output x = B x + f_cur in current nominal units.
LinkedTables linked_tables_from_states(const std::vector<std::string>& sector_ids, const TwoStateData& data,
                                       const Vector& final_demand_reference,
                                       const Vector& final_demand_current);

/// Three-sector economy whose last sector carries the two-input example
/// (a = (0.2, 0.5, 0.3), b = (0.1, 0.7, 0.2), p = (0.9, 0.6, 1.2), p_out = 0.8).
struct ExampleFixture {
  std::vector<std::string> sector_ids;
  TwoStateData data;
  Vector final_demand_reference;
  Vector final_demand_current;
};
ExampleFixture two_input_example();

}  // namespace ccesnet
