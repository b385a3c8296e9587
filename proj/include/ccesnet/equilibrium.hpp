#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ccesnet/cces.hpp"
#include "ccesnet/io_data.hpp"
#include "ccesnet/types.hpp"

namespace ccesnet {

/// The economy-wide meta structure: one calibrated technology per sector plus
/// the exogenous numeraire price of the current state.
struct Economy {
  std::vector<SectorTechnology> technologies;
  double p0 = 1.0;

  int size() const { return static_cast<int>(technologies.size()); }
  Vector theta() const;
  std::vector<std::string> sector_ids() const;
};

enum class StateLabel { reference, current, projected };
const char* to_string(StateLabel label);

/// Prices and Shephard cost shares of one equilibrium. Column j of S holds the
/// intermediate shares of sector j; s0[j] its primary share.
struct EquilibriumState {
  Vector prices;
  Matrix S;
  Vector s0;
  StateLabel label = StateLabel::current;
};

/// Row vector H(w, w0) of compound unit costs (productivity not applied).
Vector unit_costs(const Economy& econ, const Vector& w, double w0, Exec exec = Exec::parallel);

struct FixedPointOptions {
  double tol = 1e-12;
  int max_iter = 10000;
  Exec exec = Exec::parallel;
  /// Called with (iteration, iterate) after every update when set.
  std::function<void(int, const Vector&)> observer;
};

struct FixedPointResult {
  Vector prices;
  int iterations = 0;
  /// ||pi - H(pi, p0) / (theta z)||_inf / ||pi||_inf
  double residual = 0.0;
};

/// Synchronous iteration w <- H(w, p0) <theta>^{-1} <z>^{-1} from `start`.
FixedPointResult solve_equilibrium(const Economy& econ, const Vector& z, const Vector& start,
                                   const FixedPointOptions& options = {});

/// Shephard coefficients at `prices` for productivity theta z, from the
/// analytic share formula.
EquilibriumState coefficients(const Economy& econ, const Vector& prices, const Vector& z,
                              double w0, StateLabel label = StateLabel::projected,
                              Exec exec = Exec::parallel);

struct ReplicationCheck {
  std::string name;
  double max_residual = 0.0;
  int worst_sector = -1;
  bool passed = true;
};

struct ReplicationReport {
  std::vector<ReplicationCheck> checks;
  double tolerance = 1e-8;

  bool passed() const;
};

/// Checks H(1,1) = 1, H(p,p0)/theta = p, S(reference) = A and S(current) = B.
ReplicationReport verify_replication(const Economy& econ, const TwoStateData& data,
                                     double tolerance = 1e-8);

/// Builds the economy from calibrated technologies.
Economy make_economy(std::vector<SectorTechnology> technologies, double p0);

}  // namespace ccesnet
