#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ccesnet/io_data.hpp"
#include "ccesnet/types.hpp"

namespace ccesnet {

/// Sector permutation (position -> original index) with the weight exponent
/// that produced it and its linearity.
struct StreamOrder {
  std::vector<int> phi;
  double gamma_star = 0.0;
  double linearity = 0.0;
};

struct GammaGrid {
  double min = 0.0;
  double max = 3.0;
  double step = 0.01;

  /// Points min, min+step, ... up to max inclusive (rounded to the step).
  std::vector<double> values() const;
};

struct LinearityPoint {
  double gamma;
  double linearity;
};

/// Share of off-diagonal incidences lying above the diagonal after permuting
/// rows and columns by `phi`. Throws when the matrix has no off-diagonal ones.
double linearity(const IncidenceMatrix& u, std::span<const int> phi);

/// Number of off-diagonal ones above the diagonal under `phi`.
long above_diagonal(const IncidenceMatrix& u, std::span<const int> phi);

/// (column incidents)^gamma / (row incidents) for sector k; +inf for an empty
/// row, 0 for an empty column when gamma > 0.
double cw_ratio(const IncidenceMatrix& u, double gamma, int k);

/// Sectors sorted ascending by cw_ratio, ties kept in original index order.
std::vector<int> ratio_order(const IncidenceMatrix& u, double gamma);

/// Greedy variant: repeatedly places the unplaced sector with the smallest
/// ratio, counting only off-diagonal incidences among unplaced sectors.
/// Recovers a triangular order of any acyclic pattern when gamma > 0.
std::vector<int> residual_ratio_order(const IncidenceMatrix& u, double gamma);

/// Whichever of ratio_order and residual_ratio_order has more incidences
/// above the diagonal; ratio_order on ties.
std::vector<int> best_ratio_order(const IncidenceMatrix& u, double gamma);

/// Linearity of best_ratio_order at every grid point.
std::vector<LinearityPoint> linearity_curve(const IncidenceMatrix& u, std::span<const double> gammas,
                                            Exec exec = Exec::parallel);

/// Best ratio order over the grid; ties in linearity go to the smaller gamma.
StreamOrder stream_order(const IncidenceMatrix& u, std::span<const double> gammas,
                         Exec exec = Exec::parallel);

/// Exhaustive linear-ordering solver, used as a test oracle. n <= 10.
std::pair<std::vector<int>, double> brute_force_order(const IncidenceMatrix& u);

}  // namespace ccesnet
