#pragma once

#include <string>
#include <vector>

#include "ccesnet/types.hpp"

namespace ccesnet {

/// Pairwise scaled Euclidean distances sqrt(1 - corr) between sectors.
struct DistanceMatrix {
  Matrix d;
  /// Sectors whose multiplier column had zero variance (distance 1 to all others).
  std::vector<int> zero_variance;

  int size() const { return static_cast<int>(d.rows()); }
};

enum class Linkage { average, complete, single };
Linkage parse_linkage(const std::string& name);
const char* to_string(Linkage linkage);

/// Agglomeration step. Leaves are 0..n-1; the cluster formed by merge k gets
/// id n + k. `a < b` always.
struct Merge {
  int a = 0;
  int b = 0;
  double height = 0.0;
  int size = 0;
};

struct Dendrogram {
  std::vector<Merge> merges;
  std::vector<int> leaf_order;
};

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<long> counts;
  long observations = 0;
  double mean_shift = 0.0;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

/// [I - S]^{-1} - I; column j is sector j's net multiplier.
Matrix net_multipliers(const Matrix& S);

/// Pearson correlation of every pair of columns mapped to sqrt(1 - corr).
DistanceMatrix distance_matrix(const Matrix& multipliers, Exec exec = Exec::parallel);

Dendrogram hierarchical_cluster(const DistanceMatrix& D, Linkage linkage = Linkage::average);

/// Cophenetic distance (merge height at which i and j join).
Matrix cophenetic(const Dendrogram& tree, int n);

/// Histogram of upper-triangle differences after - before over [lo, hi]
/// (defaults span every possible change). Values outside are clamped into
/// the end bins.
Histogram distance_change_histogram(const DistanceMatrix& before, const DistanceMatrix& after, int bins = 41,
                                    double lo = -1.4142135623730951, double hi = 1.4142135623730951);

}  // namespace ccesnet
