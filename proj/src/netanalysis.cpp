#include "ccesnet/netanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ccesnet/error.hpp"
#include "ccesnet/propagation.hpp"

namespace ccesnet {
namespace {

constexpr const char* kModule = "netanalysis";

}  // namespace

Linkage parse_linkage(const std::string& name) {
  if (name == "average") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  if (name == "single") return Linkage::single;
  throw Error(ErrorCode::invalid_argument, kModule, "unknown linkage '" + name + "'");
}

const char* to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
    case Linkage::single: return "single";
  }
  return "?";
}

Matrix net_multipliers(const Matrix& S) {
  const auto n = S.rows();
  return leontief_inverse(S) - Matrix::Identity(n, n);
}

DistanceMatrix distance_matrix(const Matrix& mu, Exec exec) {
  const int n = static_cast<int>(mu.cols());
  const auto len = mu.rows();
  if (len < 2) throw Error(ErrorCode::invalid_argument, kModule, "need at least two observations per column");

  // Standardise columns once; correlation is then a dot product.
  Matrix z(len, n);
  std::vector<char> flat(n, 0);
  DistanceMatrix out;
  for (int j = 0; j < n; ++j) {
    const double mean = mu.col(j).mean();
    z.col(j) = mu.col(j).array() - mean;
    const double norm = z.col(j).norm();
    if (norm <= 1e-300 || norm <= 1e-14 * mu.col(j).cwiseAbs().maxCoeff()) {
      flat[j] = 1;
      out.zero_variance.push_back(j);
      z.col(j).setZero();
    } else {
      z.col(j) /= norm;
    }
  }

  out.d = Matrix::Zero(n, n);
  auto fill_row = [&](int j) {
    for (int k = j + 1; k < n; ++k) {
      double corr = (flat[j] || flat[k]) ? 0.0 : z.col(j).dot(z.col(k));
      corr = std::clamp(corr, -1.0, 1.0);
      const double d = std::sqrt(1.0 - corr);
      out.d(j, k) = d;
      out.d(k, j) = d;
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < n; ++j) fill_row(j);
  } else {
    for (int j = 0; j < n; ++j) fill_row(j);
  }
  return out;
}

Dendrogram hierarchical_cluster(const DistanceMatrix& D, Linkage linkage) {
  const int n = D.size();
  Dendrogram tree;
  if (n == 0) return tree;
  // Active clusters by slot; slot i starts as leaf i. Lance-Williams updates
  // keep the inter-cluster distances in `dist`.
  Matrix dist = D.d;
  std::vector<int> id(n), size(n, 1);
  std::vector<char> alive(n, 1);
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) {
    id[i] = i;
    members[i] = {i};
  }

  for (int step = 0; step < n - 1; ++step) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    // ties: smallest (min id, max id) pair, which makes the result independent
    // of slot bookkeeping
    for (int i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double v = dist(i, j);
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        } else if (v == best) {
          auto key = [&](int x, int y) { return std::pair{std::min(id[x], id[y]), std::max(id[x], id[y])}; };
          if (key(i, j) < key(bi, bj)) {
            bi = i;
            bj = j;
          }
        }
      }
    }
    const int a = std::min(id[bi], id[bj]);
    const int b = std::max(id[bi], id[bj]);
    const int merged_size = size[bi] + size[bj];
    tree.merges.push_back({a, b, best, merged_size});

    // left subtree is the one with the smaller id
    auto& keep = members[bi];
    auto& other = members[bj];
    if (id[bi] < id[bj]) {
      keep.insert(keep.end(), other.begin(), other.end());
    } else {
      other.insert(other.end(), keep.begin(), keep.end());
      keep.swap(other);
    }
    other.clear();

    for (int k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      double v = 0.0;
      switch (linkage) {
        case Linkage::average:
          v = (size[bi] * dist(bi, k) + size[bj] * dist(bj, k)) / merged_size;
          break;
        case Linkage::complete: v = std::max(dist(bi, k), dist(bj, k)); break;
        case Linkage::single: v = std::min(dist(bi, k), dist(bj, k)); break;
      }
      dist(bi, k) = v;
      dist(k, bi) = v;
    }
    alive[bj] = 0;
    size[bi] = merged_size;
    id[bi] = n + step;
  }
  for (int i = 0; i < n; ++i) {
    if (alive[i]) tree.leaf_order = members[i];
  }
  return tree;
}

Matrix cophenetic(const Dendrogram& tree, int n) {
  Matrix c = Matrix::Zero(n, n);
  std::vector<std::vector<int>> members(n + tree.merges.size());
  for (int i = 0; i < n; ++i) members[i] = {i};
  for (std::size_t k = 0; k < tree.merges.size(); ++k) {
    const auto& m = tree.merges[k];
    for (int x : members[m.a]) {
      for (int y : members[m.b]) {
        c(x, y) = m.height;
        c(y, x) = m.height;
      }
    }
    auto& dst = members[n + k];
    dst = members[m.a];
    dst.insert(dst.end(), members[m.b].begin(), members[m.b].end());
  }
  return c;
}

Histogram distance_change_histogram(const DistanceMatrix& before, const DistanceMatrix& after, int bins,
                                    double lo, double hi) {
  const int n = before.size();
  if (after.size() != n) throw Error(ErrorCode::dimension_mismatch, kModule, "distance matrices differ in size");
  if (bins < 1 || !(hi > lo)) throw Error(ErrorCode::invalid_argument, kModule, "invalid histogram range");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  double total = 0.0;
  const double width = (hi - lo) / bins;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double diff = after.d(j, k) - before.d(j, k);
      total += diff;
      auto bin = static_cast<long>(std::floor((diff - lo) / width));
      bin = std::clamp(bin, 0L, static_cast<long>(bins) - 1);
      ++h.counts[bin];
      ++h.observations;
    }
  }
  h.mean_shift = h.observations ? total / static_cast<double>(h.observations) : 0.0;
  return h;
}

}  // namespace ccesnet
