#include "ccesnet/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ccesnet/error.hpp"

namespace ccesnet {
namespace {

constexpr const char* kModule = "triangulate";

void check_permutation(const IncidenceMatrix& u, std::span<const int> phi) {
  const int n = u.size();
  if (static_cast<int>(phi.size()) != n) {
    throw Error(ErrorCode::dimension_mismatch, kModule, "permutation length differs from matrix size");
  }
  std::vector<char> seen(n, 0);
  for (int k : phi) {
    if (k < 0 || k >= n || seen[k]) {
      throw Error(ErrorCode::invalid_argument, kModule, "phi is not a permutation");
    }
    seen[k] = 1;
  }
}

}  // namespace

std::vector<double> GammaGrid::values() const {
  if (step <= 0.0 || max < min || min < 0.0) {
    throw Error(ErrorCode::invalid_argument, kModule, "gamma grid needs 0 <= min <= max and step > 0");
  }
  const auto count = static_cast<long>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (long i = 0; i < count; ++i) out[i] = min + static_cast<double>(i) * step;
  return out;
}

long above_diagonal(const IncidenceMatrix& u, std::span<const int> phi) {
  check_permutation(u, phi);
  const int n = u.size();
  long h = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) h += u(phi[a], phi[b]);
  }
  return h;
}

double linearity(const IncidenceMatrix& u, std::span<const int> phi) {
  const long k = u.off_diagonal_count();
  if (k == 0) {
    throw Error(ErrorCode::undefined_linearity, kModule, "linearity undefined: no off-diagonal incidences");
  }
  return static_cast<double>(above_diagonal(u, phi)) / static_cast<double>(k);
}

double cw_ratio(const IncidenceMatrix& u, double gamma, int k) {
  if (gamma < 0.0) throw Error(ErrorCode::invalid_argument, kModule, "gamma must be nonnegative");
  const long row = u.row_sum(k);
  if (row == 0) return std::numeric_limits<double>::infinity();
  const long col = u.col_sum(k);
  if (col == 0) return gamma > 0.0 ? 0.0 : 1.0 / static_cast<double>(row);
  return std::pow(static_cast<double>(col), gamma) / static_cast<double>(row);
}

std::vector<int> ratio_order(const IncidenceMatrix& u, double gamma) {
  const int n = u.size();
  std::vector<double> z(n);
  for (int k = 0; k < n; ++k) z[k] = cw_ratio(u, gamma, k);
  std::vector<int> phi(n);
  std::iota(phi.begin(), phi.end(), 0);
  std::stable_sort(phi.begin(), phi.end(), [&](int a, int b) { return z[a] < z[b]; });
  return phi;
}

std::vector<int> residual_ratio_order(const IncidenceMatrix& u, double gamma) {
  if (gamma < 0.0) throw Error(ErrorCode::invalid_argument, kModule, "gamma must be nonnegative");
  const int n = u.size();
  std::vector<long> row(n, 0), col(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && u(i, j)) {
        ++row[i];
        ++col[j];
      }
    }
  }
  auto ratio = [gamma](long r, long c) {
    if (r == 0) return std::numeric_limits<double>::infinity();
    if (c == 0) return gamma > 0.0 ? 0.0 : 1.0 / static_cast<double>(r);
    return std::pow(static_cast<double>(c), gamma) / static_cast<double>(r);
  };
  std::vector<char> placed(n, 0);
  std::vector<int> phi;
  phi.reserve(n);
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    double best = 0.0;
    for (int k = 0; k < n; ++k) {
      if (placed[k]) continue;
      const double z = ratio(row[k], col[k]);
      if (pick < 0 || z < best) {
        pick = k;
        best = z;
      }
    }
    placed[pick] = 1;
    phi.push_back(pick);
    for (int k = 0; k < n; ++k) {
      if (placed[k]) continue;
      if (u(k, pick)) --row[k];
      if (u(pick, k)) --col[k];
    }
  }
  return phi;
}

std::vector<int> best_ratio_order(const IncidenceMatrix& u, double gamma) {
  auto fixed = ratio_order(u, gamma);
  auto peeled = residual_ratio_order(u, gamma);
  return above_diagonal(u, peeled) > above_diagonal(u, fixed) ? peeled : fixed;
}

std::vector<LinearityPoint> linearity_curve(const IncidenceMatrix& u, std::span<const double> gammas,
                                            Exec exec) {
  if (u.off_diagonal_count() == 0) {
    throw Error(ErrorCode::undefined_linearity, kModule, "linearity undefined: no off-diagonal incidences");
  }
  const long count = static_cast<long>(gammas.size());
  std::vector<LinearityPoint> curve(count);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long g = 0; g < count; ++g) {
      curve[g] = {gammas[g], linearity(u, best_ratio_order(u, gammas[g]))};
    }
  } else {
    for (long g = 0; g < count; ++g) {
      curve[g] = {gammas[g], linearity(u, best_ratio_order(u, gammas[g]))};
    }
  }
  return curve;
}

StreamOrder stream_order(const IncidenceMatrix& u, std::span<const double> gammas, Exec exec) {
  if (gammas.empty()) throw Error(ErrorCode::invalid_argument, kModule, "empty gamma grid");
  const auto curve = linearity_curve(u, gammas, exec);
  std::size_t best = 0;
  for (std::size_t g = 1; g < curve.size(); ++g) {
    const bool better = curve[g].linearity > curve[best].linearity ||
                        (curve[g].linearity == curve[best].linearity &&
                         curve[g].gamma < curve[best].gamma);
    if (better) best = g;
  }
  return {best_ratio_order(u, curve[best].gamma), curve[best].gamma, curve[best].linearity};
}

std::pair<std::vector<int>, double> brute_force_order(const IncidenceMatrix& u) {
  const int n = u.size();
  if (n > 10) throw Error(ErrorCode::too_large, kModule, "brute force limited to n <= 10");
  if (u.off_diagonal_count() == 0) {
    throw Error(ErrorCode::undefined_linearity, kModule, "linearity undefined: no off-diagonal incidences");
  }
  std::vector<int> phi(n);
  std::iota(phi.begin(), phi.end(), 0);
  std::vector<int> best = phi;
  long best_h = -1;
  do {
    const long h = above_diagonal(u, phi);
    if (h > best_h) {
      best_h = h;
      best = phi;
    }
  } while (std::next_permutation(phi.begin(), phi.end()));
  return {best, static_cast<double>(best_h) / static_cast<double>(u.off_diagonal_count())};
}

}  // namespace ccesnet
