#include "ccesnet/propagation.hpp"

#include <cmath>
#include <numeric>

#include "ccesnet/error.hpp"

namespace ccesnet {
namespace {

constexpr const char* kModule = "propagation";

void check_state(const EquilibriumState& s, int n, const char* name) {
  if (s.S.rows() != n || s.S.cols() != n || s.s0.size() != n || s.prices.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, kModule, std::string(name) + " state has wrong dimensions");
  }
}

}  // namespace

const char* to_string(Baseline b) { return b == Baseline::leontief ? "leontief" : "cces"; }

double spectral_radius(const Matrix& S, int steps) {
  const Matrix M = S.cwiseAbs();
  const auto n = M.rows();
  if (n == 0) return 0.0;
  Vector x = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double estimate = 0.0;
  for (int k = 0; k < steps; ++k) {
    Vector y = M * x;
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    estimate = norm;
    x = y / norm;
  }
  // Rayleigh-style quotient for the final iterate of a nonnegative matrix.
  const double rq = x.dot(M * x);
  return std::max(estimate, rq);
}

Matrix leontief_inverse(const Matrix& S) {
  if (S.rows() != S.cols()) throw Error(ErrorCode::dimension_mismatch, kModule, "S must be square");
  const double rho = spectral_radius(S);
  if (!(rho < 1.0)) {
    throw Error(ErrorCode::productivity_infeasible, kModule, "spectral radius of S is not below 1",
                {{"spectral_radius", std::to_string(rho)}});
  }
  const auto n = S.rows();
  return (Matrix::Identity(n, n) - S).partialPivLu().inverse();
}

WelfareReport welfare(const EquilibriumState& current, const EquilibriumState& projected, const Vector& pi,
                      const Vector& f, int focus_sector) {
  const int n = static_cast<int>(current.S.rows());
  check_state(current, n, "current");
  check_state(projected, n, "projected");
  if (pi.size() != n || f.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, kModule, "price or final demand has wrong length");
  }
  if (f.minCoeff() < 0.0 || !(f.sum() > 0.0)) {
    throw Error(ErrorCode::invalid_argument, kModule, "final demand must be nonnegative and not all zero");
  }

  const Matrix LB = leontief_inverse(current.S);
  const Matrix LM = leontief_inverse(projected.S);
  const Vector relative = pi.cwiseQuotient(current.prices);
  const Vector f_proj = relative.cwiseProduct(f);

  // Row vectors of primary input per unit of each sector's final demand.
  const Vector v_cur = (current.s0.transpose() * LB).transpose();
  const Vector v_proj = (projected.s0.transpose() * LM).transpose();
  const double primary_current = v_cur.dot(f);

  WelfareReport r;
  r.delta_star = primary_current / v_proj.dot(f_proj);
  r.delta_v = v_cur.cwiseProduct(f) - v_proj.cwiseProduct(f_proj) * r.delta_star;
  r.final_demand_total = f.sum();
  r.delta_f = r.final_demand_total * (r.delta_star - 1.0);
  r.total_primary_input = primary_current;
  r.focus_sector = focus_sector;
  if (focus_sector >= 0 && focus_sector < n) {
    const Vector x_cur = LB * f;
    const Vector x_proj = LM * f_proj * r.delta_star;
    r.gross_output_current = x_cur[focus_sector];
    r.value_added_current = current.s0[focus_sector] * x_cur[focus_sector];
    r.gross_output_projected = x_proj[focus_sector];
    r.value_added_projected = projected.s0[focus_sector] * x_proj[focus_sector];
  }
  return r;
}

EquilibriumState leontief_projection(const EquilibriumState& current, const Vector& z) {
  const int n = static_cast<int>(current.S.rows());
  check_state(current, n, "current");
  if (z.size() != n || !(z.minCoeff() > 0.0)) {
    throw Error(ErrorCode::invalid_argument, kModule, "shock must be positive with length n");
  }
  // Relative prices r = pi / p solve r (<z> - S) = s0.
  const Matrix system = Matrix(z.asDiagonal()) - current.S;
  if (!(spectral_radius(current.S * z.cwiseInverse().asDiagonal()) < 1.0)) {
    throw Error(ErrorCode::productivity_infeasible, kModule, "shocked Leontief system is not productive");
  }
  const Vector r = system.transpose().partialPivLu().solve(current.s0);

  EquilibriumState out;
  out.label = StateLabel::projected;
  out.prices = r.cwiseProduct(current.prices);
  out.S.resize(n, n);
  out.s0.resize(n);
  for (int j = 0; j < n; ++j) {
    const double denom = r[j] * z[j];
    out.S.col(j) = current.S.col(j).cwiseProduct(r) / denom;
    out.s0[j] = current.s0[j] / denom;
  }
  return out;
}

WelfareReport leontief_baseline(const Economy& econ, const EquilibriumState& current, const Vector& z,
                                const Vector& f, int focus_sector) {
  if (econ.size() != current.S.rows()) {
    throw Error(ErrorCode::dimension_mismatch, kModule, "economy and state differ in size");
  }
  const auto projected = leontief_projection(current, z);
  auto report = welfare(current, projected, projected.prices, f, focus_sector);
  report.baseline = Baseline::leontief;
  return report;
}

int shocked_sector(const Vector& z) {
  int best = -1;
  double gap = 0.0;
  for (int j = 0; j < z.size(); ++j) {
    const double d = std::abs(z[j] - 1.0);
    if (d > gap) {
      gap = d;
      best = j;
    }
  }
  return best;
}

std::vector<LogAbsEntry> primary_redistribution_profile(const WelfareReport& report,
                                                        std::span<const int> order) {
  std::vector<LogAbsEntry> out;
  out.reserve(order.size());
  for (int j : order) {
    if (j < 0 || j >= report.delta_v.size()) {
      throw Error(ErrorCode::dimension_mismatch, kModule, "order references a missing sector");
    }
    const double v = report.delta_v[j];
    if (v == 0.0) {
      out.push_back({j, 0.0, true});
    } else {
      out.push_back({j, std::log(std::abs(v)), false});
    }
  }
  return out;
}

}  // namespace ccesnet
