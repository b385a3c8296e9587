#include "ccesnet/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <span>

#include "ccesnet/error.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace ccesnet {
namespace {

constexpr const char* kModule = "equilibrium";

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void require_size(const Vector& v, int n, const char* what) {
  if (v.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, kModule, std::string(what) + " has wrong length");
  }
}

void require_positive(const Vector& v, const char* what) {
  if (!(v.minCoeff() > 0.0) || !v.allFinite()) {
    throw Error(ErrorCode::nonpositive_price, kModule, std::string(what) + " must be positive");
  }
}

}  // namespace

Vector Economy::theta() const {
  Vector t(size());
  for (int j = 0; j < size(); ++j) t[j] = technologies[j].theta;
  return t;
}

std::vector<std::string> Economy::sector_ids() const {
  std::vector<std::string> ids;
  ids.reserve(technologies.size());
  for (const auto& t : technologies) ids.push_back(t.sector_id);
  return ids;
}

const char* to_string(StateLabel label) {
  switch (label) {
    case StateLabel::reference: return "reference";
    case StateLabel::current: return "current";
    case StateLabel::projected: return "projected";
  }
  return "?";
}

Economy make_economy(std::vector<SectorTechnology> technologies, double p0) {
  const int n = static_cast<int>(technologies.size());
  if (!(p0 > 0.0)) throw Error(ErrorCode::nonpositive_price, kModule, "p0 must be positive");
  for (const auto& tech : technologies) {
    if (!(tech.theta > 0.0)) {
      throw Error(ErrorCode::invalid_argument, kModule, "theta must be positive",
                  {{"sector", tech.sector_id}});
    }
    std::vector<char> seen(n, 0);
    for (const auto& nest : tech.nests) {
      if (nest.input_index < 0 || nest.input_index >= n || seen[nest.input_index]) {
        throw Error(ErrorCode::invalid_argument, kModule, "nest inputs must be distinct sector indices",
                    {{"sector", tech.sector_id}});
      }
      seen[nest.input_index] = 1;
    }
  }
  return Economy{std::move(technologies), p0};
}

Vector unit_costs(const Economy& econ, const Vector& w, double w0, Exec exec) {
  const int n = econ.size();
  require_size(w, n, "price vector");
  Vector h(n);
  detail::for_each_index(n, exec, [&](int j) { h[j] = compound_cost(econ.technologies[j], as_span(w), w0); });
  return h;
}

FixedPointResult solve_equilibrium(const Economy& econ, const Vector& z, const Vector& start,
                                   const FixedPointOptions& options) {
  const int n = econ.size();
  require_size(z, n, "shock vector");
  require_size(start, n, "start vector");
  require_positive(z, "shock");
  require_positive(start, "start price");
  const Vector divisor = econ.theta().cwiseProduct(z);

  Vector w = start;
  std::deque<double> tail;
  for (int k = 1; k <= options.max_iter; ++k) {
    Vector next = unit_costs(econ, w, econ.p0, options.exec).cwiseQuotient(divisor);
    if (!next.allFinite() || !(next.minCoeff() > 0.0)) {
      throw Error(ErrorCode::nonconvergence, kModule, "iterate left the positive orthant",
                  {{"iteration", std::to_string(k)}});
    }
    const double change = ((next - w).cwiseAbs().cwiseQuotient(w)).maxCoeff();
    w = std::move(next);
    if (options.observer) options.observer(k, w);
    tail.push_back(change);
    if (tail.size() > 5) tail.pop_front();
    if (change < options.tol) {
      const Vector image = unit_costs(econ, w, econ.p0, options.exec).cwiseQuotient(divisor);
      FixedPointResult out;
      out.residual = (w - image).cwiseAbs().maxCoeff() / w.cwiseAbs().maxCoeff();
      out.prices = std::move(w);
      out.iterations = k;
      return out;
    }
  }
  ErrorContext context{{"iterations", std::to_string(options.max_iter)}};
  for (std::size_t i = 0; i < tail.size(); ++i) {
    context.emplace_back("change[-" + std::to_string(tail.size() - i) + "]", detail::format_double(tail[i]));
  }
  throw Error(ErrorCode::nonconvergence, kModule, "fixed-point iteration did not converge",
              std::move(context));
}

EquilibriumState coefficients(const Economy& econ, const Vector& prices, const Vector& z, double w0,
                              StateLabel label, Exec exec) {
  const int n = econ.size();
  require_size(prices, n, "price vector");
  require_size(z, n, "shock vector");
  require_positive(prices, "price");
  require_positive(z, "shock");
  EquilibriumState state;
  state.prices = prices;
  state.S = Matrix::Zero(n, n);
  state.s0 = Vector::Zero(n);
  state.label = label;
  detail::for_each_index(n, exec, [&](int j) {
    const auto& tech = econ.technologies[j];
    const auto shares = cost_shares(tech, as_span(prices), w0);
    // shares are w_i dH/dw_i / H; rescale by H / (theta z p_j), which is 1 at
    // an equilibrium.
    const double scale = compound_cost(tech, as_span(prices), w0) / (tech.theta * z[j] * prices[j]);
    state.s0[j] = shares[0] * scale;
    for (std::size_t k = 0; k < tech.nests.size(); ++k) {
      state.S(tech.nests[k].input_index, j) = shares[k + 1] * scale;
    }
  });
  return state;
}

bool ReplicationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ReplicationReport verify_replication(const Economy& econ, const TwoStateData& data, double tolerance) {
  const int n = econ.size();
  if (data.n != n) throw Error(ErrorCode::dimension_mismatch, kModule, "data and economy differ in size");
  ReplicationReport report;
  report.tolerance = tolerance;

  auto add = [&](std::string name, const Vector& per_sector) {
    ReplicationCheck check;
    check.name = std::move(name);
    Eigen::Index worst = 0;
    check.max_residual = per_sector.size() ? per_sector.maxCoeff(&worst) : 0.0;
    check.worst_sector = per_sector.size() ? static_cast<int>(worst) : -1;
    check.passed = check.max_residual < tolerance;
    report.checks.push_back(std::move(check));
  };

  const Vector ones = Vector::Ones(n);
  const Vector theta = econ.theta();
  add("H(1,1)=1", (unit_costs(econ, ones, 1.0) - ones).cwiseAbs());
  add("H(p,p0)/theta=p",
      (unit_costs(econ, data.p, data.p0).cwiseQuotient(theta) - data.p).cwiseAbs().cwiseQuotient(data.p));

  auto share_gap = [n](const EquilibriumState& s, const Matrix& observed) {
    Vector gap(n);
    for (int j = 0; j < n; ++j) {
      gap[j] = std::max(std::abs(s.s0[j] - observed(0, j)),
                        (s.S.col(j) - observed.col(j).tail(n)).cwiseAbs().maxCoeff());
    }
    return gap;
  };
  const auto reference = coefficients(econ, ones, theta.cwiseInverse(), 1.0, StateLabel::reference);
  add("S(reference)=A", share_gap(reference, data.A));
  const auto current = coefficients(econ, data.p, ones, data.p0, StateLabel::current);
  add("S(current)=B", share_gap(current, data.B));
  return report;
}

}  // namespace ccesnet
