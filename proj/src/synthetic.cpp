#include "ccesnet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ccesnet/error.hpp"
#include "ccesnet/triangulate.hpp"

namespace ccesnet {
namespace {

constexpr const char* kModule = "synthetic";

using Engine = std::mt19937_64;

double uniform(Engine& rng, Interval range) {
  return std::uniform_real_distribution<double>(range.lo, range.hi)(rng);
}

double draw_sigma(Engine& rng, const GeneratorConfig& cfg) {
  std::vector<double> widths;
  for (const auto& r : cfg.sigma_ranges) widths.push_back(r.hi - r.lo);
  std::discrete_distribution<int> pick(widths.begin(), widths.end());
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const auto& range = cfg.sigma_ranges[pick(rng)];
    const double s = range.lo == range.hi ? range.lo : uniform(rng, range);
    if (cfg.pole_gap <= 0.0 || std::abs(s - 1.0) >= cfg.pole_gap) return s;
  }
  throw Error(ErrorCode::invalid_argument, kModule, "sigma ranges leave no room outside the pole gap");
}

std::vector<double> dirichlet(Engine& rng, std::size_t k, double concentration) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> x(k);
  double total = 0.0;
  for (auto& v : x) {
    do {
      v = gamma(rng);
    } while (v <= 0.0);
    total += v;
  }
  for (auto& v : x) v /= total;
  return x;
}

std::string sector_label(int j, int n) {
  const int width = static_cast<int>(std::to_string(std::max(n - 1, 0)).size());
  std::string digits = std::to_string(j);
  return "S" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
}

}  // namespace

void validate(const GeneratorConfig& cfg) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::invalid_argument, kModule, m); };
  if (cfg.n < 2) bad("n must be at least 2");
  if (!(cfg.density > 0.0 && cfg.density <= 1.0)) bad("density must lie in (0, 1]");
  if (cfg.density * cfg.n < 1.0) bad("density * n must be at least 1");
  if (cfg.sigma_ranges.empty()) bad("no sigma ranges");
  for (const auto& r : cfg.sigma_ranges) {
    if (r.hi < r.lo) bad("sigma range reversed");
  }
  if (!(cfg.theta_range.lo > 0.0) || cfg.theta_range.hi < cfg.theta_range.lo) bad("theta range must be positive");
  if (!(cfg.primary_share.lo > 0.0) || cfg.primary_share.hi > 1.0 || cfg.primary_share.hi < cfg.primary_share.lo) {
    bad("primary share range must lie in (0, 1]");
  }
  if (!(cfg.dirichlet_concentration > 0.0)) bad("Dirichlet concentration must be positive");
  if (!(cfg.p0 > 0.0)) bad("p0 must be positive");
  if (cfg.triangular_bias < 0.0 || cfg.triangular_bias > 1.0) bad("triangular_bias must lie in [0, 1]");
}

SyntheticEconomy generate_economy(const GeneratorConfig& cfg) {
  validate(cfg);
  const int n = cfg.n;
  Engine rng(cfg.seed);

  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    SyntheticEconomy out;
    out.retries = attempt;
    for (int j = 0; j < n; ++j) out.sector_ids.push_back(sector_label(j, n));

    out.hidden_order.resize(n);
    std::iota(out.hidden_order.begin(), out.hidden_order.end(), 0);
    std::shuffle(out.hidden_order.begin(), out.hidden_order.end(), rng);
    std::vector<int> pos(n);
    for (int k = 0; k < n; ++k) pos[out.hidden_order[k]] = k;

    IncidenceMatrix u(n);
    const double backward = cfg.density * (1.0 - cfg.triangular_bias);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double prob = pos[i] < pos[j] ? cfg.density : backward;
        u.set(i, j, std::uniform_real_distribution<double>(0.0, 1.0)(rng) < prob);
      }
    }
    if (u.off_diagonal_count() > 0) {
      out.nest_order = stream_order(u, GammaGrid{}.values(), Exec::serial).phi;
    } else {
      out.nest_order = out.hidden_order;
    }

    TwoStateData& data = out.data;
    data.n = n;
    data.p0 = cfg.p0;
    data.A = Matrix::Zero(n + 1, n);
    std::vector<SectorTechnology> techs(n);
    for (int j = 0; j < n; ++j) {
      std::vector<int> inputs;
      for (int i : out.nest_order) {
        if (u(i, j)) inputs.push_back(i);
      }
      std::vector<double> a(inputs.size() + 1);
      a[0] = inputs.empty() ? 1.0 : uniform(rng, cfg.primary_share);
      if (!inputs.empty()) {
        const auto w = dirichlet(rng, inputs.size(), cfg.dirichlet_concentration);
        for (std::size_t k = 0; k < inputs.size(); ++k) a[k + 1] = (1.0 - a[0]) * w[k];
      }
      const double total = std::accumulate(a.begin(), a.end(), 0.0);
      for (auto& v : a) v /= total;

      data.A(0, j) = a[0];
      for (std::size_t k = 0; k < inputs.size(); ++k) data.A(inputs[k] + 1, j) = a[k + 1];

      const auto lambda = calibrate_lambdas(a);
      auto& tech = techs[j];
      tech.sector_id = out.sector_ids[j];
      tech.theta = uniform(rng, cfg.theta_range);
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        tech.nests.push_back({inputs[k], lambda[k], draw_sigma(rng, cfg)});
      }
    }
    out.economy = make_economy(std::move(techs), cfg.p0);

    FixedPointOptions opts;
    opts.tol = 1e-15;
    opts.exec = Exec::serial;
    try {
      auto fp = solve_equilibrium(out.economy, Vector::Ones(n), Vector::Ones(n), opts);
      data.p = std::move(fp.prices);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::nonconvergence) continue;
      throw;
    }

    data.B = Matrix::Zero(n + 1, n);
    bool usable = true;
    for (int j = 0; j < n; ++j) {
      const auto& tech = out.economy.technologies[j];
      const auto s = cost_shares(tech, {data.p.data(), static_cast<std::size_t>(n)}, cfg.p0);
      data.B(0, j) = s[0];
      for (std::size_t k = 0; k < tech.nests.size(); ++k) data.B(tech.nests[k].input_index + 1, j) = s[k + 1];
      for (double v : s) usable = usable && v > 0.0 && std::isfinite(v);
    }
    if (!usable) continue;

    out.final_demand_reference.resize(n);
    out.final_demand_current.resize(n);
    for (int j = 0; j < n; ++j) {
      out.final_demand_reference[j] = uniform(rng, {50.0, 150.0});
      out.final_demand_current[j] = uniform(rng, {50.0, 150.0});
    }
    return out;
  }
  throw Error(ErrorCode::nonconvergence, kModule, "no admissible economy after retries",
              {{"seed", std::to_string(cfg.seed)}, {"retries", std::to_string(cfg.max_retries)}});
}

TwoStateData perturb(const TwoStateData& data, double noise, std::uint64_t seed) {
  if (noise < 0.0) throw Error(ErrorCode::invalid_argument, kModule, "noise must be nonnegative");
  if (noise == 0.0) return data;
  Engine rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  TwoStateData out = data;
  for (Matrix* M : {&out.A, &out.B}) {
    for (int j = 0; j < M->cols(); ++j) {
      for (int i = 0; i < M->rows(); ++i) {
        if ((*M)(i, j) != 0.0) (*M)(i, j) *= std::exp(noise * normal(rng));
      }
      M->col(j) /= M->col(j).sum();
    }
  }
  return out;
}

LinkedTables linked_tables_from_states(const std::vector<std::string>& sector_ids, const TwoStateData& data,
                                       const Vector& final_demand_reference,
                                       const Vector& final_demand_current) {
  const int n = data.n;
  if (static_cast<int>(sector_ids.size()) != n || final_demand_reference.size() != n ||
      final_demand_current.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, kModule, "sector ids or final demand differ from n");
  }
  struct Nominal {
    Matrix x;
    Vector v;
    Vector f;
  };
  auto nominal = [n](const Matrix& shares, const Vector& f) {
    const Matrix S = shares.bottomRows(n);
    const Vector gross = (Matrix::Identity(n, n) - S).partialPivLu().solve(f);
    Nominal out{S * gross.asDiagonal(), shares.row(0).transpose().cwiseProduct(gross), f};
    return out;
  };
  const Nominal R = nominal(data.A, final_demand_reference);
  const Nominal C = nominal(data.B, final_demand_current);

  // Middle period T1 = w (R + C) / 2 keeps T0 = 2R - T1 and T2 = 2C - T1
  // strictly positive wherever R and C are.
  double w = 1.0;
  auto tighten = [&w](double r, double c) {
    if (r > 0.0 && c > 0.0) w = std::min({w, 2.0 * r / (r + c), 2.0 * c / (r + c)});
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) tighten(R.x(i, j), C.x(i, j));
    tighten(R.v[j], C.v[j]);
    tighten(R.f[j], C.f[j]);
  }

  LinkedTables t;
  t.sector_ids = sector_ids;
  t.transactions[1] = 0.5 * w * (R.x + C.x);
  t.primary_input[1] = 0.5 * w * (R.v + C.v);
  t.final_demand[1] = 0.5 * w * (R.f + C.f);
  t.transactions[0] = 2.0 * R.x - t.transactions[1];
  t.primary_input[0] = 2.0 * R.v - t.primary_input[1];
  t.final_demand[0] = 2.0 * R.f - t.final_demand[1];
  t.transactions[2] = 2.0 * C.x - t.transactions[1];
  t.primary_input[2] = 2.0 * C.v - t.primary_input[1];
  t.final_demand[2] = 2.0 * C.f - t.final_demand[1];

  // Deflators: merged reference = 1, merged current = p.
  const double eta = 0.5 * std::min({1.0, data.p.minCoeff(), data.p0});
  for (int k = 0; k < kPeriods; ++k) t.deflators[k].resize(n);
  t.deflators[0].setConstant(2.0 - eta);
  t.deflators[1].setConstant(eta);
  t.deflators[2] = 2.0 * data.p.array() - eta;
  t.primary_deflator = {2.0 - eta, eta, 2.0 * data.p0 - eta};
  return t;
}

ExampleFixture two_input_example() {
  ExampleFixture fx;
  fx.sector_ids = {"input1", "input2", "output"};
  auto& d = fx.data;
  d.n = 3;
  d.A = Matrix::Zero(4, 3);
  d.B = Matrix::Zero(4, 3);
  // the two supplying sectors use only the primary input
  d.A(0, 0) = d.B(0, 0) = 1.0;
  d.A(0, 1) = d.B(0, 1) = 1.0;
  d.A.col(2) << 0.2, 0.5, 0.3, 0.0;
  d.B.col(2) << 0.1, 0.7, 0.2, 0.0;
  d.p = Vector(3);
  d.p << 0.6, 1.2, 0.8;
  d.p0 = 0.9;
  fx.final_demand_reference = Vector::Constant(3, 10.0);
  fx.final_demand_reference[2] = 100.0;
  fx.final_demand_current = fx.final_demand_reference;
  return fx;
}

}  // namespace ccesnet
