#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ccesnet/cces.hpp"
#include "ccesnet/equilibrium.hpp"
#include "ccesnet/error.hpp"
#include "ccesnet/synthetic.hpp"
#include "oracles.hpp"

using namespace ccesnet;

namespace {

SyntheticEconomy make_synthetic(int n, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.density = std::min(1.0, std::max(0.3, 2.0 / n));
  return generate_economy(cfg);
}

Vector random_shock(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vector z(n);
  for (int j = 0; j < n; ++j) z[j] = d(rng);
  return z;
}

}  // namespace

TEST(SolveEquilibrium, UnitShockReturnsCurrentPrices) {
  auto s = make_synthetic(30, 1);
  const int n = s.economy.size();
  auto r = solve_equilibrium(s.economy, Vector::Ones(n), s.data.p);
  EXPECT_LE(r.iterations, 2);
  EXPECT_LT((r.prices - s.data.p).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SolveEquilibrium, EnhancingShocksGiveMonotoneDecline) {
  auto s = make_synthetic(30, 2);
  const int n = s.economy.size();
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector z = random_shock(rng, n, 1.0, 1.2);
    Vector prev = s.data.p;
    bool monotone = true;
    FixedPointOptions opts;
    opts.observer = [&](int, const Vector& w) {
      monotone = monotone && ((w - prev).array() <= 1e-14).all();
      prev = w;
    };
    auto r = solve_equilibrium(s.economy, z, s.data.p, opts);
    EXPECT_TRUE(monotone);
    EXPECT_LT(r.residual, 1e-10);
    EXPECT_LT(r.iterations, 10000);
    EXPECT_TRUE(((r.prices - s.data.p).array() <= 1e-14).all());
  }
}

TEST(SolveEquilibrium, OneSectorClosedFormByBisection) {
  // a single sector using itself and the primary input
  SectorTechnology t{"x", {{0, 0.35, 2.5}}, 1.1};
  auto econ = make_economy({t}, 1.05);
  const double z = 1.07;
  auto g = [&](double w) {
    std::vector<double> v{w};
    return w - unit_cost(t, v, 1.05) / z;
  };
  double lo = 0.01, hi = 10.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  Vector zv = Vector::Constant(1, z);
  auto r = solve_equilibrium(econ, zv, Vector::Ones(1));
  EXPECT_NEAR(r.prices[0], 0.5 * (lo + hi), 1e-10);
}

TEST(SolveEquilibrium, InvalidInputs) {
  auto s = make_synthetic(5, 1);
  EXPECT_THROW(solve_equilibrium(s.economy, Vector::Ones(4), s.data.p), Error);
  EXPECT_THROW(solve_equilibrium(s.economy, -Vector::Ones(5), s.data.p), Error);
}

TEST(SolveEquilibrium, NonconvergenceCarriesTrace) {
  auto s = make_synthetic(10, 4);
  FixedPointOptions opts;
  opts.max_iter = 2;
  opts.tol = 1e-300;
  try {
    solve_equilibrium(s.economy, Vector::Constant(10, 1.1), s.data.p, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::nonconvergence);
    EXPECT_GE(e.context().size(), 2u);
  }
}

TEST(SolveEquilibrium, SerialAndParallelIdentical) {
  auto s = make_synthetic(40, 5);
  std::mt19937_64 rng(6);
  const Vector z = random_shock(rng, 40, 1.0, 1.2);
  FixedPointOptions a, b;
  a.exec = Exec::serial;
  b.exec = Exec::parallel;
  auto ra = solve_equilibrium(s.economy, z, s.data.p, a);
  auto rb = solve_equilibrium(s.economy, z, s.data.p, b);
  EXPECT_EQ(ra.iterations, rb.iterations);
  EXPECT_EQ(ra.prices, rb.prices);
}

TEST(Coefficients, ReferenceAndCurrentReproduceObservedShares) {
  auto s = make_synthetic(20, 7);
  const int n = 20;
  auto ref = coefficients(s.economy, Vector::Ones(n), s.economy.theta().cwiseInverse(), 1.0,
                          StateLabel::reference);
  auto cur = coefficients(s.economy, s.data.p, Vector::Ones(n), s.data.p0, StateLabel::current);
  EXPECT_LT((ref.S - s.data.A.bottomRows(n)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((ref.s0.transpose() - s.data.A.row(0)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((cur.S - s.data.B.bottomRows(n)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((cur.s0.transpose() - s.data.B.row(0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Coefficients, MatchFiniteDifferenceGradient) {
  auto s = make_synthetic(3, 8);
  const auto& econ = s.economy;
  const int n = 3;
  std::mt19937_64 rng(9);
  const Vector z = random_shock(rng, n, 1.0, 1.15);
  auto r = solve_equilibrium(econ, z, s.data.p);
  auto state = coefficients(econ, r.prices, z, econ.p0);
  for (int j = 0; j < n; ++j) {
    auto hj = [&](const std::vector<double>& x) {
      Vector w(n);
      for (int i = 0; i < n; ++i) w[i] = x[i + 1];
      return compound_cost(econ.technologies[j], {w.data(), static_cast<std::size_t>(n)}, x[0]);
    };
    std::vector<double> x{econ.p0};
    for (int i = 0; i < n; ++i) x.push_back(r.prices[i]);
    const double denom = econ.technologies[j].theta * z[j] * r.prices[j];
    EXPECT_NEAR(state.s0[j], econ.p0 * oracle::central_diff(hj, x, 0) / denom, 1e-6);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(state.S(i, j), r.prices[i] * oracle::central_diff(hj, x, i + 1) / denom, 1e-6);
    }
  }
}

TEST(Coefficients, ColumnStochasticAtEveryState) {
  auto s = make_synthetic(50, 9);
  const int n = 50;
  const auto& econ = s.economy;
  std::mt19937_64 rng(10);
  const Vector z = random_shock(rng, n, 1.0, 1.2);
  auto proj = solve_equilibrium(econ, z, s.data.p);
  const EquilibriumState states[] = {
      coefficients(econ, Vector::Ones(n), econ.theta().cwiseInverse(), 1.0, StateLabel::reference),
      coefficients(econ, s.data.p, Vector::Ones(n), econ.p0, StateLabel::current),
      coefficients(econ, proj.prices, z, econ.p0, StateLabel::projected)};
  for (const auto& st : states) {
    const Vector total = st.s0 + st.S.colwise().sum().transpose();
    EXPECT_LT((total.array() - 1.0).abs().maxCoeff(), 1e-8) << to_string(st.label);
    EXPECT_GE(st.S.minCoeff(), 0.0);
    EXPECT_LE(st.S.maxCoeff(), 1.0);
  }
}

TEST(VerifyReplication, SampleEconomyAndSynthetic) {
  auto fx = two_input_example();
  std::vector<int> order{0, 1, 2};
  auto cal = calibrate_all(fx.data, order, fx.sector_ids, Exec::serial);
  auto rep = verify_replication(make_economy(cal.technologies, fx.data.p0), fx.data);
  EXPECT_TRUE(rep.passed());
  ASSERT_EQ(rep.checks.size(), 4u);
  for (auto& c : rep.checks) EXPECT_LT(c.max_residual, 1e-8) << c.name;

  auto s = make_synthetic(50, 11);
  EXPECT_TRUE(verify_replication(s.economy, s.data).passed());
}

TEST(VerifyReplication, PerturbedElasticityIsFlagged) {
  auto s = make_synthetic(20, 12);
  int target = -1;
  for (int j = 0; j < 20 && target < 0; ++j) {
    if (!s.economy.technologies[j].nests.empty()) target = j;
  }
  ASSERT_GE(target, 0);
  auto econ = s.economy;
  econ.technologies[target].nests.back().sigma += 0.1;
  auto rep = verify_replication(econ, s.data);
  EXPECT_FALSE(rep.passed());
  bool flagged = false;
  for (auto& c : rep.checks) flagged = flagged || (!c.passed && c.worst_sector == target);
  EXPECT_TRUE(flagged);
}

TEST(Economy, RejectsInvalidTechnologies) {
  SectorTechnology t{"x", {{0, 0.5, 2.0}, {0, 0.5, 2.0}}, 1.0};
  EXPECT_THROW(make_economy({t}, 1.0), Error);
  t.nests.pop_back();
  t.theta = 0.0;
  EXPECT_THROW(make_economy({t}, 1.0), Error);
  t.theta = 1.0;
  EXPECT_THROW(make_economy({t}, 0.0), Error);
}
