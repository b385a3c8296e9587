#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ccesnet/error.hpp"
#include "ccesnet/propagation.hpp"
#include "ccesnet/synthetic.hpp"
#include "oracles.hpp"

using namespace ccesnet;

namespace {

struct Scenario {
  Economy econ;
  EquilibriumState current;
  Vector f;
};

Scenario synthetic_scenario(int n, std::uint64_t seed, bool leontief_technology = false) {
  GeneratorConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  auto s = generate_economy(cfg);
  Scenario out{s.economy, {}, s.final_demand_current};
  Vector p = s.data.p;
  if (leontief_technology) {
    for (auto& t : out.econ.technologies) {
      for (auto& nest : t.nests) nest.sigma = 0.0;
    }
    p = solve_equilibrium(out.econ, Vector::Ones(n), p).prices;
  }
  out.current = coefficients(out.econ, p, Vector::Ones(n), out.econ.p0, StateLabel::current);
  return out;
}

WelfareReport cces_welfare(const Scenario& sc, const Vector& z) {
  auto r = solve_equilibrium(sc.econ, z, sc.current.prices);
  auto proj = coefficients(sc.econ, r.prices, z, sc.econ.p0, StateLabel::projected);
  return welfare(sc.current, proj, r.prices, sc.f, shocked_sector(z));
}

Matrix inv2(const Matrix& m) {
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Matrix out(2, 2);
  out << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return out / det;
}

EquilibriumState toy_state(std::initializer_list<double> s, Vector prices) {
  EquilibriumState st;
  st.S.resize(2, 2);
  auto it = s.begin();
  st.S << it[0], it[1], it[2], it[3];
  st.s0 = Vector::Ones(2) - st.S.colwise().sum().transpose();
  st.prices = std::move(prices);
  return st;
}

}  // namespace

TEST(Welfare, NoShockIsNeutral) {
  auto sc = synthetic_scenario(30, 1);
  auto r = welfare(sc.current, sc.current, sc.current.prices, sc.f);
  EXPECT_EQ(r.delta_star, 1.0);
  EXPECT_EQ(r.delta_f, 0.0);
  EXPECT_EQ(r.delta_v.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Welfare, UnitShockThroughSolverIsNeutral) {
  auto sc = synthetic_scenario(30, 2);
  auto r = cces_welfare(sc, Vector::Ones(30));
  EXPECT_NEAR(r.delta_star, 1.0, 1e-13);
  EXPECT_NEAR(r.delta_f, 0.0, 1e-9);
  EXPECT_LT(r.delta_v.cwiseAbs().maxCoeff(), 1e-9 * r.total_primary_input);
}

TEST(Welfare, TwoSectorHandArithmetic) {
  Vector p(2), pi(2), f(2);
  p << 1.0, 1.2;
  pi << 0.9, 1.1;
  f << 10.0, 20.0;
  auto cur = toy_state({0.1, 0.2, 0.3, 0.1}, p);
  auto proj = toy_state({0.05, 0.2, 0.25, 0.1}, pi);
  const Matrix LB = inv2(Matrix::Identity(2, 2) - cur.S);
  const Matrix LM = inv2(Matrix::Identity(2, 2) - proj.S);
  const Vector fp = (pi.array() / p.array() * f.array()).matrix();
  const double expected = cur.s0.dot(LB * f) / proj.s0.dot(LM * fp);
  auto r = welfare(cur, proj, pi, f, 0);
  EXPECT_NEAR(r.delta_star, expected, 1e-12);
  EXPECT_NEAR(r.delta_f, 30.0 * (expected - 1.0), 1e-10);
  EXPECT_NEAR(r.gross_output_current, (LB * f)[0], 1e-12);
  EXPECT_NEAR(r.gross_output_projected, (LM * fp)[0] * expected, 1e-12);
  EXPECT_NEAR(r.value_added_current, cur.s0[0] * (LB * f)[0], 1e-12);
}

TEST(Welfare, RedistributionSumsToZero) {
  auto sc = synthetic_scenario(40, 3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(1.0, 1.2);
  for (int trial = 0; trial < 5; ++trial) {
    Vector z(40);
    for (int j = 0; j < 40; ++j) z[j] = d(rng);
    auto r = cces_welfare(sc, z);
    EXPECT_LT(std::abs(r.delta_v.sum()), 1e-6 * r.total_primary_input);
    EXPECT_GT(r.delta_star, 1.0);
    auto l = leontief_baseline(sc.econ, sc.current, z, sc.f);
    EXPECT_LT(std::abs(l.delta_v.sum()), 1e-6 * l.total_primary_input);
  }
}

TEST(Welfare, DeltaStarHomogeneousOfDegreeZeroInDemand) {
  auto sc = synthetic_scenario(25, 5);
  Vector z = Vector::Ones(25);
  z[7] = 1.1;
  auto r = solve_equilibrium(sc.econ, z, sc.current.prices);
  auto proj = coefficients(sc.econ, r.prices, z, sc.econ.p0);
  const double a = welfare(sc.current, proj, r.prices, sc.f).delta_star;
  const double b = welfare(sc.current, proj, r.prices, 3.7 * sc.f).delta_star;
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(Welfare, ZeroElasticityEconomyMatchesLeontiefBaseline) {
  auto sc = synthetic_scenario(30, 6, true);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(1.0, 1.2);
  Vector z(30);
  for (int j = 0; j < 30; ++j) z[j] = d(rng);
  auto c = cces_welfare(sc, z);
  auto l = leontief_baseline(sc.econ, sc.current, z, sc.f, shocked_sector(z));
  EXPECT_NEAR(c.delta_star, l.delta_star, 1e-8);
  EXPECT_NEAR(c.delta_f / c.final_demand_total, l.delta_f / l.final_demand_total, 1e-8);
  EXPECT_LT((c.delta_v - l.delta_v).cwiseAbs().maxCoeff(), 1e-8 * c.total_primary_input);
  EXPECT_EQ(l.baseline, Baseline::leontief);
}

TEST(Welfare, RejectsBadDemand) {
  auto sc = synthetic_scenario(5, 8);
  EXPECT_THROW(welfare(sc.current, sc.current, sc.current.prices, Vector::Zero(5)), Error);
  EXPECT_THROW(welfare(sc.current, sc.current, sc.current.prices, Vector::Ones(4)), Error);
}

TEST(LeontiefBaseline, UnitShockIsIdentity) {
  auto sc = synthetic_scenario(20, 9);
  auto r = leontief_baseline(sc.econ, sc.current, Vector::Ones(20), sc.f);
  EXPECT_NEAR(r.delta_star, 1.0, 1e-13);
}

TEST(LeontiefBaseline, TwoSectorHandSolvedPrices) {
  Vector p(2);
  p << 1.0, 1.0;
  auto cur = toy_state({0.1, 0.2, 0.3, 0.1}, p);
  Vector z(2);
  z << 1.1, 1.0;
  // r (<z> - S) = s0, solved by hand as a transposed 2x2 system
  Matrix sys = Matrix(z.asDiagonal()) - cur.S;
  const Vector r = inv2(sys.transpose()) * cur.s0;
  auto proj = leontief_projection(cur, z);
  EXPECT_NEAR(proj.prices[0], r[0], 1e-14);
  EXPECT_NEAR(proj.prices[1], r[1], 1e-14);
  EXPECT_NEAR(proj.S(1, 0), 0.3 * r[1] / (r[0] * 1.1), 1e-14);
  const Vector total = proj.s0 + proj.S.colwise().sum().transpose();
  EXPECT_NEAR(total[0], 1.0, 1e-14);
  EXPECT_NEAR(total[1], 1.0, 1e-14);
}

TEST(LeontiefInverse, MatchesNeumannSeries) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Matrix S(6, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) S(i, j) = d(rng);
  }
  S *= 0.5 / S.colwise().sum().maxCoeff();  // column sums <= 0.5
  const int K = 60;                          // tail <= 0.5^61 / 0.5
  EXPECT_LT((leontief_inverse(S) - oracle::neumann(S, K)).cwiseAbs().maxCoeff(), 1e-15 * 1e3);
}

TEST(LeontiefInverse, ProductivityInfeasible) {
  Matrix S = Matrix::Constant(2, 2, 0.6);
  try {
    leontief_inverse(S);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::productivity_infeasible);
  }
  EXPECT_NEAR(spectral_radius(S), 1.2, 1e-12);
}

TEST(Profile, LogAbsAndZeroFlag) {
  WelfareReport r;
  r.delta_v = Vector(3);
  r.delta_v << 0.0, std::exp(1.0), -std::exp(2.0);
  std::vector<int> order{2, 0, 1};
  auto p = primary_redistribution_profile(r, order);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0].sector, 2);
  EXPECT_NEAR(p[0].value, 2.0, 1e-15);
  EXPECT_TRUE(p[1].zero);
  EXPECT_TRUE(std::isfinite(p[1].value));
  EXPECT_NEAR(p[2].value, 1.0, 1e-15);
}

TEST(ShockedSector, LargestDeviation) {
  Vector z = Vector::Ones(4);
  EXPECT_EQ(shocked_sector(z), -1);
  z[2] = 1.1;
  z[3] = 0.95;
  EXPECT_EQ(shocked_sector(z), 2);
}
