#include "ccesnet/cces.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "ccesnet/error.hpp"

namespace ccesnet {
namespace {

constexpr const char* kModule = "cces";

// Bracket policy for the productivity root.
constexpr double kInitialLo = 0.25;
constexpr double kInitialHi = 4.0;
constexpr double kOuterLo = 1e-3;
constexpr double kOuterHi = 1e3;

bool is_cobb_douglas(double sigma) { return std::abs(1.0 - sigma) < kCobbDouglasTol; }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::nonpositive_price, kModule, std::string(what) + " must be positive");
  }
}

// ln(lambda e^x + (1 - lambda) e^y) without overflow.
double log_mix(double lambda, double x, double y) {
  if (lambda <= 0.0) return y;
  if (lambda >= 1.0) return x;
  const double m = std::max(x, y);
  return m + std::log(lambda * std::exp(x - m) + (1.0 - lambda) * std::exp(y - m));
}

double log_nest_cost(double log_w, double log_lower, const NestSpec& nest) {
  if (is_cobb_douglas(nest.sigma)) {
    return nest.lambda * log_w + (1.0 - nest.lambda) * log_lower;
  }
  const double e = 1.0 - nest.sigma;
  return log_mix(nest.lambda, e * log_w, e * log_lower) / e;
}

double price_at(std::span<const double> w, int index) {
  if (index < 0 || static_cast<std::size_t>(index) >= w.size()) {
    throw Error(ErrorCode::dimension_mismatch, kModule, "nest input index outside price vector");
  }
  const double v = w[static_cast<std::size_t>(index)];
  require_positive(v, "input price");
  return v;
}

}  // namespace

double nest_cost(double w, double w_lower, const NestSpec& nest) {
  require_positive(w, "input price");
  require_positive(w_lower, "compound price");
  return std::exp(log_nest_cost(std::log(w), std::log(w_lower), nest));
}

double compound_cost(const SectorTechnology& tech, std::span<const double> w, double w0) {
  require_positive(w0, "primary price");
  double log_W = std::log(w0);
  for (const auto& nest : tech.nests) {
    log_W = log_nest_cost(std::log(price_at(w, nest.input_index)), log_W, nest);
  }
  return std::exp(log_W);
}

double unit_cost(const SectorTechnology& tech, std::span<const double> w, double w0) {
  require_positive(tech.theta, "theta");
  return compound_cost(tech, w, w0) / tech.theta;
}

std::vector<double> cost_shares(const SectorTechnology& tech, std::span<const double> w, double w0) {
  require_positive(w0, "primary price");
  const std::size_t m = tech.nests.size();
  // log_W[i] is the compound price entering nest i; log_W[m] the sector's W_{n+1}.
  std::vector<double> log_W(m + 1);
  std::vector<double> log_w(m);
  log_W[0] = std::log(w0);
  for (std::size_t i = 0; i < m; ++i) {
    log_w[i] = std::log(price_at(w, tech.nests[i].input_index));
    log_W[i + 1] = log_nest_cost(log_w[i], log_W[i], tech.nests[i]);
  }
  // Local shares: q = lambda (w / W_out)^{1-s}, 1 - q = Lambda (W_in / W_out)^{1-s}.
  std::vector<double> shares(m + 1);
  double outer = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    const auto& nest = tech.nests[k];
    const double e = is_cobb_douglas(nest.sigma) ? 0.0 : 1.0 - nest.sigma;
    const double q = nest.lambda * std::exp(e * (log_w[k] - log_W[k + 1]));
    const double rest = (1.0 - nest.lambda) * std::exp(e * (log_W[k] - log_W[k + 1]));
    shares[k + 1] = outer * q;
    outer *= rest;
  }
  shares[0] = outer;
  return shares;
}

std::vector<double> calibrate_lambdas(std::span<const double> a) {
  if (a.size() < 1) throw Error(ErrorCode::invalid_argument, kModule, "empty share vector");
  const std::size_t m = a.size() - 1;
  std::vector<double> lambda(m);
  // 1 - sum of the shares outside nest i equals the running sum a_0 + ... + a_i.
  double inner = a[0];
  for (std::size_t i = 1; i <= m; ++i) {
    const double denom = inner + a[i];
    if (!(inner > 0.0) || !(denom > 0.0)) {
      throw Error(ErrorCode::degenerate_share, kModule,
                  "degenerate share: nest " + std::to_string(i) + " has nothing below it");
    }
    lambda[i - 1] = a[i] / denom;
    inner = denom;
  }
  return lambda;
}

std::vector<double> reference_shares(std::span<const double> lambda) {
  const std::size_t m = lambda.size();
  std::vector<double> a(m + 1);
  double outer = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    a[k + 1] = lambda[k] * outer;
    outer *= 1.0 - lambda[k];
  }
  a[0] = outer;
  return a;
}

void validate(const SectorObservation& obs) {
  const std::size_t len = obs.a.size();
  if (len == 0 || obs.b.size() != len || obs.p.size() != len) {
    throw Error(ErrorCode::dimension_mismatch, kModule, "observation vectors differ in length");
  }
  require_positive(obs.p_out, "output price");
  double sa = 0.0;
  double sb = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    require_positive(obs.p[i], "input price");
    if (!(obs.a[i] > 0.0) || !(obs.b[i] > 0.0) || obs.a[i] > 1.0 || obs.b[i] > 1.0) {
      throw Error(ErrorCode::degenerate_share, kModule,
                  "shares must lie in (0, 1]", {{"position", std::to_string(i)}});
    }
    sa += obs.a[i];
    sb += obs.b[i];
  }
  if (std::abs(sa - 1.0) > 1e-9 || std::abs(sb - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_argument, kModule, "observed shares do not sum to 1");
  }
}

SectorCalibration calibrate_sector(const SectorObservation& obs, double t) {
  require_positive(t, "trial productivity");
  const int m = obs.nest_count();
  const auto lambda = calibrate_lambdas(obs.a);

  // Current-state cost share of everything at or below nest i, i.e. of X_{i+1}.
  std::vector<double> inner_b(m + 1);
  inner_b[0] = obs.b[0];
  for (int i = 1; i <= m; ++i) inner_b[i] = inner_b[i - 1] + obs.b[i];

  SectorCalibration out;
  out.sigma.assign(m, 1.0);
  out.log_W.assign(m + 1, 0.0);
  out.log_W[m] = std::log(t) + std::log(obs.p_out);

  for (int i = m; i >= 1; --i) {
    const double lam = lambda[i - 1];
    const double big_lam = 1.0 - lam;
    const double q = obs.b[i] / inner_b[i];  // nest-local current share
    const double log_q_ratio = std::log1p((q - lam) / lam);
    const double log_p_over_W = std::log(obs.p[i]) - out.log_W[i];

    // ln(W_i / W_{i+1}) = ln((1-q)/Lambda) / (1 - sigma), and (1 - sigma) =
    // ln(q/lambda) / ln(p/W_{i+1}); the ratio of the two logs is formed
    // directly so sigma near 1 and p near W_{i+1} stay finite.
    double r = 0.0;
    if (std::abs(q - lam) <= 1e-15 * std::max(lam, 1e-300)) {
      r = -lam / big_lam;
    } else {
      r = std::log1p((lam - q) / big_lam) / log_q_ratio;
    }
    if (std::abs(log_p_over_W) < kDegenerateLogTol) {
      out.sigma[i - 1] = 1.0;
      out.degenerate_nests.push_back(i - 1);
    } else {
      out.sigma[i - 1] = 1.0 - log_q_ratio / log_p_over_W;
    }
    out.log_W[i - 1] = out.log_W[i] + r * log_p_over_W;
    if (!std::isfinite(out.log_W[i - 1])) {
      throw Error(ErrorCode::calibration_failure, kModule, "compound price left the positive reals",
                  {{"nest", std::to_string(i - 1)}});
    }
  }
  return out;
}

ThetaCalibration calibrate_theta(const SectorObservation& obs, const std::string& sector_id) {
  validate(obs);
  const double log_p0 = std::log(obs.p[0]);
  int evaluations = 0;
  auto residual = [&](double t) {
    ++evaluations;
    return calibrate_sector(obs, t).log_W[0] - log_p0;
  };

  double lo = kInitialLo;
  double hi = kInitialHi;
  double f_lo = residual(lo);
  double f_hi = residual(hi);
  while (f_lo * f_hi > 0.0 && (lo > kOuterLo || hi < kOuterHi)) {
    lo = std::max(lo * 0.5, kOuterLo);
    hi = std::min(hi * 2.0, kOuterHi);
    f_lo = residual(lo);
    f_hi = residual(hi);
  }
  if (f_lo * f_hi > 0.0) {
    throw Error(ErrorCode::calibration_failure, kModule,
                "no sign change of W1(t) - p0 in [1e-3, 1e3]", {{"sector", sector_id}});
  }

  double theta = 0.0;
  if (f_lo == 0.0) {
    theta = lo;
  } else if (f_hi == 0.0) {
    theta = hi;
  } else {
    std::uintmax_t max_iter = 200;
    auto tol = [](double a, double b) {
      return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::min(a, b);
    };
    auto [x0, x1] = boost::math::tools::toms748_solve(residual, lo, hi, f_lo, f_hi, tol, max_iter);
    theta = std::abs(residual(x0)) <= std::abs(residual(x1)) ? x0 : x1;
  }

  auto at_theta = calibrate_sector(obs, theta);
  ThetaCalibration out;
  out.theta = theta;
  out.sigma = std::move(at_theta.sigma);
  out.lambda = calibrate_lambdas(obs.a);
  out.residual = std::abs(std::expm1(at_theta.log_W[0] - log_p0));
  out.evaluations = evaluations;
  out.degenerate_nests = std::move(at_theta.degenerate_nests);
  return out;
}

double tornqvist(const SectorObservation& obs) {
  validate(obs);
  double g = -std::log(obs.p_out);
  for (std::size_t i = 0; i < obs.a.size(); ++i) {
    g += 0.5 * (obs.a[i] + obs.b[i]) * std::log(obs.p[i]);
  }
  return g;
}

SectorObservation sector_observation(const TwoStateData& data, int j,
                                     std::span<const int> stream_order, std::vector<int>& inputs) {
  if (j < 0 || j >= data.n || static_cast<int>(stream_order.size()) != data.n) {
    throw Error(ErrorCode::dimension_mismatch, kModule, "sector or stream order out of range");
  }
  SectorObservation obs;
  obs.a.push_back(data.A(0, j));
  obs.b.push_back(data.B(0, j));
  obs.p.push_back(data.p0);
  obs.p_out = data.p[j];
  inputs.clear();
  for (int i : stream_order) {
    if (data.A(i + 1, j) == 0.0 && data.B(i + 1, j) == 0.0) continue;
    inputs.push_back(i);
    obs.a.push_back(data.A(i + 1, j));
    obs.b.push_back(data.B(i + 1, j));
    obs.p.push_back(data.p[i]);
  }
  return obs;
}

EconomyCalibration calibrate_all(const TwoStateData& data, std::span<const int> stream_order,
                                 std::span<const std::string> sector_ids, Exec exec) {
  const int n = data.n;
  if (static_cast<int>(sector_ids.size()) != n) {
    throw Error(ErrorCode::dimension_mismatch, kModule, "sector id count differs from n");
  }
  EconomyCalibration out;
  out.technologies.resize(n);
  out.records.resize(n);
  std::vector<std::exception_ptr> errors(n);

  auto one = [&](int j) {
    try {
      auto& rec = out.records[j];
      rec.sector_id = sector_ids[j];
      const auto obs = sector_observation(data, j, stream_order, rec.inputs);
      rec.calibration = calibrate_theta(obs, rec.sector_id);
      rec.tornqvist = tornqvist(obs);
      auto& tech = out.technologies[j];
      tech.sector_id = rec.sector_id;
      tech.theta = rec.calibration.theta;
      tech.nests.resize(rec.inputs.size());
      for (std::size_t k = 0; k < rec.inputs.size(); ++k) {
        tech.nests[k] = {rec.inputs[k], rec.calibration.lambda[k], rec.calibration.sigma[k]};
      }
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < n; ++j) one(j);
  } else {
    for (int j = 0; j < n; ++j) one(j);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace ccesnet
