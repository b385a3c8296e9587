#pragma once

#include <span>
#include <string>
#include <vector>

#include "ccesnet/io_data.hpp"
#include "ccesnet/types.hpp"

namespace ccesnet {

/// One two-input CES nest: the direct input, its share parameter and the
/// elasticity of substitution against the compound from the nest below.
struct NestSpec {
  int input_index = 0;
  double lambda = 0.0;
  double sigma = 0.0;
};

/// A sector's cascaded CES technology. Nests run innermost (index 0, the one
/// that combines with the primary input) to outermost.
struct SectorTechnology {
  std::string sector_id;
  std::vector<NestSpec> nests;
  double theta = 1.0;
};

/// Two-state observables for one sector, restricted to its nonzero inputs and
/// arranged in nest order. Position 0 is the primary input, so p[0] = p0.
struct SectorObservation {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> p;
  double p_out = 1.0;

  int nest_count() const { return static_cast<int>(a.size()) - 1; }
};

/// Elasticities and compound prices from one backward pass at a trial
/// productivity t. `log_W[i]` is ln W_{i+1} in the 1-based nest notation, so
/// log_W[0] is the primary-level compound and log_W.back() = ln(t p_out).
struct SectorCalibration {
  std::vector<double> sigma;
  std::vector<double> log_W;
  std::vector<int> degenerate_nests;
};

struct ThetaCalibration {
  double theta = 1.0;
  std::vector<double> sigma;
  std::vector<double> lambda;
  /// |W_1(theta) - p0| / p0
  double residual = 0.0;
  int evaluations = 0;
  std::vector<int> degenerate_nests;
};

/// Below this distance from 1 a nest is evaluated as Cobb-Douglas.
inline constexpr double kCobbDouglasTol = 1e-9;
/// Below this |ln(W/p)| a nest elasticity is unidentified and set to 1.
inline constexpr double kDegenerateLogTol = 1e-12;

/// CES dual: (lambda w^{1-s} + (1-lambda) W^{1-s})^{1/(1-s)}.
double nest_cost(double w, double w_lower, const NestSpec& nest);

/// Cascaded unit cost theta^{-1} W_{n+1}. `w` is indexed by NestSpec::input_index.
double unit_cost(const SectorTechnology& tech, std::span<const double> w, double w0);

/// Unit cost without the productivity factor, i.e. W_{n+1}.
double compound_cost(const SectorTechnology& tech, std::span<const double> w, double w0);

/// Shephard cost shares, primary first then nests innermost to outermost.
std::vector<double> cost_shares(const SectorTechnology& tech, std::span<const double> w, double w0);

/// Share parameters from reference shares `a` (primary first, nest order).
std::vector<double> calibrate_lambdas(std::span<const double> a);

/// Reference shares implied by share parameters; inverse of calibrate_lambdas.
std::vector<double> reference_shares(std::span<const double> lambda);

/// Backward pass from the outermost nest at trial productivity t.
SectorCalibration calibrate_sector(const SectorObservation& obs, double t);

/// Solves W_1(t) = p0 for t and returns theta with the elasticities at theta.
ThetaCalibration calibrate_theta(const SectorObservation& obs, const std::string& sector_id = {});

/// Tornqvist TFP growth: -ln p_out + sum ((a_i + b_i) / 2) ln p_i.
double tornqvist(const SectorObservation& obs);

void validate(const SectorObservation& obs);

/// Sector j's observation with inputs ordered by `stream_order` (positions of
/// sectors in the economy-wide order) and zero-share inputs dropped.
/// `inputs` receives the original input indices in nest order.
SectorObservation sector_observation(const TwoStateData& data, int j,
                                     std::span<const int> stream_order, std::vector<int>& inputs);

struct SectorRecord {
  std::string sector_id;
  ThetaCalibration calibration;
  double tornqvist = 0.0;
  std::vector<int> inputs;
};

struct EconomyCalibration {
  std::vector<SectorTechnology> technologies;
  std::vector<SectorRecord> records;
};

/// Calibrates every sector independently. Results are in sector order for
/// both execution modes.
EconomyCalibration calibrate_all(const TwoStateData& data, std::span<const int> stream_order,
                                 std::span<const std::string> sector_ids, Exec exec = Exec::parallel);

}  // namespace ccesnet
