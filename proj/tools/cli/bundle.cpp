#include "bundle.hpp"

#include <cmath>
#include <fstream>

#include "ccesnet/error.hpp"

namespace ccesnet::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& message, ErrorContext ctx = {}) {
  throw Error(ErrorCode::parse, "cli", message, std::move(ctx));
}

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vec_from(const json& j, std::size_t n, const char* what) {
  auto v = j.get<std::vector<double>>();
  if (v.size() != n) bad(std::string(what) + " has the wrong length");
  return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json rows(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec(m.row(i).transpose()));
  return out;
}

Matrix rows_from(const json& j, Eigen::Index r, Eigen::Index c, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != r) bad(std::string(what) + " has the wrong row count");
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) m.row(i) = vec_from(j[i], static_cast<std::size_t>(c), what).transpose();
  return m;
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cli", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what(), {{"path", path.string()}});
  }
}

int sector_index(const std::vector<std::string>& ids, const std::string& id) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return static_cast<int>(i);
  }
  throw Error(ErrorCode::invalid_argument, "cli", "unknown sector '" + id + "'");
}

json to_json(const StateBundle& b) {
  return {{"sector_ids", b.sector_ids},
          {"p0", b.data.p0},
          {"p", vec(b.data.p)},
          {"A", rows(b.data.A)},
          {"B", rows(b.data.B)},
          {"final_demand_reference", vec(b.final_demand_reference)},
          {"final_demand_current", vec(b.final_demand_current)}};
}

StateBundle state_bundle_from_json(const json& j) {
  try {
    StateBundle b;
    b.sector_ids = j.at("sector_ids").get<std::vector<std::string>>();
    const auto n = b.sector_ids.size();
    b.data.n = static_cast<int>(n);
    b.data.p0 = j.at("p0").get<double>();
    b.data.p = vec_from(j.at("p"), n, "p");
    b.data.A = rows_from(j.at("A"), n + 1, n, "A");
    b.data.B = rows_from(j.at("B"), n + 1, n, "B");
    b.final_demand_reference = vec_from(j.at("final_demand_reference"), n, "final_demand_reference");
    b.final_demand_current = vec_from(j.at("final_demand_current"), n, "final_demand_current");
    validate(b.data, 1e-9);
    return b;
  } catch (const json::exception& e) {
    bad(std::string("malformed two-state file: ") + e.what());
  }
}

json to_json(const StreamOrder& s, const std::vector<std::string>& ids) {
  std::vector<std::string> order;
  for (int k : s.phi) order.push_back(ids[k]);
  return {{"gamma_star", s.gamma_star}, {"linearity", s.linearity}, {"order", order}};
}

std::vector<int> stream_order_from_json(const json& j, const std::vector<std::string>& ids) {
  std::vector<int> phi;
  try {
    for (const auto& id : j.at("order")) phi.push_back(sector_index(ids, id.get<std::string>()));
  } catch (const json::exception& e) {
    bad(std::string("malformed stream order: ") + e.what());
  }
  std::vector<char> seen(ids.size(), 0);
  for (int k : phi) {
    if (seen[k]) bad("stream order repeats a sector");
    seen[k] = 1;
  }
  if (phi.size() != ids.size()) bad("stream order does not cover every sector");
  return phi;
}

json to_json(const CalibrationBundle& b, const ReplicationReport& replication) {
  const auto& ids = b.sector_ids;
  json sectors = json::array();
  for (const auto& r : b.records) {
    const auto& c = r.calibration;
    std::vector<std::string> inputs;
    for (int i : r.inputs) inputs.push_back(ids[i]);
    sectors.push_back({{"sector_id", r.sector_id},
                       {"theta", c.theta},
                       {"ln_theta", std::log(c.theta)},
                       {"tornqvist", r.tornqvist},
                       {"inputs", inputs},
                       {"sigmas", c.sigma},
                       {"lambdas", c.lambda},
                       {"residual", c.residual},
                       {"evaluations", c.evaluations},
                       {"degenerate_nests", c.degenerate_nests}});
  }
  json checks = json::array();
  for (const auto& c : replication.checks) {
    checks.push_back({{"name", c.name},
                      {"max_residual", c.max_residual},
                      {"worst_sector", c.worst_sector >= 0 ? json(ids[c.worst_sector]) : json(nullptr)},
                      {"passed", c.passed}});
  }
  std::vector<std::string> order;
  for (int k : b.stream_order) order.push_back(ids[k]);
  return {{"sector_ids", ids},
          {"stream_order", order},
          {"p0", b.economy.p0},
          {"p", vec(b.prices)},
          {"final_demand", vec(b.final_demand)},
          {"sectors", sectors},
          {"replication", {{"tolerance", replication.tolerance}, {"passed", replication.passed()}, {"checks", checks}}}};
}

CalibrationBundle calibration_bundle_from_json(const json& j) {
  try {
    CalibrationBundle b;
    b.sector_ids = j.at("sector_ids").get<std::vector<std::string>>();
    const auto n = b.sector_ids.size();
    b.stream_order = stream_order_from_json(json{{"order", j.at("stream_order")}}, b.sector_ids);
    b.prices = vec_from(j.at("p"), n, "p");
    b.final_demand = vec_from(j.at("final_demand"), n, "final_demand");
    const auto& sectors = j.at("sectors");
    if (sectors.size() != n) bad("calibration lists the wrong number of sectors");
    std::vector<SectorTechnology> techs;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& s = sectors[k];
      SectorTechnology t;
      t.sector_id = s.at("sector_id").get<std::string>();
      if (t.sector_id != b.sector_ids[k]) bad("calibration sectors are out of order");
      t.theta = s.at("theta").get<double>();
      const auto inputs = s.at("inputs").get<std::vector<std::string>>();
      const auto sig = s.at("sigmas").get<std::vector<double>>();
      const auto lam = s.at("lambdas").get<std::vector<double>>();
      if (sig.size() != inputs.size() || lam.size() != inputs.size()) bad("nest arrays differ in length");
      SectorRecord rec;
      rec.sector_id = t.sector_id;
      rec.tornqvist = s.at("tornqvist").get<double>();
      rec.calibration.theta = t.theta;
      rec.calibration.sigma = sig;
      rec.calibration.lambda = lam;
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        const int idx = sector_index(b.sector_ids, inputs[i]);
        t.nests.push_back({idx, lam[i], sig[i]});
        rec.inputs.push_back(idx);
      }
      techs.push_back(std::move(t));
      b.records.push_back(std::move(rec));
    }
    b.economy = make_economy(std::move(techs), j.at("p0").get<double>());
    return b;
  } catch (const json::exception& e) {
    bad(std::string("malformed calibration file: ") + e.what());
  }
}

ShockScenario scenario_from_json(const json& j, const std::vector<std::string>& ids) {
  ShockScenario s;
  s.z = Vector::Ones(static_cast<Eigen::Index>(ids.size()));
  try {
    s.label = j.value("label", std::string("scenario"));
    for (const auto& [id, value] : j.at("z").items()) {
      const double v = value.get<double>();
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::invalid_argument, "cli", "shock factors must be positive", {{"sector", id}});
      }
      s.z[sector_index(ids, id)] = v;
    }
  } catch (const json::exception& e) {
    bad(std::string("malformed scenario: ") + e.what());
  }
  return s;
}

json to_json(const ShockScenario& s, const std::vector<std::string>& ids) {
  json z = json::object();
  for (Eigen::Index j = 0; j < s.z.size(); ++j) {
    if (s.z[j] != 1.0) z[ids[j]] = s.z[j];
  }
  return {{"label", s.label}, {"z", z}};
}

}  // namespace ccesnet::cli
