#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ccesnet/error.hpp"
#include "svg.hpp"

namespace ccesnet::cli {
namespace {

using nlohmann::json;

std::vector<std::string> csv_ids(const std::vector<std::string>& ids, const std::vector<int>& order) {
  std::vector<std::string> out;
  for (int k : order) out.push_back(ids[k]);
  return out;
}

std::vector<int> identity_order(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

struct Projection {
  FixedPointResult fixed_point;
  EquilibriumState state;
};

Projection project(const CalibrationBundle& c, const ShockScenario& z) {
  Projection p;
  p.fixed_point = solve_equilibrium(c.economy, z.z, c.prices);
  p.state = coefficients(c.economy, p.fixed_point.prices, z.z, c.economy.p0, StateLabel::projected);
  return p;
}

EquilibriumState current_state(const CalibrationBundle& c) {
  return coefficients(c.economy, c.prices, Vector::Ones(c.economy.size()), c.economy.p0, StateLabel::current);
}

EquilibriumState state_for(const CalibrationBundle& c, StateKind k, const std::optional<ShockScenario>& z) {
  const int n = c.economy.size();
  switch (k) {
    case StateKind::reference:
      return coefficients(c.economy, Vector::Ones(n), c.economy.theta().cwiseInverse(), 1.0, StateLabel::reference);
    case StateKind::current: return current_state(c);
    case StateKind::projected:
      if (!z) throw Error(ErrorCode::invalid_argument, "cli", "the projected state needs --scenario");
      return project(c, *z).state;
  }
  throw Error(ErrorCode::invalid_argument, "cli", "unknown state");
}

std::string coefficients_csv(const EquilibriumState& st, const std::vector<std::string>& ids) {
  std::string s = "input";
  for (const auto& id : ids) s += "," + id;
  s += "\nprimary";
  for (Eigen::Index j = 0; j < st.s0.size(); ++j) s += "," + fmt(st.s0[j]);
  s += "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    s += ids[i];
    for (std::size_t j = 0; j < ids.size(); ++j) s += "," + fmt(st.S(i, j));
    s += "\n";
  }
  return s;
}

}  // namespace

json Settings::to_json() const {
  return {{"split", {io.split[0], io.split[1]}},
          {"balance_tol", io.balance_tol},
          {"p0", io.p0 ? json(*io.p0) : json(nullptr)},
          {"gamma_min", grid.min},
          {"gamma_max", grid.max},
          {"gamma_step", grid.step},
          {"linkage", ccesnet::to_string(linkage)},
          {"bins", bins},
          {"threads", threads}};
}

void Settings::merge(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::parse, "cli", "config must be a JSON object");
  static const std::vector<std::string> known{"split",     "balance_tol", "p0",   "gamma_min", "gamma_max",
                                              "gamma_step", "linkage",     "bins", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::invalid_argument, "cli", "unknown config key '" + key + "'");
    }
  }
  try {
    std::istringstream io_part(j.dump());
    const IoConfig parsed = parse_io_config(io_part);
    if (j.contains("split")) io.split = parsed.split;
    if (j.contains("balance_tol")) io.balance_tol = parsed.balance_tol;
    if (j.contains("p0")) io.p0 = parsed.p0;
    if (j.contains("gamma_min")) grid.min = j["gamma_min"].get<double>();
    if (j.contains("gamma_max")) grid.max = j["gamma_max"].get<double>();
    if (j.contains("gamma_step")) grid.step = j["gamma_step"].get<double>();
    if (j.contains("linkage")) linkage = parse_linkage(j["linkage"].get<std::string>());
    if (j.contains("bins")) bins = j["bins"].get<int>();
    if (j.contains("threads")) threads = j["threads"].get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "cli", std::string("bad config value: ") + e.what());
  }
}

StateKind parse_state(const std::string& s) {
  if (s == "ref" || s == "reference") return StateKind::reference;
  if (s == "cur" || s == "current") return StateKind::current;
  if (s == "proj" || s == "projected") return StateKind::projected;
  throw Error(ErrorCode::invalid_argument, "cli", "state must be ref, cur or proj");
}

const char* short_name(StateKind k) {
  switch (k) {
    case StateKind::reference: return "ref";
    case StateKind::current: return "cur";
    case StateKind::projected: return "proj";
  }
  return "?";
}

BaselineChoice parse_baseline(const std::string& s) {
  if (s == "both") return BaselineChoice::both;
  if (s == "cces") return BaselineChoice::cces;
  if (s == "leontief") return BaselineChoice::leontief;
  throw Error(ErrorCode::invalid_argument, "cli", "baseline must be both, cces or leontief");
}

ShockScenario midstream_scenario(const std::vector<std::string>& ids, const std::vector<int>& phi) {
  ShockScenario s;
  s.z = Vector::Ones(static_cast<Eigen::Index>(ids.size()));
  const int target = phi[phi.size() / 2];
  s.z[target] = 1.1;
  s.label = ids[target] + "110";
  return s;
}

void synth_stage(const SynthOptions& opt, OutputDir& out) {
  std::vector<std::string> ids;
  TwoStateData data;
  Vector f_ref, f_cur;
  json truth;
  std::vector<int> order;
  if (opt.fixture == "two-input") {
    auto fx = two_input_example();
    ids = fx.sector_ids;
    data = fx.data;
    f_ref = fx.final_demand_reference;
    f_cur = fx.final_demand_current;
    order = identity_order(data.n);
    truth = {{"fixture", "two-input"}, {"sector_ids", ids}, {"p0", data.p0},
             {"p", std::vector<double>(data.p.data(), data.p.data() + data.n)}};
  } else if (!opt.fixture.empty()) {
    throw Error(ErrorCode::invalid_argument, "cli", "unknown fixture '" + opt.fixture + "'");
  } else {
    auto s = generate_economy(opt.generator);
    ids = s.sector_ids;
    data = s.data;
    f_ref = s.final_demand_reference;
    f_cur = s.final_demand_current;
    order = s.nest_order;
    json sectors = json::array();
    for (const auto& t : s.economy.technologies) {
      json nests = json::array();
      for (const auto& n : t.nests) {
        nests.push_back({{"input", ids[n.input_index]}, {"lambda", n.lambda}, {"sigma", n.sigma}});
      }
      sectors.push_back({{"sector_id", t.sector_id}, {"theta", t.theta}, {"nests", nests}});
    }
    const auto& g = opt.generator;
    truth = {{"seed", g.seed},
             {"n", g.n},
             {"density", g.density},
             {"triangular_bias", g.triangular_bias},
             {"retries", s.retries},
             {"sector_ids", ids},
             {"hidden_order", csv_ids(ids, s.hidden_order)},
             {"nest_order", csv_ids(ids, s.nest_order)},
             {"p0", data.p0},
             {"p", std::vector<double>(data.p.data(), data.p.data() + data.n)},
             {"sectors", sectors}};
  }
  const auto tables = linked_tables_from_states(ids, data, f_ref, f_cur);
  write_linked_tables(tables, out.root());
  for (int t = 0; t < kPeriods; ++t) out.adopt("transactions_T" + std::to_string(t) + ".csv");
  out.adopt("deflators.csv");
  out.write_json("config.json", {{"split", {0.25, 0.75}}, {"balance_tol", 1e-6}});
  out.write_json("ground_truth.json", truth);
  out.write_json("scenario_midstream.json", to_json(midstream_scenario(ids, order), ids));
  out.write_json("scenario_unit.json", json{{"label", "unit"}, {"z", json::object()}});
}

StateBundle ingest_stage(const std::filesystem::path& data_dir, const Settings& s, OutputDir& out) {
  const auto tables = load_linked_tables(data_dir, s.io);
  const auto merged = merge_states(tables, s.io.split);
  StateBundle b;
  b.sector_ids = tables.sector_ids;
  b.data = to_two_state(merged, s.io.p0);
  validate(b.data);
  b.final_demand_reference = merged.reference.final_demand;
  b.final_demand_current = merged.current.final_demand;
  out.write_json("two_state.json", to_json(b));
  return b;
}

StreamOrder triangulate_stage(const StateBundle& b, const Settings& s, OutputDir& out) {
  const int n = b.data.n;
  const auto u = incidence(b.data.A.bottomRows(n));
  const auto grid = s.grid.values();
  const auto curve = linearity_curve(u, grid);
  const auto order = stream_order(u, grid);
  json j = to_json(order, b.sector_ids);
  j["grid"] = {{"min", s.grid.min}, {"max", s.grid.max}, {"step", s.grid.step}, {"points", grid.size()}};
  j["off_diagonal_incidences"] = u.off_diagonal_count();
  out.write_json("stream_order.json", j);

  std::string csv = "gamma,linearity,is_max\n";
  std::vector<double> xs, ys;
  int mark = -1;
  for (std::size_t g = 0; g < curve.size(); ++g) {
    const bool is_max = mark < 0 && curve[g].gamma == order.gamma_star;
    if (is_max) mark = static_cast<int>(g);
    csv += fmt(curve[g].gamma) + "," + fmt(curve[g].linearity) + "," + (is_max ? "1" : "0") + "\n";
    xs.push_back(curve[g].gamma);
    ys.push_back(curve[g].linearity);
  }
  out.write("linearity_curve.csv", csv);
  out.write("linearity_curve.svg", svg_curve("linearity over gamma", xs, ys, mark));
  return order;
}

CalibrationBundle calibrate_stage(const StateBundle& b, const std::vector<int>& phi, OutputDir& out) {
  const int n = b.data.n;
  auto cal = calibrate_all(b.data, phi, b.sector_ids);
  CalibrationBundle c;
  c.sector_ids = b.sector_ids;
  c.stream_order = phi;
  c.prices = b.data.p;
  c.final_demand = b.final_demand_current;
  c.economy = make_economy(cal.technologies, b.data.p0);
  c.records = std::move(cal.records);
  const auto replication = verify_replication(c.economy, b.data);
  out.write_json("calibration.json", to_json(c, replication));

  // theta and Tornqvist series in stream order
  std::string series = "position,sector_id,theta,ln_theta,tornqvist,tornqvist_level\n";
  for (int k = 0; k < n; ++k) {
    const auto& r = c.records[phi[k]];
    series += std::to_string(k) + "," + r.sector_id + "," + fmt(r.calibration.theta) + "," +
              fmt(std::log(r.calibration.theta)) + "," + fmt(r.tornqvist) + "," + fmt(std::exp(r.tornqvist)) + "\n";
  }
  out.write("theta_tornqvist.csv", series);

  // sigma by (input, sector), both in stream order; blank where no nest
  std::vector<std::vector<std::string>> cell(n, std::vector<std::string>(n));
  std::vector<double> sigmas;
  for (int j = 0; j < n; ++j) {
    const auto& t = c.economy.technologies[j];
    for (const auto& nest : t.nests) {
      cell[nest.input_index][j] = fmt(nest.sigma);
      sigmas.push_back(nest.sigma);
    }
  }
  std::string heat = "input";
  for (int k : phi) heat += "," + b.sector_ids[k];
  heat += "\n";
  for (int i : phi) {
    heat += b.sector_ids[i];
    for (int j : phi) heat += "," + cell[i][j];
    heat += "\n";
  }
  out.write("sigma_heat.csv", heat);

  // histogram on unit-quarter bins spanning the observed range
  const double width = 0.25;
  double lo = 0.0, hi = width;
  if (!sigmas.empty()) {
    lo = std::floor(*std::min_element(sigmas.begin(), sigmas.end()) / width) * width;
    hi = std::max(lo + width, std::ceil(*std::max_element(sigmas.begin(), sigmas.end()) / width) * width);
    if (hi == *std::max_element(sigmas.begin(), sigmas.end())) hi += width;
  }
  const int bins = static_cast<int>(std::lround((hi - lo) / width));
  std::vector<long> counts(bins, 0);
  for (double s : sigmas) {
    const int bin = std::clamp(static_cast<int>(std::floor((s - lo) / width)), 0, bins - 1);
    ++counts[bin];
  }
  std::string hist = "bin_lo,bin_hi,count\n";
  for (int k = 0; k < bins; ++k) {
    hist += fmt(lo + k * width) + "," + fmt(lo + (k + 1) * width) + "," + std::to_string(counts[k]) + "\n";
  }
  out.write("sigma_histogram.csv", hist);
  out.write("sigma_histogram.svg", svg_histogram("nest elasticities", lo, hi, counts));
  return c;
}

void solve_stage(const CalibrationBundle& c, const ShockScenario& z, OutputDir& out) {
  const auto p = project(c, z);
  const auto& ids = c.sector_ids;
  std::string prices = "sector_id,z,current_price,projected_price,relative_price\n";
  for (std::size_t j = 0; j < ids.size(); ++j) {
    const double pi = p.fixed_point.prices[j];
    prices += ids[j] + "," + fmt(z.z[j]) + "," + fmt(c.prices[j]) + "," + fmt(pi) + "," + fmt(pi / c.prices[j]) + "\n";
  }
  out.write("prices.csv", prices);
  out.write("coefficients_current.csv", coefficients_csv(current_state(c), ids));
  out.write("coefficients_projected.csv", coefficients_csv(p.state, ids));
  out.write_json("solve.json", {{"label", z.label},
                                {"iterations", p.fixed_point.iterations},
                                {"residual", p.fixed_point.residual},
                                {"scenario", to_json(z, ids)}});
}

json shock_stage(const CalibrationBundle& c, const ShockScenario& z, BaselineChoice which, OutputDir& out) {
  const auto& ids = c.sector_ids;
  const int focus = shocked_sector(z.z);
  const auto current = current_state(c);
  std::optional<WelfareReport> cces, leon;
  if (which != BaselineChoice::leontief) {
    const auto p = project(c, z);
    cces = welfare(current, p.state, p.fixed_point.prices, c.final_demand, focus);
  }
  if (which != BaselineChoice::cces) leon = leontief_baseline(c.economy, current, z.z, c.final_demand, focus);

  const std::string focus_id = focus >= 0 ? ids[focus] : "";
  std::string table = "state,delta_star,delta_f,final_demand_total,total_primary_input,focus_sector,gross_output,value_added\n";
  const WelfareReport& any = cces ? *cces : *leon;
  table += "current,1,0," + fmt(any.final_demand_total) + "," + fmt(any.total_primary_input) + "," + focus_id + "," +
           fmt(any.gross_output_current) + "," + fmt(any.value_added_current) + "\n";
  auto row = [&](const char* name, const WelfareReport& r) {
    table += std::string(name) + "," + fmt(r.delta_star) + "," + fmt(r.delta_f) + "," + fmt(r.final_demand_total) +
             "," + fmt(r.total_primary_input) + "," + focus_id + "," + fmt(r.gross_output_projected) + "," +
             fmt(r.value_added_projected) + "\n";
  };
  if (leon) row("projected_leontief", *leon);
  if (cces) row("projected_cces", *cces);
  out.write("welfare_table.csv", table);

  std::string prof = "position,sector_id";
  if (cces) prof += ",delta_v_cces,log_abs_cces,zero_cces";
  if (leon) prof += ",delta_v_leontief,log_abs_leontief,zero_leontief";
  prof += "\n";
  std::vector<LogAbsEntry> pc, pl;
  if (cces) pc = primary_redistribution_profile(*cces, c.stream_order);
  if (leon) pl = primary_redistribution_profile(*leon, c.stream_order);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < c.stream_order.size(); ++k) {
    const int j = c.stream_order[k];
    prof += std::to_string(k) + "," + ids[j];
    if (cces) {
      prof += "," + fmt(cces->delta_v[j]) + "," + (pc[k].zero ? "" : fmt(pc[k].value)) + "," + (pc[k].zero ? "1" : "0");
      if (!pc[k].zero) {
        xs.push_back(static_cast<double>(k));
        ys.push_back(pc[k].value);
      }
    }
    if (leon) {
      prof += "," + fmt(leon->delta_v[j]) + "," + (pl[k].zero ? "" : fmt(pl[k].value)) + "," + (pl[k].zero ? "1" : "0");
    }
    prof += "\n";
  }
  out.write("delta_v_profile.csv", prof);
  if (cces) out.write("delta_v_profile.svg", svg_curve("log |delta v| in stream order", xs, ys));

  auto summary = [&](const WelfareReport& r) {
    return json{{"delta_star", r.delta_star},
                {"delta_f", r.delta_f},
                {"delta_v_sum", r.delta_v.sum()},
                {"total_primary_input", r.total_primary_input},
                {"gross_output_projected", r.gross_output_projected},
                {"value_added_projected", r.value_added_projected}};
  };
  json j = {{"scenario", to_json(z, ids)}, {"focus_sector", focus >= 0 ? json(focus_id) : json(nullptr)}};
  if (cces) j["cces"] = summary(*cces);
  if (leon) j["leontief"] = summary(*leon);
  out.write_json("welfare.json", j);
  return j;
}

ClusterResult cluster_stage(const CalibrationBundle& c, StateKind state, const std::optional<ShockScenario>& z,
                            const Settings& s, OutputDir& out) {
  const auto& ids = c.sector_ids;
  const int n = static_cast<int>(ids.size());
  const auto st = state_for(c, state, z);
  ClusterResult r;
  r.distances = distance_matrix(net_multipliers(st.S));
  r.tree = hierarchical_cluster(r.distances, s.linkage);
  const std::string tag = short_name(state);

  out.write("distance_" + tag + ".csv", labelled_matrix_csv(r.distances.d, ids, identity_order(n)));
  out.write("heatmap_" + tag + "_original.csv", labelled_matrix_csv(r.distances.d, ids, identity_order(n)));
  out.write("heatmap_" + tag + "_stream.csv", labelled_matrix_csv(r.distances.d, ids, c.stream_order));
  std::string merges = "step,a,b,height,size\n";
  for (std::size_t k = 0; k < r.tree.merges.size(); ++k) {
    const auto& m = r.tree.merges[k];
    merges += std::to_string(k) + "," + std::to_string(m.a) + "," + std::to_string(m.b) + "," + fmt(m.height) + "," +
              std::to_string(m.size) + "\n";
  }
  out.write("merges_" + tag + ".csv", merges);
  std::string leaves = "position,sector_id\n";
  for (std::size_t k = 0; k < r.tree.leaf_order.size(); ++k) {
    leaves += std::to_string(k) + "," + ids[r.tree.leaf_order[k]] + "\n";
  }
  out.write("leaf_order_" + tag + ".csv", leaves);
  out.write("dendrogram_" + tag + ".svg",
            svg_dendrogram(std::string(ccesnet::to_string(s.linkage)) + " linkage, " + tag, r.tree, ids));
  if (!r.distances.zero_variance.empty()) {
    std::string zv = "sector_id\n";
    for (int k : r.distances.zero_variance) zv += ids[k] + "\n";
    out.write("zero_variance_" + tag + ".csv", zv);
  }
  return r;
}

json compare_stage(const CalibrationBundle& c, StateKind a, StateKind b, const std::optional<ShockScenario>& z,
                   const Settings& s, OutputDir& out) {
  const auto& ids = c.sector_ids;
  const auto ra = cluster_stage(c, a, z, s, out);
  const auto rb = cluster_stage(c, b, z, s, out);
  const auto h = distance_change_histogram(ra.distances, rb.distances, s.bins);
  const std::string tag = std::string(short_name(a)) + "_" + short_name(b);
  std::string csv = "bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    csv += fmt(h.lo + static_cast<double>(k) * h.bin_width()) + "," +
           fmt(h.lo + static_cast<double>(k + 1) * h.bin_width()) + "," + std::to_string(h.counts[k]) + "\n";
  }
  out.write("distance_change_" + tag + ".csv", csv);
  out.write("distance_change_" + tag + ".svg", svg_histogram("distance change " + tag, h.lo, h.hi, h.counts));

  // tanglegram pairing: each sector's leaf position in both dendrograms
  std::vector<int> pa(ids.size()), pb(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    pa[ra.tree.leaf_order[k]] = static_cast<int>(k);
    pb[rb.tree.leaf_order[k]] = static_cast<int>(k);
  }
  std::string tangle = "sector_id,position_" + std::string(short_name(a)) + ",position_" + short_name(b) + "\n";
  for (std::size_t j = 0; j < ids.size(); ++j) {
    tangle += ids[j] + "," + std::to_string(pa[j]) + "," + std::to_string(pb[j]) + "\n";
  }
  out.write("tanglegram_" + tag + ".csv", tangle);
  json j = {{"before", short_name(a)}, {"after", short_name(b)}, {"observations", h.observations},
            {"mean_shift", h.mean_shift}, {"bins", h.counts.size()}};
  out.write_json("distance_change_" + tag + ".json", j);
  return j;
}

}  // namespace ccesnet::cli
