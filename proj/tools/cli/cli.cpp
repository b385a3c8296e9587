#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "ccesnet/error.hpp"
#include "ccesnet/version.hpp"
#include "commands.hpp"

namespace ccesnet::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_manifest(OutputDir& out, const std::string& subcommand, const std::vector<fs::path>& inputs,
                    const Settings& settings, const std::string& started) {
  json in = json::array();
  for (const auto& p : inputs) {
    json entry = {{"path", p.string()}};
    if (fs::is_regular_file(p)) entry["sha256"] = sha256_hex(file_bytes(p));
    in.push_back(entry);
  }
  json outputs = json::array();
  for (const auto& name : out.files()) {
    const auto bytes = file_bytes(out.root() / name);
    outputs.push_back({{"file", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  }
  const json config = settings.to_json();
  json m = {{"subcommand", subcommand},
            {"version", kVersion},
            {"inputs", in},
            {"config", config},
            {"config_digest", sha256_hex(config.dump())},
            {"threads", omp_get_max_threads()},
            {"timestamps", {{"started", started}, {"finished", utc_timestamp()}}},
            {"outputs", outputs}};
  out.write_json("manifest.json", m);
}

json error_json(const std::string& code, const std::string& module, const std::string& message,
                const ErrorContext& context = {}) {
  json ctx = json::object();
  for (const auto& [k, v] : context) ctx[k] = v;
  return {{"code", code}, {"module", module}, {"message", message}, {"context", ctx}};
}

void add_data_inputs(std::vector<fs::path>& inputs, const fs::path& dir) {
  if (fs::exists(dir / "transactions.csv")) {
    inputs.push_back(dir / "transactions.csv");
  } else {
    for (int t = 0; t < kPeriods; ++t) inputs.push_back(dir / ("transactions_T" + std::to_string(t) + ".csv"));
  }
  inputs.push_back(dir / "deflators.csv");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cascaded CES production networks: calibration, equilibrium and propagation", "ccesnet"};
  app.set_version_flag("--version", std::string("ccesnet ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = "out";
  std::string config_path;
  int threads = 0;
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--config", config_path, "JSON settings file")->check(CLI::ExistingFile);
  app.add_option("--threads", threads, "Worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->set_version_flag("--version", std::string("ccesnet ") + kVersion);
    return s;
  };

  SynthOptions synth;
  auto* c_synth = sub("synth", "Generate a synthetic two-state economy as linked tables");
  c_synth->add_option("--n", synth.generator.n, "Number of sectors")->capture_default_str();
  c_synth->add_option("--seed", synth.generator.seed, "Random seed")->capture_default_str();
  c_synth->add_option("--density", synth.generator.density, "Incidence probability")->capture_default_str();
  c_synth->add_option("--triangular-bias", synth.generator.triangular_bias, "Strictness of the hidden order")
      ->capture_default_str();
  c_synth->add_option("--fixture", synth.fixture, "Write a bundled fixture instead")
      ->check(CLI::IsMember({"two-input"}));

  std::string data_dir;
  auto* c_ingest = sub("ingest", "Merge three-period linked tables into two states");
  c_ingest->add_option("--data", data_dir, "Directory with transactions and deflators CSVs")->required();

  std::string input;
  std::optional<double> gmin, gmax, gstep;
  auto* c_tri = sub("triangulate", "Find the stream order");
  c_tri->add_option("--input", input, "two_state.json")->required()->check(CLI::ExistingFile);
  c_tri->add_option("--gamma-min", gmin, "Smallest gamma (default 0)");
  c_tri->add_option("--gamma-max", gmax, "Largest gamma (default 3)");
  c_tri->add_option("--gamma-step", gstep, "Gamma step (default 0.01)");

  std::string order_path;
  auto* c_cal = sub("calibrate", "Calibrate elasticities and productivity for every sector");
  c_cal->add_option("--input", input, "two_state.json")->required()->check(CLI::ExistingFile);
  c_cal->add_option("--order", order_path, "stream_order.json (computed if omitted)")->check(CLI::ExistingFile);

  std::string economy_path, scenario_path;
  auto* c_solve = sub("solve", "Solve equilibrium prices under a productivity shock");
  c_solve->add_option("--economy", economy_path, "calibration.json")->required()->check(CLI::ExistingFile);
  c_solve->add_option("--shock", scenario_path, "Shock JSON (default: no shock)")->check(CLI::ExistingFile);

  std::string baseline = "both";
  auto* c_shock = sub("shock", "Welfare accounting for a shock scenario");
  c_shock->add_option("--economy", economy_path, "calibration.json")->required()->check(CLI::ExistingFile);
  c_shock->add_option("--scenario", scenario_path, "Shock JSON")->required()->check(CLI::ExistingFile);
  c_shock->add_option("--baseline", baseline, "both, cces or leontief")
      ->capture_default_str()
      ->check(CLI::IsMember({"both", "cces", "leontief"}));

  std::string state = "cur", linkage;
  std::vector<std::string> compare;
  std::optional<int> bins;
  auto* c_cluster = sub("cluster", "Multiplier distances and hierarchical clustering");
  c_cluster->add_option("--economy", economy_path, "calibration.json")->required()->check(CLI::ExistingFile);
  c_cluster->add_option("--state", state, "ref, cur or proj")->capture_default_str();
  c_cluster->add_option("--scenario", scenario_path, "Shock JSON for the projected state")
      ->check(CLI::ExistingFile);
  c_cluster->add_option("--compare", compare, "Two states: histogram of distance changes")->expected(2);
  c_cluster->add_option("--linkage", linkage, "average, complete or single");
  c_cluster->add_option("--bins", bins, "Histogram bins (default 41)");

  auto* c_report = sub("report", "Run the full pipeline and write every table and figure");
  c_report->add_option("--data", data_dir, "Directory with transactions and deflators CSVs")->required();
  c_report->add_option("--scenario", scenario_path, "Shock JSON (default: 10% mid-stream shock)")
      ->check(CLI::ExistingFile);
  c_report->add_option("--linkage", linkage, "average, complete or single");
  c_report->add_option("--gamma-step", gstep, "Gamma step (default 0.01)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& v) {
    out << v.what() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    // subcommand --help is reported through the subcommand
    if (e.get_name() == "CallForHelp") {
      out << e.what();
      return 0;
    }
    err << error_json("usage", "cli", e.what()).dump() << "\n";
    return kExitUsage;
  }

  const std::string started = utc_timestamp();
  try {
    Settings settings;
    std::vector<fs::path> inputs;
    if (!config_path.empty()) {
      settings.merge(read_json(config_path));
      inputs.push_back(config_path);
    }
    if (threads > 0) settings.threads = threads;
    if (gmin) settings.grid.min = *gmin;
    if (gmax) settings.grid.max = *gmax;
    if (gstep) settings.grid.step = *gstep;
    if (!linkage.empty()) settings.linkage = parse_linkage(linkage);
    if (bins) settings.bins = *bins;
    if (settings.threads > 0) omp_set_num_threads(settings.threads);

    OutputDir dir(out_dir);
    auto* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();

    auto load_calibration = [&] {
      inputs.push_back(economy_path);
      return calibration_bundle_from_json(read_json(economy_path));
    };
    auto load_scenario = [&](const CalibrationBundle& c) -> std::optional<ShockScenario> {
      if (scenario_path.empty()) return std::nullopt;
      inputs.push_back(scenario_path);
      return scenario_from_json(read_json(scenario_path), c.sector_ids);
    };

    if (name == "synth") {
      synth_stage(synth, dir);
    } else if (name == "ingest") {
      add_data_inputs(inputs, data_dir);
      ingest_stage(data_dir, settings, dir);
    } else if (name == "triangulate") {
      inputs.push_back(input);
      triangulate_stage(state_bundle_from_json(read_json(input)), settings, dir);
    } else if (name == "calibrate") {
      inputs.push_back(input);
      const auto b = state_bundle_from_json(read_json(input));
      std::vector<int> phi;
      if (order_path.empty()) {
        phi = stream_order(incidence(b.data.A.bottomRows(b.data.n)), settings.grid.values()).phi;
      } else {
        inputs.push_back(order_path);
        phi = stream_order_from_json(read_json(order_path), b.sector_ids);
      }
      calibrate_stage(b, phi, dir);
    } else if (name == "solve") {
      const auto c = load_calibration();
      auto z = load_scenario(c);
      solve_stage(c, z ? *z : ShockScenario{Vector::Ones(c.economy.size()), "unit"}, dir);
    } else if (name == "shock") {
      const auto c = load_calibration();
      shock_stage(c, *load_scenario(c), parse_baseline(baseline), dir);
    } else if (name == "cluster") {
      const auto c = load_calibration();
      const auto z = load_scenario(c);
      if (!compare.empty()) {
        compare_stage(c, parse_state(compare[0]), parse_state(compare[1]), z, settings, dir);
      } else {
        cluster_stage(c, parse_state(state), z, settings, dir);
      }
    } else if (name == "report") {
      add_data_inputs(inputs, data_dir);
      const auto b = ingest_stage(data_dir, settings, dir);
      const auto order = triangulate_stage(b, settings, dir);
      const auto c = calibrate_stage(b, order.phi, dir);
      ShockScenario z;
      if (!scenario_path.empty()) {
        inputs.push_back(scenario_path);
        z = scenario_from_json(read_json(scenario_path), c.sector_ids);
      } else {
        z = midstream_scenario(c.sector_ids, c.stream_order);
      }
      dir.write_json("scenario.json", to_json(z, c.sector_ids));
      solve_stage(c, z, dir);
      const auto welfare = shock_stage(c, z, BaselineChoice::both, dir);
      const auto ref_cur = compare_stage(c, StateKind::reference, StateKind::current, z, settings, dir);
      const auto cur_proj = compare_stage(c, StateKind::current, StateKind::projected, z, settings, dir);
      const auto cal = read_json(dir.root() / "calibration.json");
      dir.write_json("report.json", {{"sectors", c.sector_ids.size()},
                                     {"stream_order", {{"gamma_star", order.gamma_star}, {"linearity", order.linearity}}},
                                     {"replication", cal.at("replication")},
                                     {"welfare", welfare},
                                     {"distance_change", {ref_cur, cur_proj}}});
    }
    write_manifest(dir, name, inputs, settings, started);
    out << json{{"subcommand", name}, {"out", dir.root().string()}, {"files", dir.files().size()}}.dump() << "\n";
    return 0;
  } catch (const Error& e) {
    err << error_json(to_string(e.code()), e.module(), e.what(), e.context()).dump() << "\n";
    return static_cast<int>(e.code());
  } catch (const json::exception& e) {
    err << error_json(to_string(ErrorCode::parse), "cli", e.what()).dump() << "\n";
    return static_cast<int>(ErrorCode::parse);
  } catch (const fs::filesystem_error& e) {
    err << error_json(to_string(ErrorCode::io), "cli", e.what(), {{"path", e.path1().string()}}).dump() << "\n";
    return static_cast<int>(ErrorCode::io);
  } catch (const std::exception& e) {
    err << error_json("internal", "cli", e.what()).dump() << "\n";
    return kExitInternal;
  }
}

}  // namespace ccesnet::cli
