#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bundle.hpp"
#include "ccesnet/netanalysis.hpp"
#include "ccesnet/synthetic.hpp"
#include "output.hpp"

namespace ccesnet::cli {

// Effective settings after merging defaults, the --config file and flags.
struct Settings {
  IoConfig io;
  GammaGrid grid;
  Linkage linkage = Linkage::average;
  int bins = 41;
  int threads = 0;

  nlohmann::json to_json() const;
  void merge(const nlohmann::json& j);
};

enum class StateKind { reference, current, projected };
StateKind parse_state(const std::string& s);
const char* short_name(StateKind k);

struct SynthOptions {
  GeneratorConfig generator;
  std::string fixture;
};

void synth_stage(const SynthOptions& opt, OutputDir& out);
StateBundle ingest_stage(const std::filesystem::path& data_dir, const Settings& s, OutputDir& out);
StreamOrder triangulate_stage(const StateBundle& b, const Settings& s, OutputDir& out);
CalibrationBundle calibrate_stage(const StateBundle& b, const std::vector<int>& phi, OutputDir& out);
void solve_stage(const CalibrationBundle& c, const ShockScenario& z, OutputDir& out);

enum class BaselineChoice { both, cces, leontief };
BaselineChoice parse_baseline(const std::string& s);
nlohmann::json shock_stage(const CalibrationBundle& c, const ShockScenario& z, BaselineChoice which, OutputDir& out);

struct ClusterResult {
  DistanceMatrix distances;
  Dendrogram tree;
};
ClusterResult cluster_stage(const CalibrationBundle& c, StateKind state, const std::optional<ShockScenario>& z,
                            const Settings& s, OutputDir& out);
nlohmann::json compare_stage(const CalibrationBundle& c, StateKind a, StateKind b,
                             const std::optional<ShockScenario>& z, const Settings& s, OutputDir& out);

// 10% productivity gain for the sector in the middle of the stream order.
ShockScenario midstream_scenario(const std::vector<std::string>& ids, const std::vector<int>& phi);

}  // namespace ccesnet::cli
