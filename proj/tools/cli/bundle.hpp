#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccesnet/cces.hpp"
#include "ccesnet/equilibrium.hpp"
#include "ccesnet/io_data.hpp"
#include "ccesnet/propagation.hpp"
#include "ccesnet/triangulate.hpp"

namespace ccesnet::cli {

// two_state.json: ingested share tables, prices and final demand.
struct StateBundle {
  std::vector<std::string> sector_ids;
  TwoStateData data;
  Vector final_demand_reference;
  Vector final_demand_current;
};

// calibration.json: everything needed to solve, shock and cluster.
struct CalibrationBundle {
  std::vector<std::string> sector_ids;
  std::vector<int> stream_order;
  Vector prices;
  Vector final_demand;
  Economy economy;
  std::vector<SectorRecord> records;
};

nlohmann::json read_json(const std::filesystem::path& path);

nlohmann::json to_json(const StateBundle& b);
StateBundle state_bundle_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StreamOrder& s, const std::vector<std::string>& ids);
// Sector positions from a stream-order JSON.
std::vector<int> stream_order_from_json(const nlohmann::json& j, const std::vector<std::string>& ids);

nlohmann::json to_json(const CalibrationBundle& b, const ReplicationReport& replication);
CalibrationBundle calibration_bundle_from_json(const nlohmann::json& j);

// {"label": "...", "z": {"<sector_id>": value}}; unlisted sectors get 1.
ShockScenario scenario_from_json(const nlohmann::json& j, const std::vector<std::string>& ids);
nlohmann::json to_json(const ShockScenario& s, const std::vector<std::string>& ids);

int sector_index(const std::vector<std::string>& ids, const std::string& id);

}  // namespace ccesnet::cli
