#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccesnet/types.hpp"

namespace ccesnet::cli {

// Output directory that records every file it writes, for the run manifest.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::json& j);
  // Registers a file that was written into the directory by other code.
  void adopt(const std::string& name);
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

std::string sha256_hex(const std::string& bytes);

std::string fmt(double x);

// CSV of a square matrix with sector labels on both axes; `order` selects and
// orders rows and columns.
std::string labelled_matrix_csv(const Matrix& m, const std::vector<std::string>& ids,
                                const std::vector<int>& order, const std::string& corner = "sector_id");

std::string utc_timestamp();

}  // namespace ccesnet::cli
