#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccesnet/types.hpp"

namespace ccesnet {

inline constexpr int kPeriods = 3;

/// Three-period linked input-output tables in nominal currency units.
/// Rows of `transactions` are supplying sectors, columns are purchasing sectors.
struct LinkedTables {
  std::vector<std::string> sector_ids;
  std::array<Matrix, kPeriods> transactions;
  std::array<Vector, kPeriods> primary_input;
  std::array<Vector, kPeriods> final_demand;
  std::array<Vector, kPeriods> deflators;
  std::array<double, kPeriods> primary_deflator{1.0, 1.0, 1.0};

  int size() const { return static_cast<int>(sector_ids.size()); }
};

struct IoConfig {
  std::array<double, 2> split{0.25, 0.75};
  double balance_tol = 1e-6;
  std::optional<double> p0;
};

/// Observed cost shares and prices of the reference and current states.
/// Row 0 of A and B holds the primary-input shares, rows 1..n the
/// intermediate shares; reference prices are all 1.
struct TwoStateData {
  int n = 0;
  Matrix A;
  Matrix B;
  Vector p;
  double p0 = 1.0;
};

/// Binary incidence pattern of a transactions matrix. K counts off-diagonal ones.
class IncidenceMatrix {
 public:
  IncidenceMatrix() = default;
  explicit IncidenceMatrix(int n) : n_(n), u_(static_cast<std::size_t>(n) * n, 0) {}

  int size() const { return n_; }
  std::uint8_t operator()(int i, int j) const { return u_[index(i, j)]; }
  void set(int i, int j, bool value);
  long off_diagonal_count() const { return k_; }

  long row_sum(int i) const;
  long col_sum(int j) const;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  int n_ = 0;
  long k_ = 0;
  std::vector<std::uint8_t> u_;
};

/// One merged (two-period average) state in nominal units.
struct MergedState {
  Matrix transactions;
  Vector primary_input;
  Vector final_demand;
  Vector deflators;
  double primary_deflator = 1.0;
};

struct MergedStates {
  MergedState reference;
  MergedState current;
};

// Parsing of the CSV interchange formats. The stream overloads exist so the
// schema can be exercised without touching the filesystem.
struct TransactionsBlock {
  std::vector<std::string> sector_ids;
  Matrix transactions;
  Vector primary_input;
  Vector final_demand;
};

std::vector<std::pair<int, TransactionsBlock>> parse_transactions_csv(std::istream& in,
                                                                      const std::string& source);
void parse_deflators_csv(std::istream& in, const std::string& source, LinkedTables& tables);
IoConfig parse_io_config(std::istream& in);

/// Reads `transactions_T0.csv`..`transactions_T2.csv` (or a single
/// `transactions.csv` with a leading `period` column) and `deflators.csv`
/// from `dir`, then validates.
LinkedTables load_linked_tables(const std::filesystem::path& dir, const IoConfig& config);

/// Throws on dimension mismatch, negative entries, nonpositive deflators, or a
/// row/column balance gap above `balance_tol` (relative).
void validate(const LinkedTables& tables, double balance_tol);

void write_linked_tables(const LinkedTables& tables, const std::filesystem::path& dir);

MergedStates merge_states(const LinkedTables& tables, std::array<double, 2> split = {0.25, 0.75});

/// Nominal merged states to observed shares. `p0` defaults to the ratio of the
/// merged primary deflators.
TwoStateData to_two_state(const MergedStates& merged, std::optional<double> p0 = std::nullopt);

IncidenceMatrix incidence(const Matrix& transactions);

/// Structural checks on TwoStateData (column sums, share range, matching
/// incidence, positive prices). Throws on failure.
void validate(const TwoStateData& data, double tol = 1e-10);

}  // namespace ccesnet
