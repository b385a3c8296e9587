#include "ccesnet/io_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ccesnet/error.hpp"
#include "text_util.hpp"

namespace ccesnet {
namespace {

constexpr const char* kModule = "io_data";
constexpr const char* kPrimaryLabel = "primary";
constexpr const char* kFinalDemandLabel = "final_demand";

[[noreturn]] void fail(ErrorCode code, const std::string& message, ErrorContext context = {}) {
  throw Error(code, kModule, message, std::move(context));
}

int parse_period(std::string_view label, const std::string& source) {
  auto s = detail::trim(label);
  if (!s.empty() && (s.front() == 'T' || s.front() == 't')) s.remove_prefix(1);
  auto v = detail::parse_double(s);
  if (!v || *v != std::floor(*v) || *v < 0 || *v >= kPeriods) {
    fail(ErrorCode::parse, "unrecognised period label '" + std::string(label) + "'",
         {{"source", source}});
  }
  return static_cast<int>(*v);
}

double parse_cell(const std::string& text, const std::string& source, const std::string& row,
                  const std::string& column) {
  if (text.empty()) return 0.0;
  auto v = detail::parse_double(text);
  if (!v) {
    fail(ErrorCode::parse, "non-numeric cell '" + text + "'",
         {{"source", source}, {"row", row}, {"column", column}});
  }
  return *v;
}

std::string period_name(int t) { return "T" + std::to_string(t); }

}  // namespace

void IncidenceMatrix::set(int i, int j, bool value) {
  auto& cell = u_[index(i, j)];
  const std::uint8_t next = value ? 1 : 0;
  if (i != j) k_ += static_cast<long>(next) - static_cast<long>(cell);
  cell = next;
}

long IncidenceMatrix::row_sum(int i) const {
  long s = 0;
  for (int j = 0; j < n_; ++j) s += u_[index(i, j)];
  return s;
}

long IncidenceMatrix::col_sum(int j) const {
  long s = 0;
  for (int i = 0; i < n_; ++i) s += u_[index(i, j)];
  return s;
}

std::vector<std::pair<int, TransactionsBlock>> parse_transactions_csv(std::istream& in,
                                                                      const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::parse, "empty transactions file", {{"source", source}});
  auto header = detail::split_csv_line(line);
  const bool with_period = !header.empty() && header.front() == "period";
  const std::size_t offset = with_period ? 1 : 0;
  if (header.size() < offset + 2 || header[offset] != "sector" || header.back() != kFinalDemandLabel) {
    fail(ErrorCode::parse, "transactions header must read 'sector,<ids...>,final_demand'",
         {{"source", source}});
  }
  std::vector<std::string> ids(header.begin() + static_cast<long>(offset) + 1, header.end() - 1);
  const int n = static_cast<int>(ids.size());
  std::map<std::string, int> position;
  for (int i = 0; i < n; ++i) {
    if (!position.emplace(ids[i], i).second) {
      fail(ErrorCode::parse, "duplicate sector id '" + ids[i] + "'", {{"source", source}});
    }
  }

  struct Partial {
    TransactionsBlock block;
    std::vector<bool> seen;
    bool primary_seen = false;
  };
  std::map<int, Partial> blocks;
  auto block_for = [&](int period) -> Partial& {
    auto it = blocks.find(period);
    if (it == blocks.end()) {
      Partial p;
      p.block.sector_ids = ids;
      p.block.transactions = Matrix::Zero(n, n);
      p.block.primary_input = Vector::Zero(n);
      p.block.final_demand = Vector::Zero(n);
      p.seen.assign(n, false);
      it = blocks.emplace(period, std::move(p)).first;
    }
    return it->second;
  };

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::dimension_mismatch,
           "row has " + std::to_string(cells.size()) + " cells, header has " +
               std::to_string(header.size()),
           {{"source", source}, {"line", std::to_string(line_no)}});
    }
    const int period = with_period ? parse_period(cells[0], source) : 0;
    auto& part = block_for(period);
    const std::string& label = cells[offset];
    if (label == kPrimaryLabel) {
      if (part.primary_seen) fail(ErrorCode::parse, "duplicate primary row", {{"source", source}});
      part.primary_seen = true;
      for (int j = 0; j < n; ++j) {
        part.block.primary_input[j] = parse_cell(cells[offset + 1 + j], source, label, ids[j]);
      }
      continue;
    }
    auto it = position.find(label);
    if (it == position.end()) {
      fail(ErrorCode::parse, "row label '" + label + "' is not a header sector",
           {{"source", source}, {"line", std::to_string(line_no)}});
    }
    const int i = it->second;
    if (part.seen[i]) fail(ErrorCode::parse, "duplicate row '" + label + "'", {{"source", source}});
    part.seen[i] = true;
    for (int j = 0; j < n; ++j) {
      part.block.transactions(i, j) = parse_cell(cells[offset + 1 + j], source, label, ids[j]);
    }
    part.block.final_demand[i] = parse_cell(cells.back(), source, label, kFinalDemandLabel);
  }

  std::vector<std::pair<int, TransactionsBlock>> out;
  for (auto& [period, part] : blocks) {
    for (int i = 0; i < n; ++i) {
      if (!part.seen[i]) {
        fail(ErrorCode::dimension_mismatch, "missing row for sector '" + ids[i] + "'",
             {{"source", source}, {"period", period_name(period)}});
      }
    }
    if (!part.primary_seen) {
      fail(ErrorCode::dimension_mismatch, "missing primary row",
           {{"source", source}, {"period", period_name(period)}});
    }
    out.emplace_back(period, std::move(part.block));
  }
  return out;
}

void parse_deflators_csv(std::istream& in, const std::string& source, LinkedTables& tables) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::parse, "empty deflators file", {{"source", source}});
  auto header = detail::split_csv_line(line);
  if (header != std::vector<std::string>{"sector_id", "period", "deflator"}) {
    fail(ErrorCode::parse, "deflators header must read 'sector_id,period,deflator'",
         {{"source", source}});
  }
  const int n = tables.size();
  std::map<std::string, int> position;
  for (int i = 0; i < n; ++i) position.emplace(tables.sector_ids[i], i);
  std::array<std::vector<bool>, kPeriods> seen;
  std::array<bool, kPeriods> primary_seen{};
  for (int t = 0; t < kPeriods; ++t) {
    tables.deflators[t] = Vector::Constant(n, std::nan(""));
    seen[t].assign(n, false);
  }
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != 3) fail(ErrorCode::parse, "deflator row needs 3 cells", {{"source", source}});
    const int t = parse_period(cells[1], source);
    const double value = parse_cell(cells[2], source, cells[0], "deflator");
    if (cells[0] == kPrimaryLabel) {
      tables.primary_deflator[t] = value;
      primary_seen[t] = true;
      continue;
    }
    auto it = position.find(cells[0]);
    if (it == position.end()) {
      fail(ErrorCode::parse, "deflator for unknown sector '" + cells[0] + "'", {{"source", source}});
    }
    tables.deflators[t][it->second] = value;
    seen[t][it->second] = true;
  }
  for (int t = 0; t < kPeriods; ++t) {
    for (int i = 0; i < n; ++i) {
      if (!seen[t][i]) {
        fail(ErrorCode::dimension_mismatch, "missing deflator",
             {{"sector", tables.sector_ids[i]}, {"period", period_name(t)}});
      }
    }
    if (!primary_seen[t]) {
      fail(ErrorCode::dimension_mismatch, "missing primary deflator", {{"period", period_name(t)}});
    }
  }
}

IoConfig parse_io_config(std::istream& in) {
  IoConfig cfg;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("config is not valid JSON: ") + e.what());
  }
  if (j.contains("split")) {
    auto s = j.at("split").get<std::vector<double>>();
    if (s.size() != 2) fail(ErrorCode::invalid_argument, "split must have two entries");
    cfg.split = {s[0], s[1]};
  }
  if (j.contains("balance_tol")) cfg.balance_tol = j.at("balance_tol").get<double>();
  if (j.contains("p0") && !j.at("p0").is_null()) cfg.p0 = j.at("p0").get<double>();
  return cfg;
}

void validate(const LinkedTables& tables, double balance_tol) {
  const int n = tables.size();
  for (int t = 0; t < kPeriods; ++t) {
    const auto period = period_name(t);
    if (tables.transactions[t].rows() != n || tables.transactions[t].cols() != n ||
        tables.primary_input[t].size() != n || tables.final_demand[t].size() != n ||
        tables.deflators[t].size() != n) {
      fail(ErrorCode::dimension_mismatch, "period tables do not share dimension n=" + std::to_string(n),
           {{"period", period}});
    }
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (tables.transactions[t](i, j) < 0.0) {
          fail(ErrorCode::negative_value, "negative transaction",
               {{"row", tables.sector_ids[i]}, {"column", tables.sector_ids[j]}, {"period", period}});
        }
      }
      if (tables.primary_input[t][j] < 0.0) {
        fail(ErrorCode::negative_value, "negative primary input",
             {{"column", tables.sector_ids[j]}, {"period", period}});
      }
      if (tables.final_demand[t][j] < 0.0) {
        fail(ErrorCode::negative_value, "negative final demand",
             {{"row", tables.sector_ids[j]}, {"period", period}});
      }
      if (!(tables.deflators[t][j] > 0.0)) {
        fail(ErrorCode::nonpositive_price, "nonpositive deflator",
             {{"sector", tables.sector_ids[j]}, {"period", period}});
      }
    }
    if (!(tables.primary_deflator[t] > 0.0)) {
      fail(ErrorCode::nonpositive_price, "nonpositive primary deflator", {{"period", period}});
    }
    const Vector column_total =
        tables.transactions[t].colwise().sum().transpose() + tables.primary_input[t];
    const Vector row_total = tables.transactions[t].rowwise().sum() + tables.final_demand[t];
    for (int j = 0; j < n; ++j) {
      const double scale = std::max({column_total[j], row_total[j], 1e-300});
      const double gap = std::abs(column_total[j] - row_total[j]) / scale;
      if (gap > balance_tol) {
        fail(ErrorCode::balance_violation, "column total differs from row total",
             {{"sector", tables.sector_ids[j]},
              {"period", period},
              {"relative_gap", detail::format_double(gap)}});
      }
    }
  }
}

LinkedTables load_linked_tables(const std::filesystem::path& dir, const IoConfig& config) {
  LinkedTables tables;
  std::array<bool, kPeriods> have{};
  auto absorb = [&](std::vector<std::pair<int, TransactionsBlock>> blocks, const std::string& source) {
    for (auto& [period, block] : blocks) {
      if (have[period]) fail(ErrorCode::parse, "period given twice", {{"source", source}});
      if (tables.sector_ids.empty()) {
        tables.sector_ids = block.sector_ids;
      } else if (tables.sector_ids != block.sector_ids) {
        fail(ErrorCode::dimension_mismatch, "sector ids differ between periods",
             {{"source", source}, {"period", period_name(period)}});
      }
      tables.transactions[period] = std::move(block.transactions);
      tables.primary_input[period] = std::move(block.primary_input);
      tables.final_demand[period] = std::move(block.final_demand);
      have[period] = true;
    }
  };

  const auto single = dir / "transactions.csv";
  if (std::filesystem::exists(single)) {
    std::ifstream in(single);
    absorb(parse_transactions_csv(in, single.string()), single.string());
  } else {
    for (int t = 0; t < kPeriods; ++t) {
      const auto path = dir / ("transactions_" + period_name(t) + ".csv");
      std::ifstream in(path);
      if (!in) fail(ErrorCode::io, "cannot open " + path.string());
      auto blocks = parse_transactions_csv(in, path.string());
      if (blocks.size() != 1) fail(ErrorCode::parse, "expected one period", {{"source", path.string()}});
      blocks.front().first = t;
      absorb(std::move(blocks), path.string());
    }
  }
  for (int t = 0; t < kPeriods; ++t) {
    if (!have[t]) fail(ErrorCode::dimension_mismatch, "missing period", {{"period", period_name(t)}});
  }

  const auto defl = dir / "deflators.csv";
  std::ifstream din(defl);
  if (!din) fail(ErrorCode::io, "cannot open " + defl.string());
  parse_deflators_csv(din, defl.string(), tables);
  validate(tables, config.balance_tol);
  return tables;
}

void write_linked_tables(const LinkedTables& tables, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const int n = tables.size();
  for (int t = 0; t < kPeriods; ++t) {
    const auto path = dir / ("transactions_" + period_name(t) + ".csv");
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << "sector";
    for (const auto& id : tables.sector_ids) out << ',' << id;
    out << ',' << kFinalDemandLabel << '\n';
    for (int i = 0; i < n; ++i) {
      out << tables.sector_ids[i];
      for (int j = 0; j < n; ++j) out << ',' << detail::format_double(tables.transactions[t](i, j));
      out << ',' << detail::format_double(tables.final_demand[t][i]) << '\n';
    }
    out << kPrimaryLabel;
    for (int j = 0; j < n; ++j) out << ',' << detail::format_double(tables.primary_input[t][j]);
    out << ",\n";
  }
  const auto path = dir / "deflators.csv";
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << "sector_id,period,deflator\n";
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < kPeriods; ++t) {
      out << tables.sector_ids[i] << ',' << period_name(t) << ','
          << detail::format_double(tables.deflators[t][i]) << '\n';
    }
  }
  for (int t = 0; t < kPeriods; ++t) {
    out << kPrimaryLabel << ',' << period_name(t) << ','
        << detail::format_double(tables.primary_deflator[t]) << '\n';
  }
}

namespace {

// (0,0,x) -> (s1 x, s2 x) and (x,0,0) -> (s2 x, s1 x); everything else is a
// plain pairwise mean.
void merge_cell(double x0, double x1, double x2, const std::array<double, 2>& split, double& ref,
                double& cur) {
  if (x0 == 0.0 && x1 == 0.0 && x2 != 0.0) {
    ref = split[0] * x2;
    cur = split[1] * x2;
  } else if (x0 != 0.0 && x1 == 0.0 && x2 == 0.0) {
    ref = split[1] * x0;
    cur = split[0] * x0;
  } else {
    ref = 0.5 * (x0 + x1);
    cur = 0.5 * (x1 + x2);
  }
}

}  // namespace

MergedStates merge_states(const LinkedTables& tables, std::array<double, 2> split) {
  if (split[0] < 0.0 || split[1] < 0.0 || std::abs(split[0] + split[1] - 1.0) > 1e-12) {
    fail(ErrorCode::invalid_argument, "split fractions must be nonnegative and sum to 1");
  }
  const int n = tables.size();
  MergedStates m;
  auto init = [n](MergedState& s) {
    s.transactions = Matrix::Zero(n, n);
    s.primary_input = Vector::Zero(n);
    s.final_demand = Vector::Zero(n);
    s.deflators = Vector::Zero(n);
  };
  init(m.reference);
  init(m.current);
  const auto& X = tables.transactions;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      merge_cell(X[0](i, j), X[1](i, j), X[2](i, j), split, m.reference.transactions(i, j),
                 m.current.transactions(i, j));
    }
    merge_cell(tables.primary_input[0][j], tables.primary_input[1][j], tables.primary_input[2][j],
               split, m.reference.primary_input[j], m.current.primary_input[j]);
  }
  m.reference.final_demand = 0.5 * (tables.final_demand[0] + tables.final_demand[1]);
  m.current.final_demand = 0.5 * (tables.final_demand[1] + tables.final_demand[2]);
  m.reference.deflators = 0.5 * (tables.deflators[0] + tables.deflators[1]);
  m.current.deflators = 0.5 * (tables.deflators[1] + tables.deflators[2]);
  m.reference.primary_deflator = 0.5 * (tables.primary_deflator[0] + tables.primary_deflator[1]);
  m.current.primary_deflator = 0.5 * (tables.primary_deflator[1] + tables.primary_deflator[2]);
  return m;
}

TwoStateData to_two_state(const MergedStates& merged, std::optional<double> p0) {
  const auto& ref = merged.reference;
  const auto& cur = merged.current;
  const int n = static_cast<int>(ref.transactions.cols());
  if (cur.transactions.rows() != n || cur.transactions.cols() != n || ref.transactions.rows() != n) {
    fail(ErrorCode::dimension_mismatch, "reference and current tables differ in size");
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if ((ref.transactions(i, j) != 0.0) != (cur.transactions(i, j) != 0.0)) {
        fail(ErrorCode::dimension_mismatch, "reference and current incidence differ",
             {{"row", std::to_string(i)}, {"column", std::to_string(j)}});
      }
    }
    if ((ref.primary_input[j] != 0.0) != (cur.primary_input[j] != 0.0)) {
      fail(ErrorCode::dimension_mismatch, "primary input incidence differs",
           {{"column", std::to_string(j)}});
    }
  }

  auto shares = [n](const MergedState& s, const char* state) {
    Matrix out(n + 1, n);
    for (int j = 0; j < n; ++j) {
      out(0, j) = s.primary_input[j];
      out.col(j).tail(n) = s.transactions.col(j);
      const double total = out.col(j).sum();
      if (!(total > 0.0)) {
        fail(ErrorCode::zero_column, "sector has no inputs",
             {{"column", std::to_string(j)}, {"state", state}});
      }
      out.col(j) /= total;
      // absorb the last rounding ulp so the column sums to exactly 1
      const double drift = out.col(j).sum() - 1.0;
      Eigen::Index largest = 0;
      out.col(j).maxCoeff(&largest);
      out(largest, j) -= drift;
    }
    return out;
  };

  TwoStateData data;
  data.n = n;
  data.A = shares(ref, "reference");
  data.B = shares(cur, "current");
  data.p = cur.deflators.cwiseQuotient(ref.deflators);
  data.p0 = p0 ? *p0 : cur.primary_deflator / ref.primary_deflator;
  return data;
}

IncidenceMatrix incidence(const Matrix& transactions) {
  if (transactions.rows() != transactions.cols()) {
    fail(ErrorCode::dimension_mismatch, "incidence requires a square matrix");
  }
  const int n = static_cast<int>(transactions.rows());
  IncidenceMatrix u(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) u.set(i, j, transactions(i, j) != 0.0);
  }
  return u;
}

void validate(const TwoStateData& data, double tol) {
  const int n = data.n;
  if (data.A.rows() != n + 1 || data.A.cols() != n || data.B.rows() != n + 1 ||
      data.B.cols() != n || data.p.size() != n) {
    fail(ErrorCode::dimension_mismatch, "two-state data has inconsistent dimensions");
  }
  if (!(data.p0 > 0.0)) fail(ErrorCode::nonpositive_price, "p0 must be positive");
  for (int j = 0; j < n; ++j) {
    if (!(data.p[j] > 0.0)) {
      fail(ErrorCode::nonpositive_price, "current price must be positive",
           {{"sector", std::to_string(j)}});
    }
    for (const Matrix* M : {&data.A, &data.B}) {
      if (std::abs(M->col(j).sum() - 1.0) > tol) {
        fail(ErrorCode::invalid_argument, "share column does not sum to 1",
             {{"sector", std::to_string(j)}});
      }
      if (M->col(j).minCoeff() < 0.0 || M->col(j).maxCoeff() > 1.0) {
        fail(ErrorCode::invalid_argument, "share outside [0,1]", {{"sector", std::to_string(j)}});
      }
    }
    for (int i = 0; i <= n; ++i) {
      if ((data.A(i, j) != 0.0) != (data.B(i, j) != 0.0)) {
        fail(ErrorCode::invalid_argument, "reference and current share patterns differ",
             {{"row", std::to_string(i)}, {"sector", std::to_string(j)}});
      }
    }
  }
}

}  // namespace ccesnet
