#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace hpk::report {

// 17 significant digits, '.' decimal separator regardless of locale.
std::string fmt(double v);

// "# runspec: {...}" line, header row, then rows.
std::string csv_with_runspec(const nlohmann::json& runspec, const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows);

// Writes content, creating parent directories.
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// Sorted keys (nlohmann default object ordering), two-space indent.
std::string dump_json(const nlohmann::json& j);

struct Cell {
  nlohmann::json inputs;
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
  bool asserted = true;  // trend-only cells are reported but never fail a run
};

nlohmann::json cell_to_json(const Cell& c);

// {experiment, params, cells: [...], pass}
nlohmann::json experiment_report(const std::string& name, const nlohmann::json& params,
                                 const std::vector<Cell>& cells);

bool all_asserted_pass(const std::vector<Cell>& cells);

}  // namespace hpk::report
