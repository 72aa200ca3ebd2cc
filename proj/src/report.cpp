#include "hpk/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hpk/error.hpp"

namespace hpk::report {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_with_runspec(const nlohmann::json& runspec, const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  os << "# runspec: " << runspec.dump() << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
    os << "\n";
  }
  return os.str();
}

void write_text(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json cell_to_json(const Cell& c) {
  return {{"inputs", c.inputs}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass},
          {"asserted", c.asserted}};
}

nlohmann::json experiment_report(const std::string& name, const nlohmann::json& params,
                                 const std::vector<Cell>& cells) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cells) arr.push_back(cell_to_json(c));
  return {{"experiment", name}, {"params", params}, {"cells", arr}, {"pass", all_asserted_pass(cells)}};
}

bool all_asserted_pass(const std::vector<Cell>& cells) {
  for (const auto& c : cells)
    if (c.asserted && !c.pass) return false;
  return true;
}

}  // namespace hpk::report
