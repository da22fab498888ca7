// Machine-readable output: JSON records with stable key order and lossless
// floats, and CSV tables for sweep results.
#pragma once

#include "holoq/holonomy.hpp"
#include "holoq/labframe.hpp"
#include "holoq/numkit.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace holoq::report {

using json = nlohmann::ordered_json;

// Shortest representation that round-trips; used for CSV cells.
std::string format_double(double v);

json complex_json(numkit::Complex z);             // [re, im]
numkit::Complex complex_from_json(const json& j);

json axis_json(const Eigen::Vector3d& axis);      // {"theta":…, "phi":…}
Eigen::Vector3d axis_from_json(const json& j);

json gate_json(const numkit::CMat2& g);           // row-major [re, im] pairs
numkit::CMat2 gate_from_json(const json& j);

json params_json(const holonomy::SchemeParams& params);
json holonomy_json(const holonomy::HolonomyResult& result);
json program_json(const holonomy::CompiledProgram& program);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

CsvTable sweep_csv(const std::vector<labframe::RwaSweepRow>& rows);

}  // namespace holoq::report
