#include "holoq/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace holoq::report {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json complex_json(numkit::Complex z) { return json::array({z.real(), z.imag()}); }

numkit::Complex complex_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json axis_json(const Eigen::Vector3d& axis) {
  const double theta = std::acos(std::clamp(axis.z(), -1.0, 1.0));
  const double phi =
      axis.head<2>().norm() > 0.0 ? std::atan2(axis.y(), axis.x()) : 0.0;
  return json{{"theta", theta}, {"phi", phi}};
}

Eigen::Vector3d axis_from_json(const json& j) {
  const double theta = j.at("theta").get<double>();
  const double phi = j.value("phi", 0.0);
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

json gate_json(const numkit::CMat2& g) {
  json rows = json::array();
  for (int r = 0; r < 2; ++r) {
    json row = json::array();
    for (int c = 0; c < 2; ++c) row.push_back(complex_json(g(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

numkit::CMat2 gate_from_json(const json& j) {
  numkit::CMat2 g;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) g(r, c) = complex_from_json(j.at(r).at(c));
  }
  return g;
}

json params_json(const holonomy::SchemeParams& params) {
  json out{{"scheme", holonomy::scheme_name(holonomy::kind_of(params))}};
  std::visit(
      [&out](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, holonomy::SingleLoopPi>) {
          out["axis"] = axis_json(p.n);
        } else if constexpr (std::is_same_v<T, holonomy::TwoLoopPi>) {
          out["axis1"] = axis_json(p.n1);
          out["axis2"] = axis_json(p.n2);
        } else if constexpr (std::is_same_v<T, holonomy::OffResonant>) {
          out["axis"] = axis_json(p.n);
          out["ratio"] = p.ratio;
        } else {
          out["axis"] = axis_json(p.n);
          out["eta"] = p.eta;
        }
      },
      params);
  return out;
}

json holonomy_json(const holonomy::HolonomyResult& result) {
  return json{{"gate", gate_json(result.gate)},
              {"closure_defect", result.closure_defect},
              {"dyn_phase_max", result.dyn_phase_max},
              {"is_loop", result.is_loop}};
}

json program_json(const holonomy::CompiledProgram& program) {
  json loops = json::array();
  for (const auto& loop : program.loops) {
    json areas = json::array();
    json etas = json::array();
    for (const auto& seg : loop.segments) {
      areas.push_back(seg.target_area);
      etas.push_back(seg.eta);
    }
    loops.push_back(json{{"omega0", complex_json(loop.laser.omega0())},
                         {"omega1", complex_json(loop.laser.omega1())},
                         {"areas", std::move(areas)},
                         {"etas", std::move(etas)}});
  }
  json out{{"scheme", holonomy::scheme_name(program.scheme)},
           {"loops", std::move(loops)}};
  if (program.offres) {
    out["offres"] = json{{"omega0_rabi", program.offres->omega0_rabi},
                         {"delta", program.offres->delta},
                         {"duration", program.offres->duration}};
  }
  out["shape_fallback_to_square"] = program.shape_fallback_to_square;
  return out;
}

std::string CsvTable::to_string() const {
  std::string out;
  const auto join = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  join(header);
  for (const auto& row : rows) join(row);
  return out;
}

CsvTable sweep_csv(const std::vector<labframe::RwaSweepRow>& rows) {
  CsvTable table;
  table.header = {"ratio", "infidelity", "closure_defect"};
  for (const auto& row : rows) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back({format_double(row.ratio),
                          format_double(row.ok ? row.infidelity : nan),
                          format_double(row.ok ? row.closure_defect : nan)});
  }
  return table;
}

}  // namespace holoq::report
