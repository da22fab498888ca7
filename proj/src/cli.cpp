#include "holoq/cli.hpp"

#include "holoq/evolve.hpp"
#include "holoq/holonomy.hpp"
#include "holoq/labframe.hpp"
#include "holoq/model.hpp"
#include "holoq/numkit.hpp"
#include "holoq/report.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace holoq::cli {

namespace {

using report::json;

constexpr int kOk = 0;
constexpr int kInvalidRequest = 2;
constexpr int kVerificationFailure = 3;
constexpr double kPi = std::numbers::pi;

double fold_angle(double a) {
  double f = std::fmod(a, 2.0 * kPi);
  if (f < 0.0) f += 2.0 * kPi;
  return f;
}

Eigen::Vector3d parse_axis(const std::string& text) {
  if (text == "x") return Eigen::Vector3d::UnitX();
  if (text == "y") return Eigen::Vector3d::UnitY();
  if (text == "z") return Eigen::Vector3d::UnitZ();
  const auto comma = text.find(',');
  if (comma != std::string::npos) {
    try {
      std::size_t used1 = 0, used2 = 0;
      const std::string a = text.substr(0, comma);
      const std::string b = text.substr(comma + 1);
      const double theta = std::stod(a, &used1);
      const double phi = std::stod(b, &used2);
      if (used1 == a.size() && used2 == b.size()) {
        return {std::sin(theta) * std::cos(phi),
                std::sin(theta) * std::sin(phi), std::cos(theta)};
      }
    } catch (const std::exception&) {
    }
  }
  throw std::invalid_argument("--axis expects x|y|z or theta,phi (radians)");
}

model::LaserParams laser_from_axis(const Eigen::Vector3d& axis) {
  model::BlochAxis bloch;
  bloch.theta = std::acos(std::clamp(axis.z(), -1.0, 1.0));
  bloch.phi =
      axis.head<2>().norm() > 0.0 ? std::atan2(axis.y(), axis.x()) : 0.0;
  return model::omegas_from_bloch(bloch);
}

model::PulseShape shape_from_name(const std::string& name) {
  if (name == "square") return model::PulseShape::Square;
  if (name == "gaussian") return model::PulseShape::Gaussian;
  if (name == "sin2") return model::PulseShape::SinSquared;
  if (name == "sampled") return model::PulseShape::Sampled;
  throw std::invalid_argument(
      "unknown pulse shape \"" + name +
      "\" (expected square|gaussian|sin2|sampled)");
}

std::vector<model::PulseEnvelope::Sample> load_samples(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read sample file " + path);
  }
  std::vector<model::PulseEnvelope::Sample> samples;
  std::string line;
  while (std::getline(in, line)) {
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream row(line);
    double t = 0.0, v = 0.0;
    if (row >> t >> v) samples.emplace_back(t, v);
  }
  if (samples.size() < 2) {
    throw std::invalid_argument("sample file " + path +
                                " needs at least two (t, value) rows");
  }
  return samples;
}

// Merge a --shape flag (square|gaussian|sin2|sampled:FILE) into the
// effective config's envelope block.
void apply_shape_flag(json& cfg, const std::string& flag) {
  const std::string prefix = "sampled:";
  if (flag.rfind(prefix, 0) == 0) {
    json rows = json::array();
    for (const auto& [t, v] : load_samples(flag.substr(prefix.size()))) {
      rows.push_back(json::array({t, v}));
    }
    cfg["envelope"]["shape"] = "sampled";
    cfg["envelope"]["samples"] = std::move(rows);
    return;
  }
  shape_from_name(flag);  // validate
  cfg["envelope"]["shape"] = flag;
}

model::PulseEnvelope envelope_from_config(const json& cfg) {
  const json block = cfg.value("envelope", json::object());
  const std::string shape_name = block.value("shape", std::string("square"));
  const model::PulseShape shape = shape_from_name(shape_name);
  if (shape == model::PulseShape::Sampled) {
    std::vector<model::PulseEnvelope::Sample> samples;
    if (block.contains("file")) {
      samples = load_samples(block.at("file").get<std::string>());
    } else if (block.contains("samples")) {
      for (const auto& row : block.at("samples")) {
        samples.emplace_back(row.at(0).get<double>(),
                             row.at(1).get<double>());
      }
    }
    return model::PulseEnvelope::sampled(std::move(samples));
  }
  return model::PulseEnvelope::make(shape, 1.0, block.value("tau", 1.0));
}

evolve::IntegratorConfig integrator_from_config(const json& cfg) {
  const json block = cfg.value("integrator", json::object());
  evolve::IntegratorConfig out;
  out.step_count = block.value("steps", out.step_count);
  out.tolerance = block.value("tolerance", out.tolerance);
  return out;
}

const json& require_key(const json& cfg, const char* key, const char* flag) {
  if (!cfg.contains(key)) {
    throw std::invalid_argument(std::string("missing \"") + key +
                                "\" (set it in the config file or via --" +
                                flag + ")");
  }
  return cfg.at(key);
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read config file " + path);
  }
  return json::parse(in);
}

double resolve_tolerance(const std::optional<double>& flag, double fallback) {
  if (flag) {
    if (!(*flag > 0.0)) {
      throw std::invalid_argument("--tol must be positive");
    }
    return *flag;
  }
  if (const char* env = std::getenv("HOLOQ_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      throw std::invalid_argument(
          "HOLOQ_TOL must be a positive number, got \"" + std::string(env) +
          "\"");
    }
    return v;
  }
  return fallback;
}

int emit(const std::string& text, const std::string& out_path,
         std::ostream& out, std::ostream& err) {
  if (out_path.empty()) {
    out << text;
    return kOk;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    err << "error: cannot write " << out_path << "\n";
    return kInvalidRequest;
  }
  file << text;
  return kOk;
}

std::string dump(const json& record) { return record.dump(2) + "\n"; }

std::string csv_text(const report::CsvTable& table) {
  return table.to_string();
}

// ---------------------------------------------------------------------
// Scheme parameters from the effective config.

holonomy::SchemeParams params_from_config(const json& cfg) {
  const std::string name =
      require_key(cfg, "scheme", "scheme").get<std::string>();
  const auto kind = holonomy::scheme_from_name(name);
  if (!kind) {
    throw std::invalid_argument(
        "unknown scheme \"" + name +
        "\" (expected single-pi|two-loop|off-resonant|l2)");
  }
  const Eigen::Vector3d axis =
      report::axis_from_json(require_key(cfg, "axis", "axis"));
  switch (*kind) {
    case holonomy::SchemeKind::SingleLoopPi:
      return holonomy::SingleLoopPi{axis};
    case holonomy::SchemeKind::TwoLoopPi:
      return holonomy::TwoLoopPi{
          axis, report::axis_from_json(require_key(cfg, "axis2", "axis2"))};
    case holonomy::SchemeKind::OffResonant:
      return holonomy::OffResonant{
          axis, require_key(cfg, "ratio", "ratio").get<double>()};
    case holonomy::SchemeKind::MultiPulseL2:
      return holonomy::MultiPulseL2{
          axis, require_key(cfg, "eta", "eta").get<double>()};
  }
  throw std::logic_error("params_from_config: bad kind");
}

// ---------------------------------------------------------------------
// simulate / verify core.

struct RunOutcome {
  holonomy::CompiledProgram program;
  numkit::CMat2 numeric_gate;
  numkit::CMat2 closed_gate;
  double closure_defect = 0.0;
  double dyn_phase_max = 0.0;
  double gate_distance = 0.0;
  bool is_loop = true;
};

holonomy::CompiledProgram apply_overrides(holonomy::CompiledProgram program,
                                          const json& cfg,
                                          const model::PulseEnvelope& proto) {
  if (!cfg.contains("areas") && !cfg.contains("etas")) return program;
  if (program.offres || program.loops.size() != 1) {
    throw std::invalid_argument(
        "areas/etas overrides apply only to single-loop resonant schemes");
  }
  std::vector<double> areas;
  std::vector<double> etas;
  for (const auto& seg : program.loops[0].segments) {
    areas.push_back(seg.target_area);
    etas.push_back(seg.eta);
  }
  if (cfg.contains("areas")) {
    areas = cfg.at("areas").get<std::vector<double>>();
  }
  if (cfg.contains("etas")) {
    etas = cfg.at("etas").get<std::vector<double>>();
  }
  // Pad the phase list against the area list: keep the last phase.
  while (etas.size() < areas.size()) etas.push_back(etas.back());
  etas.resize(areas.size());
  if (!etas.empty()) etas.front() = 0.0;

  std::vector<model::SegmentSpec> segments;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    segments.emplace_back(proto, etas[i], areas[i]);
  }
  program.loops[0] =
      model::LoopSpec(program.loops[0].laser, std::move(segments));
  return program;
}

RunOutcome run_job(const holonomy::SchemeParams& params, const json& cfg,
                   bool strict_shape, double closure_tol) {
  const model::PulseEnvelope proto = envelope_from_config(cfg);
  const evolve::IntegratorConfig integrator = integrator_from_config(cfg);

  RunOutcome outcome;
  outcome.program = apply_overrides(
      holonomy::compile_to_segments(params, proto, strict_shape), cfg, proto);
  outcome.closed_gate = holonomy::scheme_gate(params);

  if (outcome.program.offres) {
    const auto& prog = *outcome.program.offres;
    const numkit::CMat3 h = model::hamiltonian_offresonant(
        prog.omega0_rabi, prog.delta, prog.laser);
    const auto db = model::dark_bright(prog.laser);
    const auto prop = evolve::integrate([&h](double) { return h; }, 0.0,
                                        prog.duration, integrator,
                                        evolve::FramePair{db.dark, db.bright});
    numkit::CMat3 p0 = numkit::CMat3::Zero();
    p0(0, 0) = p0(1, 1) = 1.0;
    outcome.numeric_gate = prop.final_unitary.topLeftCorner<2, 2>();
    outcome.closure_defect =
        (prop.final_unitary * p0 * prop.final_unitary.adjoint() - p0).norm();
    const double peak = h.norm();
    for (const auto& s : prop.dyn_phase_samples) {
      outcome.dyn_phase_max = std::max(
          outcome.dyn_phase_max, s.elements.cwiseAbs().maxCoeff() / peak);
    }
    outcome.is_loop = outcome.closure_defect <= closure_tol;
  } else {
    holonomy::ComposeOptions opts;
    opts.use_numeric = true;
    opts.integrator = integrator;
    opts.closure_tol_numeric = closure_tol;
    outcome.numeric_gate = numkit::CMat2::Identity();
    for (const auto& loop : outcome.program.loops) {
      const auto res = holonomy::compose_loop(loop, opts);
      outcome.numeric_gate = (res.gate * outcome.numeric_gate).eval();
      outcome.closure_defect = std::max(outcome.closure_defect,
                                        res.closure_defect);
      outcome.dyn_phase_max = std::max(outcome.dyn_phase_max,
                                       res.dyn_phase_max);
      outcome.is_loop = outcome.is_loop && res.is_loop;
    }
  }
  outcome.gate_distance = numkit::phase_insensitive_distance(
      outcome.numeric_gate, outcome.closed_gate);
  return outcome;
}

json outcome_json(const std::string& command,
                  const holonomy::SchemeParams& params, const json& cfg,
                  const RunOutcome& outcome) {
  const evolve::IntegratorConfig integrator = integrator_from_config(cfg);
  return json{
      {"command", command},
      {"parameters", report::params_json(params)},
      {"program", report::program_json(outcome.program)},
      {"integrator",
       json{{"steps", integrator.step_count},
            {"tolerance", integrator.tolerance}}},
      {"numeric", json{{"gate", report::gate_json(outcome.numeric_gate)},
                       {"closure_defect", outcome.closure_defect},
                       {"dyn_phase_max", outcome.dyn_phase_max},
                       {"is_loop", outcome.is_loop}}},
      {"closed_form", json{{"gate", report::gate_json(outcome.closed_gate)}}},
      {"gate_distance", outcome.gate_distance}};
}

// ---------------------------------------------------------------------
// Subcommand bodies. Flags arrive pre-merged into `cfg`.

int cmd_compile(const json& cfg, double angle,
                const std::string& forced_scheme, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
  const Eigen::Vector3d axis =
      report::axis_from_json(require_key(cfg, "axis", "axis"));
  const holonomy::GateTarget target(axis, angle);

  holonomy::SchemeKind kind;
  if (forced_scheme.empty()) {
    kind = holonomy::select_scheme(target);
  } else {
    const auto parsed = holonomy::scheme_from_name(forced_scheme);
    if (!parsed) {
      throw std::invalid_argument(
          "unknown scheme \"" + forced_scheme +
          "\" (expected single-pi|two-loop|off-resonant|l2)");
    }
    kind = *parsed;
  }

  const auto params = holonomy::synthesize(target, kind);
  const auto program =
      holonomy::compile_to_segments(params, envelope_from_config(cfg), false);

  const json record{
      {"command", "compile"},
      {"target", json{{"axis", report::axis_json(target.axis)},
                      {"angle", target.angle}}},
      {"parameters", report::params_json(params)},
      {"gate", report::gate_json(holonomy::scheme_gate(params))},
      {"program", report::program_json(program)}};
  return emit(dump(record), out_path, out, err);
}

int cmd_simulate_or_verify(bool verify, const json& cfg,
                           const std::optional<double>& tol_flag,
                           bool strict_shape, const std::string& out_path,
                           std::ostream& out, std::ostream& err) {
  const double tol = resolve_tolerance(tol_flag, numkit::kDynamicTol);
  const double dyn_tol = numkit::kDynamicTol;

  const auto params = params_from_config(cfg);
  const auto outcome = run_job(params, cfg, strict_shape, tol);

  json record = outcome_json(verify ? "verify" : "simulate", params, cfg,
                             outcome);

  int code = kOk;
  if (verify) {
    json failures = json::array();
    const auto fail = [&](const char* metric, double value, double limit) {
      failures.push_back(metric);
      if (failures.size() == 1) {
        err << "verification failure: " << metric << " = " << value
            << " exceeds " << limit << "\n";
      }
    };
    if (outcome.closure_defect > tol) {
      fail("closure_defect", outcome.closure_defect, tol);
    }
    if (outcome.gate_distance > tol) {
      fail("gate_distance", outcome.gate_distance, tol);
    }
    const bool resonant =
        holonomy::kind_of(params) != holonomy::SchemeKind::OffResonant;
    if (resonant && outcome.dyn_phase_max > dyn_tol) {
      fail("dyn_phase_max", outcome.dyn_phase_max, dyn_tol);
    }
    record["tolerances"] = json{{"gate_distance", tol},
                                {"closure_defect", tol},
                                {"dyn_phase_max", dyn_tol}};
    record["failures"] = failures;
    record["pass"] = failures.empty();
    if (!failures.empty()) code = kVerificationFailure;
  }

  const int emit_code = emit(dump(record), out_path, out, err);
  return emit_code != kOk ? emit_code : code;
}

int cmd_sweep(const std::string& variable, const std::vector<double>& values,
              const json& cfg, const std::string& format,
              const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  const Eigen::Vector3d axis =
      report::axis_from_json(require_key(cfg, "axis", "axis"));
  const model::PulseEnvelope proto = envelope_from_config(cfg);
  const evolve::IntegratorConfig integrator = integrator_from_config(cfg);

  json rows = json::array();
  report::CsvTable table;

  if (variable == "eta") {
    table.header = {"eta", "rotation_angle", "closure_defect",
                    "gate_distance"};
    for (double eta : values) {
      const holonomy::SchemeParams params = holonomy::MultiPulseL2{axis, eta};
      const auto program = holonomy::compile_to_segments(params, proto);
      const auto res = holonomy::compose_loop(program.loops[0]);
      const double distance = numkit::phase_insensitive_distance(
          res.gate, holonomy::gate_l2(axis, eta));
      const double rotation = fold_angle(kPi - eta);
      rows.push_back(json{{"eta", eta},
                          {"rotation_angle", rotation},
                          {"closure_defect", res.closure_defect},
                          {"gate_distance", distance}});
      table.rows.push_back({report::format_double(eta),
                            report::format_double(rotation),
                            report::format_double(res.closure_defect),
                            report::format_double(distance)});
    }
  } else if (variable == "ratio") {
    table.header = {"ratio", "chi", "rotation_angle", "closure_defect",
                    "gate_distance"};
    const auto laser = laser_from_axis(axis);
    numkit::CMat3 p0 = numkit::CMat3::Zero();
    p0(0, 0) = p0(1, 1) = 1.0;
    for (double ratio : values) {
      const auto og = holonomy::gate_offresonant(axis, ratio);
      const double delta = 2.0 * ratio;
      const double tau = model::cyclic_duration_offres(1.0, delta);
      const numkit::CMat3 u =
          evolve::offres_square_propagator(1.0, delta, laser, tau);
      const double closure = (u * p0 * u.adjoint() - p0).norm();
      const double distance = numkit::phase_insensitive_distance(
          u.topLeftCorner<2, 2>(), og.gate);
      const double rotation = kPi - og.chi;
      rows.push_back(json{{"ratio", ratio},
                          {"chi", og.chi},
                          {"rotation_angle", rotation},
                          {"closure_defect", closure},
                          {"gate_distance", distance}});
      table.rows.push_back({report::format_double(ratio),
                            report::format_double(og.chi),
                            report::format_double(rotation),
                            report::format_double(closure),
                            report::format_double(distance)});
    }
  } else if (variable == "area") {
    table.header = {"area", "closure_defect", "is_loop"};
    const holonomy::SchemeParams pi_loop = holonomy::SingleLoopPi{axis};
    const auto base = holonomy::compile_to_segments(pi_loop, proto);
    for (double area : values) {
      const model::LoopSpec loop(
          base.loops[0].laser, {model::SegmentSpec(proto, 0.0, area)});
      const auto res = holonomy::compose_loop(loop);
      rows.push_back(json{{"area", area},
                          {"closure_defect", res.closure_defect},
                          {"is_loop", res.is_loop}});
      table.rows.push_back({report::format_double(area),
                            report::format_double(res.closure_defect),
                            res.is_loop ? "1" : "0"});
    }
  } else if (variable == "nu") {
    const double eta = cfg.value("eta", 0.0);
    const auto params = laser_from_axis(axis);
    // Scale the couplings so each pulse carries area pi/2 at unit envelope.
    const double scale = 0.5 * kPi / proto.area();
    const labframe::LabFrameSpec blueprint(
        1.0, 1.0, scale * params.omega0(), scale * params.omega1(), eta,
        proto, proto, proto.duration(), true);
    const auto sweep = labframe::rwa_error_sweep(blueprint, values,
                                                 integrator);
    table = report::sweep_csv(sweep);
    for (const auto& row : sweep) {
      json j{{"ratio", row.ratio},
             {"infidelity", row.infidelity},
             {"closure_defect", row.closure_defect},
             {"ok", row.ok}};
      if (!row.ok) j["error"] = row.error;
      rows.push_back(std::move(j));
    }
  } else {
    throw std::invalid_argument(
        "unknown sweep variable \"" + variable +
        "\" (expected eta|ratio|nu|area)");
  }

  if (format == "csv") {
    return emit(csv_text(table), out_path, out, err);
  }
  const json record{{"command", "sweep"},
                    {"variable", variable},
                    {"rows", std::move(rows)}};
  return emit(dump(record), out_path, out, err);
}

int cmd_compare(const json& cfg, double angle, const std::string& format,
                const std::string& out_path, std::ostream& out,
                std::ostream& err) {
  const Eigen::Vector3d axis =
      report::axis_from_json(require_key(cfg, "axis", "axis"));
  const holonomy::GateTarget target(axis, angle);

  struct Row {
    std::string scheme;
    json parameters;
    int parameter_count;
    int loops;
    double total_area;
    bool square_required;
  };
  std::vector<Row> result_rows;

  if (target.angle < 1e-12) {
    result_rows.push_back({"none", json::object(), 0, 0, 0.0, false});
  }
  using holonomy::SchemeKind;
  for (SchemeKind kind :
       {SchemeKind::SingleLoopPi, SchemeKind::TwoLoopPi,
        SchemeKind::OffResonant, SchemeKind::MultiPulseL2}) {
    holonomy::SchemeParams params = holonomy::SingleLoopPi{axis};
    try {
      params = holonomy::synthesize(target, kind);
    } catch (const holonomy::UnreachableTargetError&) {
      continue;
    }
    Row row;
    row.scheme = holonomy::scheme_name(kind);
    row.parameters = report::params_json(params);
    switch (kind) {
      case SchemeKind::SingleLoopPi:
        row.parameter_count = 2;
        row.loops = 1;
        row.total_area = kPi;
        row.square_required = false;
        break;
      case SchemeKind::TwoLoopPi:
        row.parameter_count = 4;
        row.loops = 2;
        row.total_area = 2.0 * kPi;
        row.square_required = false;
        break;
      case SchemeKind::OffResonant: {
        const double ratio = std::get<holonomy::OffResonant>(params).ratio;
        row.parameter_count = 3;
        row.loops = 1;
        row.total_area = kPi / std::hypot(ratio, 1.0);
        row.square_required = true;
        break;
      }
      case SchemeKind::MultiPulseL2:
        row.parameter_count = 3;
        row.loops = 1;
        row.total_area = kPi;
        row.square_required = false;
        break;
    }
    result_rows.push_back(std::move(row));
  }

  if (format == "csv") {
    report::CsvTable table;
    table.header = {"scheme", "parameter_count", "loops", "total_area",
                    "square_required"};
    for (const auto& row : result_rows) {
      table.rows.push_back({row.scheme, std::to_string(row.parameter_count),
                            std::to_string(row.loops),
                            report::format_double(row.total_area),
                            row.square_required ? "1" : "0"});
    }
    return emit(csv_text(table), out_path, out, err);
  }

  json rows = json::array();
  for (const auto& row : result_rows) {
    rows.push_back(json{{"scheme", row.scheme},
                        {"parameters", row.parameters},
                        {"parameter_count", row.parameter_count},
                        {"loops", row.loops},
                        {"total_area", row.total_area},
                        {"square_required", row.square_required}});
  }
  const json record{{"command", "compare"},
                    {"target", json{{"axis", report::axis_json(target.axis)},
                                    {"angle", target.angle}}},
                    {"rows", std::move(rows)}};
  return emit(dump(record), out_path, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "holoq: compile, simulate and verify holonomic one-qubit pulse "
      "programs in a three-level lambda system"};
  app.require_subcommand(1);

  int exit_code = kOk;

  // Shared flag storage.
  std::string config_path, axis_flag, axis2_flag, scheme_flag, shape_flag;
  std::string out_path, format = "json", variable;
  double angle = 0.0, eta_flag = 0.0, ratio_flag = 0.0, tau_flag = 0.0;
  double tol_flag = 0.0;
  int steps_flag = 0;
  bool strict = false;
  std::vector<double> values, areas_flag;

  const auto add_output = [&](CLI::App* sub, bool with_format) {
    sub->add_option("--out", out_path, "write the result to this path");
    if (with_format) {
      sub->add_option("--format", format, "output format")
          ->check(CLI::IsMember({"json", "csv"}));
    }
  };
  const auto add_envelope = [&](CLI::App* sub) {
    sub->add_option("--shape", shape_flag,
                    "pulse envelope: square|gaussian|sin2|sampled:FILE");
    sub->add_option("--tau", tau_flag, "envelope duration per segment");
  };
  const auto add_integrator = [&](CLI::App* sub) {
    sub->add_option("--steps", steps_flag, "integrator step count");
  };

  // Count a flag on subcommands that may not define it.
  const auto given = [](CLI::App* sub, const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };

  // Collect flags into the effective config on top of --config.
  const auto effective_config = [&](CLI::App* sub) {
    json cfg = config_path.empty() ? json::object()
                                   : load_config_file(config_path);
    if (given(sub, "--axis")) {
      cfg["axis"] = report::axis_json(parse_axis(axis_flag));
    }
    if (given(sub, "--axis2")) {
      cfg["axis2"] = report::axis_json(parse_axis(axis2_flag));
    }
    if (given(sub, "--scheme")) cfg["scheme"] = scheme_flag;
    if (given(sub, "--eta")) cfg["eta"] = eta_flag;
    if (given(sub, "--ratio")) cfg["ratio"] = ratio_flag;
    if (given(sub, "--areas")) cfg["areas"] = areas_flag;
    if (given(sub, "--shape")) apply_shape_flag(cfg, shape_flag);
    if (given(sub, "--tau")) cfg["envelope"]["tau"] = tau_flag;
    if (given(sub, "--steps")) cfg["integrator"]["steps"] = steps_flag;
    if (!cfg.contains("axis") && sub->get_name() != "simulate" &&
        sub->get_name() != "verify") {
      cfg["axis"] = report::axis_json(Eigen::Vector3d::UnitZ());
    }
    return cfg;
  };

  // compile ------------------------------------------------------------
  auto* compile = app.add_subcommand(
      "compile", "choose a scheme for a rotation target and print its "
                 "parameters, gate, and pulse program");
  compile->add_option("--axis", axis_flag, "rotation axis: x|y|z or theta,phi");
  compile->add_option("--angle", angle, "rotation angle in radians")
      ->required();
  compile->add_option("--scheme", scheme_flag,
                      "force a scheme: single-pi|two-loop|off-resonant|l2");
  add_envelope(compile);
  add_output(compile, false);
  compile->callback([&] {
    exit_code = cmd_compile(effective_config(compile), angle, scheme_flag,
                            out_path, out, err);
  });

  // simulate / verify ----------------------------------------------------
  const auto add_job_flags = [&](CLI::App* sub, bool with_strict) {
    sub->add_option("--config", config_path, "JSON job description");
    sub->add_option("--axis", axis_flag, "axis: x|y|z or theta,phi");
    sub->add_option("--axis2", axis2_flag, "second axis (two-loop scheme)");
    sub->add_option("--scheme", scheme_flag,
                    "single-pi|two-loop|off-resonant|l2");
    sub->add_option("--eta", eta_flag, "phase shift of the second segment");
    sub->add_option("--ratio", ratio_flag,
                    "detuning ratio delta/(2 Omega0) (off-resonant)");
    sub->add_option("--areas", areas_flag, "per-segment pulse areas")
        ->delimiter(',');
    sub->add_option("--tol", tol_flag,
                    "verification tolerance (default from HOLOQ_TOL or 1e-8)");
    if (with_strict) {
      sub->add_flag("--strict", strict,
                    "reject programs needing shape substitution");
    }
    add_envelope(sub);
    add_integrator(sub);
    add_output(sub, false);
  };

  auto* simulate = app.add_subcommand(
      "simulate", "integrate a pulse program and report the realized gate");
  add_job_flags(simulate, true);
  simulate->callback([&] {
    const std::optional<double> tol =
        simulate->count("--tol") ? std::optional<double>(tol_flag)
                                 : std::nullopt;
    exit_code = cmd_simulate_or_verify(false, effective_config(simulate), tol,
                                       strict, out_path, out, err);
  });

  auto* verify = app.add_subcommand(
      "verify", "integrate a pulse program and check it against the "
                "closed-form gate (exit 3 on violation); shape "
                "substitutions are always rejected");
  add_job_flags(verify, false);
  verify->callback([&] {
    const std::optional<double> tol =
        verify->count("--tol") ? std::optional<double>(tol_flag)
                               : std::nullopt;
    exit_code = cmd_simulate_or_verify(true, effective_config(verify), tol,
                                       true, out_path, out, err);
  });

  // sweep ---------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "evaluate a family of programs over one parameter");
  sweep->add_option("--var", variable, "sweep variable: eta|ratio|nu|area")
      ->required()
      ->check(CLI::IsMember({"eta", "ratio", "nu", "area"}));
  sweep->add_option("--values", values, "sweep points")->delimiter(',');
  sweep->add_option("--axis", axis_flag, "axis: x|y|z or theta,phi");
  sweep->add_option("--eta", eta_flag,
                    "phase shift of the second segment (nu sweep)");
  add_envelope(sweep);
  add_integrator(sweep);
  add_output(sweep, true);
  sweep->callback([&] {
    exit_code = cmd_sweep(variable, values, effective_config(sweep), format,
                          out_path, out, err);
  });

  // compare ---------------------------------------------------------------
  auto* compare = app.add_subcommand(
      "compare", "tabulate every scheme that reaches a rotation target");
  compare->add_option("--axis", axis_flag, "axis: x|y|z or theta,phi");
  compare->add_option("--angle", angle, "rotation angle in radians")
      ->required();
  add_output(compare, true);
  compare->callback([&] {
    exit_code = cmd_compare(effective_config(compare), angle, format,
                            out_path, out, err);
  });

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e, out, err);
    }
    err << "error: " << e.what() << "\n";
    return kInvalidRequest;
  } catch (const holonomy::UnreachableTargetError& e) {
    err << "error: " << e.what() << " (reachable rotation angles: ["
        << e.reachable_min << ", " << e.reachable_max << "])\n";
    return kInvalidRequest;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidRequest;
  }
  return exit_code;
}

}  // namespace holoq::cli
