#include "holoq/labframe.hpp"

#include "holoq/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace holoq::labframe {

namespace {

using numkit::kImag;

constexpr double kPi = std::numbers::pi;

double fold_angle(double a) {
  double f = std::fmod(a, 2.0 * kPi);
  if (f < 0.0) f += 2.0 * kPi;
  return f;
}

// Smallest step count that puts at least 16 integrator steps inside every
// 2 nu oscillation period of the pulse.
int resolving_steps(double duration, double nu) {
  const double periods = duration * 2.0 * nu / (2.0 * kPi);
  return static_cast<int>(std::ceil(16.0 * std::max(periods, 1.0)));
}

}  // namespace

LabFrameSpec::LabFrameSpec(double nu_e0, double nu_e1, Complex coupling0,
                           Complex coupling1, double eta,
                           model::PulseEnvelope envelope1,
                           model::PulseEnvelope envelope2, double second_start,
                           bool include_counter_rotating)
    : nu_e0_(nu_e0),
      nu_e1_(nu_e1),
      coupling0_(coupling0),
      coupling1_(coupling1),
      eta_(fold_angle(eta)),
      envelope1_(std::move(envelope1)),
      envelope2_(std::move(envelope2)),
      second_start_(second_start),
      include_counter_rotating_(include_counter_rotating) {
  if (!(nu_e0_ > 0.0) || !(nu_e1_ > 0.0)) {
    throw std::invalid_argument(
        "LabFrameSpec: transition frequencies must be positive");
  }
  if (coupling_norm() <= 0.0) {
    throw std::invalid_argument("LabFrameSpec: couplings must not both vanish");
  }
  if (second_start_ < envelope1_.duration()) {
    throw std::invalid_argument(
        "LabFrameSpec: pulse supports must not overlap");
  }
}

model::LaserParams LabFrameSpec::laser_params() const {
  return model::LaserParams::normalized(coupling0_, coupling1_);
}

double LabFrameSpec::coupling_norm() const {
  return std::hypot(std::abs(coupling0_), std::abs(coupling1_));
}

double LabFrameSpec::pulse_area(int pulse_index) const {
  if (pulse_index != 1 && pulse_index != 2) {
    throw std::invalid_argument("LabFrameSpec: pulse_index must be 1 or 2");
  }
  const auto& env = pulse_index == 1 ? envelope1_ : envelope2_;
  return coupling_norm() * env.area();
}

double LabFrameSpec::total_duration() const {
  return second_start_ + envelope2_.duration();
}

LabFrameSpec LabFrameSpec::with_counter_rotating(bool on) const {
  LabFrameSpec copy = *this;
  copy.include_counter_rotating_ = on;
  return copy;
}

LabFrameSpec LabFrameSpec::with_frequencies(double nu) const {
  LabFrameSpec copy = *this;
  copy.nu_e0_ = nu;
  copy.nu_e1_ = nu;
  if (!(nu > 0.0)) {
    throw std::invalid_argument(
        "LabFrameSpec: transition frequencies must be positive");
  }
  return copy;
}

CMat3 interaction_hamiltonian(const LabFrameSpec& spec, int pulse_index,
                              double t) {
  if (pulse_index != 1 && pulse_index != 2) {
    throw std::invalid_argument(
        "interaction_hamiltonian: pulse_index must be 1 or 2");
  }
  const bool first = pulse_index == 1;
  const auto& env = first ? spec.envelope1() : spec.envelope2();
  const double local = first ? t : t - spec.second_start();
  const double g = env.value(local);
  if (g == 0.0) return CMat3::Zero();

  // Slow factor e^{i eta_n} plus, when retained, the counter-rotating
  // e^{-2i nu t - i eta_n} at absolute lab time t.
  const double eta_n = first ? 0.0 : spec.eta();
  const Complex slow = std::exp(kImag * eta_n);
  Complex f0 = slow;
  Complex f1 = slow;
  if (spec.include_counter_rotating()) {
    f0 += std::exp(-kImag * (2.0 * spec.nu_e0() * t + eta_n));
    f1 += std::exp(-kImag * (2.0 * spec.nu_e1() * t + eta_n));
  }
  const auto params = spec.laser_params();
  const double rabi = spec.coupling_norm() * g;
  return model::hamiltonian_general(rabi * params.omega0() * f0,
                                    rabi * params.omega1() * f1, {});
}

LabGateResult simulate_labframe_gate(const LabFrameSpec& spec,
                                     const evolve::IntegratorConfig& cfg) {
  for (int p : {1, 2}) {
    const double area = spec.pulse_area(p);
    if (std::abs(area - 0.5 * kPi) > 1e-8) {
      throw std::invalid_argument(
          "simulate_labframe_gate: pulse " + std::to_string(p) +
          " area must be pi/2, got " + std::to_string(area));
    }
  }
  if (spec.include_counter_rotating()) {
    const double nu_max = std::max(spec.nu_e0(), spec.nu_e1());
    const double tau_max =
        std::max(spec.envelope1().duration(), spec.envelope2().duration());
    const double max_step = kPi / (4.0 * nu_max);
    if (tau_max / cfg.step_count >= max_step) {
      const int needed = static_cast<int>(std::ceil(tau_max / max_step)) + 1;
      throw std::invalid_argument(
          "simulate_labframe_gate: step too coarse for the 2 nu "
          "oscillations; need step_count >= " +
          std::to_string(needed));
    }
  }

  const auto h1 = [&spec](double t) {
    return interaction_hamiltonian(spec, 1, t);
  };
  const auto h2 = [&spec](double t) {
    return interaction_hamiltonian(spec, 2, t);
  };
  const auto prop1 =
      evolve::integrate(h1, 0.0, spec.envelope1().duration(), cfg);
  const auto prop2 = evolve::integrate(h2, spec.second_start(),
                                       spec.total_duration(), cfg);
  const CMat3 total = prop2.final_unitary * prop1.final_unitary;

  CMat3 p0 = CMat3::Zero();
  p0(0, 0) = p0(1, 1) = 1.0;

  const auto axis = model::bloch_from_omegas(spec.laser_params());
  const CMat2 ideal = holonomy::gate_l2(axis.unit_vector(), spec.eta());

  LabGateResult result;
  result.gate = total.topLeftCorner<2, 2>();
  result.closure_defect = (total * p0 * total.adjoint() - p0).norm();
  result.infidelity_vs_rwa = std::clamp(
      numkit::phase_insensitive_distance(result.gate, ideal), 0.0, 1.0);
  return result;
}

std::vector<RwaSweepRow> rwa_error_sweep(const LabFrameSpec& spec_template,
                                         const std::vector<double>& nu_values,
                                         const evolve::IntegratorConfig& cfg) {
  const double tau = spec_template.envelope1().duration();
  std::vector<RwaSweepRow> rows;
  rows.reserve(nu_values.size());
  for (double nu : nu_values) {
    RwaSweepRow row{};
    row.ratio = 2.0 * kPi / (nu * tau);
    row.ok = false;
    try {
      const LabFrameSpec spec = spec_template.with_frequencies(nu);
      evolve::IntegratorConfig point_cfg = cfg;
      point_cfg.step_count = std::max(
          cfg.step_count,
          resolving_steps(
              std::max(tau, spec.envelope2().duration()), nu));
      const auto res = simulate_labframe_gate(spec, point_cfg);
      row.infidelity = res.infidelity_vs_rwa;
      row.closure_defect = res.closure_defect;
      row.ok = true;
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(),
            [](const RwaSweepRow& a, const RwaSweepRow& b) {
              return a.ratio < b.ratio;
            });
  return rows;
}

PhaseGateReport phase_gate_demo(double zeta,
                                const LabFrameSpec& spec_template,
                                const evolve::IntegratorConfig& cfg) {
  const double eta = fold_angle(kPi - zeta);
  // omega0 = 1: put the whole coupling budget on the |0> <-> |e| line.
  const LabFrameSpec spec(spec_template.nu_e0(), spec_template.nu_e1(),
                          spec_template.coupling_norm(), 0.0, eta,
                          spec_template.envelope1(), spec_template.envelope2(),
                          spec_template.second_start(),
                          spec_template.include_counter_rotating());
  const auto res = simulate_labframe_gate(spec, cfg);

  PhaseGateReport report;
  report.zeta_requested = zeta;
  report.eta = eta;
  report.gate = res.gate;
  const double rel =
      std::arg(res.gate(0, 0) * std::conj(res.gate(1, 1)));
  report.phase_on_zero = fold_angle(rel);
  report.phase_on_one = fold_angle(-rel);
  report.off_diagonal_leakage =
      std::max(std::abs(res.gate(0, 1)), std::abs(res.gate(1, 0)));
  report.infidelity_vs_rwa = res.infidelity_vs_rwa;
  report.closure_defect = res.closure_defect;
  return report;
}

}  // namespace holoq::labframe
