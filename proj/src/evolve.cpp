#include "holoq/evolve.hpp"

#include <cmath>
#include <stdexcept>

namespace holoq::evolve {

namespace {

using numkit::kImag;

// Gauss-Legendre nodes and the CF4 exponential weights.
constexpr double kNodeOffset = 0.28867513459481287;  // sqrt(3)/6
constexpr double kW1 = 0.25 + kNodeOffset;
constexpr double kW2 = 0.25 - kNodeOffset;

CMat3 sample_hermitian(const TimeHamiltonian& h_of_t, double t) {
  CMat3 h = h_of_t(t);
  const double defect = numkit::hermiticity_defect(h);
  if (!(defect <= 1e-9 * std::max(1.0, h.norm()))) {
    throw std::invalid_argument(
        "integrate: Hamiltonian not hermitian at t = " + std::to_string(t));
  }
  return h;
}

// One Newton-Schulz sweep pulls a near-unitary matrix back onto the group.
void reunitarize(CMat3& u) {
  u = 0.5 * u * (3.0 * CMat3::Identity() - u.adjoint() * u);
}

// Fixed-step CF4 product over [t0, t1]; boundary_cb(k, t_k, U_k) runs at
// every grid boundary including both ends.
template <typename BoundaryCb>
CMat3 run_fixed(const TimeHamiltonian& h_of_t, double t0, double t1, int steps,
                BoundaryCb&& boundary_cb) {
  const double h = (t1 - t0) / steps;
  CMat3 u = CMat3::Identity();
  boundary_cb(0, t0, u);
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    const CMat3 h1 = sample_hermitian(h_of_t, t + (0.5 - kNodeOffset) * h);
    const CMat3 h2 = sample_hermitian(h_of_t, t + (0.5 + kNodeOffset) * h);
    const CMat3 first = numkit::herm_propagator(kW1 * h1 + kW2 * h2, h, 1e-9);
    const CMat3 second = numkit::herm_propagator(kW2 * h1 + kW1 * h2, h, 1e-9);
    u = second * first * u;
    reunitarize(u);
    boundary_cb(k + 1, t0 + (k + 1) * h, u);
  }
  return u;
}

CMat3 run_plain(const TimeHamiltonian& h_of_t, double t0, double t1,
                int steps) {
  return run_fixed(h_of_t, t0, t1, steps, [](int, double, const CMat3&) {});
}

}  // namespace

Propagation integrate(const TimeHamiltonian& hamiltonian, double t0, double t1,
                      const IntegratorConfig& cfg,
                      const std::optional<FramePair>& frame) {
  if (!(t1 > t0)) {
    throw std::invalid_argument("integrate: need t1 > t0");
  }
  if (cfg.step_count < 16) {
    throw std::invalid_argument("integrate: step_count must be >= 16");
  }
  if (!(cfg.tolerance > 0.0)) {
    throw std::invalid_argument("integrate: tolerance must be positive");
  }

  int steps = cfg.step_count + (cfg.step_count % 2);
  CMat3 half = run_plain(hamiltonian, t0, t1, steps / 2);
  CMat3 full = run_plain(hamiltonian, t0, t1, steps);
  double err = (full - half).norm();
  bool converged = err <= cfg.tolerance;
  for (int r = 0; r < cfg.max_refinements && !converged; ++r) {
    half = full;
    steps *= 2;
    full = run_plain(hamiltonian, t0, t1, steps);
    err = (full - half).norm();
    converged = err <= cfg.tolerance;
  }

  Propagation result;
  result.error_estimate = err;
  result.converged = converged;
  result.steps_used = steps;
  if (cfg.keep_trajectory) result.trajectory.emplace();

  if (!frame && !cfg.keep_trajectory) {
    result.final_unitary = full;
    return result;
  }

  // One more pass at the final resolution to collect diagnostics.
  result.final_unitary = run_fixed(
      hamiltonian, t0, t1, steps, [&](int, double t, const CMat3& u) {
        if (result.trajectory) result.trajectory->emplace_back(t, u);
        if (frame) {
          const CMat3 h = hamiltonian(t);
          const CVec3 pd = u * frame->dark;
          const CVec3 pb = u * frame->bright;
          DynPhaseSample sample;
          sample.time = t;
          sample.elements(0, 0) = pd.dot(h * pd);
          sample.elements(0, 1) = pd.dot(h * pb);
          sample.elements(1, 0) = pb.dot(h * pd);
          sample.elements(1, 1) = pb.dot(h * pb);
          result.dyn_phase_samples.push_back(sample);
        }
      });
  return result;
}

CMat3 frame_propagator_closed(const CVec3& dark, const CVec3& bright,
                              const CVec3& excited, double area) {
  const CMat3 dark_proj = dark * dark.adjoint();
  const CMat3 coupler =
      excited * bright.adjoint() + bright * excited.adjoint();
  return dark_proj + std::cos(area) * (CMat3::Identity() - dark_proj) -
         kImag * std::sin(area) * coupler;
}

CMat3 segment_propagator_closed(const model::LaserParams& params, double eta,
                                double area) {
  const auto db = model::dark_bright(params);
  // The eta shift multiplies the bright vector by e^{-i eta} in the coupler.
  const CVec3 bright_shifted = std::exp(-kImag * eta) * db.bright;
  return frame_propagator_closed(db.dark, bright_shifted, CVec3::Unit(2),
                                 area);
}

CMat3 offres_square_propagator(double omega0_rabi, double delta,
                               const model::LaserParams& params, double t) {
  const CMat3 h = model::hamiltonian_offresonant(omega0_rabi, delta, params);
  return numkit::herm_propagator(h, t);
}

DynPhaseTrace dynamical_phase_trace(const TimeHamiltonian& hamiltonian,
                                    const FramePair& frame, double t0,
                                    double t1, const IntegratorConfig& cfg) {
  const CVec3& d = frame.dark;
  const CVec3& b = frame.bright;
  if (std::abs(d.norm() - 1.0) > 1e-10 || std::abs(b.norm() - 1.0) > 1e-10 ||
      std::abs(d.dot(b)) > 1e-10) {
    throw std::invalid_argument(
        "dynamical_phase_trace: frame must be orthonormal");
  }
  if (std::abs(d(2)) > 1e-10 || std::abs(b(2)) > 1e-10) {
    throw std::invalid_argument(
        "dynamical_phase_trace: frame must be orthogonal to |e>");
  }

  Propagation prop = integrate(hamiltonian, t0, t1, cfg, frame);

  double peak = 0.0;
  const int steps = prop.steps_used;
  for (int k = 0; k <= steps; ++k) {
    peak = std::max(peak, hamiltonian(t0 + (t1 - t0) * k / steps).norm());
  }

  DynPhaseTrace trace;
  trace.samples = std::move(prop.dyn_phase_samples);
  if (peak <= 1e-300) return trace;
  for (const auto& s : trace.samples) {
    trace.max_abs =
        std::max(trace.max_abs, s.elements.cwiseAbs().maxCoeff() / peak);
  }
  return trace;
}

double commutator_defect(const TimeHamiltonian& hamiltonian, double t0,
                         double t1, int sample_count) {
  if (sample_count < 2) {
    throw std::invalid_argument("commutator_defect: need sample_count >= 2");
  }
  std::vector<CMat3> hs(sample_count);
  std::vector<double> norms(sample_count);
  for (int k = 0; k < sample_count; ++k) {
    const double t = t0 + (t1 - t0) * k / (sample_count - 1);
    hs[k] = hamiltonian(t);
    norms[k] = hs[k].norm();
  }
  double defect = 0.0;
  for (int i = 0; i < sample_count; ++i) {
    if (norms[i] <= 1e-300) continue;
    for (int j = i + 1; j < sample_count; ++j) {
      if (norms[j] <= 1e-300) continue;
      const double c = (hs[i] * hs[j] - hs[j] * hs[i]).norm();
      defect = std::max(defect, c / (norms[i] * norms[j]));
    }
  }
  return defect;
}

}  // namespace holoq::evolve
