// Propagation of the driven lambda system: closed-form propagators for
// constant-direction drives, a commutator-free 4th-order integrator for
// arbitrary time-dependent Hamiltonians, and the diagnostics that certify
// an evolution as geometric.
#pragma once

#include "holoq/model.hpp"
#include "holoq/numkit.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace holoq::evolve {

using numkit::CMat3;
using numkit::CVec3;

using TimeHamiltonian = std::function<CMat3(double)>;

struct IntegratorConfig {
  int step_count = 256;      // >= 16
  double tolerance = 1e-10;  // step-halving error target on the propagator
  bool keep_trajectory = false;
  int max_refinements = 10;  // step-count doublings before giving up
};

// 2x2 matrix of <psi_k | H(t) | psi_l>, k,l in {dark, bright}, on the
// integration grid.
struct DynPhaseSample {
  double time;
  Eigen::Matrix2cd elements;
};

struct Propagation {
  CMat3 final_unitary;
  std::vector<DynPhaseSample> dyn_phase_samples;
  std::optional<std::vector<std::pair<double, CMat3>>> trajectory;
  double error_estimate = 0.0;  // step-halving difference at the final grid
  bool converged = true;
  int steps_used = 0;
};

// First subspace frame carried through an integration, used to watch the
// dynamical matrix elements.
struct FramePair {
  CVec3 dark;
  CVec3 bright;
};

// Time-ordered propagator over [t0, t1] by fixed-step commutator-free
// 4th-order exponential stepping with per-step re-unitarization. The step
// count is doubled until halving it moves the result by at most
// cfg.tolerance; a run that exhausts max_refinements comes back with
// converged = false and the achieved estimate.
Propagation integrate(const TimeHamiltonian& hamiltonian, double t0, double t1,
                      const IntegratorConfig& cfg = {},
                      const std::optional<FramePair>& frame = std::nullopt);

// exp(-i a (|e><b| + |b><e|)) for an orthonormal triple (d, b, e):
// dark projector + cos(a) on the complement - i sin(a) on the b<->e coupler.
CMat3 frame_propagator_closed(const CVec3& dark, const CVec3& bright,
                              const CVec3& excited, double area);

// Closed-form propagator of one eta-shifted resonant segment at pulse area a.
CMat3 segment_propagator_closed(const model::LaserParams& params, double eta,
                                double area);

// exp(-i t (delta |e><e| + omega0 (|e><b| + |b><e|))) by spectral
// decomposition; cyclic at t = cyclic_duration_offres(omega0, delta).
CMat3 offres_square_propagator(double omega0_rabi, double delta,
                               const model::LaserParams& params, double t);

struct DynPhaseTrace {
  double max_abs = 0.0;  // normalized by the peak Hamiltonian norm
  std::vector<DynPhaseSample> samples;
};

// Propagates the (dark, bright) frame and reports the largest dynamical
// matrix element seen on the grid, normalized by the peak ||H(t)||_F.
DynPhaseTrace dynamical_phase_trace(const TimeHamiltonian& hamiltonian,
                                    const FramePair& frame, double t0,
                                    double t1,
                                    const IntegratorConfig& cfg = {});

// max over sample pairs of ||[H(t), H(t')]||_F / (||H(t)|| ||H(t')||);
// zero iff the Hamiltonian commutes with itself along the pulse.
double commutator_defect(const TimeHamiltonian& hamiltonian, double t0,
                         double t1, int sample_count);

}  // namespace holoq::evolve
