// Gate-level closed forms for the lambda-system schemes, the multi-segment
// loop composition engine, and the compiler that turns a rotation target
// into scheme parameters and pulse programs.
#pragma once

#include "holoq/evolve.hpp"
#include "holoq/model.hpp"
#include "holoq/numkit.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace holoq::holonomy {

using numkit::CMat2;
using numkit::CMat3;
using numkit::CVec3;

// Rotation by `angle` about the unit Bloch vector `axis`, meaning
// exp(-i angle/2 axis.sigma) up to global phase. Angle folded to [0, 2pi).
struct GateTarget {
  GateTarget(const Eigen::Vector3d& axis_in, double angle_in);

  Eigen::Vector3d axis;
  double angle;

  CMat2 unitary() const;
};

// Scheme parameterizations. SingleLoopPi: one pi-area loop about n.
// TwoLoopPi: two consecutive pi-area loops about n1 then n2. OffResonant:
// detuned square drive, ratio = delta / (2 Omega0). MultiPulseL2: one loop
// split into two pi/2 segments with phase shift eta between them.
struct SingleLoopPi {
  Eigen::Vector3d n;
};
struct TwoLoopPi {
  Eigen::Vector3d n1, n2;
};
struct OffResonant {
  Eigen::Vector3d n;
  double ratio;
};
struct MultiPulseL2 {
  Eigen::Vector3d n;
  double eta;
};
using SchemeParams =
    std::variant<SingleLoopPi, TwoLoopPi, OffResonant, MultiPulseL2>;

enum class SchemeKind { SingleLoopPi, TwoLoopPi, OffResonant, MultiPulseL2 };

SchemeKind kind_of(const SchemeParams& params);
std::string scheme_name(SchemeKind kind);
std::optional<SchemeKind> scheme_from_name(const std::string& name);

// Closed-form gates.
CMat2 gate_single_pi(const Eigen::Vector3d& n);
CMat2 gate_two_loop(const Eigen::Vector3d& n1, const Eigen::Vector3d& n2);

struct OffResGate {
  CMat2 gate;
  double chi;  // pi ratio / sqrt(ratio^2 + 1); rotation angle is pi - chi
};
OffResGate gate_offresonant(const Eigen::Vector3d& n, double ratio);

CMat2 gate_l2(const Eigen::Vector3d& n, double eta);

// Closed-form gate of any scheme parameterization.
CMat2 scheme_gate(const SchemeParams& params);

// Outcome of traversing one candidate loop. The gate block is meaningful
// only when is_loop holds (the transported subspace returned to the
// computational one within the closure tolerance).
struct HolonomyResult {
  CMat2 gate;
  double closure_defect = 0.0;
  double dyn_phase_max = 0.0;
  bool is_loop = false;
};

struct ComposeOptions {
  bool use_numeric = false;
  evolve::IntegratorConfig integrator{};
  double closure_tol_closed = 1e-12;
  double closure_tol_numeric = 1e-8;
};

// Multiply the segment propagators of `loop`, tracking the moving frame
// that defines each segment Hamiltonian; project onto the computational
// subspace and report closure quality.
HolonomyResult compose_loop(const model::LoopSpec& loop,
                            const ComposeOptions& opts = {});

// Transported frame vectors after a segment, in the order they entered.
struct Frame {
  CVec3 dark, bright, excited;
};

// Basis transformation applied between segments: fixes the transported
// excited vector, multiplies the transported bright/dark vectors by
// e^{+i eta} / e^{-i eta}.
CMat3 build_v2(const Frame& frame, double eta);

class UnreachableTargetError : public std::invalid_argument {
 public:
  UnreachableTargetError(const std::string& what, double angle_min,
                         double angle_max)
      : std::invalid_argument(what),
        reachable_min(angle_min),
        reachable_max(angle_max) {}

  double reachable_min;
  double reachable_max;
};

// Invert the chosen scheme's closed form for the given rotation target.
// Throws UnreachableTargetError when the rotation angle lies outside the
// scheme's reachable set.
SchemeParams synthesize(const GateTarget& target, SchemeKind kind);

// MultiPulseL2 whenever the target has nonvanishing trace, otherwise the
// plain pi-loop scheme. The tolerance window matches the single-pi scheme's
// reachability window so the selected scheme is always synthesizable.
SchemeKind select_scheme(const GateTarget& target,
                         double trace_tolerance = 1e-8);

// Constant off-resonant drive: amplitude, detuning, and the run time after
// which the computational subspace returns.
struct OffResProgram {
  model::LaserParams laser;
  double omega0_rabi;
  double delta;
  double duration;
};

// Pulse program realizing a scheme: one or two resonant loops, or a single
// off-resonant square drive.
struct CompiledProgram {
  SchemeKind scheme;
  std::vector<model::LoopSpec> loops;
  std::optional<OffResProgram> offres;
  bool shape_fallback_to_square = false;
};

// Turn scheme parameters into a concrete pulse program using `prototype`
// as the per-segment envelope shape (rescaled to each segment's area).
// The off-resonant scheme admits only square envelopes: other shapes are
// replaced (flagged) or, in strict mode, rejected.
CompiledProgram compile_to_segments(const SchemeParams& params,
                                    const model::PulseEnvelope& prototype,
                                    bool strict_shape = false);
CompiledProgram compile_to_segments(const SchemeParams& params,
                                    model::PulseShape shape,
                                    double tau_per_segment,
                                    bool strict_shape = false);

}  // namespace holoq::holonomy
