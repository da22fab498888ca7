#include "holoq/holonomy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace holoq::holonomy {

namespace {

using numkit::kImag;

constexpr double kPi = std::numbers::pi;

double fold_angle(double a) {
  double f = std::fmod(a, 2.0 * kPi);
  if (f < 0.0) f += 2.0 * kPi;
  return f;
}

void require_unit(const Eigen::Vector3d& n, const char* who) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument(std::string(who) + ": axis must be unit");
  }
}

model::BlochAxis to_bloch(const Eigen::Vector3d& n) {
  model::BlochAxis axis;
  axis.theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  axis.phi = (n.head<2>().norm() > 0.0) ? std::atan2(n.y(), n.x()) : 0.0;
  return axis;
}

model::LaserParams laser_for_axis(const Eigen::Vector3d& n) {
  return model::omegas_from_bloch(to_bloch(n));
}

// Tie-break reference for constructions that need a direction transverse
// to m: z unless m is (anti)parallel to z, then x.
Eigen::Vector3d transverse_reference(const Eigen::Vector3d& m) {
  Eigen::Vector3d ref = Eigen::Vector3d::UnitZ();
  if (std::abs(m.z()) > 1.0 - 1e-9) ref = Eigen::Vector3d::UnitX();
  return (ref - ref.dot(m) * m).normalized();
}

}  // namespace

GateTarget::GateTarget(const Eigen::Vector3d& axis_in, double angle_in)
    : axis(axis_in), angle(fold_angle(angle_in)) {
  require_unit(axis, "GateTarget");
}

CMat2 GateTarget::unitary() const {
  const double half = 0.5 * angle;
  return std::cos(half) * CMat2::Identity() -
         kImag * std::sin(half) * numkit::pauli_dot(axis);
}

SchemeKind kind_of(const SchemeParams& params) {
  return std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SingleLoopPi>) {
          return SchemeKind::SingleLoopPi;
        } else if constexpr (std::is_same_v<T, TwoLoopPi>) {
          return SchemeKind::TwoLoopPi;
        } else if constexpr (std::is_same_v<T, OffResonant>) {
          return SchemeKind::OffResonant;
        } else {
          return SchemeKind::MultiPulseL2;
        }
      },
      params);
}

std::string scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::SingleLoopPi:
      return "single-pi";
    case SchemeKind::TwoLoopPi:
      return "two-loop";
    case SchemeKind::OffResonant:
      return "off-resonant";
    case SchemeKind::MultiPulseL2:
      return "l2";
  }
  throw std::logic_error("scheme_name: bad kind");
}

std::optional<SchemeKind> scheme_from_name(const std::string& name) {
  if (name == "single-pi") return SchemeKind::SingleLoopPi;
  if (name == "two-loop") return SchemeKind::TwoLoopPi;
  if (name == "off-resonant") return SchemeKind::OffResonant;
  if (name == "l2") return SchemeKind::MultiPulseL2;
  return std::nullopt;
}

CMat2 gate_single_pi(const Eigen::Vector3d& n) {
  require_unit(n, "gate_single_pi");
  return numkit::pauli_dot(n);
}

CMat2 gate_two_loop(const Eigen::Vector3d& n1, const Eigen::Vector3d& n2) {
  require_unit(n1, "gate_two_loop");
  require_unit(n2, "gate_two_loop");
  return n1.dot(n2) * CMat2::Identity() -
         kImag * numkit::pauli_dot(n1.cross(n2));
}

OffResGate gate_offresonant(const Eigen::Vector3d& n, double ratio) {
  require_unit(n, "gate_offresonant");
  if (!(ratio >= 0.0)) {
    throw std::invalid_argument("gate_offresonant: ratio must be >= 0");
  }
  const double chi = kPi * ratio / std::hypot(ratio, 1.0);
  const double half = 0.5 * (kPi - chi);
  const numkit::Complex phase = std::exp(kImag * half);
  CMat2 gate = phase * (std::cos(half) * CMat2::Identity() -
                        kImag * std::sin(half) * numkit::pauli_dot(n));
  return {gate, chi};
}

CMat2 gate_l2(const Eigen::Vector3d& n, double eta) {
  require_unit(n, "gate_l2");
  // Half-angle form of e^{i(pi-eta)/2} e^{-i(pi-eta)/2 n.sigma}; written so
  // that eta = 0 yields n.sigma without rounding.
  const double half = 0.5 * eta;
  const numkit::Complex phase = std::exp(-kImag * half);
  return kImag * phase * std::sin(half) * CMat2::Identity() +
         phase * std::cos(half) * numkit::pauli_dot(n);
}

CMat2 scheme_gate(const SchemeParams& params) {
  return std::visit(
      [](const auto& p) -> CMat2 {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SingleLoopPi>) {
          return gate_single_pi(p.n);
        } else if constexpr (std::is_same_v<T, TwoLoopPi>) {
          return gate_two_loop(p.n1, p.n2);
        } else if constexpr (std::is_same_v<T, OffResonant>) {
          return gate_offresonant(p.n, p.ratio).gate;
        } else {
          return gate_l2(p.n, p.eta);
        }
      },
      params);
}

CMat3 build_v2(const Frame& frame, double eta) {
  const auto check = [](const CVec3& v, const CVec3& w) {
    return std::abs(v.dot(w)) <= 1e-10;
  };
  if (!numkit::is_state(frame.dark, 1e-10) ||
      !numkit::is_state(frame.bright, 1e-10) ||
      !numkit::is_state(frame.excited, 1e-10) ||
      !check(frame.dark, frame.bright) || !check(frame.dark, frame.excited) ||
      !check(frame.bright, frame.excited)) {
    throw std::invalid_argument("build_v2: frame must be orthonormal");
  }
  return frame.excited * frame.excited.adjoint() +
         std::exp(kImag * eta) * frame.bright * frame.bright.adjoint() +
         std::exp(-kImag * eta) * frame.dark * frame.dark.adjoint();
}

HolonomyResult compose_loop(const model::LoopSpec& loop,
                            const ComposeOptions& opts) {
  const auto db = model::dark_bright(loop.laser);
  Frame frame{db.dark, db.bright, CVec3::Unit(2)};

  CMat3 total = CMat3::Identity();
  double dyn_max = 0.0;

  for (std::size_t s = 0; s < loop.segments.size(); ++s) {
    const auto& seg = loop.segments[s];
    if (s > 0) {
      // Discrete change of the laser fields between segments: diagonal
      // phases on the transported frame, excited vector held fixed.
      frame.dark *= std::exp(-kImag * seg.eta);
      frame.bright *= std::exp(kImag * seg.eta);
    }

    const CMat3 coupler = frame.excited * frame.bright.adjoint() +
                          frame.bright * frame.excited.adjoint();
    const CMat3 closed = evolve::frame_propagator_closed(
        frame.dark, frame.bright, frame.excited, seg.target_area);

    if (opts.use_numeric) {
      const model::PulseEnvelope& env = seg.envelope;
      const evolve::TimeHamiltonian ham = [&](double t) -> CMat3 {
        return env.value(t) * coupler;
      };
      const evolve::FramePair pair{frame.dark, frame.bright};
      const auto prop =
          evolve::integrate(ham, 0.0, env.duration(), opts.integrator, pair);
      total = prop.final_unitary * total;

      const double peak = env.amplitude() * coupler.norm();
      if (peak > 0.0) {
        for (const auto& sample : prop.dyn_phase_samples) {
          dyn_max = std::max(
              dyn_max, sample.elements.cwiseAbs().maxCoeff() / peak);
        }
      }
    } else {
      total = closed * total;
    }

    // The protocol defines the next segment's Hamiltonian from the ideally
    // transported frame, regardless of how the propagator was realized.
    frame.dark = (closed * frame.dark).eval();
    frame.bright = (closed * frame.bright).eval();
    frame.excited = (closed * frame.excited).eval();
  }

  CMat3 p0 = CMat3::Zero();
  p0(0, 0) = p0(1, 1) = 1.0;

  HolonomyResult result;
  result.closure_defect = (total * p0 * total.adjoint() - p0).norm();
  result.dyn_phase_max = dyn_max;
  const double tol =
      opts.use_numeric ? opts.closure_tol_numeric : opts.closure_tol_closed;
  result.is_loop = result.closure_defect <= tol;
  result.gate = total.topLeftCorner<2, 2>();
  return result;
}

SchemeKind select_scheme(const GateTarget& target, double trace_tolerance) {
  const double abs_trace = 2.0 * std::abs(std::cos(0.5 * target.angle));
  return abs_trace > trace_tolerance ? SchemeKind::MultiPulseL2
                                     : SchemeKind::SingleLoopPi;
}

SchemeParams synthesize(const GateTarget& target, SchemeKind kind) {
  const double alpha = target.angle;
  // Identity targets leave the axis free; pin it for determinism.
  const Eigen::Vector3d m =
      alpha < 1e-12 ? Eigen::Vector3d::UnitZ() : target.axis;

  switch (kind) {
    case SchemeKind::MultiPulseL2:
      return MultiPulseL2{m, fold_angle(kPi - alpha)};

    case SchemeKind::TwoLoopPi: {
      const Eigen::Vector3d n1 = transverse_reference(m);
      const Eigen::Vector3d n2 =
          Eigen::AngleAxisd(0.5 * alpha, m).toRotationMatrix() * n1;
      return TwoLoopPi{n1, n2};
    }

    case SchemeKind::OffResonant: {
      if (!(alpha > 0.0 && alpha <= kPi)) {
        throw UnreachableTargetError(
            "off-resonant scheme reaches rotation angles in (0, pi] only",
            0.0, kPi);
      }
      const double c = (kPi - alpha) / kPi;  // chi / pi
      const double ratio = c / std::sqrt((1.0 - c) * (1.0 + c));
      return OffResonant{m, ratio};
    }

    case SchemeKind::SingleLoopPi: {
      // Window matches select_scheme's trace tolerance: |tr| <= 1e-8 means
      // |alpha - pi| <= ~1e-8, and those targets must stay synthesizable.
      if (std::abs(alpha - kPi) > 1e-8) {
        throw UnreachableTargetError(
            "single pi-loop scheme reaches only rotation angle pi", kPi, kPi);
      }
      return SingleLoopPi{m};
    }
  }
  throw std::logic_error("synthesize: bad scheme kind");
}

CompiledProgram compile_to_segments(const SchemeParams& params,
                                    const model::PulseEnvelope& prototype,
                                    bool strict_shape) {
  CompiledProgram program;
  program.scheme = kind_of(params);

  const auto resonant_loop = [&](const Eigen::Vector3d& n,
                                 std::vector<std::pair<double, double>>
                                     area_eta) {
    std::vector<model::SegmentSpec> segments;
    segments.reserve(area_eta.size());
    for (const auto& [area, eta] : area_eta) {
      segments.emplace_back(prototype, eta, area);
    }
    return model::LoopSpec(laser_for_axis(n), std::move(segments));
  };

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SingleLoopPi>) {
          program.loops.push_back(resonant_loop(p.n, {{kPi, 0.0}}));
        } else if constexpr (std::is_same_v<T, TwoLoopPi>) {
          program.loops.push_back(resonant_loop(p.n1, {{kPi, 0.0}}));
          program.loops.push_back(resonant_loop(p.n2, {{kPi, 0.0}}));
        } else if constexpr (std::is_same_v<T, MultiPulseL2>) {
          program.loops.push_back(
              resonant_loop(p.n, {{0.5 * kPi, 0.0}, {0.5 * kPi, p.eta}}));
        } else {
          if (prototype.shape() != model::PulseShape::Square) {
            if (strict_shape) {
              throw std::invalid_argument(
                  "off-resonant scheme requires a square envelope: the "
                  "detuned Hamiltonian fails to commute with itself under "
                  "a shaped drive");
            }
            program.shape_fallback_to_square = true;
          }
          const double omega0_rabi = 1.0;
          const double delta = 2.0 * p.ratio * omega0_rabi;
          program.offres = OffResProgram{
              laser_for_axis(p.n), omega0_rabi, delta,
              model::cyclic_duration_offres(omega0_rabi, delta)};
        }
      },
      params);
  return program;
}

CompiledProgram compile_to_segments(const SchemeParams& params,
                                    model::PulseShape shape,
                                    double tau_per_segment,
                                    bool strict_shape) {
  if (kind_of(params) == SchemeKind::OffResonant &&
      shape != model::PulseShape::Square) {
    if (strict_shape) {
      throw std::invalid_argument(
          "off-resonant scheme requires a square envelope: the detuned "
          "Hamiltonian fails to commute with itself under a shaped drive");
    }
    CompiledProgram program = compile_to_segments(
        params, model::PulseEnvelope::square(1.0, tau_per_segment), false);
    program.shape_fallback_to_square = true;
    return program;
  }
  return compile_to_segments(
      params, model::PulseEnvelope::make(shape, 1.0, tau_per_segment),
      strict_shape);
}

}  // namespace holoq::holonomy
