// Lambda-system building blocks: laser parameters and the Bloch axis they
// define, dark/bright basis, the driven Hamiltonians, and pulse envelopes.
//
// Basis convention throughout the library: index 0 = |0>, 1 = |1>, 2 = |e>.
// Units: hbar = 1, time in inverse units of a reference Rabi frequency, all
// Hamiltonian entries dimensionless multiples thereof.
#pragma once

#include "holoq/numkit.hpp"

#include <utility>
#include <vector>

namespace holoq::model {

using numkit::CMat3;
using numkit::Complex;
using numkit::CVec3;

// Rotation axis n = (sin t cos p, sin t sin p, cos t), theta in [0, pi],
// phi in [0, 2 pi).
struct BlochAxis {
  double theta = 0.0;
  double phi = 0.0;

  Eigen::Vector3d unit_vector() const;
};

// Normalized complex pair (omega0, omega1) describing the relative amplitude
// and phase of the two drive tones; |omega0|^2 + |omega1|^2 = 1.
class LaserParams {
 public:
  LaserParams(Complex omega0, Complex omega1,
              double tol = numkit::kAlgebraicTol);

  // Rescales an arbitrary nonzero pair onto the unit sphere.
  static LaserParams normalized(Complex omega0, Complex omega1);

  Complex omega0() const { return omega0_; }
  Complex omega1() const { return omega1_; }

 private:
  Complex omega0_;
  Complex omega1_;
};

struct DarkBright {
  CVec3 dark;    // -omega1 |0> + omega0 |1>, decoupled from the drive
  CVec3 bright;  // conj(omega0) |0> + conj(omega1) |1>, couples to |e>
};

struct Detunings {
  double delta0 = 0.0;
  double delta1 = 0.0;
};

// Gauge fixing: omega1 real and non-negative, i.e.
// omega0 = -e^{i phi} sin(theta/2), omega1 = cos(theta/2).
// Poles: theta = 0 maps to phi = 0; at theta = pi, phi is read from
// arg(-omega0).
LaserParams omegas_from_bloch(const BlochAxis& axis);
BlochAxis bloch_from_omegas(const LaserParams& params);

DarkBright dark_bright(const LaserParams& params);

// Full lambda Hamiltonian with independent detunings and couplings
// upsilon_p |e><p| + h.c.
CMat3 hamiltonian_general(Complex upsilon0, Complex upsilon1,
                          const Detunings& det);

// Dimensionless resonant drive H = |e><b| + |b><e|; eigenvalues {-1, 0, +1},
// annihilates the dark state.
CMat3 hamiltonian_resonant_core(const LaserParams& params);

// Equal-detuning drive delta |e><e| + omega0_rabi (|e><b| + |b><e|).
CMat3 hamiltonian_offresonant(double omega0_rabi, double delta,
                              const LaserParams& params);

// Dimensionless drive with both laser tones phase-shifted by eta:
// e^{i eta} |e><b| + e^{-i eta} |b><e|.
CMat3 hamiltonian_eta_shifted(const LaserParams& params, double eta);

// Cyclic run-time 2 pi / sqrt(delta^2 + 4 omega0^2) of the square-pulse
// off-resonant drive.
double cyclic_duration_offres(double omega0_rabi, double delta);

enum class PulseShape { Square, Gaussian, SinSquared, Sampled };

// Real Rabi envelope with support on [0, duration]. Sampled envelopes are
// piecewise-linear on a strictly increasing time grid and zero outside it.
// The gaussian shape is centered with sigma = duration / 6.
class PulseEnvelope {
 public:
  using Sample = std::pair<double, double>;

  static PulseEnvelope square(double amplitude, double duration);
  static PulseEnvelope gaussian(double amplitude, double duration);
  static PulseEnvelope sin_squared(double amplitude, double duration);
  static PulseEnvelope sampled(std::vector<Sample> samples);
  static PulseEnvelope make(PulseShape shape, double amplitude,
                            double duration);

  PulseShape shape() const { return shape_; }
  double duration() const { return duration_; }
  double amplitude() const { return amplitude_; }
  const std::vector<Sample>& samples() const { return samples_; }

  double value(double t) const;

  // Integral over the support; closed form for the analytic shapes,
  // refined composite trapezoid for sampled ones.
  double area() const;

  // Amplitude rescaled so that area() == target; shape and duration kept.
  PulseEnvelope scaled_to_area(double target) const;

 private:
  PulseEnvelope(PulseShape shape, double amplitude, double duration,
                std::vector<Sample> samples);

  PulseShape shape_;
  double amplitude_;
  double duration_;
  std::vector<Sample> samples_;
};

double pulse_area(const PulseEnvelope& env);
PulseEnvelope scale_to_area(const PulseEnvelope& env, double target);

// One drive segment: envelope rescaled to the target pulse area, plus the
// phase shift eta of the tone pair relative to the first segment.
struct SegmentSpec {
  SegmentSpec(PulseEnvelope env, double eta_shift, double area);

  PulseEnvelope envelope;
  double eta;
  double target_area;
};

// An ordered list of segments traversed with a fixed laser axis; candidate
// loop in the space of computational subspaces. The first segment carries
// the reference phase eta = 0.
struct LoopSpec {
  LoopSpec(LaserParams laser_params, std::vector<SegmentSpec> segs);

  LaserParams laser;
  std::vector<SegmentSpec> segments;
};

}  // namespace holoq::model
