#include "holoq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace holoq::model {

namespace {

constexpr double kPi = std::numbers::pi;

double fold_angle(double a) {
  double r = std::fmod(a, 2.0 * kPi);
  if (r < 0) r += 2.0 * kPi;
  return r;
}

}  // namespace

Eigen::Vector3d BlochAxis::unit_vector() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

LaserParams::LaserParams(Complex omega0, Complex omega1, double tol)
    : omega0_(omega0), omega1_(omega1) {
  const double n2 = std::norm(omega0) + std::norm(omega1);
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > tol) {
    std::ostringstream msg;
    msg << "LaserParams: |omega0|^2 + |omega1|^2 = " << n2 << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
}

LaserParams LaserParams::normalized(Complex omega0, Complex omega1) {
  const double n = std::sqrt(std::norm(omega0) + std::norm(omega1));
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("LaserParams: cannot normalize zero pair");
  }
  return LaserParams(omega0 / n, omega1 / n);
}

LaserParams omegas_from_bloch(const BlochAxis& axis) {
  const Complex w0 =
      -std::exp(numkit::kImag * axis.phi) * std::sin(axis.theta / 2.0);
  const double w1 = std::cos(axis.theta / 2.0);
  return LaserParams::normalized(w0, w1);
}

BlochAxis bloch_from_omegas(const LaserParams& params) {
  const double a0 = std::abs(params.omega0());
  const double a1 = std::abs(params.omega1());
  BlochAxis axis;
  axis.theta = 2.0 * std::atan2(a0, a1);
  if (a0 <= 1e-15) {
    axis.phi = 0.0;  // pole convention at theta = 0
  } else if (a1 <= 1e-15) {
    axis.phi = fold_angle(std::arg(-params.omega0()));
  } else {
    axis.phi = fold_angle(std::arg(-params.omega0() / params.omega1()));
  }
  return axis;
}

DarkBright dark_bright(const LaserParams& params) {
  DarkBright db;
  db.dark = CVec3(-params.omega1(), params.omega0(), 0.0);
  db.bright =
      CVec3(std::conj(params.omega0()), std::conj(params.omega1()), 0.0);
  return db;
}

CMat3 hamiltonian_general(Complex upsilon0, Complex upsilon1,
                          const Detunings& det) {
  if (!std::isfinite(det.delta0) || !std::isfinite(det.delta1)) {
    throw std::invalid_argument("hamiltonian_general: non-finite detuning");
  }
  CMat3 h = CMat3::Zero();
  h(0, 0) = det.delta0;
  h(1, 1) = det.delta1;
  h(2, 0) = upsilon0;
  h(2, 1) = upsilon1;
  h(0, 2) = std::conj(upsilon0);
  h(1, 2) = std::conj(upsilon1);
  return h;
}

CMat3 hamiltonian_resonant_core(const LaserParams& params) {
  // |e><b| + |b><e| with <b| = omega0 <0| + omega1 <1|.
  return hamiltonian_general(params.omega0(), params.omega1(), Detunings{});
}

CMat3 hamiltonian_offresonant(double omega0_rabi, double delta,
                              const LaserParams& params) {
  CMat3 h = omega0_rabi * hamiltonian_resonant_core(params);
  h(2, 2) = delta;
  return h;
}

CMat3 hamiltonian_eta_shifted(const LaserParams& params, double eta) {
  const Complex shift = std::exp(numkit::kImag * eta);
  return hamiltonian_general(shift * params.omega0(), shift * params.omega1(),
                             Detunings{});
}

double cyclic_duration_offres(double omega0_rabi, double delta) {
  const double gap = std::hypot(delta, 2.0 * omega0_rabi);
  if (!(gap > 0.0)) {
    throw std::invalid_argument(
        "cyclic_duration_offres: omega0 and delta both zero");
  }
  return 2.0 * kPi / gap;
}

PulseEnvelope::PulseEnvelope(PulseShape shape, double amplitude,
                             double duration, std::vector<Sample> samples)
    : shape_(shape),
      amplitude_(amplitude),
      duration_(duration),
      samples_(std::move(samples)) {}

namespace {

void check_duration(double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("PulseEnvelope: duration must be positive");
  }
}

}  // namespace

PulseEnvelope PulseEnvelope::square(double amplitude, double duration) {
  check_duration(duration);
  return PulseEnvelope(PulseShape::Square, amplitude, duration, {});
}

PulseEnvelope PulseEnvelope::gaussian(double amplitude, double duration) {
  check_duration(duration);
  return PulseEnvelope(PulseShape::Gaussian, amplitude, duration, {});
}

PulseEnvelope PulseEnvelope::sin_squared(double amplitude, double duration) {
  check_duration(duration);
  return PulseEnvelope(PulseShape::SinSquared, amplitude, duration, {});
}

PulseEnvelope PulseEnvelope::sampled(std::vector<Sample> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("PulseEnvelope: need at least two samples");
  }
  if (samples.front().first < 0.0) {
    throw std::invalid_argument("PulseEnvelope: sample times must be >= 0");
  }
  double peak = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].first) || !std::isfinite(samples[i].second)) {
      throw std::invalid_argument("PulseEnvelope: non-finite sample");
    }
    if (i > 0 && !(samples[i].first > samples[i - 1].first)) {
      throw std::invalid_argument(
          "PulseEnvelope: sample times must be strictly increasing");
    }
    peak = std::max(peak, std::abs(samples[i].second));
  }
  const double duration = samples.back().first;
  check_duration(duration);
  return PulseEnvelope(PulseShape::Sampled, peak, duration, std::move(samples));
}

PulseEnvelope PulseEnvelope::make(PulseShape shape, double amplitude,
                                  double duration) {
  switch (shape) {
    case PulseShape::Square:
      return square(amplitude, duration);
    case PulseShape::Gaussian:
      return gaussian(amplitude, duration);
    case PulseShape::SinSquared:
      return sin_squared(amplitude, duration);
    case PulseShape::Sampled:
      break;
  }
  throw std::invalid_argument("PulseEnvelope: sampled shape needs samples");
}

double PulseEnvelope::value(double t) const {
  switch (shape_) {
    case PulseShape::Square:
      return (t >= 0.0 && t <= duration_) ? amplitude_ : 0.0;
    case PulseShape::Gaussian: {
      if (t < 0.0 || t > duration_) return 0.0;
      const double sigma = duration_ / 6.0;
      const double x = (t - duration_ / 2.0) / sigma;
      return amplitude_ * std::exp(-0.5 * x * x);
    }
    case PulseShape::SinSquared: {
      if (t < 0.0 || t > duration_) return 0.0;
      const double s = std::sin(kPi * t / duration_);
      return amplitude_ * s * s;
    }
    case PulseShape::Sampled: {
      if (t < samples_.front().first || t > samples_.back().first) return 0.0;
      auto hi = std::upper_bound(
          samples_.begin(), samples_.end(), t,
          [](double x, const Sample& s) { return x < s.first; });
      if (hi == samples_.begin()) return samples_.front().second;
      if (hi == samples_.end()) return samples_.back().second;
      auto lo = hi - 1;
      const double w = (t - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
  }
  return 0.0;
}

double PulseEnvelope::area() const {
  switch (shape_) {
    case PulseShape::Square:
      return amplitude_ * duration_;
    case PulseShape::Gaussian: {
      const double sigma = duration_ / 6.0;
      // Integral of the truncated gaussian over [0, duration].
      return amplitude_ * sigma * std::sqrt(2.0 * kPi) *
             std::erf(3.0 / std::sqrt(2.0));
    }
    case PulseShape::SinSquared:
      return amplitude_ * duration_ / 2.0;
    case PulseShape::Sampled: {
      // Composite trapezoid on the sample grid; Richardson refinement until
      // the estimate is stable to 1e-10 relative.
      auto trapezoid = [this](int splits) {
        double sum = 0.0;
        for (std::size_t i = 1; i < samples_.size(); ++i) {
          const double t0 = samples_[i - 1].first;
          const double t1 = samples_[i].first;
          const double h = (t1 - t0) / splits;
          double acc = 0.5 * (value(t0) + value(t1));
          for (int k = 1; k < splits; ++k) acc += value(t0 + k * h);
          sum += acc * h;
        }
        return sum;
      };
      double coarse = trapezoid(1);
      for (int splits = 2; splits <= 16; splits *= 2) {
        const double fine = trapezoid(splits);
        const double richardson = fine + (fine - coarse) / 3.0;
        if (std::abs(richardson - coarse) <=
            1e-10 * std::max(1.0, std::abs(richardson))) {
          return richardson;
        }
        coarse = fine;
      }
      return coarse;
    }
  }
  return 0.0;
}

PulseEnvelope PulseEnvelope::scaled_to_area(double target) const {
  if (!(target > 0.0)) {
    throw std::invalid_argument("scale_to_area: target area must be positive");
  }
  const double a = area();
  if (!(std::abs(a) > 1e-300)) {
    throw std::invalid_argument("scale_to_area: envelope has zero area");
  }
  const double factor = target / a;
  PulseEnvelope scaled = *this;
  scaled.amplitude_ *= factor;
  for (auto& s : scaled.samples_) s.second *= factor;
  return scaled;
}

double pulse_area(const PulseEnvelope& env) { return env.area(); }

PulseEnvelope scale_to_area(const PulseEnvelope& env, double target) {
  return env.scaled_to_area(target);
}

SegmentSpec::SegmentSpec(PulseEnvelope env, double eta_shift, double area)
    : envelope(env.scaled_to_area(area)),
      eta(fold_angle(eta_shift)),
      target_area(area) {}

LoopSpec::LoopSpec(LaserParams laser_params, std::vector<SegmentSpec> segs)
    : laser(laser_params), segments(std::move(segs)) {
  if (segments.empty()) {
    throw std::invalid_argument("LoopSpec: needs at least one segment");
  }
  if (std::abs(segments.front().eta) > numkit::kAlgebraicTol) {
    throw std::invalid_argument(
        "LoopSpec: first segment carries the reference phase eta = 0");
  }
}

}  // namespace holoq::model
