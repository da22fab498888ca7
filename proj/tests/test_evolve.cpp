#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "holoq/evolve.hpp"
#include "holoq/model.hpp"
#include "holoq/numkit.hpp"
#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

using holoq::evolve::FramePair;
using holoq::evolve::IntegratorConfig;
using holoq::evolve::TimeHamiltonian;
using holoq::model::LaserParams;
using holoq::model::PulseEnvelope;
using holoq::numkit::CMat3;
using holoq::numkit::Complex;
using holoq::numkit::CVec3;
using holoq::numkit::kImag;

namespace {

constexpr double kPi = std::numbers::pi;

LaserParams laser_from_axis(const Eigen::Vector3d& n) {
  holoq::model::BlochAxis axis;
  axis.theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  axis.phi = n.head<2>().norm() > 0.0 ? std::atan2(n.y(), n.x()) : 0.0;
  return holoq::model::omegas_from_bloch(axis);
}

// Fixed-step run: tolerance so loose that the first halving check passes.
IntegratorConfig fixed_steps(int n) {
  IntegratorConfig cfg;
  cfg.step_count = n;
  cfg.tolerance = 1e9;
  return cfg;
}

CMat3 computational_projector() {
  CMat3 p = CMat3::Zero();
  p(0, 0) = p(1, 1) = 1.0;
  return p;
}

}  // namespace

TEST_CASE("constant hamiltonian integration matches the spectral propagator") {
  std::mt19937 gen(31);
  for (int i = 0; i < 5; ++i) {
    const CMat3 h = oracle::random_hermitian(gen, 1.5);
    const double t1 = 1.7;
    const auto prop = holoq::evolve::integrate([&h](double) { return h; },
                                               0.0, t1);
    const CMat3 want = holoq::numkit::herm_propagator(h, t1);
    CHECK((prop.final_unitary - want).norm() < 1e-9);
    CHECK(prop.converged);
    CHECK(holoq::numkit::unitarity_defect(prop.final_unitary) < 1e-13);
  }
}

TEST_CASE("integration converges at fourth order on a shaped resonant pulse") {
  std::mt19937 gen(32);
  const Eigen::Vector3d n = oracle::random_axis(gen);
  const LaserParams laser = laser_from_axis(n);
  const CMat3 core = holoq::model::hamiltonian_resonant_core(laser);
  const PulseEnvelope env =
      PulseEnvelope::gaussian(1.0, 1.0).scaled_to_area(kPi);
  const TimeHamiltonian ham = [&](double t) { return env.value(t) * core; };

  const auto db = holoq::model::dark_bright(laser);
  const CMat3 exact = holoq::evolve::frame_propagator_closed(
      db.dark, db.bright, CVec3::Unit(2), kPi);

  double err[3];
  const int ladder[3] = {64, 128, 256};
  for (int i = 0; i < 3; ++i) {
    const auto prop =
        holoq::evolve::integrate(ham, 0.0, 1.0, fixed_steps(ladder[i]));
    CHECK(prop.steps_used == ladder[i]);
    err[i] = (prop.final_unitary - exact).norm();
  }
  CHECK(err[2] < 1e-8);
  for (int i = 0; i + 1 < 3; ++i) {
    const double ratio = err[i] / err[i + 1];
    INFO("halving ratio ", ratio);
    CHECK(ratio > 8.0);   // order 4 within a factor 2
    CHECK(ratio < 32.0);
  }
}

TEST_CASE("integration converges at fourth order on a non-commuting drive") {
  std::mt19937 gen(33);
  const LaserParams laser = laser_from_axis(oracle::random_axis(gen));
  const PulseEnvelope env =
      PulseEnvelope::gaussian(1.0, 1.0).scaled_to_area(kPi);
  const double delta = 1.3;
  const TimeHamiltonian ham = [&](double t) {
    return holoq::model::hamiltonian_offresonant(env.value(t), delta, laser);
  };

  const CMat3 reference =
      holoq::evolve::integrate(ham, 0.0, 1.0, fixed_steps(4096))
          .final_unitary;

  double err[3];
  const int ladder[3] = {64, 128, 256};
  for (int i = 0; i < 3; ++i) {
    err[i] = (holoq::evolve::integrate(ham, 0.0, 1.0, fixed_steps(ladder[i]))
                  .final_unitary -
              reference)
                 .norm();
  }
  for (int i = 0; i + 1 < 3; ++i) {
    const double ratio = err[i] / err[i + 1];
    INFO("halving ratio ", ratio);
    CHECK(ratio > 8.0);
    CHECK(ratio < 32.0);
  }
}

TEST_CASE("integration composes over subintervals") {
  std::mt19937 gen(34);
  const LaserParams laser = laser_from_axis(oracle::random_axis(gen));
  const PulseEnvelope env =
      PulseEnvelope::sin_squared(1.0, 2.0).scaled_to_area(kPi);
  const TimeHamiltonian ham = [&](double t) {
    return holoq::model::hamiltonian_offresonant(env.value(t), 0.9, laser);
  };
  IntegratorConfig cfg;
  cfg.tolerance = 1e-12;
  const CMat3 whole = holoq::evolve::integrate(ham, 0.0, 2.0, cfg)
                          .final_unitary;
  const CMat3 first = holoq::evolve::integrate(ham, 0.0, 1.0, cfg)
                          .final_unitary;
  const CMat3 second = holoq::evolve::integrate(ham, 1.0, 2.0, cfg)
                           .final_unitary;
  CHECK((whole - second * first).norm() < 1e-9);
}

TEST_CASE("step doubling refines until the halving estimate passes") {
  const LaserParams laser =
      LaserParams::normalized(Complex(1.0, 0.0), Complex(-1.0, 0.0));
  const CMat3 core = holoq::model::hamiltonian_resonant_core(laser);
  const PulseEnvelope env =
      PulseEnvelope::gaussian(1.0, 1.0).scaled_to_area(kPi);
  const TimeHamiltonian ham = [&](double t) { return env.value(t) * core; };

  IntegratorConfig cfg;
  cfg.step_count = 16;
  cfg.tolerance = 1e-9;
  const auto prop = holoq::evolve::integrate(ham, 0.0, 1.0, cfg);
  CHECK(prop.converged);
  CHECK(prop.error_estimate <= 1e-9);
  CHECK(prop.steps_used > 16);

  IntegratorConfig starved = cfg;
  starved.tolerance = 1e-30;
  starved.max_refinements = 2;
  const auto stuck = holoq::evolve::integrate(ham, 0.0, 1.0, starved);
  CHECK_FALSE(stuck.converged);
  CHECK(stuck.error_estimate > 1e-30);
  CHECK(stuck.steps_used == 64);
}

TEST_CASE("integration validates its inputs") {
  const TimeHamiltonian ham = [](double) { return CMat3::Identity(); };
  CHECK_THROWS_AS((void)holoq::evolve::integrate(ham, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)holoq::evolve::integrate(ham, 1.0, 0.0),
                  std::invalid_argument);
  IntegratorConfig bad;
  bad.step_count = 8;
  CHECK_THROWS_AS((void)holoq::evolve::integrate(ham, 0.0, 1.0, bad),
                  std::invalid_argument);
  IntegratorConfig zero_tol;
  zero_tol.tolerance = 0.0;
  CHECK_THROWS_AS((void)holoq::evolve::integrate(ham, 0.0, 1.0, zero_tol),
                  std::invalid_argument);

  const TimeHamiltonian skew = [](double) {
    CMat3 m = CMat3::Zero();
    m(0, 1) = 1.0;
    return m;
  };
  CHECK_THROWS_AS((void)holoq::evolve::integrate(skew, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("trajectory collection walks the final grid") {
  const TimeHamiltonian ham = [](double) {
    CMat3 h = CMat3::Zero();
    h(2, 2) = 1.0;
    return h;
  };
  IntegratorConfig cfg;
  cfg.keep_trajectory = true;
  const auto prop = holoq::evolve::integrate(ham, 0.0, 1.0, cfg);
  REQUIRE(prop.trajectory.has_value());
  CHECK(static_cast<int>(prop.trajectory->size()) == prop.steps_used + 1);
  CHECK(prop.trajectory->front().first == 0.0);
  CHECK(prop.trajectory->back().first == doctest::Approx(1.0));
  CHECK((prop.trajectory->front().second - CMat3::Identity()).norm() == 0.0);
  CHECK((prop.trajectory->back().second - prop.final_unitary).norm() == 0.0);
}

TEST_CASE("closed-form frame propagator equals the exponential") {
  std::mt19937 gen(35);
  std::uniform_real_distribution<double> area_draw(0.1, 2.0 * kPi);
  for (int i = 0; i < 10; ++i) {
    const CMat3 u = oracle::random_unitary<CMat3>(gen);
    const CVec3 d = u.col(0), b = u.col(1), e = u.col(2);
    const double a = area_draw(gen);
    const CMat3 got = holoq::evolve::frame_propagator_closed(d, b, e, a);
    const CMat3 gen_h = e * b.adjoint() + b * e.adjoint();
    const CMat3 want = oracle::expm_taylor<CMat3>(-kImag * a * gen_h);
    CHECK((got - want).norm() < 1e-13);
    CHECK(holoq::numkit::unitarity_defect(got) < 1e-13);
  }
}

TEST_CASE("closed-form segment propagator equals the shifted exponential") {
  std::mt19937 gen(36);
  for (int i = 0; i < 10; ++i) {
    const LaserParams laser = laser_from_axis(oracle::random_axis(gen));
    const double eta = 0.7 * i;
    const double area = 0.3 + 0.2 * i;
    const CMat3 got =
        holoq::evolve::segment_propagator_closed(laser, eta, area);
    const CMat3 h = holoq::model::hamiltonian_eta_shifted(laser, eta);
    const CMat3 want = oracle::expm_taylor<CMat3>(-kImag * area * h);
    CHECK((got - want).norm() < 1e-13);
  }
}

TEST_CASE("off-resonant square propagator closes exactly at the magic time") {
  std::mt19937 gen(37);
  const CMat3 p0 = computational_projector();
  for (double ratio : {0.0, 0.25, 1.0, 4.0}) {
    const LaserParams laser = laser_from_axis(oracle::random_axis(gen));
    const double delta = 2.0 * ratio;
    const double tau = holoq::model::cyclic_duration_offres(1.0, delta);
    const CMat3 u =
        holoq::evolve::offres_square_propagator(1.0, delta, laser, tau);
    CHECK((u * p0 * u.adjoint() - p0).norm() < 1e-12);
    const CMat3 half =
        holoq::evolve::offres_square_propagator(1.0, delta, laser, 0.5 * tau);
    CHECK((half * p0 * half.adjoint() - p0).norm() > 0.1);
  }
}

TEST_CASE("dynamical elements vanish along resonant segments") {
  std::mt19937 gen(38);
  const LaserParams laser = laser_from_axis(oracle::random_axis(gen));
  const auto db = holoq::model::dark_bright(laser);
  const FramePair frame{db.dark, db.bright};

  const PulseEnvelope env =
      PulseEnvelope::gaussian(1.0, 1.0).scaled_to_area(kPi);
  const CMat3 core = holoq::model::hamiltonian_resonant_core(laser);
  const auto plain = holoq::evolve::dynamical_phase_trace(
      [&](double t) { return env.value(t) * core; }, frame, 0.0, 1.0);
  CHECK(plain.max_abs <= 1e-10);
  CHECK(plain.samples.size() > 16);

  const CMat3 shifted = holoq::model::hamiltonian_eta_shifted(laser, 1.2);
  const auto with_eta = holoq::evolve::dynamical_phase_trace(
      [&](double t) { return env.value(t) * shifted; }, frame, 0.0, 1.0);
  CHECK(with_eta.max_abs <= 1e-10);
}

TEST_CASE("dynamical elements appear once the qubit levels are detuned") {
  std::mt19937 gen(39);
  const LaserParams laser = laser_from_axis(oracle::random_axis(gen));
  const auto db = holoq::model::dark_bright(laser);

  // Excited-level detuning alone leaves the qubit-frame elements at zero:
  // the Hamiltonian vanishes on span{dark, bright} and, being constant,
  // keeps <psi_a(t)| H |psi_b(t)> conserved.
  const CMat3 offres = holoq::model::hamiltonian_offresonant(1.0, 2.0, laser);
  const auto silent = holoq::evolve::dynamical_phase_trace(
      [&](double) { return offres; }, {db.dark, db.bright}, 0.0,
      holoq::model::cyclic_duration_offres(1.0, 2.0));
  CHECK(silent.max_abs <= 1e-10);

  // Detuning the qubit levels puts weight inside the frame immediately.
  const CMat3 skewed = holoq::model::hamiltonian_general(
      laser.omega0(), laser.omega1(), {0.9, -0.4});
  const auto loud = holoq::evolve::dynamical_phase_trace(
      [&](double) { return skewed; }, {db.dark, db.bright}, 0.0, 2.0);
  CHECK(loud.max_abs > 0.05);
}

TEST_CASE("dynamical trace rejects bad frames") {
  const TimeHamiltonian ham = [](double) { return CMat3::Identity(); };
  const CVec3 d(1.0, 0.0, 0.0);
  CHECK_THROWS_AS((void)holoq::evolve::dynamical_phase_trace(
                      ham, {d, d}, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)holoq::evolve::dynamical_phase_trace(
                      ham, {d, 2.0 * CVec3::Unit(1)}, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)holoq::evolve::dynamical_phase_trace(
                      ham, {CVec3::Unit(2), CVec3::Unit(1)}, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("commutator defect separates rigid from turning drives") {
  std::mt19937 gen(40);
  const LaserParams laser = laser_from_axis(oracle::random_axis(gen));
  const CMat3 core = holoq::model::hamiltonian_resonant_core(laser);
  const PulseEnvelope env =
      PulseEnvelope::gaussian(1.0, 1.0).scaled_to_area(kPi);

  const double rigid = holoq::evolve::commutator_defect(
      [&](double t) { return env.value(t) * core; }, 0.0, 1.0, 33);
  CHECK(rigid <= 1e-12);

  const double constant = holoq::evolve::commutator_defect(
      [&](double) {
        return holoq::model::hamiltonian_offresonant(1.0, 2.0, laser);
      },
      0.0, 1.0, 9);
  CHECK(constant == 0.0);

  const double turning = holoq::evolve::commutator_defect(
      [&](double t) {
        return holoq::model::hamiltonian_offresonant(env.value(t), 2.0,
                                                     laser);
      },
      0.0, 1.0, 33);
  CHECK(turning > 1e-3);

  CHECK_THROWS_AS((void)holoq::evolve::commutator_defect(
                      [&](double) { return core; }, 0.0, 1.0, 1),
                  std::invalid_argument);
}
