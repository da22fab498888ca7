// Dense complex linear algebra for the 3-level state space and the 2-level
// gate space, plus the metrics the rest of the library asserts against.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace holoq::numkit {

using Complex = std::complex<double>;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;
using CMat2 = Eigen::Matrix2cd;

// Default tolerances: closed-form/algebraic identities vs integrated dynamics.
inline constexpr double kAlgebraicTol = 1e-12;
inline constexpr double kDynamicTol = 1e-8;

constexpr Complex kImag{0.0, 1.0};

// Frobenius-norm defect metrics. All return 0 for an exactly conforming input.
template <typename Mat>
double hermiticity_defect(const Mat& m) {
  return (m - m.adjoint().eval()).norm();
}

template <typename Mat>
double unitarity_defect(const Mat& m) {
  return (m.adjoint() * m - Mat::Identity()).norm();
}

template <typename Mat>
double idempotency_defect(const Mat& m) {
  return (m * m - m).norm();
}

inline bool is_state(const CVec3& v, double tol = kAlgebraicTol) {
  return v.allFinite() && std::abs(v.norm() - 1.0) <= tol;
}

// Pauli operators in the {|0>, |1>} basis.
CMat2 sigma_x();
CMat2 sigma_y();
CMat2 sigma_z();

// n . sigma for a (not necessarily unit) real vector n.
CMat2 pauli_dot(const Eigen::Vector3d& n);

// exp(-i s H) for hermitian H, by spectral decomposition; exactly unitary up
// to roundoff. Throws std::invalid_argument when H is not hermitian within
// tol, quoting the defect.
CMat3 herm_propagator(const CMat3& h, double s, double tol = kAlgebraicTol);

// 1 - |Tr(A^dag B)|/2 without input validation; in [0, 1] whenever the
// singular values of both arguments are <= 1. Zero iff A = e^{i gamma} B.
double phase_insensitive_distance(const CMat2& a, const CMat2& b);

// Same metric, but both inputs must be unitary within tol.
double gate_distance_up_to_phase(const CMat2& a, const CMat2& b,
                                 double tol = kAlgebraicTol);

// ||P - Q||_F for two hermitian idempotents; zero iff both project onto the
// same subspace. Non-projector inputs are rejected with the defect quoted.
double projector_defect(const CMat3& p, const CMat3& q,
                        double tol = kAlgebraicTol);

}  // namespace holoq::numkit
