#include "holoq/numkit.hpp"

#include <cmath>
#include <sstream>

namespace holoq::numkit {

CMat2 sigma_x() {
  CMat2 m;
  m << 0, 1, 1, 0;
  return m;
}

CMat2 sigma_y() {
  CMat2 m;
  m << 0, -kImag, kImag, 0;
  return m;
}

CMat2 sigma_z() {
  CMat2 m;
  m << 1, 0, 0, -1;
  return m;
}

CMat2 pauli_dot(const Eigen::Vector3d& n) {
  return n.x() * sigma_x() + n.y() * sigma_y() + n.z() * sigma_z();
}

namespace {

[[noreturn]] void reject(const char* op, const char* what, double defect) {
  std::ostringstream msg;
  msg << op << ": " << what << " (defect " << defect << ")";
  throw std::invalid_argument(msg.str());
}

}  // namespace

CMat3 herm_propagator(const CMat3& h, double s, double tol) {
  const double defect = hermiticity_defect(h);
  const double scale = std::max(1.0, h.norm());
  if (!(defect <= tol * scale)) {
    reject("herm_propagator", "input not hermitian", defect);
  }
  Eigen::SelfAdjointEigenSolver<CMat3> es;
  es.compute((h + h.adjoint()) / 2.0);
  const Eigen::Vector3d& ev = es.eigenvalues();
  CVec3 phases;
  for (int k = 0; k < 3; ++k) {
    phases(k) = std::exp(-kImag * s * ev(k));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double phase_insensitive_distance(const CMat2& a, const CMat2& b) {
  return 1.0 - 0.5 * std::abs((a.adjoint() * b).trace());
}

double gate_distance_up_to_phase(const CMat2& a, const CMat2& b, double tol) {
  const double da = unitarity_defect(a);
  if (!(da <= tol)) reject("gate_distance_up_to_phase", "A not unitary", da);
  const double db = unitarity_defect(b);
  if (!(db <= tol)) reject("gate_distance_up_to_phase", "B not unitary", db);
  return phase_insensitive_distance(a, b);
}

double projector_defect(const CMat3& p, const CMat3& q, double tol) {
  for (const auto* m : {&p, &q}) {
    const double dh = hermiticity_defect(*m);
    if (!(dh <= tol)) reject("projector_defect", "input not hermitian", dh);
    const double di = idempotency_defect(*m);
    if (!(di <= tol)) reject("projector_defect", "input not idempotent", di);
  }
  return (p - q).norm();
}

}  // namespace holoq::numkit
