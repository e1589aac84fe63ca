#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qmetro {

inline Eigen::Matrix2cd sigma_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

inline Eigen::Matrix2cd sigma_y() {
  Eigen::Matrix2cd m;
  m << std::complex<double>(0, 0), std::complex<double>(0, -1),
      std::complex<double>(0, 1), std::complex<double>(0, 0);
  return m;
}

inline Eigen::Matrix2cd sigma_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

/// v . sigma for a real 3-vector v.
inline Eigen::Matrix2cd pauli_dot(const Eigen::Vector3d& v) {
  Eigen::Matrix2cd m;
  m << v.z(), std::complex<double>(v.x(), -v.y()),
      std::complex<double>(v.x(), v.y()), -v.z();
  return m;
}

/// rho = (I + r . sigma)/2.
inline Eigen::Matrix2cd density_from_bloch(const Eigen::Vector3d& r) {
  return 0.5 * (Eigen::Matrix2cd::Identity() + pauli_dot(r));
}

inline Eigen::Vector3d bloch_from_density(const Eigen::Matrix2cd& rho) {
  return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(),
          (rho(0, 0) - rho(1, 1)).real()};
}

}  // namespace qmetro
