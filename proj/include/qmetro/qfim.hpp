#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace qmetro {

using complexd = std::complex<double>;

/// Index into the estimated parameter pair.
enum class Parameter { Phi, Kappa };

/// Which figure of merit a probe-state search optimizes.
enum class Target { PhiIndividual, KappaIndividual, Simultaneous };

/// 2x2 quantum Fisher information matrix over (phi, kappa).
struct QfiMatrix {
  double phi_phi = 0.0;
  double kappa_kappa = 0.0;
  double phi_kappa = 0.0;

  double det() const { return phi_phi * kappa_kappa - phi_kappa * phi_kappa; }

  /// Effective information on phi when kappa is estimated alongside it.
  double schur_phi() const {
    return phi_phi - phi_kappa * phi_kappa / kappa_kappa;
  }
  double schur_kappa() const {
    return kappa_kappa - phi_kappa * phi_kappa / phi_phi;
  }

  /// Tr(F^{-1}) through the Schur complements; +inf when F is singular.
  double inv_trace() const {
    if (!(phi_phi > 0.0) || !(kappa_kappa > 0.0))
      return std::numeric_limits<double>::infinity();
    const double sp = schur_phi();
    const double sk = schur_kappa();
    if (!(sp > 0.0) || !(sk > 0.0))
      return std::numeric_limits<double>::infinity();
    return 1.0 / sp + 1.0 / sk;
  }

  QfiMatrix& operator+=(const QfiMatrix& o) {
    phi_phi += o.phi_phi;
    kappa_kappa += o.kappa_kappa;
    phi_kappa += o.phi_kappa;
    return *this;
  }

  double operator()(Parameter mu, Parameter nu) const {
    if (mu == nu)
      return mu == Parameter::Phi ? phi_phi : kappa_kappa;
    return phi_kappa;
  }
};

struct EighResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXcd eigenvectors; // columns, orthonormal
};

/// Eigendecomposition of a Hermitian matrix. Rejects inputs whose
/// anti-Hermitian part exceeds 1e-12 relative to the largest entry.
inline EighResult eigh(const Eigen::MatrixXcd& h) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::domain_error("eigh: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigh: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace detail {

/// Support cutoff for eigenvalue-pair denominators.
inline double support_cutoff(double lambda_max) { return 1e-12 * lambda_max; }

inline void require_hermitian(const Eigen::MatrixXcd& m, const char* what) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::domain_error(std::string(what) + ": matrix is not Hermitian");
}

inline void require_density(const Eigen::MatrixXcd& rho) {
  require_hermitian(rho, "density");
  if (std::abs(rho.trace() - std::complex<double>(1.0, 0.0)) > 1e-12)
    throw std::domain_error("density: trace must be 1");
}

inline void require_traceless(const Eigen::MatrixXcd& d) {
  require_hermitian(d, "derivative");
  if (std::abs(d.trace()) > 1e-10)
    throw std::domain_error("derivative: matrix must be traceless");
}

}  // namespace detail

/// Symmetric logarithmic derivative: the Hermitian L solving
/// drho = (rho L + L rho)/2. In the eigenbasis of rho,
/// L_ij = 2 drho_ij/(lambda_i + lambda_j); pairs below the support cutoff
/// are set to zero, which handles rank deficiency.
inline Eigen::MatrixXcd sld(const Eigen::MatrixXcd& rho,
                            const Eigen::MatrixXcd& drho) {
  detail::require_density(rho);
  detail::require_traceless(drho);
  const auto [lam, v] = eigh(rho);
  const int n = int(lam.size());
  if (lam(0) < -1e-10)
    throw std::domain_error("sld: rho has a negative eigenvalue");
  const double eps = detail::support_cutoff(lam(n - 1));
  const Eigen::MatrixXcd d = v.adjoint() * drho * v;
  Eigen::MatrixXcd lt = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double denom = lam(i) + lam(j);
      if (denom > eps) lt(i, j) = 2.0 * d(i, j) / denom;
    }
  return v * lt * v.adjoint();
}

/// Spectral double-sum QFIM of one orthogonal block of a direct-sum state;
/// the block may be subnormalized (its trace is the block's total weight).
/// F_munu = sum over eigenpairs of 2 Re[<i|d_mu|j><j|d_nu|i>]/(l_i + l_j),
/// restricted to l_i + l_j above the support cutoff.
inline QfiMatrix qfim_block(const Eigen::MatrixXcd& block,
                            const Eigen::MatrixXcd& dphi,
                            const Eigen::MatrixXcd& dkappa) {
  const auto [lam, v] = eigh(block);
  const int n = int(lam.size());
  if (lam(0) < -1e-10)
    throw std::domain_error("qfim_block: block has a negative eigenvalue");
  const double lmax = lam(n - 1);
  if (!(lmax > 0.0)) return {};  // massless block carries no information
  const double eps = detail::support_cutoff(lmax);
  const Eigen::MatrixXcd dp = v.adjoint() * dphi * v;
  const Eigen::MatrixXcd dk = v.adjoint() * dkappa * v;
  QfiMatrix f;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double denom = lam(i) + lam(j);
      if (denom <= eps) continue;
      const std::complex<double> a = dp(i, j);
      const std::complex<double> b = dk(i, j);
      f.phi_phi += 2.0 * std::norm(a) / denom;
      f.kappa_kappa += 2.0 * std::norm(b) / denom;
      f.phi_kappa += 2.0 * (a * std::conj(b)).real() / denom;
    }
  return f;
}

/// QFIM of a parameterized density matrix from its analytic derivatives.
inline QfiMatrix qfim(const Eigen::MatrixXcd& rho,
                      const Eigen::MatrixXcd& drho_phi,
                      const Eigen::MatrixXcd& drho_kappa) {
  detail::require_density(rho);
  detail::require_traceless(drho_phi);
  detail::require_traceless(drho_kappa);
  return qfim_block(rho, drho_phi, drho_kappa);
}

/// Im Tr(rho L_phi L_kappa). Zero certifies that one measurement is
/// simultaneously optimal for both parameters (saturability of the
/// multiparameter Cramer-Rao bound).
inline double compat_functional(const Eigen::MatrixXcd& rho,
                                const Eigen::MatrixXcd& l_phi,
                                const Eigen::MatrixXcd& l_kappa) {
  return (rho * l_phi * l_kappa).trace().imag();
}

}  // namespace qmetro
