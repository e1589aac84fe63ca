#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace qmetro {

using complexd = std::complex<double>;

/// The two estimation targets of the random-generator phase channel:
/// the imprinted phase and the von Mises-Fisher concentration of the
/// generator axis. Low kappa means a broad axis distribution (strong
/// noise); kappa -> infinity recovers the noiseless phase shift.
struct ChannelParams {
  double phi;    ///< phase shift, radians
  double kappa;  ///< vMF concentration, dimensionless, > 0
};

inline void validate(const ChannelParams& p) {
  if (!(p.kappa > 0.0) || !std::isfinite(p.kappa))
    throw std::domain_error("ChannelParams: kappa must be positive and finite");
  if (!(p.phi >= 0.0 && p.phi <= std::numbers::pi))
    throw std::domain_error("ChannelParams: phi must lie in [0, pi]");
}

/// von Mises-Fisher probability density per unit solid angle at polar angle
/// theta, for mean direction +z and concentration kappa. Evaluated as
/// kappa*exp(kappa*(cos(theta)-1)) / (2*pi*(1-exp(-2*kappa))), which is
/// algebraically identical to kappa*exp(kappa*cos(theta))/(4*pi*sinh(kappa))
/// but free of overflow at large kappa and of cancellation at small kappa.
inline double vmf_density(double theta, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw std::domain_error("vmf_density: kappa must be positive and finite");
  const double norm = 2.0 * std::numbers::pi * -std::expm1(-2.0 * kappa);
  return kappa / norm * std::exp(kappa * (std::cos(theta) - 1.0));
}

namespace detail {

struct MomentPair {
  double value;
  double deriv;
};

/// Transverse second moment <n_x^2> = (kappa*coth(kappa) - 1)/kappa^2 of the
/// vMF distribution, with its kappa derivative. Three branches:
///   kappa < 0.05 : Taylor series (the direct formulas lose all significant
///                  digits in the derivative below kappa ~ 1e-2),
///   kappa > 30   : coth(kappa) = 1 + 2*exp(-2*kappa), exact at double
///                  precision and immune to sinh overflow,
///   otherwise    : coth via expm1.
inline MomentPair vmf_transverse_moment(double kappa) {
  if (kappa < 0.05) {
    const double k2 = kappa * kappa;
    const double value =
        1.0 / 3.0 + k2 * (-1.0 / 45.0 + k2 * (2.0 / 945.0 - k2 / 4725.0));
    const double deriv =
        kappa * (-2.0 / 45.0 + k2 * (8.0 / 945.0 - k2 * (2.0 / 1575.0)));
    return {value, deriv};
  }
  const double t = kappa > 30.0 ? 1.0 + 2.0 * std::exp(-2.0 * kappa)
                                : 1.0 + 2.0 / std::expm1(2.0 * kappa);
  const double k2 = kappa * kappa;
  const double value = (kappa * t - 1.0) / k2;
  const double deriv = (k2 * (1.0 - t * t) - kappa * t + 2.0) / (k2 * kappa);
  return {value, deriv};
}

}  // namespace detail

/// Scalar data of the averaged channel in Liouville form. Populations mix
/// with weight b, coherences are multiplied by c; lambda_par, lambda_perp
/// and g are the induced Bloch-ball contractions and rotation. The analytic
/// (phi, kappa) partials of b and c are carried along so that downstream
/// Fisher-information code never has to differentiate numerically.
struct ChannelScalars {
  double b = 0.0;        ///< population mixing weight, in [0, 2/3]
  complexd c{1.0, 0.0};  ///< coherence multiplier, |c| <= 1 - b
  double lambda_par = 1.0;   ///< 1 - 2b, z-axis contraction
  double lambda_perp = 1.0;  ///< |c|, equatorial contraction
  double g = 0.0;            ///< rotation angle about z, equal to -arg(c)
  double db_dphi = 0.0;
  double db_dkappa = 0.0;
  complexd dc_dphi{0.0, 0.0};
  complexd dc_dkappa{0.0, 0.0};
};

/// Exact channel scalars at the given parameter point.
///
/// b = 2*sin(phi)^2*(kappa*coth(kappa) - 1)/kappa^2 and
/// c = cos(2*phi) + b*(1 - i*kappa*cot(phi)), where the product
/// b*kappa*cot(phi) is evaluated in the pole-free rewrite
/// sin(2*phi)*(kappa*coth(kappa) - 1)/kappa, so phi = 0 is an ordinary
/// point with b = 0, c = 1.
inline ChannelScalars channel_scalars(const ChannelParams& p) {
  validate(p);
  const auto [h, hp] = detail::vmf_transverse_moment(p.kappa);
  const double s2 = std::sin(2.0 * p.phi);
  const double c2 = std::cos(2.0 * p.phi);

  ChannelScalars s;
  s.b = (1.0 - c2) * h;  // 2 sin(phi)^2 h
  s.c = complexd{c2 + s.b, -s2 * p.kappa * h};
  s.lambda_par = 1.0 - 2.0 * s.b;
  s.lambda_perp = std::abs(s.c);
  s.g = -std::arg(s.c);

  const double w = p.kappa * h;        // (kappa coth kappa - 1)/kappa
  const double wp = h + p.kappa * hp;  // dw/dkappa
  s.db_dphi = 2.0 * s2 * h;
  s.db_dkappa = (1.0 - c2) * hp;
  s.dc_dphi = complexd{-2.0 * s2 + s.db_dphi, -2.0 * c2 * w};
  s.dc_dkappa = complexd{s.db_dkappa, -s2 * wp};
  return s;
}

/// Scalars of the k-fold self-composition of the channel: populations mix
/// with (1 - (1-2b)^k)/2 and coherences pick up c^k. The derivative fields
/// follow by the chain rule, so composed scalars plug into any downstream
/// QFIM computation unchanged. k = 1 returns the input.
inline ChannelScalars compose_scalars(const ChannelScalars& s, long k) {
  if (k < 1) throw std::domain_error("compose_scalars: k must be >= 1");
  if (k == 1) return s;

  const double lpk1 = std::pow(s.lambda_par, double(k - 1));
  const complexd ck1 = std::pow(s.c, double(k - 1));
  ChannelScalars r;
  r.lambda_par = lpk1 * s.lambda_par;
  r.b = 0.5 * (1.0 - r.lambda_par);
  r.c = ck1 * s.c;
  r.lambda_perp = std::abs(r.c);
  r.g = -std::arg(r.c);
  r.db_dphi = double(k) * lpk1 * s.db_dphi;
  r.db_dkappa = double(k) * lpk1 * s.db_dkappa;
  r.dc_dphi = double(k) * ck1 * s.dc_dphi;
  r.dc_dkappa = double(k) * ck1 * s.dc_dkappa;
  return r;
}

/// 4x4 matrix of the channel acting on the row-major vectorized density
/// operator |rho) = (rho00, rho01, rho10, rho11)^T:
///
///   [ 1-b  0   0    b  ]
///   [  0   c   0    0  ]        c = lambda_perp * exp(-i g)
///   [  0   0  conj(c) 0 ]
///   [  b   0   0   1-b ]
using LiouvilleMatrix = Eigen::Matrix4cd;

inline LiouvilleMatrix liouville_matrix(const ChannelScalars& s) {
  LiouvilleMatrix L = LiouvilleMatrix::Zero();
  const double one_minus_b = 1.0 - s.b;
  L(0, 0) = one_minus_b;
  L(0, 3) = s.b;
  L(1, 1) = s.c;
  L(2, 2) = std::conj(s.c);
  L(3, 0) = s.b;
  L(3, 3) = one_minus_b;
  return L;
}

/// Channel action in Bloch coordinates: the equatorial components are
/// multiplied by conj(c) (as a complex number acting on x + i y) and the
/// polar component is contracted by lambda_par.
inline Eigen::Vector3d apply_channel_bloch(const Eigen::Vector3d& r0,
                                           const ChannelScalars& s) {
  if (r0.norm() > 1.0 + 1e-12)
    throw std::domain_error("apply_channel_bloch: |r0| must be <= 1");
  const double re = s.c.real();
  const double im = s.c.imag();
  return {re * r0.x() + im * r0.y(), -im * r0.x() + re * r0.y(),
          s.lambda_par * r0.z()};
}

}  // namespace qmetro
