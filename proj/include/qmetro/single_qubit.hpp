#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "qmetro/channel.hpp"
#include "qmetro/optimize.hpp"
#include "qmetro/qfim.hpp"
#include "qmetro/qubit.hpp"

namespace qmetro {

/// Pure single-qubit probe at polar angle theta0. The channel is phase
/// covariant, so the azimuth never affects any figure of merit; it is kept
/// only to make that invariance testable.
struct SingleProbe {
  double theta0 = std::numbers::pi / 2;
  double azimuth0 = 0.0;
};

inline void validate(const SingleProbe& p) {
  if (!(p.theta0 >= 0.0 && p.theta0 <= std::numbers::pi))
    throw std::domain_error("SingleProbe: theta0 must lie in [0, pi]");
}

/// Channel image of the probe's Bloch vector together with its analytic
/// (phi, kappa) partials.
struct MappedBloch {
  Eigen::Vector3d r;
  Eigen::Vector3d dr_phi;
  Eigen::Vector3d dr_kappa;
};

inline MappedBloch mapped_bloch(const SingleProbe& probe,
                                const ChannelScalars& s) {
  validate(probe);
  const double ct = std::cos(probe.theta0);
  const complexd e = std::polar(std::sin(probe.theta0), probe.azimuth0);
  const auto xy = [&e](const complexd& m) { return std::conj(m) * e; };
  const complexd r12 = xy(s.c);
  const complexd d12p = xy(s.dc_dphi);
  const complexd d12k = xy(s.dc_dkappa);
  return {{r12.real(), r12.imag(), s.lambda_par * ct},
          {d12p.real(), d12p.imag(), -2.0 * s.db_dphi * ct},
          {d12k.real(), d12k.imag(), -2.0 * s.db_dkappa * ct}};
}

/// QFIM of a single qubit from Bloch data:
/// F_munu = dr_mu . dr_nu + (r . dr_mu)(r . dr_nu)/(1 - |r|^2).
/// At |r| = 1 the second term is dropped when both radial derivatives
/// vanish; otherwise the precision is unbounded and a domain error is
/// raised (the noiseless edge, excluded from sweeps).
inline QfiMatrix qfim_from_bloch(const MappedBloch& m) {
  QfiMatrix f{m.dr_phi.squaredNorm(), m.dr_kappa.squaredNorm(),
              m.dr_phi.dot(m.dr_kappa)};
  const double gap = 1.0 - m.r.squaredNorm();
  const double rp = m.r.dot(m.dr_phi);
  const double rk = m.r.dot(m.dr_kappa);
  if (gap <= 1e-15) {
    if (std::abs(rp) > 1e-12 || std::abs(rk) > 1e-12)
      throw std::domain_error(
          "qfim_from_bloch: |r| = 1 with radial derivative, QFI unbounded");
    return f;
  }
  f.phi_phi += rp * rp / gap;
  f.kappa_kappa += rk * rk / gap;
  f.phi_kappa += rp * rk / gap;
  return f;
}

inline QfiMatrix qfim_single(const SingleProbe& probe,
                             const ChannelScalars& s) {
  return qfim_from_bloch(mapped_bloch(probe, s));
}

inline QfiMatrix qfim_single(const SingleProbe& probe,
                             const ChannelParams& params) {
  return qfim_single(probe, channel_scalars(params));
}

/// Closed-form SLD of the evolved probe,
/// L = [r.(d_mu r)/(1-|r|^2)](-I + r.sigma) + (d_mu r).sigma.
inline Eigen::Matrix2cd sld_single(const SingleProbe& probe,
                                   const ChannelParams& params,
                                   Parameter which) {
  const MappedBloch m = mapped_bloch(probe, channel_scalars(params));
  const Eigen::Vector3d& dr =
      which == Parameter::Phi ? m.dr_phi : m.dr_kappa;
  const double gap = 1.0 - m.r.squaredNorm();
  if (gap <= 1e-15)
    throw std::domain_error("sld_single: degenerate support at |r| = 1");
  const double a = m.r.dot(dr) / gap;
  return -a * Eigen::Matrix2cd::Identity() + pauli_dot(a * m.r + dr);
}

/// r . (d_phi r x d_kappa r), the single-qubit obstruction to a jointly
/// optimal measurement. Factors as sin^2(theta0) cos(theta0) * D(phi, kappa),
/// hence vanishes identically on the equator and at the poles; trig residue
/// within one ulp of those points (|cos theta0| < 4e-16) is snapped to zero.
inline double compat_triple(const SingleProbe& probe,
                            const ChannelParams& params) {
  validate(probe);
  const ChannelScalars s = channel_scalars(params);
  double st = std::sin(probe.theta0);
  double ct = std::cos(probe.theta0);
  if (std::abs(ct) < 4e-16) ct = 0.0;
  if (std::abs(st) < 4e-16) st = 0.0;
  Eigen::Matrix3d m;
  m << s.c.real(), -s.c.imag(), s.lambda_par,
      s.dc_dphi.real(), -s.dc_dphi.imag(), -2.0 * s.db_dphi,
      s.dc_dkappa.real(), -s.dc_dkappa.imag(), -2.0 * s.db_dkappa;
  return st * st * ct * m.determinant();
}

/// Optimal initial polar angle for the given target.
///  - phi individually: the equator, always.
///  - kappa individually: equator or pole, whichever of the two closed
///    forms is larger (ties go to the equator).
///  - simultaneous: minimizes Tr F^{-1} over theta0 in [0, pi/2] by grid
///    scan plus golden-section refinement (tolerance 1e-6 rad, ties toward
///    the equator). The reported value is the optimized objective:
///    the relevant QFI diagonal for individual targets, Tr F^{-1} for the
///    simultaneous target.
inline ScalarMinimum optimal_theta(const ChannelParams& params,
                                   Target target) {
  const ChannelScalars s = channel_scalars(params);
  constexpr double half_pi = std::numbers::pi / 2;
  switch (target) {
    case Target::PhiIndividual:
      return {half_pi, qfim_single({half_pi, 0.0}, s).phi_phi};
    case Target::KappaIndividual: {
      const double f_eq = qfim_single({half_pi, 0.0}, s).kappa_kappa;
      const double f_pole = qfim_single({0.0, 0.0}, s).kappa_kappa;
      return f_eq >= f_pole ? ScalarMinimum{half_pi, f_eq}
                            : ScalarMinimum{0.0, f_pole};
    }
    case Target::Simultaneous: {
      const auto objective = [&s](double theta) {
        return qfim_single({theta, 0.0}, s).inv_trace();
      };
      return minimize_scalar(objective, 0.0, half_pi, 256, 1e-6,
                             /*prefer_upper=*/true);
    }
  }
  throw std::invalid_argument("optimal_theta: unknown target");
}

/// Performance ratio Delta_ind/Delta_sim of one-qubit estimation at equal
/// resources, each strategy run with its own optimal probe. Bounded by 2.
inline double ratio_single(const ChannelParams& params) {
  const ScalarMinimum tp = optimal_theta(params, Target::PhiIndividual);
  const ScalarMinimum tk = optimal_theta(params, Target::KappaIndividual);
  const ScalarMinimum ts = optimal_theta(params, Target::Simultaneous);
  return (1.0 / tp.value + 1.0 / tk.value) / (0.5 * ts.value);
}

}  // namespace qmetro
