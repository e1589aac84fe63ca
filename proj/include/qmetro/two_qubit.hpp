#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "qmetro/channel.hpp"
#include "qmetro/optimize.hpp"
#include "qmetro/qfim.hpp"

namespace qmetro {

/// Symmetric, parity-even two-qubit probe family
/// alpha(|00> + |11>) + beta(|01> + |10>) with alpha^2 + beta^2 = 1/2.
/// alpha = 1/sqrt(2) is the maximally entangled member, alpha = beta = 1/2
/// the product state |+>|+>.
struct TwoQubitProbe {
  double alpha;

  double beta() const { return std::sqrt(std::max(0.0, 0.5 - alpha * alpha)); }
};

inline constexpr double kAlphaProduct = 0.5;
inline const double kAlphaEntangled = 1.0 / std::sqrt(2.0);

inline void validate(const TwoQubitProbe& p) {
  if (!(p.alpha >= 0.0 && p.alpha * p.alpha <= 0.5 + 1e-12))
    throw std::domain_error("TwoQubitProbe: alpha must lie in [0, 1/sqrt(2)]");
}

/// Channel image of the probe under Lambda x Lambda, in the computational
/// basis {00, 01, 10, 11}. The populations shift by
/// xi = 2 b (1-b) (alpha^2 - beta^2) out of the corner entries and into the
/// middle ones; coherences are dressed by c, c^2 and |c|^2.
inline Eigen::Matrix4cd evolved_two(const TwoQubitProbe& p,
                                    const ChannelScalars& s) {
  validate(p);
  const double a2 = p.alpha * p.alpha;
  const double b2 = 0.5 - a2;
  const double ab = p.alpha * p.beta();
  const double xi = 2.0 * s.b * (1.0 - s.b) * (a2 - b2);
  const complexd c = s.c;
  const complexd cc = std::conj(c);
  const double m = std::norm(c);
  Eigen::Matrix4cd rho;
  rho << a2 - xi, ab * c, ab * c, a2 * c * c,
      ab * cc, b2 + xi, b2 * m, ab * c,
      ab * cc, b2 * m, b2 + xi, ab * c,
      a2 * cc * cc, ab * cc, ab * cc, a2 - xi;
  return rho;
}

/// Analytic parameter derivative of evolved_two.
inline Eigen::Matrix4cd evolved_two_derivative(const TwoQubitProbe& p,
                                               const ChannelScalars& s,
                                               Parameter mu) {
  validate(p);
  const double a2 = p.alpha * p.alpha;
  const double b2 = 0.5 - a2;
  const double ab = p.alpha * p.beta();
  const double db = mu == Parameter::Phi ? s.db_dphi : s.db_dkappa;
  const complexd dc = mu == Parameter::Phi ? s.dc_dphi : s.dc_dkappa;
  const double dxi = 2.0 * (1.0 - 2.0 * s.b) * db * (a2 - b2);
  const complexd dcc = std::conj(dc);
  const complexd dc2 = 2.0 * s.c * dc;
  const complexd dcc2 = std::conj(dc2);
  const double dm = 2.0 * (std::conj(s.c) * dc).real();
  Eigen::Matrix4cd d;
  d << -dxi, ab * dc, ab * dc, a2 * dc2,
      ab * dcc, dxi, b2 * dm, ab * dc,
      ab * dcc, b2 * dm, dxi, ab * dc,
      a2 * dcc2, ab * dcc, ab * dcc, -dxi;
  return d;
}

inline QfiMatrix qfim_two(const TwoQubitProbe& p, const ChannelScalars& s) {
  return qfim(evolved_two(p, s),
              evolved_two_derivative(p, s, Parameter::Phi),
              evolved_two_derivative(p, s, Parameter::Kappa));
}

inline QfiMatrix qfim_two(const TwoQubitProbe& p, const ChannelParams& params) {
  return qfim_two(p, channel_scalars(params));
}

struct AlphaOptimum {
  double alpha;
  double objective;  ///< maximized QFI diagonal, or minimized Tr F^{-1}
  bool interior;     ///< optimum strictly between product and entangled
};

/// Optimal probe amplitude over [1/2, 1/sqrt(2)] (product state through
/// maximally entangled): maximizes the relevant QFI diagonal for the
/// individual targets, minimizes Tr F^{-1} for the simultaneous one.
/// 512-point grid scan with golden-section refinement to 1e-7.
inline AlphaOptimum optimal_alpha(const ChannelParams& params, Target target) {
  const ChannelScalars s = channel_scalars(params);
  const auto objective = [&s, target](double alpha) {
    const QfiMatrix f = qfim_two({alpha}, s);
    switch (target) {
      case Target::PhiIndividual: return -f.phi_phi;
      case Target::KappaIndividual: return -f.kappa_kappa;
      default: return f.inv_trace();
    }
  };
  const ScalarMinimum m = minimize_scalar(objective, kAlphaProduct,
                                          kAlphaEntangled, 512, 1e-7,
                                          /*prefer_upper=*/true);
  const double value = target == Target::Simultaneous ? m.value : -m.value;
  const bool interior = m.argument > kAlphaProduct + 2e-7 &&
                        m.argument < kAlphaEntangled - 2e-7;
  return {m.argument, value, interior};
}

/// Performance ratio Delta_ind/Delta_sim for the bipartite scheme at equal
/// resources, each strategy using its optimal probe from the family.
inline double ratio_two(const ChannelParams& params) {
  const AlphaOptimum ap = optimal_alpha(params, Target::PhiIndividual);
  const AlphaOptimum ak = optimal_alpha(params, Target::KappaIndividual);
  const AlphaOptimum as = optimal_alpha(params, Target::Simultaneous);
  return (1.0 / ap.objective + 1.0 / ak.objective) / (0.5 * as.objective);
}

}  // namespace qmetro
