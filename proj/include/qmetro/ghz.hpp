#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qmetro/channel.hpp"
#include "qmetro/qfim.hpp"

namespace qmetro {

/// One Hamming-weight sector of the evolved GHZ state. All C(N, m) basis
/// states of weight m share the population p; `mass` is their total
/// probability degeneracy * p, kept separately because it stays
/// representable long after p itself underflows.
struct GhzBand {
  int weight;
  double degeneracy;
  double p;
  double mass;
  double dmass_db;
};

/// Evolved N-qubit GHZ state in corner + diagonal form: a 2x2 block over
/// span{|0...0>, |1...1>} with populations corner_pop and coherence
/// corner_coh = c^N/2, plus classical weight bands for m = 1..N-1. The
/// parameter derivatives of the corner entries are carried along.
struct GhzEvolvedState {
  int n_qubits = 0;
  double corner_pop = 0.5;  ///< (b^N + (1-b)^N)/2
  complexd corner_coh{0.5, 0.0};
  double dpop_dphi = 0.0, dpop_dkappa = 0.0;
  complexd dcoh_dphi{0, 0}, dcoh_dkappa{0, 0};
  std::vector<GhzBand> bands;

  double trace() const {
    double t = 2.0 * corner_pop;
    for (const GhzBand& band : bands) t += band.mass;
    return t;
  }

  Eigen::Matrix2cd corner_block() const {
    Eigen::Matrix2cd m;
    m << corner_pop, corner_coh, std::conj(corner_coh), corner_pop;
    return m;
  }

  Eigen::Matrix2cd corner_derivative(Parameter mu) const {
    const double dp = mu == Parameter::Phi ? dpop_dphi : dpop_dkappa;
    const complexd dc = mu == Parameter::Phi ? dcoh_dphi : dcoh_dkappa;
    Eigen::Matrix2cd m;
    m << dp, dc, std::conj(dc), dp;
    return m;
  }
};

/// Structured evolution of the N-qubit GHZ probe under per-qubit channel
/// action. Populations follow the stable binomial recurrence
/// P(m+1) = P(m) (N-m)/(m+1) b/(1-b), so the unit trace holds to machine
/// precision for N in the hundreds.
inline GhzEvolvedState ghz_blocks(int n, const ChannelScalars& s) {
  if (n < 1) throw std::domain_error("ghz_blocks: N must be >= 1");
  const double b = s.b;
  const double q = 1.0 - b;

  GhzEvolvedState st;
  st.n_qubits = n;
  st.corner_pop = 0.5 * (std::pow(b, n) + std::pow(q, n));
  const complexd c_pow = std::pow(s.c, double(n - 1));
  st.corner_coh = 0.5 * c_pow * s.c;
  const double dpop_db =
      0.5 * n * (std::pow(b, n - 1) - std::pow(q, n - 1));
  st.dpop_dphi = dpop_db * s.db_dphi;
  st.dpop_dkappa = dpop_db * s.db_dkappa;
  st.dcoh_dphi = 0.5 * double(n) * c_pow * s.dc_dphi;
  st.dcoh_dkappa = 0.5 * double(n) * c_pow * s.dc_dkappa;

  if (n < 2) return st;
  st.bands.reserve(n - 1);
  double pa = std::pow(q, n);  // C(n,m) b^m q^(n-m), starting at m = 0
  double degeneracy = 1.0;
  std::vector<double> pa_all(n + 1);
  std::vector<double> deg_all(n + 1);
  pa_all[0] = pa;
  deg_all[0] = 1.0;
  for (int m = 1; m <= n; ++m) {
    pa *= (b / q) * double(n - m + 1) / double(m);
    degeneracy *= double(n - m + 1) / double(m);
    pa_all[m] = pa;
    deg_all[m] = degeneracy;
  }
  for (int m = 1; m < n; ++m) {
    GhzBand band;
    band.weight = m;
    band.degeneracy = deg_all[m];
    const double mass_a = pa_all[m];
    const double mass_b = pa_all[n - m];
    band.mass = 0.5 * (mass_a + mass_b);
    band.p = b > 0.0 ? band.mass / band.degeneracy : 0.0;
    double d = 0.0;
    if (mass_a > 0.0) d += mass_a * (double(m) / b - double(n - m) / q);
    if (mass_b > 0.0) d += mass_b * (double(n - m) / b - double(m) / q);
    band.dmass_db = 0.5 * d;
    st.bands.push_back(band);
  }
  return st;
}

/// QFIM of the evolved GHZ state via its direct-sum structure: the spectral
/// formula on the subnormalized 2x2 corner block plus the classical Fisher
/// information of the weight bands. Bands with mass below 1e-300 carry no
/// usable information and are skipped.
inline QfiMatrix qfim_ghz(int n, const ChannelScalars& s) {
  const GhzEvolvedState st = ghz_blocks(n, s);
  QfiMatrix f = qfim_block(st.corner_block(),
                           st.corner_derivative(Parameter::Phi),
                           st.corner_derivative(Parameter::Kappa));
  double classical = 0.0;  // sum of (d mass/db)^2 / mass
  for (const GhzBand& band : st.bands) {
    if (band.mass < 1e-300) continue;
    classical += band.dmass_db * band.dmass_db / band.mass;
  }
  f.phi_phi += classical * s.db_dphi * s.db_dphi;
  f.kappa_kappa += classical * s.db_dkappa * s.db_dkappa;
  f.phi_kappa += classical * s.db_dphi * s.db_dkappa;
  return f;
}

inline QfiMatrix qfim_ghz(int n, const ChannelParams& params) {
  return qfim_ghz(n, channel_scalars(params));
}

/// QFIM of the hybrid scheme: an M-qubit GHZ probe with N_total/M sequential
/// channel applications per qubit, so N_total applications in all. M must
/// divide N_total; fractional application counts are not physical here.
inline QfiMatrix qfim_hybrid(int m, long n_total, const ChannelScalars& s) {
  if (m < 1) throw std::domain_error("qfim_hybrid: M must be >= 1");
  if (n_total < 1 || n_total % m != 0)
    throw std::domain_error("qfim_hybrid: M must divide N_total");
  return qfim_ghz(m, compose_scalars(s, n_total / m));
}

inline QfiMatrix qfim_hybrid(int m, long n_total, const ChannelParams& params) {
  return qfim_hybrid(m, n_total, channel_scalars(params));
}

}  // namespace qmetro
