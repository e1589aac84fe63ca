#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qmetro/single_qubit.hpp"
#include "qmetro/testing/oracle.hpp"

using namespace qmetro;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

Eigen::MatrixXcd evolved_density(const SingleProbe& probe,
                                 const ChannelParams& params) {
  return density_from_bloch(
      mapped_bloch(probe, channel_scalars(params)).r);
}

bool qfi_close(const QfiMatrix& a, const QfiMatrix& b, double rel) {
  const double scale = std::max({std::abs(b.phi_phi), std::abs(b.kappa_kappa),
                                 std::abs(b.phi_kappa)});
  return std::abs(a.phi_phi - b.phi_phi) <= rel * scale &&
         std::abs(a.kappa_kappa - b.kappa_kappa) <= rel * scale &&
         std::abs(a.phi_kappa - b.phi_kappa) <= rel * scale;
}

}  // namespace

TEST_CASE("mapped bloch: reduces to the channel action on the Bloch vector") {
  const ChannelScalars s = channel_scalars({0.4, 2.5});
  for (double theta : {0.0, 0.7, kHalfPi, 2.2}) {
    const MappedBloch m = mapped_bloch({theta, 0.0}, s);
    const Eigen::Vector3d direct = apply_channel_bloch(
        {std::sin(theta), 0.0, std::cos(theta)}, s);
    CHECK((m.r - direct).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("qfim_single: invariant under the probe azimuth") {
  const ChannelParams params{0.45, 2.0};
  const QfiMatrix ref = qfim_single({0.9, 0.0}, params);
  for (double az : {1.0, 2.0, 5.0}) {
    const QfiMatrix f = qfim_single({0.9, az}, params);
    CHECK_THAT(f.phi_phi, WithinRel(ref.phi_phi, 1e-12));
    CHECK_THAT(f.kappa_kappa, WithinRel(ref.kappa_kappa, 1e-12));
    CHECK_THAT(f.phi_kappa, WithinRel(ref.phi_kappa, 1e-12));
  }
}

TEST_CASE("qfim_single: equatorial closed form in terms of c") {
  for (auto [phi, kappa] : {std::pair{0.3, 3.0}, {0.8, 1.2}, {1.2, 6.0}}) {
    const ChannelScalars s = channel_scalars({phi, kappa});
    const QfiMatrix f = qfim_single({kHalfPi, 0.0}, s);
    const double ac = std::abs(s.c);
    const double dac_dphi = (s.c.real() * s.dc_dphi.real() +
                             s.c.imag() * s.dc_dphi.imag()) / ac;
    const double expected = std::norm(s.dc_dphi) +
                            ac * ac * dac_dphi * dac_dphi / (1.0 - ac * ac);
    CHECK_THAT(f.phi_phi, WithinRel(expected, 1e-12));
  }
}

TEST_CASE("qfim_single: polar probe carries only parallel-contraction data") {
  for (auto [phi, kappa] : {std::pair{0.3, 3.0}, {1.0, 1.5}}) {
    const ChannelScalars s = channel_scalars({phi, kappa});
    const QfiMatrix f = qfim_single({0.0, 0.0}, s);
    const double gap = 1.0 - s.lambda_par * s.lambda_par;
    CHECK_THAT(f.kappa_kappa,
               WithinRel(4.0 * s.db_dkappa * s.db_dkappa / gap, 1e-12));
    // b(1-b) = (1 - lambda_par^2)/4, the form quoted for the polar optimum
    CHECK_THAT(f.kappa_kappa,
               WithinRel(s.db_dkappa * s.db_dkappa / (s.b * (1.0 - s.b)),
                         1e-12));
    CHECK_THAT(f.phi_phi,
               WithinRel(4.0 * s.db_dphi * s.db_dphi / gap, 1e-12));
  }
}

TEST_CASE("qfim_single: agrees with the engine on the evolved 2x2 state") {
  for (double theta : {0.0, 0.6, 1.1, kHalfPi})
    for (auto [phi, kappa] : {std::pair{0.3, 3.0}, {0.9, 0.8}}) {
      const ChannelScalars s = channel_scalars({phi, kappa});
      const MappedBloch m = mapped_bloch({theta, 0.0}, s);
      const QfiMatrix closed = qfim_from_bloch(m);
      const QfiMatrix engine =
          qfim(density_from_bloch(m.r), 0.5 * pauli_dot(m.dr_phi),
               0.5 * pauli_dot(m.dr_kappa));
      CAPTURE(theta, phi, kappa);
      CHECK(qfi_close(closed, engine, 1e-10));
    }
}

TEST_CASE("qfim_single: matches the finite-difference oracle") {
  const ChannelParams params{0.3, 3.0};
  const SingleProbe probe{kHalfPi, 0.0};
  const QfiMatrix closed = qfim_single(probe, params);
  const QfiMatrix fd = oracle::qfim_fd(
      [&probe](const ChannelParams& p) { return evolved_density(probe, p); },
      params);
  CHECK(qfi_close(closed, fd, 1e-6));
}

TEST_CASE("qfim_single: equator maximizes the phase information") {
  for (auto [phi, kappa] :
       {std::pair{0.2, 1.0}, {0.5, 3.0}, {1.0, 6.0}, {1.4, 0.5}}) {
    const ChannelScalars s = channel_scalars({phi, kappa});
    const double at_eq = qfim_single({kHalfPi, 0.0}, s).phi_phi;
    for (int i = 0; i <= 100; ++i) {
      const double theta = kHalfPi * i / 100.0;
      CAPTURE(phi, kappa, theta);
      CHECK(qfim_single({theta, 0.0}, s).phi_phi <= at_eq * (1 + 1e-12));
    }
  }
}

TEST_CASE("qfim_single: kappa information has no interior optimum") {
  for (auto [phi, kappa] :
       {std::pair{0.2, 1.0}, {0.9, 4.0}, {1.3, 3.0}, {0.5, 8.0}}) {
    const ChannelScalars s = channel_scalars({phi, kappa});
    double best = -1.0;
    int best_i = -1;
    for (int i = 0; i <= 100; ++i) {
      const double f = qfim_single({kHalfPi * i / 100.0, 0.0}, s).kappa_kappa;
      if (f > best) {
        best = f;
        best_i = i;
      }
    }
    CAPTURE(phi, kappa, best_i);
    CHECK((best_i <= 1 || best_i >= 99));
  }
}

TEST_CASE("qfim_single: bounded and nonnegative toward the uniform-axis limit") {
  for (double kappa : {1e-4, 1e-3, 1e-2, 0.1}) {
    const QfiMatrix f = qfim_single({kHalfPi, 0.0}, ChannelParams{0.7, kappa});
    CHECK(std::isfinite(f.phi_phi));
    CHECK(f.phi_phi >= 0.0);
    CHECK(f.kappa_kappa >= 0.0);
  }
  // at phi = pi/2 the equatorial phase information dies with the noise
  CHECK(qfim_single({kHalfPi, 0.0}, ChannelParams{kHalfPi, 1e-3}).phi_phi <
        1e-4);
}

TEST_CASE("sld_single: zero derivative edge") {
  // at phi = pi/2 the scalars are stationary in phi up to the imaginary part
  const ChannelScalars s = channel_scalars({0.4, 2.0});
  ChannelScalars frozen = s;
  frozen.db_dphi = 0.0;
  frozen.dc_dphi = {0.0, 0.0};
  const MappedBloch m = mapped_bloch({0.8, 0.0}, frozen);
  CHECK(m.dr_phi.norm() == 0.0);
}

TEST_CASE("sld_single: diagonal for a polar probe") {
  const Eigen::Matrix2cd l = sld_single({0.0, 0.0}, {0.5, 2.0}, Parameter::Kappa);
  CHECK(std::abs(l(0, 1)) < 1e-15);
  CHECK(std::abs(l(1, 0)) < 1e-15);
}

TEST_CASE("sld_single: satisfies the Lyapunov relation and matches the engine") {
  for (double theta : {0.3, 1.0, kHalfPi}) {
    const ChannelParams params{0.45, 2.5};
    const ChannelScalars s = channel_scalars(params);
    const MappedBloch m = mapped_bloch({theta, 0.0}, s);
    const Eigen::Matrix2cd rho = density_from_bloch(m.r);
    for (Parameter which : {Parameter::Phi, Parameter::Kappa}) {
      const Eigen::Vector3d& dr =
          which == Parameter::Phi ? m.dr_phi : m.dr_kappa;
      const Eigen::Matrix2cd closed = sld_single({theta, 0.0}, params, which);
      const Eigen::Matrix2cd residual =
          0.5 * (rho * closed + closed * rho) - 0.5 * pauli_dot(dr);
      CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);
      const Eigen::MatrixXcd engine = sld(rho, 0.5 * pauli_dot(dr));
      CHECK((closed - engine).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("sld_single: rejects the noiseless degenerate edge") {
  ChannelScalars s;  // defaults are the identity channel: |r| stays 1
  (void)s;
  CHECK_THROWS_AS(sld_single({kHalfPi, 0.0}, {0.4, 1e15}, Parameter::Phi),
                  std::domain_error);
}

TEST_CASE("compat triple: exactly zero on the equator and at the poles") {
  for (auto [phi, kappa] : {std::pair{0.4, 2.0}, {1.2, 0.7}, {0.15, 9.0}}) {
    CHECK(compat_triple({kHalfPi, 0.0}, {phi, kappa}) == 0.0);
    CHECK(compat_triple({0.0, 0.0}, {phi, kappa}) == 0.0);
    CHECK(compat_triple({std::numbers::pi, 0.0}, {phi, kappa}) == 0.0);
  }
}

TEST_CASE("compat triple: nonzero between equator and pole") {
  const double t = compat_triple({std::numbers::pi / 4, 0.0}, {0.4, 2.0});
  CHECK(std::abs(t) > 1e-6);
}

TEST_CASE("compat triple: equals Im Tr(rho L_phi L_kappa)") {
  for (double theta : {0.3, std::numbers::pi / 4, 1.2}) {
    const ChannelParams params{0.4, 2.0};
    const Eigen::Matrix2cd rho = Eigen::Matrix2cd(
        density_from_bloch(mapped_bloch({theta, 0.0},
                                        channel_scalars(params)).r));
    const Eigen::Matrix2cd lp = sld_single({theta, 0.0}, params, Parameter::Phi);
    const Eigen::Matrix2cd lk =
        sld_single({theta, 0.0}, params, Parameter::Kappa);
    const double triple = compat_triple({theta, 0.0}, params);
    CHECK_THAT(compat_functional(rho, lp, lk), WithinAbs(triple, 1e-12));
  }
}

TEST_CASE("compat triple: matches a finite-difference evaluation") {
  const ChannelParams params{0.4, 2.0};
  const double h = 1e-6;
  const SingleProbe probe{std::numbers::pi / 4, 0.0};
  const auto r_at = [&probe](const ChannelParams& p) {
    return mapped_bloch(probe, channel_scalars(p)).r;
  };
  const Eigen::Vector3d r = r_at(params);
  const Eigen::Vector3d dphi =
      (r_at({params.phi + h, params.kappa}) -
       r_at({params.phi - h, params.kappa})) / (2 * h);
  const Eigen::Vector3d dkap =
      (r_at({params.phi, params.kappa + h}) -
       r_at({params.phi, params.kappa - h})) / (2 * h);
  CHECK_THAT(compat_triple(probe, params),
             WithinRel(r.dot(dphi.cross(dkap)), 1e-5));
}

TEST_CASE("optimal theta: equator always wins for the phase alone") {
  for (auto [phi, kappa] : {std::pair{0.2, 1.0}, {1.0, 5.0}, {1.5, 0.3}}) {
    const ScalarMinimum t = optimal_theta({phi, kappa}, Target::PhiIndividual);
    CHECK(t.argument == kHalfPi);
    CHECK(t.value > 0.0);
  }
}

TEST_CASE("optimal theta: kappa target transitions from equator to pole") {
  CHECK(optimal_theta({0.3, 3.0}, Target::KappaIndividual).argument ==
        kHalfPi);
  CHECK(optimal_theta({0.1, 1.0}, Target::KappaIndividual).argument ==
        kHalfPi);
  CHECK(optimal_theta({1.25, 3.0}, Target::KappaIndividual).argument == 0.0);
  CHECK(optimal_theta({1.0, 6.0}, Target::KappaIndividual).argument == 0.0);
}

TEST_CASE("optimal theta: simultaneous region sits inside the kappa region") {
  // low parameters: both equatorial
  CHECK(optimal_theta({0.3, 3.0}, Target::Simultaneous).argument == kHalfPi);
  // (0.93, 4.0): kappa-individual still equatorial, simultaneous already not
  CHECK(optimal_theta({0.93, 4.0}, Target::KappaIndividual).argument ==
        kHalfPi);
  const ScalarMinimum sim = optimal_theta({0.93, 4.0}, Target::Simultaneous);
  CHECK(sim.argument < kHalfPi - 0.05);
  CHECK(sim.argument > 0.0);
}

TEST_CASE("optimal theta: simultaneous objective value is Tr F^{-1}") {
  const ChannelParams params{0.5, 2.0};
  const ScalarMinimum sim = optimal_theta(params, Target::Simultaneous);
  CHECK_THAT(sim.value,
             WithinRel(qfim_single(SingleProbe{sim.argument, 0.0}, params).inv_trace(),
                       1e-12));
}

TEST_CASE("ratio: simultaneous strategy always helps, never more than twofold") {
  for (auto [phi, kappa] : {std::pair{0.1, 1.0}, {0.3, 3.0}, {0.65, 9.5},
                            {0.6, 0.5}, {1.2, 2.0}}) {
    const double r = ratio_single({phi, kappa});
    CAPTURE(phi, kappa);
    CHECK(r > 1.0);
    CHECK(r <= 2.0 + 1e-9);
  }
}
