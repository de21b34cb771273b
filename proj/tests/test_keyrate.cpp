#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cvqkd/keyrate.hpp"

using namespace cvqkd;

TEST_CASE("g entropy") {
  CHECK(g_entropy(0.0) == 0.0);
  CHECK(g_entropy(-5e-10) == 0.0);
  CHECK(std::abs(g_entropy(1.0) - 2.0) < 1e-15);
  CHECK(std::abs(g_entropy(0.5) - (1.5 * std::log2(1.5) - 0.5 * std::log2(0.5))) < 1e-15);
  CHECK(g_entropy(1e-300) >= 0.0);
  CHECK_THROWS_AS(g_entropy(-1e-6), std::domain_error);
}

TEST_CASE("symplectic eigenvalues") {
  auto nu = symplectic_eigs({1.0, 1.0, 0.0});
  CHECK(std::abs(nu.nu1 - 1.0) < 1e-15);
  CHECK(std::abs(nu.nu2 - 1.0) < 1e-15);

  for (double v : {1.5, 3.0, 20.0}) {
    nu = symplectic_eigs({v, v, std::sqrt(v * v - 1.0)});
    CHECK(std::abs(nu.nu1 - 1.0) < 1e-7);
    CHECK(std::abs(nu.nu2 - 1.0) < 1e-7);
  }

  nu = symplectic_eigs({1.245, 1.245, 0.0});
  CHECK(std::abs(nu.nu1 - 1.245) < 1e-15);
  CHECK(std::abs(nu.nu2 - 1.245) < 1e-15);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  while (tested < 200) {
    const double va = 1.0 + 5.0 * u(rng);
    const double vb = 1.0 + 5.0 * u(rng);
    const double z = (2.0 * u(rng) - 1.0) * std::sqrt(va * vb);
    const CovMatrix2Mode g{va, vb, z};
    const auto numeric = symplectic_eigs_numeric(g);
    if (numeric.nu2 < 1.0) continue;
    const auto closed = symplectic_eigs(g);
    CHECK(std::abs(closed.nu1 - numeric.nu1) < 1e-10);
    CHECK(std::abs(closed.nu2 - numeric.nu2) < 1e-10);
    CHECK_NOTHROW(g.validate());
    ++tested;
  }
  // Two-mode squeezed correlations beyond the pure-state limit.
  CHECK_THROWS_AS((CovMatrix2Mode{1.5, 1.5, 1.5}.validate()), std::domain_error);
  CHECK_THROWS_AS((CovMatrix2Mode{0.9, 1.5, 0.0}.validate()), std::domain_error);
}

TEST_CASE("Holevo bound") {
  auto h = holevo_bound(0.0, 1.0, 0.0);
  CHECK(std::abs(h.nu1 - 1.0) < 1e-15);
  CHECK(std::abs(h.nu2 - 1.0) < 1e-15);
  CHECK(std::abs(h.nu3 - 1.0) < 1e-15);
  CHECK(h.chi == 0.0);

  // Pure two-mode state: nu1 = nu2 = 1, so the first two terms vanish.
  const double va = 1.245;
  h = holevo_bound(0.1225, va, std::sqrt(va * va - 1.0));
  CHECK(std::abs(h.nu1 - 1.0) < 1e-7);
  CHECK(std::abs(h.nu2 - 1.0) < 1e-7);
  CHECK(g_entropy(0.5 * (h.nu1 - 1.0)) + g_entropy(0.5 * (h.nu2 - 1.0)) < 1e-5);

  // Identity channel: the QPSK Z* sits below the two-mode squeezed value, so
  // the Gaussian bound still leaks, but less than with no correlation.
  const double z1 = pure_loss_z(0.35, 1.0, 20);
  CHECK(z1 < std::sqrt(va * va - 1.0));
  h = holevo_bound(0.1225, 1.245, z1);
  CHECK(h.chi > 0.0);
  CHECK(h.chi < holevo_bound(0.1225, 1.245, 0.0).chi);

  // chi is non-increasing in Z*.
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 40; ++i) {
    const double z = 0.4 * i / 40.0;
    const double chi = holevo_bound(0.1225, 1.1, z).chi;
    CHECK(chi <= prev + 1e-15);
    prev = chi;
  }

  // nu3 window at the two-mode squeezed edge: a hair past it is snapped to 1,
  // clearly past it is rejected.
  const double z_edge = std::sqrt(va * va - 1.0);
  h = holevo_bound(0.1225, va, z_edge * (1.0 + 1e-10));
  CHECK(h.nu3 == 1.0);
  CHECK_THROWS_AS(holevo_bound(0.1225, va, z_edge * 1.01), std::domain_error);
}

TEST_CASE("Devetak-Winter assembly") {
  const ChannelPoint vacuum{0.0, 0.0, 0.35, 0.95};
  auto r = devetak_winter(vacuum, 0.0);
  CHECK(r.i_xy == 0.0);
  CHECK(r.k <= 0.0);
  CHECK(std::abs(r.k + r.chi) < 1e-15);

  const ChannelPoint p{transmittance_from_distance(50.0), 0.002, 0.35, 0.0};
  r = devetak_winter(p, 0.2);
  CHECK(std::abs(r.k + r.chi) < 1e-15);
  CHECK(r.k <= 0.0);

  // Binary mutual information is twice the binary-input capacity.
  const ChannelPoint q{0.5, 0.0, 0.35, 1.0};
  const double snr = mutual_info_awgn(q).snr;
  CHECK(std::abs(mutual_information(q, MutualInfoModel::binary) - 2.0 * capacity_binary_awgn(snr)) < 1e-15);
  CHECK(mutual_information(q, MutualInfoModel::binary) < mutual_information(q, MutualInfoModel::awgn));
}

TEST_CASE("Gaussian reference rate") {
  const ChannelPoint id{1.0, 0.0, 0.35, 0.95};
  const double va = 1.245;
  const double k = gaussian_reference_rate(id, va);
  const double i = mutual_info_awgn(0.1225, 1.0, 0.0).bits;
  CHECK(std::abs(k - 0.95 * i) < 1e-6);

  const ChannelPoint noisy{0.1, 0.2, 0.35, 0.95};
  CHECK(gaussian_reference_rate(noisy, va) < 0.0);
  CHECK_THROWS_AS(gaussian_reference_rate(id, 0.5), std::invalid_argument);
}

TEST_CASE("full pipeline at 50 km") {
  const ChannelPoint p{transmittance_from_distance(50.0), 0.002, 0.35, 0.95};
  const auto r = qpsk_key_rate(p);
  REQUIRE(r.error.empty());
  CHECK(r.status == SolveStatus::solved);
  CHECK(r.chi > 0.0);
  CHECK(r.chi < 0.95 * r.i_xy);
  // Frozen from this pipeline.
  CHECK(std::abs(r.z_star - 0.229486927) < 1e-8);
  CHECK(std::abs(r.k - 0.004830687) < 1e-8);
  CHECK(r.k <= r.k_gauss_ref + 1e-6);
}

TEST_CASE("positive key at 100 km") {
  const ChannelPoint p{transmittance_from_distance(100.0), 0.002, 0.35, 0.95};
  const auto r = qpsk_key_rate(p);
  REQUIRE(r.error.empty());
  CHECK(r.k > 0.0);
}

TEST_CASE("constellation pipeline") {
  // Asymmetric constellations cannot use the [Z sigma_Z] covariance form.
  const auto bpsk = parse_constellation("0.5 0.35 0\n0.5 -0.35 0\n");
  auto r = constellation_key_rate(bpsk, 0.5, 0.002, 0.95);
  CHECK(!r.error.empty());
  CHECK(std::isnan(r.k));

  r = constellation_key_rate(psk(8, 0.35), transmittance_from_distance(20.0), 0.002, 0.95);
  REQUIRE(r.error.empty());
  CHECK(r.status == SolveStatus::solved);
  CHECK(r.k > 0.0);
  CHECK(r.k <= r.k_gauss_ref + 1e-6);

  // Bad input is reported in the result, not thrown.
  const ChannelPoint bad{1.0, 0.0, 0.35, 0.95};
  PipelineConfig cfg;
  cfg.truncation = 5;
  r = qpsk_key_rate(bad, cfg);
  CHECK(!r.error.empty());
}
