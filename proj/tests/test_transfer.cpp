#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "cdti/numeric.hpp"
#include "cdti/strips.hpp"
#include "cdti/transfer.hpp"
#include "oracles.hpp"

using namespace cdti;
using doctest::Approx;

TEST_CASE("transfer entries") {
  CHECK(transfer_entry(1, 1, kLn2) == Approx(0.25).epsilon(1e-15));
  for (double mu : {0.3, 1.0, 2.5})
    CHECK(transfer_entry(2, 1, mu) == Approx(2.0 * std::exp(-3.0 * mu)).epsilon(1e-14));
  // big-integer binomial oracle times exp
  const double expected = static_cast<double>(oracle::pascal_binomial(11, 4)) * std::exp(-12.0);
  CHECK(oracle::pascal_binomial(11, 4) == 330);
  CHECK(transfer_entry(5, 7, 1.0) == Approx(expected).epsilon(1e-13));

  const auto u = build_transfer_matrix(8, 1.3);
  for (int n = 1; n <= 8; ++n)
    for (int np = 1; np <= 8; ++np) {
      CHECK(std::isfinite(u.log_entry(n, np)));
      CHECK(u.entry(n, np) == Approx(transfer_entry(n, np, 1.3)).epsilon(1e-14));
      CHECK(u.entry(n, np) > 0.0);
    }
}

TEST_CASE("trace against direct sums") {
  const double mu = 0.9;
  // N = 1: sum of the diagonal
  double diag = 0.0;
  for (int n = 1; n <= 3; ++n)
    diag += static_cast<double>(oracle::pascal_binomial(2 * n - 1, n - 1)) *
            std::exp(-2.0 * n * mu);
  CHECK(pure_log_partition(1, mu, 3).log_z == Approx(std::log(diag)).epsilon(1e-13));

  // N = 2: double sum oracle
  double dsum = 0.0;
  for (int n = 1; n <= 4; ++n)
    for (int np = 1; np <= 4; ++np)
      dsum += transfer_entry(n, np, mu) * transfer_entry(np, n, mu);
  CHECK(pure_log_partition(2, mu, 4).log_z == Approx(std::log(dsum)).epsilon(1e-13));
}

TEST_CASE("enumerated pure partition sum matches the truncated trace") {
  // N = 1, K = 1: single triangulation with two triangles
  CHECK(log_z_pure_enumerated(1, 0.7, 1) == Approx(-2.0 * 0.7).epsilon(1e-15));
  // N = 1, K = 2: one size-1 and three size-2 slice triangulations
  const double mu = 1.1;
  CHECK(std::exp(log_z_pure_enumerated(1, mu, 2)) ==
        Approx(std::exp(-2.0 * mu) + 3.0 * std::exp(-4.0 * mu)).epsilon(1e-13));

  for (int n = 1; n <= 4; ++n)
    for (int k = 2; k <= 4; ++k)
      for (double m : {0.8, 1.5})
        CHECK(log_z_pure_enumerated(n, m, k) ==
              Approx(pure_log_partition(n, m, k).log_z).epsilon(1e-12));
}

TEST_CASE("closed-form spectral radius") {
  CHECK(transfer_spectral_radius(kLn2) == Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(transfer_spectral_radius(0.5), std::domain_error);
  // mu -> infinity asymptote: between exp(-2 mu) and 2 exp(-2 mu)
  const double v = transfer_spectral_radius(10.0);
  CHECK(v > std::exp(-20.0));
  CHECK(v < 2.0 * std::exp(-20.0));

  for (double mu : {0.8, 1.0, 1.5, 3.0}) {
    const auto u = build_transfer_matrix(64, mu);
    const double top = power_iteration_top_eigenvalue(u);
    CHECK(top == Approx(transfer_spectral_radius(mu)).epsilon(1e-6));
  }
}

TEST_CASE("existence threshold") {
  CHECK(existence_threshold(1) == -std::numeric_limits<double>::infinity());
  CHECK(existence_threshold(3) == Approx(0.5 * kLn2).epsilon(1e-15));  // ln sqrt(2)
  CHECK(existence_threshold(1000) == Approx(kLn2).epsilon(1e-5));
  double prev = existence_threshold(1);
  for (int n = 2; n <= 40; ++n) {
    CHECK(existence_threshold(n) > prev);
    prev = existence_threshold(n);
  }
}

TEST_CASE("infinite-temperature free energy") {
  const double two_ln2 = 2.0 * kLn2;
  CHECK(free_energy_infinite_temperature(two_ln2) == 0.0);
  CHECK(std::isinf(free_energy_infinite_temperature(1.0)));
  CHECK(free_energy_infinite_temperature(two_ln2 + 1.0) ==
        Approx(std::log(transfer_spectral_radius(kLn2 + 1.0))).epsilon(1e-14));
}

TEST_CASE("per-strip log partition approaches the growth rate") {
  const auto r10 = pure_log_partition(10, 1.2, 64);
  const auto r40 = pure_log_partition(40, 1.2, 64);
  const double gap10 = std::abs(r10.log_z / 10 - r10.lambda_log);
  const double gap40 = std::abs(r40.log_z / 40 - r40.lambda_log);
  CHECK(gap40 < gap10);
}

TEST_CASE("doubling-ladder convergence and divergence flags") {
  // rapid decay: already stable at truncation 8
  const auto fast = pure_log_partition(4, 10.0, 8);
  CHECK(fast.converged);
  CHECK(!fast.diverged);

  // unit-boundary cylinder onset around the N = 3 threshold
  const double th = existence_threshold(3);
  const auto below = cylinder_log_partition_unit_boundary(3, th - 0.05, 512);
  const auto above = cylinder_log_partition_unit_boundary(3, th + 0.05, 512);
  CHECK(below.diverged);
  CHECK(!above.diverged);
  CHECK(above.converged);

  // the periodic trace has no finite window below ln 2: the diagonal alone
  // blows up, which is why the onset is probed on the pinned cylinder
  CHECK(pure_log_partition(3, th + 0.05, 64).diverged);
}
