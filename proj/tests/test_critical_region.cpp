#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "cdti/critical_region.hpp"
#include "cdti/errors.hpp"
#include "cdti/numeric.hpp"
#include "cdti/random_cluster.hpp"
#include "cdti/spin_system.hpp"
#include "cdti/transfer.hpp"

using namespace cdti;
using doctest::Approx;

namespace {

// Independent assembly of the norm bound from its two coefficient formulas.
double bound_two_path(double beta, double mu) {
  const double c = std::exp(beta - mu) /
                   (std::exp(2.0 * beta) * std::pow(1.0 - std::exp(beta - mu), 2) -
                    std::exp(-2.0 * mu));
  const double m =
      std::exp(2.0 * beta) + (1.0 - std::exp(4.0 * beta)) * std::exp(-(beta + mu));
  const double ch = std::cosh(2.0 * beta);
  const double rad =
      1.0 - std::pow((m * m - 1.0) / (m * m + 1.0), 2) / (ch * ch);
  return c * c * (m * m + 1.0) * ch * (1.0 + std::sqrt(rad));
}

}  // namespace

TEST_CASE("norm bound values and envelope") {
  for (double beta : {0.1, 0.4, 1.0})
    for (double mu : {2.5, 3.0, 4.0}) {
      const double v = spin_transfer_bound(beta, mu);
      CHECK(v == Approx(bound_two_path(beta, mu)).epsilon(1e-12));
      // radicand in [0,1]: value between 1x and 2x the prefactor
      const double c = std::exp(beta - mu) /
                       (std::exp(2.0 * beta) * std::pow(1.0 - std::exp(beta - mu), 2) -
                        std::exp(-2.0 * mu));
      const double m =
          std::exp(2.0 * beta) + (1.0 - std::exp(4.0 * beta)) * std::exp(-(beta + mu));
      const double pre = c * c * (m * m + 1.0) * std::cosh(2.0 * beta);
      CHECK(v >= pre);
      CHECK(v <= 2.0 * pre + 1e-12);
    }

  // vanishes as mu grows at fixed beta
  CHECK(spin_transfer_bound(0.5, 20.0) < 1e-10);

  // pole of the c denominator: mu = ln(e^{2 beta} + 1) - beta
  const double beta = 0.7;
  const double pole = std::log(std::exp(2.0 * beta) + 1.0) - beta;
  CHECK_THROWS_AS(spin_transfer_bound(beta, pole), std::domain_error);
}

TEST_CASE("threshold curve") {
  // infinite-temperature limit
  CHECK(unique_gibbs_threshold(1e-4) == Approx(2.0 * kLn2).epsilon(1e-3));

  // strictly increasing
  CHECK(unique_gibbs_threshold(0.5) < unique_gibbs_threshold(1.0));
  CHECK(unique_gibbs_threshold(1.0) < unique_gibbs_threshold(1.5));

  // self-consistency: the bound straddles 1 across the threshold
  for (double b : {0.2, 0.5, 1.0, 2.0, 3.5}) {
    const double psi = unique_gibbs_threshold(b);
    CHECK(spin_transfer_bound(b, psi + 1e-6) < 1.0);
    CHECK(spin_transfer_bound(b, psi - 1e-6) > 1.0);
  }

  CHECK_THROWS_AS(unique_gibbs_threshold(0.0), std::invalid_argument);
}

TEST_CASE("single crossing on the scanned grid") {
  // above the pole the bound decreases through 1 exactly once
  for (double b : {0.3, 0.8, 1.7}) {
    const double pole = std::log(std::exp(2.0 * b) + 1.0) - b;
    const double psi = unique_gibbs_threshold(b);
    for (double mu = pole + 1e-6; mu < psi - 1e-6; mu += (psi - pole) / 200.0)
      CHECK(spin_transfer_bound(b, mu) > 1.0);
    for (double mu = psi + 1e-6; mu < psi + 5.0; mu += 0.025)
      CHECK(spin_transfer_bound(b, mu) < 1.0);
  }
}

TEST_CASE("band endpoints") {
  // crossover of the two lower branches: both equal ln 2 there
  const double b1 = divergence_kink_beta();
  CHECK(1.5 * std::log(2.0 * std::sinh(b1)) == Approx(kLn2).epsilon(1e-12));
  CHECK(band_lower(b1) == Approx(kLn2).epsilon(1e-12));

  // pinch at small beta
  CHECK(std::abs(band_upper(1e-4) - band_lower(1e-4)) < 5e-3);

  // ordered along the grid
  for (double b = 0.05; b <= 5.0001; b += 0.05)
    CHECK(band_lower(b) <= band_upper(b) + 1e-12);
}

TEST_CASE("crossover points") {
  const double b1 = divergence_kink_beta();
  CHECK(b1 == Approx(std::asinh(std::pow(2.0, -1.0 / 3.0))).epsilon(1e-15));
  // defining equation residual
  CHECK(std::abs(1.5 * std::log(2.0 * std::sinh(b1)) + kLn2 - 2.0 * kLn2) < 1e-12);
  // the divergence bound kinks there: both branches agree
  CHECK(divergence_bound(b1) == Approx(2.0 * kLn2).epsilon(1e-12));

  const double b2 = upper_bound_crossover_beta();
  CHECK(std::abs(1.5 * b2 + 2.0 * kLn2 - unique_gibbs_threshold(b2)) < 1e-8);
}

TEST_CASE("classification") {
  CHECK(classify(0.1, 1.0).verdict == Verdict::Divergent);  // below 2 ln 2
  CHECK(classify(1e-3, 2.0 * kLn2 + 0.01).verdict == Verdict::UniqueGibbs);

  // midpoint of the band above the second crossover
  const double b = upper_bound_crossover_beta() + 1.0;
  const auto lower = divergence_bound(b);
  const auto upper = std::min(unique_gibbs_threshold(b), 1.5 * b + 2.0 * kLn2);
  const auto mid = classify(b, 0.5 * (lower + upper));
  CHECK(mid.verdict == Verdict::IndeterminateBand);
  CHECK(mid.lower_curve == Approx(lower));
  CHECK(mid.upper_curve == Approx(upper));

  // boundary points land in the band (strict inequalities)
  CHECK(classify(b, lower).verdict == Verdict::IndeterminateBand);
  CHECK(classify(b, upper).verdict == Verdict::IndeterminateBand);

  // piecewise-constant: the verdict changes only at the two curves
  for (double beta : {0.3, 1.0, 3.0}) {
    const auto lo = divergence_bound(beta);
    const auto hi = std::min(unique_gibbs_threshold(beta), 1.5 * beta + 2.0 * kLn2);
    Verdict prev = classify(beta, lo - 1.0).verdict;
    int changes = 0;
    for (double mu = lo - 1.0; mu <= hi + 1.0; mu += 0.01) {
      const Verdict v = classify(beta, mu).verdict;
      if (v != prev) ++changes;
      prev = v;
    }
    CHECK(changes == 2);
  }
}

TEST_CASE("region geometry along the grid") {
  for (double b = 0.05; b <= 5.0001; b += 0.05) {
    const double lower = divergence_bound(b);
    const double upper = std::min(unique_gibbs_threshold(b), 1.5 * b + 2.0 * kLn2);
    CHECK(lower < upper);
  }
}

TEST_CASE("free-energy bounds") {
  const auto ok = free_energy_bounds(0.3, 4.0);
  CHECK(ok.valid);
  CHECK(ok.lower <= ok.upper);

  // bounds pinch as beta -> 0
  const auto pinch = free_energy_bounds(1e-4, 3.0);
  CHECK(pinch.valid);
  CHECK(std::abs(pinch.upper - pinch.lower) < 2e-2);
  CHECK(pinch.lower ==
        Approx(std::log(transfer_spectral_radius(3.0 - band_lower(1e-4)))).epsilon(1e-12));

  // ordering preserved out to large mu
  for (double mu : {5.0, 8.0, 12.0}) {
    const auto b = free_energy_bounds(0.7, mu);
    CHECK(b.valid);
    CHECK(b.lower <= b.upper);
  }

  const auto bad = free_energy_bounds(0.7, 1.0);
  CHECK(!bad.valid);
  CHECK(!bad.reason.empty());
  CHECK(std::isnan(bad.lower));
}

TEST_CASE("truncated free-energy surrogate stays below the upper bound") {
  const auto b = free_energy_bounds(0.3, 4.0);
  const double phi = log_xi_truncated(4, 0.3, 4.0, 4) / 4.0;
  CHECK(phi <= b.upper + 0.05);
}

TEST_CASE("monotone free energy in mu") {
  const std::vector<double> grid{3.0, 3.5, 4.0};
  CHECK(monotone_free_energy_check(2, 3, 0.3, grid));

  // fine grid, strictly increasing surrogate
  std::vector<double> fine;
  for (double mu = 2.5; mu <= 4.51; mu += 0.25) fine.push_back(mu);
  CHECK(monotone_free_energy_check(3, 3, 0.5, fine));

  double prev = -1e300;
  for (double mu : fine) {
    const double v = -log_xi_truncated(2, 0.4, mu, 3) / 2.0;
    CHECK(v > prev);
    prev = v;
  }
}
