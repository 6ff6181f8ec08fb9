#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "cdti/dual_graph.hpp"
#include "cdti/errors.hpp"
#include "cdti/numeric.hpp"
#include "cdti/spin_system.hpp"
#include "cdti/strips.hpp"
#include "cdti/transfer.hpp"
#include "oracles.hpp"

using namespace cdti;
using doctest::Approx;

namespace {

std::vector<CausalTriangulation> collect(int n, int k) {
  std::vector<CausalTriangulation> ts;
  for_each_torus_triangulation(n, k, [&](const CausalTriangulation& t) { ts.push_back(t); });
  return ts;
}

}  // namespace

TEST_CASE("hamiltonian values") {
  const auto ts = collect(2, 3);
  const auto& t = ts[ts.size() / 3];
  const auto g = dual_graph(t);

  // pure states sit at the energy floor -(3/2) n(t)
  const auto all_plus = spins_from_mask(g.vertex_count, 0);
  const auto all_minus = spins_from_mask(g.vertex_count, ~std::uint64_t{0});
  CHECK(hamiltonian(g, all_plus) == -static_cast<std::int64_t>(g.edges.size()));
  CHECK(hamiltonian(g, all_minus) == -static_cast<std::int64_t>(g.edges.size()));
  CHECK(2 * g.edges.size() == static_cast<std::size_t>(3 * g.vertex_count));

  // one flipped spin on a vertex with three simple edges raises it by 6
  auto s44 = enumerate_strips(4, 4);
  CausalTriangulation big({s44[5], s44[9]});
  const auto gb = dual_graph(big);
  int lonely = -1;
  for (int v = 0; v < gb.vertex_count && lonely < 0; ++v) {
    int parallel = 0;
    std::vector<int> nbrs;
    for (const auto& e : gb.edges) {
      if (e.a == v) nbrs.push_back(e.b);
      if (e.b == v) nbrs.push_back(e.a);
    }
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      for (std::size_t j = i + 1; j < nbrs.size(); ++j)
        if (nbrs[i] == nbrs[j]) ++parallel;
    if (parallel == 0) lonely = v;
  }
  REQUIRE(lonely >= 0);
  const auto flipped = spins_from_mask(gb.vertex_count, std::uint64_t{1} << lonely);
  CHECK(hamiltonian(gb, flipped) == -static_cast<std::int64_t>(gb.edges.size()) + 6);

  // random configurations against the independent edge walk
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = spins_from_mask(g.vertex_count, rng());
    CHECK(hamiltonian(g, s) == oracle::edge_walk_energy(g, s.spins));
  }

  SpinConfiguration wrong;
  wrong.spins.assign(g.vertex_count + 1, 1);
  CHECK_THROWS_AS(hamiltonian(g, wrong), std::invalid_argument);
}

TEST_CASE("energy window over full enumeration") {
  const auto ts = collect(2, 2);
  for (const auto& t : ts) {
    const auto g = dual_graph(t);
    const std::int64_t floor = -static_cast<std::int64_t>(g.edges.size());
    std::int64_t lowest = 1000, highest = -1000;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.vertex_count); ++mask) {
      const auto h = hamiltonian(g, spins_from_mask(g.vertex_count, mask));
      lowest = std::min(lowest, h);
      highest = std::max(highest, h);
    }
    CHECK(lowest == floor);
    CHECK(highest <= -floor);
  }
}

TEST_CASE("brute-force partition sum") {
  // two triangles joined by a triple edge: 2 e^{3 beta} + 2 e^{-3 beta}
  CausalTriangulation tiny({StripTriangulation({Tri::Up, Tri::Down})});
  const auto g = dual_graph(tiny);
  for (double beta : {0.0, 0.4, 1.1}) {
    const double expect = 2.0 * std::exp(3.0 * beta) + 2.0 * std::exp(-3.0 * beta);
    CHECK(std::exp(log_z_ising_bruteforce(g, beta)) == Approx(expect).epsilon(1e-13));
  }

  // beta = 0 counts configurations
  const auto ts = collect(2, 2);
  for (const auto& t : ts)
    CHECK(log_z_ising_bruteforce(dual_graph(t), 0.0) ==
          Approx(t.total_triangles() * kLn2).epsilon(1e-14));

  DualGraph too_big;
  too_big.vertex_count = 25;
  CHECK_THROWS_AS(log_z_ising_bruteforce(too_big, 0.5), capacity_error);
}

TEST_CASE("layer transfer equals brute force") {
  for (int n = 1; n <= 2; ++n) {
    const auto ts = collect(n, 3);
    for (const auto& t : ts) {
      const auto g = dual_graph(t);
      for (double beta : {0.3, 0.7, 1.2}) {
        const double brute = log_z_ising_bruteforce(g, beta);
        const double dp = log_z_ising_strip_dp(t, beta);
        CHECK(dp == Approx(brute).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("partition sum grows with the coupling") {
  const auto ts = collect(2, 3);
  std::mt19937_64 rng(3);
  for (int pick = 0; pick < 20; ++pick) {
    const auto& t = ts[uniform_below(rng, static_cast<int>(ts.size()))];
    double prev = -1e300;
    for (double beta = 0.1; beta <= 2.001; beta += 0.1) {
      const double z = log_z_ising_strip_dp(t, beta);
      CHECK(z >= prev - 1e-12);
      prev = z;
    }
  }
}

TEST_CASE("per-triangulation sandwich") {
  for (const auto& t : collect(2, 2)) {
    const double n = t.total_triangles();
    for (double beta : {0.0, 0.5, 1.3}) {
      const double z = log_z_ising_strip_dp(t, beta);
      CHECK(z >= n * kLn2 - 1e-12);
      CHECK(z <= n * kLn2 + 1.5 * beta * n + 1e-12);
    }
  }
}

TEST_CASE("annealed kernel trace equals the stream fold") {
  for (int n = 1; n <= 2; ++n)
    for (int k = 1; k <= 3; ++k)
      for (double beta : {0.0, 0.6})
        for (double mu : {1.0, 2.2}) {
          const double kernel = log_xi_truncated(n, beta, mu, k);
          const double fold = log_xi_enumerated(n, beta, mu, k);
          CHECK(kernel == Approx(fold).epsilon(1e-12));
        }
}

TEST_CASE("annealed kernel against the full (t, sigma) brute force") {
  const double beta = 0.45, mu = 1.7;
  LogSumExp brute;
  for_each_torus_triangulation(2, 2, [&](const CausalTriangulation& t) {
    const auto g = dual_graph(t);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.vertex_count); ++mask) {
      const auto s = spins_from_mask(g.vertex_count, mask);
      brute.add(-mu * t.total_triangles() - beta * hamiltonian(g, s));
    }
  });
  CHECK(log_xi_truncated(2, beta, mu, 2) == Approx(brute.value()).epsilon(1e-13));
}

TEST_CASE("infinite-temperature reduction and energy sandwiches") {
  for (int n = 1; n <= 2; ++n)
    for (int k = 1; k <= 3; ++k)
      for (double mu : {1.4, 2.5}) {
        CHECK(log_xi_truncated(n, 0.0, mu, k) ==
              Approx(log_z_pure_enumerated(n, mu - kLn2, k)).epsilon(1e-12));
        const double beta = 0.8;
        const double xi = log_xi_truncated(n, beta, mu, k);
        CHECK(xi >= log_z_pure_enumerated(n, mu - kLn2, k) - 1e-12);
        CHECK(xi <= log_z_pure_enumerated(n, mu - 1.5 * beta - kLn2, k) + 1e-12);
      }
}

TEST_CASE("annealed kernel is monotone in the truncation") {
  for (double beta : {0.2, 0.9}) {
    double prev = -1e300;
    for (int k = 1; k <= 4; ++k) {
      const double xi = log_xi_truncated(3, beta, 2.0, k);
      CHECK(xi >= prev);
      prev = xi;
    }
  }
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(log_xi_truncated(2, 0.5, 2.0, 7), capacity_error);
  // a strip with 22 triangles trips the layer guard
  std::vector<Tri> long_seq(22, Tri::Up);
  for (int i = 11; i < 22; ++i) long_seq[i] = Tri::Down;
  CausalTriangulation t({StripTriangulation(long_seq)});
  CHECK_THROWS_AS(log_z_ising_strip_dp(t, 0.5), capacity_error);
}
