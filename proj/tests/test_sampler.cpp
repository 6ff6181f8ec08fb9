#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <string>

#include "cdti/dual_graph.hpp"
#include "cdti/errors.hpp"
#include "cdti/numeric.hpp"
#include "cdti/sampler.hpp"
#include "cdti/spin_system.hpp"
#include "cdti/strips.hpp"
#include "stat_helpers.hpp"

using namespace cdti;
using doctest::Approx;

namespace {

// Exact annealed weights per (t, sigma) state key at slice cap 2.
std::map<std::string, double> exact_state_weights(int n, double beta, double mu) {
  std::map<std::string, double> exact;
  double total = 0.0;
  for_each_torus_triangulation(n, 2, [&](const CausalTriangulation& t) {
    const auto g = dual_graph(t);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << g.vertex_count); ++m) {
      const auto s = spins_from_mask(g.vertex_count, m);
      const double w = std::exp(-mu * t.total_triangles() - beta * hamiltonian(g, s));
      std::string key = to_text(t);
      for (auto x : s.spins) key.push_back(x > 0 ? '+' : '-');
      exact[key] += w;
      total += w;
    }
  });
  for (auto& [k, w] : exact) w /= total;
  return exact;
}

}  // namespace

TEST_CASE("seed determinism") {
  RunOptions opt;
  opt.strip_count = 2;
  opt.slice_cap = 3;
  opt.beta = 0.4;
  opt.mu = 2.2;
  opt.steps = 5000;
  opt.seed = 77;
  opt.thin = 5;
  const auto a = run(opt);
  const auto b = run(opt);
  CHECK(a.step == b.step);
  CHECK(a.energy_per_triangle == b.energy_per_triangle);
  CHECK(a.mean_slice == b.mean_slice);
  CHECK(a.magnetization == b.magnetization);

  opt.seed = 78;
  const auto c = run(opt);
  CHECK(a.mean_slice != c.mean_slice);
}

TEST_CASE("series layout and burn-in annotation") {
  RunOptions opt;
  opt.strip_count = 3;
  opt.slice_cap = 2;
  opt.beta = 0.3;
  opt.mu = 2.0;
  opt.steps = 1000;
  opt.seed = 5;
  opt.thin = 10;
  const auto s = run(opt);
  CHECK(s.step.size() == 100);
  CHECK(s.step.front() == 10);
  CHECK(s.step.back() == 1000);
  CHECK(s.burn_in_rows == 10);
  CHECK(s.energy_per_triangle.size() == s.step.size());
  CHECK(s.mean_slice.size() == s.step.size());
  CHECK(s.magnetization.size() == s.step.size());
  CHECK(s.acc_geometry.size() == s.step.size());
  CHECK(s.acc_spin.size() == s.step.size());
  for (std::size_t i = 0; i < s.step.size(); ++i) {
    CHECK(s.acc_geometry[i] >= 0.0);
    CHECK(s.acc_geometry[i] <= 1.0);
    CHECK(s.acc_spin[i] >= 0.0);
    CHECK(s.acc_spin[i] <= 1.0);
    CHECK(s.mean_slice[i] >= 1.0);
    CHECK(s.mean_slice[i] <= 2.0);
  }
}

TEST_CASE("divergent-region refusal and override") {
  RunOptions opt;
  opt.beta = 0.1;
  opt.mu = 1.0;  // below 2 ln 2
  opt.steps = 100;
  CHECK_THROWS_AS(run(opt), divergent_region_error);
  opt.force_band = true;
  CHECK_NOTHROW(run(opt));
}

TEST_CASE("slice bounds auto-reject") {
  // cap 1: every insert proposal is rejected, the chain never moves
  AnnealedSampler s(2, 1, 0.5, 0.2, 9);
  const auto key = s.state_key();
  for (int i = 0; i < 2000; ++i) s.geometry_step();
  CHECK(s.geometry_acceptance() == 0.0);
  CHECK(s.state_key().substr(0, key.find('\n')) == key.substr(0, key.find('\n')));
  CHECK(s.mean_slice() == 1.0);

  // deletes at slice size 1 are rejected: sizes never fall below 1
  AnnealedSampler t(2, 3, 0.2, 3.5, 10);
  for (int i = 0; i < 20000; ++i) {
    t.step();
    CHECK(t.mean_slice() >= 1.0);
  }
}

TEST_CASE("cached quantities stay in sync") {
  AnnealedSampler s(3, 3, 0.6, 2.4, 31);
  for (int i = 0; i < 30000; ++i) s.step();  // internal validation every 10^4
  CHECK_NOTHROW(s.validate_cache());
  const auto g = s.graph();
  std::int64_t direct = 0;
  for (const auto& e : g.edges)
    direct -= std::int64_t{s.spin_configuration().spins[e.a]} *
              s.spin_configuration().spins[e.b];
  CHECK(direct == s.energy());
}

TEST_CASE("geometry kernel satisfies detailed balance") {
  // transition flows of the geometry block alone are symmetric in
  // stationarity; the cluster update between observations keeps the chain
  // at the target but does not enter the counted transitions
  AnnealedSampler s(2, 2, 0.4, 1.8, 123);
  for (int i = 0; i < 5000; ++i) s.step();  // warm up
  std::map<std::pair<std::string, std::string>, long> flow;
  std::string before = s.state_key();
  for (int i = 0; i < 300000; ++i) {
    if (s.geometry_step()) {
      const std::string after = s.state_key();
      ++flow[{before, after}];
      before = after;
    }
    s.spin_cluster_step();
    before = s.state_key();
  }
  int checked = 0;
  for (const auto& [edge, m_xy] : flow) {
    const auto rev = flow.find({edge.second, edge.first});
    const long m_yx = rev == flow.end() ? 0 : rev->second;
    if (m_xy + m_yx < 80) continue;
    ++checked;
    const double z = std::abs(static_cast<double>(m_xy - m_yx)) /
                     std::sqrt(static_cast<double>(m_xy + m_yx));
    CHECK(z < 4.5);
  }
  CHECK(checked > 10);
}

TEST_CASE("infinite-temperature geometry marginal matches the pure measure") {
  // at beta = 0 the spin sum contributes 2^{n(t)}: the slice-vector marginal
  // is the pure ensemble at mu - ln 2, capped at slice size 3
  const double mu = 2.2;
  const int cap = 3;
  std::map<std::string, double> exact;
  double total = 0.0;
  for_each_torus_triangulation(2, cap, [&](const CausalTriangulation& t) {
    const double w = std::exp(-(mu - kLn2) * t.total_triangles());
    exact[std::to_string(t.slice_size(0)) + "," + std::to_string(t.slice_size(1))] += w;
    total += w;
  });
  for (auto& [k, w] : exact) w /= total;

  AnnealedSampler s(2, cap, 0.0, mu, 2024);
  const long samples = 150000;
  std::map<std::string, long> counts;
  for (long i = 0; i < samples; ++i) {
    for (int j = 0; j < 4; ++j) s.step();
    const auto t = s.triangulation();
    ++counts[std::to_string(t.slice_size(0)) + "," + std::to_string(t.slice_size(1))];
  }
  CHECK(stat::occupancy_within_band(exact, counts, samples));
}

TEST_CASE("cluster update preserves the spin distribution at fixed geometry") {
  // geometry frozen at the two-strip minimal torus; spins refreshed by the
  // cluster rule must reproduce the exact Gibbs weights
  const double beta = 0.6;
  AnnealedSampler s(2, 2, beta, 2.0, 404);
  const auto g = s.graph();
  std::map<std::string, double> exact;
  double total = 0.0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << g.vertex_count); ++m) {
    const auto sp = spins_from_mask(g.vertex_count, m);
    const double w = std::exp(-beta * hamiltonian(g, sp));
    std::string key;
    for (auto x : sp.spins) key.push_back(x > 0 ? '+' : '-');
    exact[key] += w;
    total += w;
  }
  for (auto& [k, w] : exact) w /= total;

  const long samples = 120000;
  std::map<std::string, long> counts;
  for (long i = 0; i < samples; ++i) {
    s.spin_cluster_step();
    s.spin_cluster_step();
    std::string key;
    for (auto x : s.spin_configuration().spins) key.push_back(x > 0 ? '+' : '-');
    ++counts[key];
  }
  CHECK(stat::occupancy_within_band(exact, counts, samples));
}

TEST_CASE("strong coupling flips whole clusters") {
  // at large beta the open subgraph is a single cluster almost surely, so
  // the magnetization sign flips with frequency close to 1/2
  AnnealedSampler s(1, 1, 25.0, 1.0, 6);
  int flips = 0;
  const int updates = 4000;
  double prev = s.magnetization() >= 0 ? 1.0 : -1.0;
  for (int i = 0; i < updates; ++i) {
    s.spin_cluster_step();
    const double sign = s.magnetization() >= 0 ? 1.0 : -1.0;
    if (sign != prev) ++flips;
    prev = sign;
  }
  const double freq = static_cast<double>(flips) / updates;
  CHECK(std::abs(freq - 0.5) < 3.0 * std::sqrt(0.25 / updates));
}

TEST_CASE("narrow-tube regime") {
  RunOptions opt;
  opt.strip_count = 4;
  opt.slice_cap = 6;
  opt.beta = 0.5;
  opt.mu = 4.0;
  opt.steps = 200000;
  opt.seed = 14;
  opt.thin = 20;
  const auto series = run(opt);
  const std::size_t rows = series.mean_slice.size();
  double first = 0.0, second = 0.0;
  for (std::size_t i = series.burn_in_rows; i < rows; ++i) {
    if (i < series.burn_in_rows + (rows - series.burn_in_rows) / 2)
      first += series.mean_slice[i];
    else
      second += series.mean_slice[i];
  }
  const double half = (rows - series.burn_in_rows) / 2.0;
  first /= half;
  second /= half;
  CHECK(first < 2.0);
  CHECK(second < 2.0);
  CHECK(std::abs(first - second) < 0.1);  // no drift between halves
}
