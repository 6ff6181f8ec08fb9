#include "cdti/random_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cdti/errors.hpp"
#include "cdti/numeric.hpp"
#include "cdti/spin_system.hpp"
#include "cdti/transfer.hpp"
#include "cdti/union_find.hpp"

namespace cdti {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

int count_clusters(const DualGraph& g, const std::vector<std::uint8_t>& open) {
  UnionFind uf(g.vertex_count);
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (open[e]) uf.unite(g.edges[e].a, g.edges[e].b);
  return uf.components();
}

bool vertex_set_connected(const DualGraph& g, const std::vector<int>& vertices) {
  if (vertices.size() <= 1) return true;
  std::vector<int> local(g.vertex_count, -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) local[vertices[i]] = static_cast<int>(i);
  UnionFind uf(static_cast<int>(vertices.size()));
  for (const Edge& e : g.edges) {
    const int a = local[e.a], b = local[e.b];
    if (a >= 0 && b >= 0) uf.unite(a, b);
  }
  return uf.components() == 1;
}

std::vector<int> induced_edges(const DualGraph& g, const std::vector<int>& vertices) {
  std::vector<char> in(g.vertex_count, 0);
  for (int v : vertices) in[v] = 1;
  std::vector<int> ids;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (in[g.edges[e].a] && in[g.edges[e].b]) ids.push_back(static_cast<int>(e));
  return ids;
}

}  // namespace

double open_probability(double beta) {
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  return 1.0 - std::exp(-2.0 * beta);
}

EdgeConfiguration sample_links(const DualGraph& g, double beta, std::uint64_t seed) {
  const double p = open_probability(beta);
  std::mt19937_64 rng(seed);
  EdgeConfiguration cfg;
  cfg.open.resize(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) cfg.open[e] = uniform01(rng) < p;
  cfg.cluster_count = count_clusters(g, cfg.open);
  return cfg;
}

EdgeConfiguration edge_configuration_from_open(const DualGraph& g,
                                               std::vector<std::uint8_t> open) {
  if (open.size() != g.edges.size())
    throw std::invalid_argument("open vector does not match the edge list");
  EdgeConfiguration cfg;
  cfg.open = std::move(open);
  cfg.cluster_count = count_clusters(g, cfg.open);
  return cfg;
}

double log_z_fk_exact(const DualGraph& g, double beta) {
  const std::size_t n_edges = g.edges.size();
  if (n_edges > 24) throw capacity_error("log_z_fk_exact: more than 24 dual edges");
  const double p = open_probability(beta);
  const double log_p = std::log(p);          // -inf at beta = 0; those terms drop out
  const double log_q = std::log1p(-p);       // log(1 - p) = -2 beta
  LogSumExp acc;
  std::vector<std::uint8_t> open(n_edges, 0);
  for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << n_edges); ++subset) {
    UnionFind uf(g.vertex_count);
    int n_open = 0;
    for (std::size_t e = 0; e < n_edges; ++e) {
      if ((subset >> e) & 1u) {
        ++n_open;
        uf.unite(g.edges[e].a, g.edges[e].b);
      }
    }
    if (n_open > 0 && p == 0.0) continue;
    const double log_weight =
        (n_open > 0 ? n_open * log_p : 0.0) + static_cast<double>(n_edges - n_open) * log_q;
    acc.add(log_weight + uf.components() * kLn2);
  }
  return 1.5 * beta * g.vertex_count + acc.value();
}

MonteCarloEstimate z_fk_mc(const DualGraph& g, double beta, std::size_t samples,
                           std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("z_fk_mc: need at least 100 samples");
  const double p = open_probability(beta);
  const double prefactor = std::exp(1.5 * beta * g.vertex_count);
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> open(g.edges.size());
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t e = 0; e < open.size(); ++e) open[e] = uniform01(rng) < p;
    const double w = prefactor * std::exp2(count_clusters(g, open));
    sum += w;
    sum_sq += w * w;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), samples};
}

ClusterDecomposition cluster_decomposition(const DualGraph& g, const EdgeConfiguration& cfg) {
  UnionFind uf(g.vertex_count);
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (cfg.open[e]) uf.unite(g.edges[e].a, g.edges[e].b);
  std::vector<std::vector<int>> groups(g.vertex_count);
  for (int v = 0; v < g.vertex_count; ++v) groups[uf.find(v)].push_back(v);
  ClusterDecomposition dec;
  for (auto& grp : groups) {
    if (grp.empty()) continue;
    ClusterComponent c;
    c.vertices = std::move(grp);
    c.edge_ids = induced_edges(g, c.vertices);
    dec.components.push_back(std::move(c));
  }
  return dec;
}

std::vector<ClusterDecomposition> all_maximal_partitions(const DualGraph& g) {
  if (g.vertex_count > 8) throw capacity_error("all_maximal_partitions: more than 8 vertices");
  std::vector<ClusterDecomposition> out;
  std::vector<std::vector<int>> blocks;

  auto emit = [&]() {
    for (const auto& b : blocks)
      if (!vertex_set_connected(g, b)) return;
    ClusterDecomposition dec;
    for (const auto& b : blocks) {
      ClusterComponent c;
      c.vertices = b;
      c.edge_ids = induced_edges(g, b);
      dec.components.push_back(std::move(c));
    }
    out.push_back(std::move(dec));
  };

  auto assign = [&](auto&& self, int v) -> void {
    if (v == g.vertex_count) {
      emit();
      return;
    }
    // index loop: recursion below grows and shrinks the block vector
    const std::size_t n_blocks = blocks.size();
    for (std::size_t i = 0; i < n_blocks; ++i) {
      blocks[i].push_back(v);
      self(self, v + 1);
      blocks[i].pop_back();
    }
    blocks.push_back({v});
    self(self, v + 1);
    blocks.pop_back();
  };
  assign(assign, 0);
  return out;
}

namespace {

// Walks the connected spanning subgraphs of a component, feeding each edge
// count to `visit`.
template <typename Visit>
void for_each_spanning_subgraph(const DualGraph& g, const ClusterComponent& c, Visit&& visit) {
  const int nv = static_cast<int>(c.vertices.size());
  if (nv > 8) throw capacity_error("spanning subgraph enumeration: component larger than 8");
  if (nv == 1) {
    visit(0);
    return;
  }
  std::vector<int> local(g.vertex_count, -1);
  for (int i = 0; i < nv; ++i) local[c.vertices[i]] = i;
  const std::size_t n_edges = c.edge_ids.size();
  if (n_edges > 20) throw capacity_error("spanning subgraph enumeration: too many edges");
  for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << n_edges); ++subset) {
    UnionFind uf(nv);
    int count = 0;
    for (std::size_t e = 0; e < n_edges; ++e) {
      if ((subset >> e) & 1u) {
        ++count;
        const Edge& ed = g.edges[c.edge_ids[e]];
        uf.unite(local[ed.a], local[ed.b]);
      }
    }
    if (uf.components() == 1) visit(count);
  }
}

}  // namespace

double spanning_subgraph_polynomial(const DualGraph& g, const ClusterComponent& c, double u) {
  double sum = 0.0;
  for_each_spanning_subgraph(g, c, [&](int edges) { sum += std::pow(u, edges); });
  return sum;
}

std::uint64_t spanning_subgraph_count(const DualGraph& g, const ClusterComponent& c) {
  std::uint64_t n = 0;
  for_each_spanning_subgraph(g, c, [&](int) { ++n; });
  return n;
}

double cluster_expansion_residual(const DualGraph& g, double beta) {
  if (g.vertex_count > 6) throw capacity_error("cluster_expansion_residual: more than 6 vertices");
  const double p = open_probability(beta);
  const double u = p / (1.0 - p);
  const double lhs = std::exp(log_z_ising_bruteforce(g, beta));

  // rho memoized per vertex-set bitmask
  std::vector<double> rho_memo(std::size_t{1} << g.vertex_count,
                               -std::numeric_limits<double>::infinity());
  auto rho = [&](const ClusterComponent& c) {
    std::uint32_t key = 0;
    for (int v : c.vertices) key |= (1u << v);
    if (rho_memo[key] == -std::numeric_limits<double>::infinity())
      rho_memo[key] = spanning_subgraph_polynomial(g, c, u);
    return rho_memo[key];
  };

  double sum = 0.0;
  for (const ClusterDecomposition& dec : all_maximal_partitions(g)) {
    double prod = std::exp2(static_cast<double>(dec.components.size()));
    for (const ClusterComponent& c : dec.components) prod *= rho(c);
    sum += prod;
  }
  const double n = g.vertex_count;
  const double rhs = std::exp(1.5 * beta * n) * std::pow(1.0 - p, 1.5 * n) * sum;
  return std::abs(lhs - rhs) / lhs;
}

bool spanning_edge_bounds_hold(const DualGraph& g, const ClusterComponent& c) {
  if (static_cast<int>(c.vertices.size()) >= g.vertex_count)
    throw std::invalid_argument("spanning_edge_bounds_hold: component must be proper");
  const double size = static_cast<double>(c.vertices.size());
  bool ok = true;
  for_each_spanning_subgraph(g, c, [&](int edges) {
    if (edges < size - 1 || edges > 1.5 * size - 1) ok = false;
  });
  return ok;
}

namespace {

// Shared tail of the two diagnostic expansions:
// e^{-1.5 beta n} { 2 rho(whole graph) + u^{power} sum_{k >= 2} (2/u)^k
//   sum over partitions into k blocks of prod #Span(C_i) }.
double diagnostic_lower_bound(const DualGraph& g, double beta, double tail_power) {
  if (g.vertex_count > 6) throw capacity_error("diagnostic bound: more than 6 vertices");
  const double p = open_probability(beta);
  const double u = p / (1.0 - p);
  ClusterComponent whole;
  whole.vertices.resize(g.vertex_count);
  for (int v = 0; v < g.vertex_count; ++v) whole.vertices[v] = v;
  whole.edge_ids = induced_edges(g, whole.vertices);
  const double rho_whole = spanning_subgraph_polynomial(g, whole, u);

  std::vector<std::uint64_t> count_memo(std::size_t{1} << g.vertex_count, 0);
  double tail = 0.0;
  for (const ClusterDecomposition& dec : all_maximal_partitions(g)) {
    const std::size_t k = dec.components.size();
    if (k < 2) continue;
    double prod = 1.0;
    for (const ClusterComponent& c : dec.components) {
      std::uint32_t key = 0;
      for (int v : c.vertices) key |= (1u << v);
      if (count_memo[key] == 0) count_memo[key] = spanning_subgraph_count(g, c);
      prod *= static_cast<double>(count_memo[key]);
    }
    tail += std::pow(2.0 / u, static_cast<double>(k)) * prod;
  }
  const double n = g.vertex_count;
  return std::exp(-1.5 * beta * n) * (2.0 * rho_whole + std::pow(u, tail_power) * tail);
}

}  // namespace

double lower_bound_u_gt1(const DualGraph& g, double beta) {
  if (beta <= kLn2 / 2.0) throw std::invalid_argument("lower_bound_u_gt1: needs beta > ln2/2");
  return diagnostic_lower_bound(g, beta, static_cast<double>(g.vertex_count));
}

double lower_bound_u_lt1(const DualGraph& g, double beta) {
  if (beta <= 0.0 || beta >= kLn2 / 2.0)
    throw std::invalid_argument("lower_bound_u_lt1: needs 0 < beta < ln2/2");
  return diagnostic_lower_bound(g, beta, 1.5 * g.vertex_count);
}

double fk_three_term_lower(const DualGraph& g, double beta) {
  const double p = open_probability(beta);
  const double n = g.vertex_count;
  const double base = 1.5 * beta * n;
  const double terms[3] = {
      2.0 * std::exp(base + 1.5 * n * std::log(p)),
      -2.0 * std::exp(base + (n - 1.0) * std::log(p) + (0.5 * n + 1.0) * std::log1p(-p)),
      2.0 * std::exp(base + (n - 1.0) * std::log(2.0 - p) + (0.5 * n + 1.0) * std::log1p(-p)),
  };
  // sorted-magnitude compensated combination; the middle term is subtracted
  std::vector<double> xs(terms, terms + 3);
  std::sort(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  return compensated_sum(xs);
}

double annealed_lower_bound(int strip_count, double beta, double mu, int truncation) {
  if (beta <= kLn2 / 2.0) throw std::invalid_argument("annealed_lower_bound: needs beta > ln2/2");
  const double p = open_probability(beta);
  const double shift = mu - 1.5 * beta;
  const double args[3] = {
      shift - 1.5 * std::log(p),
      shift - std::log(p * std::sqrt(1.0 - p)),
      shift - std::log((2.0 - p) * std::sqrt(1.0 - p)),
  };
  const double threshold = existence_threshold(strip_count);
  for (double a : args)
    if (a <= threshold) return kInf;
  std::vector<double> terms(3);
  for (int i = 0; i < 3; ++i)
    terms[i] = 2.0 * std::exp(pure_log_partition(strip_count, args[i], truncation).log_z);
  terms[1] = -terms[1];
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  return compensated_sum(terms);
}

double divergence_bound(double beta) {
  if (beta <= 0.0) throw std::invalid_argument("divergence_bound: needs beta > 0");
  return std::max(2.0 * kLn2, 1.5 * std::log(2.0 * std::sinh(beta)) + kLn2);
}

}  // namespace cdti
