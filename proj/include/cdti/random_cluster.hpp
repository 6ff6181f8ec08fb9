#pragma once

#include <cstdint>
#include <vector>

#include "cdti/dual_graph.hpp"

namespace cdti {

/// Probability that a dual edge carries at least one link at inverse
/// temperature beta: 1 - exp(-2 beta).
double open_probability(double beta);

/// A random-cluster realization: one open/closed bit per dual edge (parallel
/// edges independent) plus the cluster count of the open subgraph, isolated
/// vertices included.
struct EdgeConfiguration {
  std::vector<std::uint8_t> open;
  int cluster_count = 0;
};

EdgeConfiguration sample_links(const DualGraph& g, double beta, std::uint64_t seed);
EdgeConfiguration edge_configuration_from_open(const DualGraph& g, std::vector<std::uint8_t> open);

/// log of the spin partition sum through the random-cluster identity:
/// exp(1.5 beta n) * sum over open-edge subsets of
/// p^{|A|} (1-p)^{|E|-|A|} 2^{k(A)}. Guard: |E| <= 24.
double log_z_fk_exact(const DualGraph& g, double beta);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Unbiased Monte Carlo estimate of the same quantity (linear scale):
/// sample mean and standard error of exp(1.5 beta n) * 2^k.
MonteCarloEstimate z_fk_mc(const DualGraph& g, double beta, std::size_t samples,
                           std::uint64_t seed);

/// One block of a vertex partition together with its induced (maximal) edge
/// set: every dual edge with both endpoints in the block.
struct ClusterComponent {
  std::vector<int> vertices;
  std::vector<int> edge_ids;
};

struct ClusterDecomposition {
  std::vector<ClusterComponent> components;
};

/// Components of the open subgraph of a realization, each carrying its
/// induced edge set.
ClusterDecomposition cluster_decomposition(const DualGraph& g, const EdgeConfiguration& cfg);

/// Every partition of the dual vertices into blocks that induce connected
/// subgraphs, with maximal edge sets attached. Guard: vertex_count <= 8.
std::vector<ClusterDecomposition> all_maximal_partitions(const DualGraph& g);

/// Generating sum over connected spanning subgraphs of the component:
/// sum of u^{edge count}. Guard: component size <= 8.
double spanning_subgraph_polynomial(const DualGraph& g, const ClusterComponent& c, double u);

/// Number of connected spanning subgraphs of the component.
std::uint64_t spanning_subgraph_count(const DualGraph& g, const ClusterComponent& c);

/// Relative residual between the brute-force spin partition sum and its
/// partition expansion  e^{1.5 beta n} (1-p)^{1.5 n} sum_k 2^k sum_{partitions}
/// prod rho(C_i). Guard: vertex_count <= 6.
double cluster_expansion_residual(const DualGraph& g, double beta);

/// True when every connected spanning subgraph of a proper component has an
/// edge count between |C|-1 and 1.5|C|-1.
bool spanning_edge_bounds_hold(const DualGraph& g, const ClusterComponent& c);

/// Diagnostic lower bounds on the spin partition sum from the spanning
/// expansion, for the link-weight regimes u > 1 and u < 1.
double lower_bound_u_gt1(const DualGraph& g, double beta);
double lower_bound_u_lt1(const DualGraph& g, double beta);

/// Closed three-term lower bound on the spin partition sum (u > 1 regime).
double fk_three_term_lower(const DualGraph& g, double beta);

/// Three-term lower bound on the annealed partition sum at truncation K.
/// Requires beta > ln2 / 2; +infinity sentinel when any of the three shifted
/// pure partition functions sits at or below its existence threshold.
double annealed_lower_bound(int strip_count, double beta, double mu, int truncation);

/// mu below this curve implies a divergent annealed partition function for
/// all large strip counts: max(2 ln 2, 1.5 ln(2 sinh beta) + ln 2).
double divergence_bound(double beta);

}  // namespace cdti
