#pragma once

#include <cstdint>
#include <vector>

#include "cdti/dual_graph.hpp"
#include "cdti/strips.hpp"

namespace cdti {

/// One spin per triangle, indexed by dual-graph vertex.
struct SpinConfiguration {
  std::vector<std::int8_t> spins;  // values +1 / -1
};

SpinConfiguration spins_from_mask(int vertex_count, std::uint64_t mask);  // bit set -> -1

/// Spins of a single strip packed as a bitmask; bit j is triangle j of the
/// strip's cyclic sequence, set bit meaning spin -1.
struct StripSpinLayer {
  int strip_index = 0;
  std::uint32_t bits = 0;
  int width = 0;
};

/// Ferromagnetic energy -sum over dual edges of the endpoint spin product;
/// parallel edges contribute once each. Integer valued.
std::int64_t hamiltonian(const DualGraph& g, const SpinConfiguration& s);

/// log of the spin partition sum at inverse temperature beta by full
/// enumeration (vertex_count <= 24).
double log_z_ising_bruteforce(const DualGraph& g, double beta);

/// Same value through the strip-layer transfer product: trace over per-strip
/// spin layers of matrices carrying the within-strip energy and the
/// cross-strip coupling. A single strip couples to itself through the
/// time-periodic gluing. Guard: strip triangle count <= 20.
double log_z_ising_strip_dp(const CausalTriangulation& t, double beta);

/// log of the annealed partition sum truncated to slice sizes <= truncation:
/// the trace of the N-th power of the annealed transfer kernel over
/// (slice size, boundary spin layer) states. Exactly equals the stream fold
/// of exp(-mu n(t)) * Z_spin(t, beta) over the truncated enumeration.
double log_xi_truncated(int strip_count, double beta, double mu, int truncation);

/// Stream-fold oracle for log_xi_truncated; feasible only at small sizes.
double log_xi_enumerated(int strip_count, double beta, double mu, int truncation);

}  // namespace cdti
