#pragma once

#include <vector>

#include "cdti/strips.hpp"

namespace cdti {

struct Edge {
  int a;
  int b;
};

/// Triangles-as-vertices adjacency of a causal triangulation. Parallel edges
/// are kept as repeated entries so that edge_count == (3/2) * vertex_count
/// holds identically; every vertex has degree exactly 3.
///
/// Vertex ids are strip-major, position-minor. Edge order: per strip, the
/// horizontal edges (position p to p+1 cyclically), then per strip the
/// vertical edges (the j-th down triangle of strip i to the j-th up triangle
/// of strip i+1, both counted from the roots).
struct DualGraph {
  int vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<int> strip_index;   // vertex -> strip
  std::vector<Tri> orientation;   // vertex -> up/down
  std::vector<int> position;      // vertex -> position in its strip sequence
};

DualGraph dual_graph(const CausalTriangulation& t);

std::vector<int> vertex_degrees(const DualGraph& g);
bool is_connected(const DualGraph& g);

}  // namespace cdti
