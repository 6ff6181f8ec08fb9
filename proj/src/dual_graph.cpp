#include "cdti/dual_graph.hpp"

#include "cdti/union_find.hpp"

namespace cdti {

DualGraph dual_graph(const CausalTriangulation& t) {
  const int n_strips = t.strip_count();
  DualGraph g;

  std::vector<int> offset(n_strips + 1, 0);
  for (int i = 0; i < n_strips; ++i) offset[i + 1] = offset[i] + t.strip(i).size();
  g.vertex_count = offset[n_strips];

  g.strip_index.resize(g.vertex_count);
  g.orientation.resize(g.vertex_count);
  g.position.resize(g.vertex_count);
  for (int i = 0; i < n_strips; ++i) {
    const auto& seq = t.strip(i).sequence();
    for (int p = 0; p < static_cast<int>(seq.size()); ++p) {
      const int v = offset[i] + p;
      g.strip_index[v] = i;
      g.orientation[v] = seq[p];
      g.position[v] = p;
    }
  }

  g.edges.reserve(g.vertex_count * 3 / 2);
  for (int i = 0; i < n_strips; ++i) {
    const int m = t.strip(i).size();
    for (int p = 0; p < m; ++p)
      g.edges.push_back({offset[i] + p, offset[i] + (p + 1) % m});
  }
  for (int i = 0; i < n_strips; ++i) {
    const int j = (i + 1) % n_strips;
    const auto downs = t.strip(i).down_positions();
    const auto ups = t.strip(j).up_positions();
    for (std::size_t d = 0; d < downs.size(); ++d)
      g.edges.push_back({offset[i] + downs[d], offset[j] + ups[d]});
  }
  return g;
}

std::vector<int> vertex_degrees(const DualGraph& g) {
  std::vector<int> deg(g.vertex_count, 0);
  for (const Edge& e : g.edges) {
    ++deg[e.a];
    ++deg[e.b];
  }
  return deg;
}

bool is_connected(const DualGraph& g) {
  if (g.vertex_count == 0) return true;
  UnionFind uf(g.vertex_count);
  for (const Edge& e : g.edges) uf.unite(e.a, e.b);
  return uf.components() == 1;
}

}  // namespace cdti
