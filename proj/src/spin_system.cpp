#include "cdti/spin_system.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cdti/errors.hpp"
#include "cdti/numeric.hpp"
#include "cdti/scaled_matrix.hpp"

namespace cdti {

namespace {

inline int spin_of_bit(std::uint32_t mask, int pos) { return (mask >> pos) & 1u ? -1 : 1; }

// Horizontal (within-strip) energy of one strip for every spin mask.
std::vector<double> strip_energy_table(const StripTriangulation& s) {
  const int m = s.size();
  std::vector<double> h(std::size_t{1} << m, 0.0);
  for (std::uint32_t mask = 0; mask < h.size(); ++mask) {
    int e = 0;
    for (int p = 0; p < m; ++p)
      e += spin_of_bit(mask, p) * spin_of_bit(mask, (p + 1) % m);
    h[mask] = -e;
  }
  return h;
}

// Cross-strip coupling: the d-th down triangle of `below` faces the d-th up
// triangle of `above`.
double vertical_energy(const StripTriangulation& below, std::uint32_t mask_below,
                       const StripTriangulation& above, std::uint32_t mask_above) {
  const auto downs = below.down_positions();
  const auto ups = above.up_positions();
  int e = 0;
  for (std::size_t d = 0; d < downs.size(); ++d)
    e += spin_of_bit(mask_below, downs[d]) * spin_of_bit(mask_above, ups[d]);
  return -e;
}

}  // namespace

SpinConfiguration spins_from_mask(int vertex_count, std::uint64_t mask) {
  SpinConfiguration s;
  s.spins.resize(vertex_count);
  for (int v = 0; v < vertex_count; ++v)
    s.spins[v] = (mask >> v) & 1u ? std::int8_t{-1} : std::int8_t{1};
  return s;
}

std::int64_t hamiltonian(const DualGraph& g, const SpinConfiguration& s) {
  if (static_cast<int>(s.spins.size()) != g.vertex_count)
    throw std::invalid_argument("spin configuration does not match the dual graph");
  std::int64_t e = 0;
  for (const Edge& ed : g.edges) e += std::int64_t{s.spins[ed.a]} * s.spins[ed.b];
  return -e;
}

double log_z_ising_bruteforce(const DualGraph& g, double beta) {
  if (g.vertex_count > 24)
    throw capacity_error("log_z_ising_bruteforce: more than 24 dual vertices");
  const std::uint64_t n_states = std::uint64_t{1} << g.vertex_count;
  LogSumExp acc;
  for (std::uint64_t mask = 0; mask < n_states; ++mask) {
    int equal = 0;
    for (const Edge& e : g.edges)
      equal += ((mask >> e.a) & 1u) == ((mask >> e.b) & 1u);
    const std::int64_t h = static_cast<std::int64_t>(g.edges.size()) - 2 * equal;
    acc.add(-beta * static_cast<double>(h));
  }
  return acc.value();
}

double log_z_ising_strip_dp(const CausalTriangulation& t, double beta) {
  const int n_strips = t.strip_count();
  for (int i = 0; i < n_strips; ++i)
    if (t.strip_triangles(i) > 20)
      throw capacity_error("log_z_ising_strip_dp: strip with more than 20 triangles");

  if (n_strips == 1) {
    const StripTriangulation& s = t.strip(0);
    const auto h = strip_energy_table(s);
    LogSumExp acc;
    for (std::uint32_t mask = 0; mask < h.size(); ++mask)
      acc.add(-beta * (h[mask] + vertical_energy(s, mask, s, mask)));
    return acc.value();
  }

  const int m0 = t.strip_triangles(0);
  for (int i = 0; i < n_strips; ++i)
    if (m0 + t.strip_triangles(i) > 26)
      throw capacity_error("log_z_ising_strip_dp: layer product state space too large");

  auto layer = [&](int i) {
    const StripTriangulation& cur = t.strip(i);
    const StripTriangulation& nxt = t.strip((i + 1) % n_strips);
    const auto h = strip_energy_table(cur);
    const std::size_t rows = std::size_t{1} << cur.size();
    const std::size_t cols = std::size_t{1} << nxt.size();
    std::vector<double> log_entries(rows * cols);
    for (std::uint32_t a = 0; a < rows; ++a)
      for (std::uint32_t b = 0; b < cols; ++b)
        log_entries[a * cols + b] = -beta * (h[a] + vertical_energy(cur, a, nxt, b));
    return ScaledMatrix::from_log_entries(static_cast<int>(rows), static_cast<int>(cols),
                                          log_entries);
  };

  ScaledMatrix acc = layer(0);
  for (int i = 1; i < n_strips; ++i) acc = acc.multiply(layer(i));
  return acc.log_trace();
}

double log_xi_truncated(int strip_count, double beta, double mu, int truncation) {
  if (strip_count < 1 || truncation < 1)
    throw std::invalid_argument("need strip_count >= 1 and truncation >= 1");
  if (truncation > 6)
    throw capacity_error("log_xi_truncated: slice bound above 6 is not tractable");

  // States are (slice size n, spin layer of the facing down triangles):
  // index base (2^n - 2) + mask.
  const int n_states = (1 << (truncation + 1)) - 2;
  auto state = [](int n, std::uint32_t mask) { return (1 << n) - 2 + static_cast<int>(mask); };

  std::vector<double> kernel(static_cast<std::size_t>(n_states) * n_states, 0.0);
  const double base_plus = std::exp(beta);        // exp(beta * (+1) * u_j)
  const double base_minus = std::exp(-beta);
  const double flip_down = std::exp(-2.0 * beta);  // spin flip against u_j = +1
  const double flip_up = std::exp(2.0 * beta);

  for (int n = 1; n <= truncation; ++n) {
    for (int np = 1; np <= truncation; ++np) {
      const int m = n + np;
      std::vector<double> prev_factor(std::size_t{1} << n);
      for (const StripTriangulation& shape : enumerate_strips(n, np, truncation)) {
        const auto h = strip_energy_table(shape);
        const auto ups = shape.up_positions();
        const auto downs = shape.down_positions();
        for (std::uint32_t sigma = 0; sigma < (std::uint32_t{1} << m); ++sigma) {
          const double w = std::exp(-mu * m - beta * h[sigma]);
          std::uint32_t down_mask = 0;
          for (std::size_t d = 0; d < downs.size(); ++d)
            if ((sigma >> downs[d]) & 1u) down_mask |= (1u << d);

          // prev_factor[s] = exp(beta * sum_j spin_prev[j] * spin_up[j]),
          // filled by flipping one previous-layer spin at a time.
          double all_plus = 1.0;
          for (int j = 0; j < n; ++j)
            all_plus *= (spin_of_bit(sigma, ups[j]) > 0) ? base_plus : base_minus;
          prev_factor[0] = all_plus;
          for (std::uint32_t s = 1; s < prev_factor.size(); ++s) {
            const int j = std::countr_zero(s);
            const double flip = (spin_of_bit(sigma, ups[j]) > 0) ? flip_down : flip_up;
            prev_factor[s] = prev_factor[s ^ (1u << j)] * flip;
          }

          double* row_base = kernel.data();
          const int col = state(np, down_mask);
          for (std::uint32_t s = 0; s < prev_factor.size(); ++s)
            row_base[static_cast<std::size_t>(state(n, s)) * n_states + col] +=
                w * prev_factor[s];
        }
      }
    }
  }

  return ScaledMatrix::from_values(n_states, n_states, std::move(kernel))
      .power(static_cast<std::uint64_t>(strip_count))
      .log_trace();
}

double log_xi_enumerated(int strip_count, double beta, double mu, int truncation) {
  LogSumExp acc;
  for_each_torus_triangulation(strip_count, truncation, [&](const CausalTriangulation& t) {
    acc.add(-mu * t.total_triangles() + log_z_ising_strip_dp(t, beta));
  });
  return acc.value();
}

}  // namespace cdti
