#include "cdti/sampler.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cdti/critical_region.hpp"
#include "cdti/errors.hpp"
#include "cdti/numeric.hpp"
#include "cdti/random_cluster.hpp"
#include "cdti/union_find.hpp"

namespace cdti {

namespace {

std::int64_t strip_h_energy(const std::vector<std::int8_t>& sp) {
  const int m = static_cast<int>(sp.size());
  std::int64_t e = 0;
  for (int p = 0; p < m; ++p) e += std::int64_t{sp[p]} * sp[(p + 1) % m];
  return -e;
}

std::int64_t strip_v_energy(const std::vector<Tri>& seq_below,
                            const std::vector<std::int8_t>& sp_below,
                            const std::vector<Tri>& seq_above,
                            const std::vector<std::int8_t>& sp_above) {
  std::int64_t e = 0;
  std::size_t u = 0;
  for (std::size_t d = 0; d < seq_below.size(); ++d) {
    if (seq_below[d] != Tri::Down) continue;
    while (u < seq_above.size() && seq_above[u] != Tri::Up) ++u;
    e += std::int64_t{sp_below[d]} * sp_above[u];
    ++u;
  }
  return -e;
}

int nth_down_position(const std::vector<Tri>& seq, int idx) {
  int seen = 0;
  for (std::size_t p = 0; p < seq.size(); ++p)
    if (seq[p] == Tri::Down && seen++ == idx) return static_cast<int>(p);
  throw std::logic_error("nth_down_position: index out of range");
}

int nth_up_position(const std::vector<Tri>& seq, int idx) {
  int seen = 0;
  for (std::size_t p = 0; p < seq.size(); ++p)
    if (seq[p] == Tri::Up && seen++ == idx) return static_cast<int>(p);
  throw std::logic_error("nth_up_position: index out of range");
}

}  // namespace

AnnealedSampler::AnnealedSampler(int strip_count, int slice_cap, double beta, double mu,
                                 std::uint64_t seed)
    : strip_count_(strip_count),
      slice_cap_(slice_cap),
      beta_(beta),
      mu_(mu),
      rng_(seed) {
  if (strip_count < 1 || slice_cap < 1)
    throw std::invalid_argument("sampler needs strip_count >= 1 and slice_cap >= 1");
  seq_.assign(strip_count_, {Tri::Up, Tri::Down});
  spin_.resize(strip_count_);
  for (auto& sp : spin_) {
    sp.resize(2);
    for (auto& s : sp) s = (rng_() & 1u) ? std::int8_t{-1} : std::int8_t{1};
  }
  slice_.assign(strip_count_, 1);
  rebuild_derived();
}

void AnnealedSampler::rebuild_derived() {
  graph_ = dual_graph(triangulation());
  flat_.clear();
  flat_.reserve(graph_.vertex_count);
  for (const auto& sp : spin_) flat_.insert(flat_.end(), sp.begin(), sp.end());
  std::int64_t e = 0;
  for (const Edge& ed : graph_.edges) e += std::int64_t{flat_[ed.a]} * flat_[ed.b];
  energy_ = -e;
}

CausalTriangulation AnnealedSampler::triangulation() const {
  std::vector<StripTriangulation> strips;
  strips.reserve(strip_count_);
  for (const auto& s : seq_) strips.emplace_back(s);
  return CausalTriangulation(std::move(strips));
}

SpinConfiguration AnnealedSampler::spin_configuration() const {
  SpinConfiguration s;
  s.spins = flat_;
  return s;
}

int AnnealedSampler::total_triangles() const { return static_cast<int>(flat_.size()); }

double AnnealedSampler::mean_slice() const {
  double s = 0.0;
  for (int n : slice_) s += n;
  return s / strip_count_;
}

double AnnealedSampler::magnetization() const {
  double s = 0.0;
  for (auto v : flat_) s += v;
  return s / static_cast<double>(flat_.size());
}

double AnnealedSampler::geometry_acceptance() const {
  return geo_attempts_ == 0 ? 0.0
                            : static_cast<double>(geo_accepts_) / static_cast<double>(geo_attempts_);
}

double AnnealedSampler::cluster_flip_rate() const {
  return clusters_seen_ == 0
             ? 0.0
             : static_cast<double>(clusters_flipped_) / static_cast<double>(clusters_seen_);
}

bool AnnealedSampler::geometry_step() {
  ++geo_attempts_;
  const int N = strip_count_;
  const int j = uniform_below(rng_, N);
  const bool insert = (rng_() & 1u) != 0;
  const int jm = (j - 1 + N) % N;
  const int nj = slice_[j];

  std::int64_t delta_h = 0;
  double log_proposal = 0.0;

  std::vector<Tri> new_seq_jm, new_seq_j;
  std::vector<std::int8_t> new_spin_jm, new_spin_j;

  if (insert) {
    if (nj == slice_cap_) return false;
    const auto spin_draw = [&]() { return (rng_() & 1u) ? std::int8_t{-1} : std::int8_t{1}; };
    if (N == 1) {
      const int m = static_cast<int>(seq_[0].size());
      const int gd = 1 + uniform_below(rng_, m);
      const int gu = 1 + uniform_below(rng_, m + 1);
      const std::int8_t tau_d = spin_draw(), tau_u = spin_draw();
      const std::int64_t before = strip_h_energy(spin_[0]) +
                                  strip_v_energy(seq_[0], spin_[0], seq_[0], spin_[0]);
      new_seq_j = seq_[0];
      new_spin_j = spin_[0];
      new_seq_j.insert(new_seq_j.begin() + gd, Tri::Down);
      new_spin_j.insert(new_spin_j.begin() + gd, tau_d);
      new_seq_j.insert(new_seq_j.begin() + gu, Tri::Up);
      new_spin_j.insert(new_spin_j.begin() + gu, tau_u);
      delta_h = strip_h_energy(new_spin_j) +
                strip_v_energy(new_seq_j, new_spin_j, new_seq_j, new_spin_j) - before;
      log_proposal = std::log(4.0 * m * (m + 1.0)) - std::log((nj + 1.0) * nj);
    } else {
      const int m_jm = static_cast<int>(seq_[jm].size());
      const int m_j = static_cast<int>(seq_[j].size());
      const int gd = 1 + uniform_below(rng_, m_jm);
      const int gu = 1 + uniform_below(rng_, m_j);
      const std::int8_t tau_d = spin_draw(), tau_u = spin_draw();
      const std::int64_t before = strip_h_energy(spin_[jm]) + strip_h_energy(spin_[j]) +
                                  strip_v_energy(seq_[jm], spin_[jm], seq_[j], spin_[j]);
      new_seq_jm = seq_[jm];
      new_spin_jm = spin_[jm];
      new_seq_jm.insert(new_seq_jm.begin() + gd, Tri::Down);
      new_spin_jm.insert(new_spin_jm.begin() + gd, tau_d);
      new_seq_j = seq_[j];
      new_spin_j = spin_[j];
      new_seq_j.insert(new_seq_j.begin() + gu, Tri::Up);
      new_spin_j.insert(new_spin_j.begin() + gu, tau_u);
      delta_h = strip_h_energy(new_spin_jm) + strip_h_energy(new_spin_j) +
                strip_v_energy(new_seq_jm, new_spin_jm, new_seq_j, new_spin_j) - before;
      log_proposal = std::log(4.0 * m_jm * static_cast<double>(m_j)) -
                     std::log((nj + 1.0) * nj);
    }
    const double log_acc = -2.0 * mu_ - beta_ * static_cast<double>(delta_h) + log_proposal;
    if (log_acc < 0.0 && uniform01(rng_) >= std::exp(log_acc)) return false;
    if (N == 1) {
      seq_[0] = std::move(new_seq_j);
      spin_[0] = std::move(new_spin_j);
    } else {
      seq_[jm] = std::move(new_seq_jm);
      spin_[jm] = std::move(new_spin_jm);
      seq_[j] = std::move(new_seq_j);
      spin_[j] = std::move(new_spin_j);
    }
    ++slice_[j];
  } else {
    if (nj == 1) return false;
    if (N == 1) {
      const int m = static_cast<int>(seq_[0].size());
      const int u_idx = 1 + uniform_below(rng_, nj - 1);  // never the root
      new_seq_j = seq_[0];
      new_spin_j = spin_[0];
      const std::int64_t before = strip_h_energy(spin_[0]) +
                                  strip_v_energy(seq_[0], spin_[0], seq_[0], spin_[0]);
      const int upos = nth_up_position(new_seq_j, u_idx);
      new_seq_j.erase(new_seq_j.begin() + upos);
      new_spin_j.erase(new_spin_j.begin() + upos);
      const int d_idx = uniform_below(rng_, nj);
      const int dpos = nth_down_position(new_seq_j, d_idx);
      new_seq_j.erase(new_seq_j.begin() + dpos);
      new_spin_j.erase(new_spin_j.begin() + dpos);
      delta_h = strip_h_energy(new_spin_j) +
                strip_v_energy(new_seq_j, new_spin_j, new_seq_j, new_spin_j) - before;
      log_proposal = std::log(nj * (nj - 1.0)) - std::log(4.0 * (m - 2.0) * (m - 1.0));
    } else {
      const int m_jm = static_cast<int>(seq_[jm].size());
      const int m_j = static_cast<int>(seq_[j].size());
      const int d_idx = uniform_below(rng_, nj);
      const int u_idx = 1 + uniform_below(rng_, nj - 1);
      const std::int64_t before = strip_h_energy(spin_[jm]) + strip_h_energy(spin_[j]) +
                                  strip_v_energy(seq_[jm], spin_[jm], seq_[j], spin_[j]);
      new_seq_jm = seq_[jm];
      new_spin_jm = spin_[jm];
      const int dpos = nth_down_position(new_seq_jm, d_idx);
      new_seq_jm.erase(new_seq_jm.begin() + dpos);
      new_spin_jm.erase(new_spin_jm.begin() + dpos);
      new_seq_j = seq_[j];
      new_spin_j = spin_[j];
      const int upos = nth_up_position(new_seq_j, u_idx);
      new_seq_j.erase(new_seq_j.begin() + upos);
      new_spin_j.erase(new_spin_j.begin() + upos);
      delta_h = strip_h_energy(new_spin_jm) + strip_h_energy(new_spin_j) +
                strip_v_energy(new_seq_jm, new_spin_jm, new_seq_j, new_spin_j) - before;
      log_proposal = std::log(nj * (nj - 1.0)) - std::log(4.0 * (m_jm - 1.0) * (m_j - 1.0));
    }
    const double log_acc = 2.0 * mu_ - beta_ * static_cast<double>(delta_h) + log_proposal;
    if (log_acc < 0.0 && uniform01(rng_) >= std::exp(log_acc)) return false;
    if (N == 1) {
      seq_[0] = std::move(new_seq_j);
      spin_[0] = std::move(new_spin_j);
    } else {
      seq_[jm] = std::move(new_seq_jm);
      spin_[jm] = std::move(new_spin_jm);
      seq_[j] = std::move(new_seq_j);
      spin_[j] = std::move(new_spin_j);
    }
    --slice_[j];
  }

  ++geo_accepts_;
  energy_ += delta_h;
  const std::int64_t cached = energy_;
  rebuild_derived();
  if (energy_ != cached)
    throw std::logic_error("geometry_step: incremental energy update out of sync");
  return true;
}

void AnnealedSampler::spin_cluster_step() {
  const double p = open_probability(beta_);
  UnionFind uf(graph_.vertex_count);
  for (const Edge& e : graph_.edges)
    if (flat_[e.a] == flat_[e.b] && uniform01(rng_) < p) uf.unite(e.a, e.b);

  std::vector<std::int8_t> sign(graph_.vertex_count, 0);
  for (int v = 0; v < graph_.vertex_count; ++v) {
    const int r = uf.find(v);
    if (sign[r] == 0) {
      ++clusters_seen_;
      sign[r] = (rng_() & 1u) ? std::int8_t{-1} : std::int8_t{1};
      if (sign[r] < 0) ++clusters_flipped_;
    }
  }
  for (int v = 0; v < graph_.vertex_count; ++v) {
    flat_[v] = static_cast<std::int8_t>(flat_[v] * sign[uf.find(v)]);
    spin_[graph_.strip_index[v]][graph_.position[v]] = flat_[v];
  }
  std::int64_t e = 0;
  for (const Edge& ed : graph_.edges) e += std::int64_t{flat_[ed.a]} * flat_[ed.b];
  energy_ = -e;
}

void AnnealedSampler::step() {
  geometry_step();
  spin_cluster_step();
  ++steps_;
  if (steps_ % 10000 == 0) validate_cache();
}

std::string AnnealedSampler::state_key() const {
  std::ostringstream os;
  os << to_text(triangulation());
  for (auto s : flat_) os << (s > 0 ? '+' : '-');
  return os.str();
}

void AnnealedSampler::validate_cache() const {
  const CausalTriangulation t = triangulation();  // revalidates strip invariants
  const DualGraph g = dual_graph(t);
  if (g.vertex_count != graph_.vertex_count)
    throw std::logic_error("validate_cache: stale dual graph");
  std::int64_t e = 0;
  for (const Edge& ed : g.edges) e += std::int64_t{flat_[ed.a]} * flat_[ed.b];
  if (-e != energy_) throw std::logic_error("validate_cache: stale energy");
  for (int i = 0; i < strip_count_; ++i)
    if (slice_[i] != t.strip(i).n_bottom())
      throw std::logic_error("validate_cache: stale slice sizes");
}

ObservableSeries run(const RunOptions& opt) {
  if (opt.steps < 1 || opt.thin < 1) throw std::invalid_argument("run: steps and thin must be >= 1");
  const bool divergent = opt.beta > 0.0
                             ? classify(opt.beta, opt.mu).verdict == Verdict::Divergent
                             : opt.mu < 2.0 * kLn2;
  if (divergent && !opt.force_band) {
    std::ostringstream os;
    os << "run: (beta=" << opt.beta << ", mu=" << opt.mu
       << ") lies in the divergent region; pass force_band to sample the capped target anyway";
    throw divergent_region_error(os.str());
  }

  AnnealedSampler sampler(opt.strip_count, opt.slice_cap, opt.beta, opt.mu, opt.seed);
  ObservableSeries series;
  for (std::int64_t i = 1; i <= opt.steps; ++i) {
    sampler.step();
    if (i % opt.thin == 0) {
      series.step.push_back(i);
      series.energy_per_triangle.push_back(static_cast<double>(sampler.energy()) /
                                           sampler.total_triangles());
      series.triangle_count.push_back(sampler.total_triangles());
      series.mean_slice.push_back(sampler.mean_slice());
      series.magnetization.push_back(sampler.magnetization());
      series.acc_geometry.push_back(sampler.geometry_acceptance());
      series.acc_spin.push_back(sampler.cluster_flip_rate());
    }
  }
  series.burn_in_rows = series.step.size() / 10;
  return series;
}

}  // namespace cdti
