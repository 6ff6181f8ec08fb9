#include "cdti/transfer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cdti/numeric.hpp"
#include "cdti/strips.hpp"

namespace cdti {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Truncations visited by the doubling ladder, ascending, ending at K.
std::vector<int> truncation_ladder(int K) {
  std::vector<int> ks;
  for (int k = K; k >= 1; k /= 2) ks.push_back(k);
  std::reverse(ks.begin(), ks.end());
  return ks;
}

struct LadderResult {
  double log_z = 0.0;
  bool converged = false;
  bool diverged = false;
};

// Runs the doubling ladder over log values produced by `eval(k)`.
// Divergence: the log value still rises by > 1 across each of the final two
// doublings (early-ladder jumps only reflect mass not yet summed).
// Convergence: final increment below 1e-10 relative to the log value.
template <typename Eval>
LadderResult run_ladder(int K, Eval&& eval) {
  const auto ks = truncation_ladder(K);
  LadderResult r;
  std::vector<double> increments;
  double prev = 0.0;
  bool have_prev = false;
  for (int k : ks) {
    const double v = eval(k);
    if (have_prev) increments.push_back(v - prev);
    prev = v;
    have_prev = true;
  }
  r.log_z = prev;
  const std::size_t m = increments.size();
  r.diverged = m >= 2 && increments[m - 1] > 1.0 && increments[m - 2] > 1.0;
  r.converged = !r.diverged && m >= 1 &&
                std::abs(increments[m - 1]) < 1e-10 * std::max(1.0, std::abs(prev));
  return r;
}

}  // namespace

double TransferMatrix::log_entry(int n, int n_prime) const {
  return log_entries[static_cast<std::size_t>(n - 1) * truncation + (n_prime - 1)];
}

double TransferMatrix::entry(int n, int n_prime) const { return std::exp(log_entry(n, n_prime)); }

ScaledMatrix TransferMatrix::scaled(int sub_truncation) const {
  const int k = sub_truncation == 0 ? truncation : sub_truncation;
  if (k == truncation) return ScaledMatrix::from_log_entries(k, k, log_entries);
  std::vector<double> block(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      block[static_cast<std::size_t>(i) * k + j] =
          log_entries[static_cast<std::size_t>(i) * truncation + j];
  return ScaledMatrix::from_log_entries(k, k, block);
}

TransferMatrix build_transfer_matrix(int truncation, double mu) {
  if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
  TransferMatrix u;
  u.truncation = truncation;
  u.mu = mu;
  u.log_entries.resize(static_cast<std::size_t>(truncation) * truncation);
  for (int n = 1; n <= truncation; ++n)
    for (int np = 1; np <= truncation; ++np)
      u.log_entries[static_cast<std::size_t>(n - 1) * truncation + (np - 1)] =
          log_binomial(n + np - 1, n - 1) - mu * (n + np);
  return u;
}

double transfer_entry(int n, int n_prime, double mu) {
  if (n < 1 || n_prime < 1) throw std::invalid_argument("slice sizes must be >= 1");
  return std::exp(log_binomial(n + n_prime - 1, n - 1) - mu * (n + n_prime));
}

double transfer_spectral_radius(double mu) {
  double radicand = 1.0 - 4.0 * std::exp(-2.0 * mu);
  // rounding at the mu = ln 2 boundary can push the radicand a few ulp below zero
  if (radicand < 0.0 && radicand > -1e-12) radicand = 0.0;
  if (radicand < 0.0)
    throw std::domain_error("transfer_spectral_radius: requires mu >= ln 2");
  const double v = (1.0 - std::sqrt(radicand)) / (2.0 * std::exp(-mu));
  return v * v;
}

double existence_threshold(int strip_count) {
  if (strip_count < 1) throw std::invalid_argument("strip count must be >= 1");
  if (strip_count == 1) return -kInf;  // cos(pi/2) = 0 exactly
  return std::log(2.0 * std::cos(std::numbers::pi / (strip_count + 1)));
}

double free_energy_infinite_temperature(double mu) {
  const double two_ln2 = 2.0 * kLn2;
  if (mu < two_ln2) return kInf;
  return std::log(transfer_spectral_radius(mu - kLn2));
}

PurePartitionReport pure_log_partition(int strip_count, double mu, int truncation) {
  if (strip_count < 1) throw std::invalid_argument("strip count must be >= 1");
  if (truncation < 2) throw std::invalid_argument("truncation must be >= 2");
  const TransferMatrix u = build_transfer_matrix(truncation, mu);
  const auto ladder = run_ladder(truncation, [&](int k) {
    return u.scaled(k).power(static_cast<std::uint64_t>(strip_count)).log_trace();
  });
  PurePartitionReport r;
  r.mu = mu;
  r.strip_count = strip_count;
  r.truncation = truncation;
  r.log_z = ladder.log_z;
  r.converged = ladder.converged;
  r.diverged = ladder.diverged;
  r.lambda_log = mu >= kLn2 ? std::log(transfer_spectral_radius(mu))
                            : std::numeric_limits<double>::quiet_NaN();
  return r;
}

CylinderPartitionReport cylinder_log_partition_unit_boundary(int strip_count, double mu,
                                                             int truncation) {
  if (strip_count < 1) throw std::invalid_argument("strip count must be >= 1");
  if (truncation < 2) throw std::invalid_argument("truncation must be >= 2");
  const TransferMatrix u = build_transfer_matrix(truncation, mu);
  // Column chain U^N e_1 rather than a full matrix power: the (1,1) element
  // is far below the largest entry of U^N, which would flush it to zero
  // under max-normalized matrix products at large truncations.
  const auto ladder = run_ladder(truncation, [&](int k) {
    const ScaledMatrix uk = u.scaled(k);
    std::vector<double> e1(k, 0.0);
    e1[0] = 1.0;
    ScaledMatrix col = ScaledMatrix::from_values(k, 1, std::move(e1));
    for (int i = 0; i < strip_count; ++i) col = uk.multiply(col);
    return col.log_entry(0, 0);
  });
  CylinderPartitionReport r;
  r.mu = mu;
  r.strip_count = strip_count;
  r.truncation = truncation;
  r.log_z = ladder.log_z;
  r.converged = ladder.converged;
  r.diverged = ladder.diverged;
  return r;
}

double log_z_pure_enumerated(int strip_count, double mu, int truncation) {
  LogSumExp acc;
  for_each_torus_triangulation(strip_count, truncation, [&](const CausalTriangulation& t) {
    acc.add(-mu * t.total_triangles());
  });
  return acc.value();
}

double power_iteration_top_eigenvalue(const TransferMatrix& u, double tol, int max_iters) {
  const int k = u.truncation;
  // shift so the largest entry is 1; the eigenvalue scales back by exp(shift)
  double shift = -kInf;
  for (double x : u.log_entries) shift = std::max(shift, x);
  std::vector<double> a(u.log_entries.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::exp(u.log_entries[i] - shift);

  std::vector<double> v(k, 1.0 / k), w(k, 0.0);
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    for (int i = 0; i < k; ++i) {
      double s = 0.0;
      const double* row = a.data() + static_cast<std::size_t>(i) * k;
      for (int j = 0; j < k; ++j) s += row[j] * v[j];
      w[i] = s;
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < k; ++i) {
      num += w[i] * v[i];
      den += v[i] * v[i];
    }
    const double next = num / den;
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    for (int i = 0; i < k; ++i) v[i] = w[i] / norm;
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda * std::exp(shift);
}

}  // namespace cdti
