#include "cdti/critical_region.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "cdti/errors.hpp"
#include "cdti/numeric.hpp"
#include "cdti/random_cluster.hpp"
#include "cdti/spin_system.hpp"
#include "cdti/transfer.hpp"

namespace cdti {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double spin_transfer_bound(double beta, double mu) {
  const double ebm = std::exp(beta - mu);
  const double t1 = std::exp(2.0 * beta) * (1.0 - ebm) * (1.0 - ebm);
  const double t2 = std::exp(-2.0 * mu);
  const double denom = t1 - t2;
  if (std::abs(denom) <= 1e-14 * (std::abs(t1) + std::abs(t2)))
    throw std::domain_error("spin_transfer_bound: pole of the c coefficient");
  const double c = ebm / denom;
  const double m = std::exp(2.0 * beta) + (1.0 - std::exp(4.0 * beta)) * std::exp(-(beta + mu));
  const double m2 = m * m;
  const double ch = std::cosh(2.0 * beta);
  const double ratio = (m2 - 1.0) / (m2 + 1.0);
  const double radicand = 1.0 - (ratio * ratio) / (ch * ch);
  if (radicand < 0.0)
    throw std::domain_error("spin_transfer_bound: negative radicand");
  return c * c * (m2 + 1.0) * ch * (1.0 + std::sqrt(radicand));
}

namespace {

double psi_uncached(double beta) {
  // The bound blows up as mu decreases to the pole, so the crossing of 1 is
  // bracketed on (pole, infinity).
  const double pole = std::log(std::exp(2.0 * beta) + 1.0) - beta;
  double lo = pole + 1e-9 * (1.0 + std::abs(pole));
  double f_lo;
  for (int i = 0;; ++i) {
    try {
      f_lo = spin_transfer_bound(beta, lo);
    } catch (const std::domain_error&) {
      lo = pole + 2.0 * (lo - pole);
      continue;
    }
    if (f_lo > 1.0) break;
    lo = pole + 0.5 * (lo - pole);
    if (i > 200) {
      std::ostringstream os;
      os << "unique_gibbs_threshold: no bracket low end at beta=" << beta
         << " (bound(" << lo << ")=" << f_lo << ")";
      throw bracket_error(os.str());
    }
  }

  double hi = std::max(lo + 1.0, 4.0 + 3.0 * beta);
  double f_hi = spin_transfer_bound(beta, hi);
  for (int i = 0; f_hi >= 1.0; ++i) {
    if (i > 200) {
      std::ostringstream os;
      os << "unique_gibbs_threshold: no bracket high end at beta=" << beta
         << " (bound(" << hi << ")=" << f_hi << ")";
      throw bracket_error(os.str());
    }
    hi = pole + 2.0 * (hi - pole);
    f_hi = spin_transfer_bound(beta, hi);
  }

  while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (spin_transfer_bound(beta, mid) >= 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double unique_gibbs_threshold(double beta) {
  if (beta <= 0.0) throw std::invalid_argument("unique_gibbs_threshold: needs beta > 0");
  static std::mutex mu_lock;
  static std::map<double, double> memo;
  {
    std::lock_guard<std::mutex> hold(mu_lock);
    auto it = memo.find(beta);
    if (it != memo.end()) return it->second;
  }
  const double value = psi_uncached(beta);
  std::lock_guard<std::mutex> hold(mu_lock);
  memo.emplace(beta, value);
  return value;
}

double band_lower(double beta) {
  if (beta <= 0.0) throw std::invalid_argument("band_lower: needs beta > 0");
  return std::max(kLn2, 1.5 * std::log(2.0 * std::sinh(beta)));
}

double band_upper(double beta) {
  if (beta <= 0.0) throw std::invalid_argument("band_upper: needs beta > 0");
  return std::min(unique_gibbs_threshold(beta) - kLn2, 1.5 * beta + kLn2);
}

double divergence_kink_beta() { return std::asinh(std::pow(2.0, -1.0 / 3.0)); }

double upper_bound_crossover_beta() {
  static std::once_flag once;
  static double value = 0.0;
  std::call_once(once, [] {
    auto gap = [](double beta) {
      return unique_gibbs_threshold(beta) - 1.5 * beta - 2.0 * kLn2;
    };
    // scan for the sign change, then bisect
    double lo = 0.1, hi = 0.0;
    double f_lo = gap(lo);
    for (double b = 0.2; b <= 20.0; b += 0.1) {
      const double f = gap(b);
      if (f_lo < 0.0 && f >= 0.0) {
        hi = b;
        break;
      }
      lo = b;
      f_lo = f;
    }
    if (hi == 0.0) throw bracket_error("upper_bound_crossover_beta: no sign change on (0, 20]");
    while (hi - lo > 1e-11) {
      const double mid = 0.5 * (lo + hi);
      if (gap(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    value = 0.5 * (lo + hi);
  });
  return value;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Divergent:
      return "Divergent";
    case Verdict::UniqueGibbs:
      return "UniqueGibbs";
    case Verdict::IndeterminateBand:
      return "IndeterminateBand";
  }
  return "?";
}

RegionVerdict classify(double beta, double mu) {
  if (beta <= 0.0) throw std::invalid_argument("classify: needs beta > 0");
  RegionVerdict r;
  r.beta = beta;
  r.mu = mu;
  r.lower_curve = divergence_bound(beta);
  r.upper_curve = std::min(unique_gibbs_threshold(beta), 1.5 * beta + 2.0 * kLn2);
  if (mu < r.lower_curve)
    r.verdict = Verdict::Divergent;
  else if (mu > r.upper_curve)
    r.verdict = Verdict::UniqueGibbs;
  else
    r.verdict = Verdict::IndeterminateBand;
  return r;
}

FreeEnergyBounds free_energy_bounds(double beta, double mu) {
  FreeEnergyBounds b;
  b.beta = beta;
  b.mu = mu;
  b.lower = std::numeric_limits<double>::quiet_NaN();
  b.upper = std::numeric_limits<double>::quiet_NaN();
  const double f1 = band_lower(beta);
  const double f2 = band_upper(beta);
  if (!(mu > f2)) {
    b.reason = "mu not above the band upper endpoint";
    return b;
  }
  if (mu - f1 < kLn2 || mu - f2 < kLn2) {
    b.reason = "shifted argument below ln 2, spectral radius undefined";
    return b;
  }
  b.lower = std::log(transfer_spectral_radius(mu - f1));
  b.upper = std::log(transfer_spectral_radius(mu - f2));
  b.valid = true;
  return b;
}

bool monotone_free_energy_check(int strip_count, int truncation, double beta,
                                std::span<const double> mu_grid) {
  double prev = -kInf;
  for (double mu : mu_grid) {
    const double value = -log_xi_truncated(strip_count, beta, mu, truncation) / strip_count;
    if (value < prev - 1e-12) return false;
    prev = value;
  }
  return true;
}

}  // namespace cdti
