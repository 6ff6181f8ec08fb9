#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>

namespace cdti {

inline constexpr double kLn2 = 0.6931471805599453094;

inline double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Exact binomial coefficient; the running product C(n-k+i, i) stays integral
/// at every step. Throws on 64-bit overflow.
inline std::uint64_t binomial_exact(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > std::numeric_limits<std::uint64_t>::max())
      throw std::overflow_error("binomial_exact: value exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

/// Streaming log-sum-exp accumulator with a compensated inner sum, so that
/// folds over millions of terms keep full double accuracy. add(-inf) is a
/// no-op, so vanishing terms can be fed without special casing.
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (count_ == 0) {
      max_ = log_term;
      sum_ = 1.0;
    } else if (log_term <= max_) {
      accumulate(std::exp(log_term - max_));
    } else {
      const double factor = std::exp(max_ - log_term);
      sum_ *= factor;
      comp_ *= factor;
      accumulate(1.0);
      max_ = log_term;
    }
    ++count_;
  }

  double value() const {
    if (count_ == 0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_ + comp_);
  }

  std::size_t count() const { return count_; }

 private:
  void accumulate(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }

  double max_ = 0.0;
  double sum_ = 0.0;
  double comp_ = 0.0;
  std::size_t count_ = 0;
};

/// Neumaier compensated sum; used where signed terms of very different
/// magnitude are combined.
inline double compensated_sum(std::span<const double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

/// Uniform double in [0,1) from the top 53 bits; the mt19937_64 stream is
/// standard-specified, so seeded output is reproducible across platforms.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unbiased integer in [0, n).
inline int uniform_below(std::mt19937_64& rng, int n) {
  const auto un = static_cast<std::uint64_t>(n);
  const std::uint64_t t = (-un) % un;
  std::uint64_t x;
  do {
    x = rng();
  } while (x < t);
  return static_cast<int>(x % un);
}

}  // namespace cdti
