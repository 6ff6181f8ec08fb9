#include "cdti/scaled_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdti {

ScaledMatrix::ScaledMatrix(int rows, int cols, std::vector<double> data, double log_scale)
    : rows_(rows), cols_(cols), data_(std::move(data)), log_scale_(log_scale) {
  normalize();
}

ScaledMatrix ScaledMatrix::from_log_entries(int rows, int cols, std::span<const double> log_entries) {
  if (static_cast<int>(log_entries.size()) != rows * cols)
    throw std::invalid_argument("from_log_entries: size mismatch");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : log_entries) m = std::max(m, x);
  if (m == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("from_log_entries: all entries vanish");
  std::vector<double> data(log_entries.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::exp(log_entries[i] - m);
  return ScaledMatrix(rows, cols, std::move(data), m);
}

ScaledMatrix ScaledMatrix::from_values(int rows, int cols, std::vector<double> values) {
  if (static_cast<int>(values.size()) != rows * cols)
    throw std::invalid_argument("from_values: size mismatch");
  return ScaledMatrix(rows, cols, std::move(values), 0.0);
}

void ScaledMatrix::normalize() {
  double m = 0.0;
  for (double x : data_) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("scaled matrix entries must be finite and non-negative");
    m = std::max(m, x);
  }
  if (m == 0.0) throw std::invalid_argument("scaled matrix must have a positive entry");
  if (m != 1.0) {
    const double inv = 1.0 / m;
    for (double& x : data_) x *= inv;
    log_scale_ += std::log(m);
  }
}

double ScaledMatrix::log_entry(int i, int j) const {
  return std::log(data_[static_cast<std::size_t>(i) * cols_ + j]) + log_scale_;
}

double ScaledMatrix::log_trace() const {
  if (rows_ != cols_) throw std::invalid_argument("log_trace: matrix not square");
  double s = 0.0;
  for (int i = 0; i < rows_; ++i) s += data_[static_cast<std::size_t>(i) * cols_ + i];
  return std::log(s) + log_scale_;
}

double ScaledMatrix::log_row_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < cols_; ++j) s += data_[static_cast<std::size_t>(i) * cols_ + j];
  return std::log(s) + log_scale_;
}

ScaledMatrix ScaledMatrix::multiply(const ScaledMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("multiply: shape mismatch");
  std::vector<double> out(static_cast<std::size_t>(rows_) * rhs.cols_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    const double* a = data_.data() + static_cast<std::size_t>(i) * cols_;
    double* o = out.data() + static_cast<std::size_t>(i) * rhs.cols_;
    for (int k = 0; k < cols_; ++k) {
      const double aik = a[k];
      if (aik == 0.0) continue;
      const double* b = rhs.data_.data() + static_cast<std::size_t>(k) * rhs.cols_;
      for (int j = 0; j < rhs.cols_; ++j) o[j] += aik * b[j];
    }
  }
  return ScaledMatrix(rows_, rhs.cols_, std::move(out), log_scale_ + rhs.log_scale_);
}

ScaledMatrix ScaledMatrix::power(std::uint64_t exponent) const {
  if (rows_ != cols_) throw std::invalid_argument("power: matrix not square");
  if (exponent == 0) throw std::invalid_argument("power: exponent must be >= 1");
  ScaledMatrix base = *this;
  ScaledMatrix result = *this;
  bool have = false;
  while (exponent > 0) {
    if (exponent & 1u) {
      result = have ? result.multiply(base) : base;
      have = true;
    }
    exponent >>= 1;
    if (exponent > 0) base = base.multiply(base);
  }
  return result;
}

}  // namespace cdti
