#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cdti {

/// Dense non-negative matrix stored as data * exp(log_scale), rescaled after
/// every product so the maximum entry is 1. Keeps long matrix-power chains
/// inside double range regardless of the entry magnitudes.
class ScaledMatrix {
 public:
  static ScaledMatrix from_log_entries(int rows, int cols, std::span<const double> log_entries);
  static ScaledMatrix from_values(int rows, int cols, std::vector<double> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double log_scale() const { return log_scale_; }
  const std::vector<double>& data() const { return data_; }

  double log_entry(int i, int j) const;
  double log_trace() const;
  double log_row_sum(int i) const;

  ScaledMatrix multiply(const ScaledMatrix& rhs) const;
  ScaledMatrix power(std::uint64_t exponent) const;  // exponent >= 1, square matrix

 private:
  ScaledMatrix(int rows, int cols, std::vector<double> data, double log_scale);
  void normalize();

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
  double log_scale_ = 0.0;
};

}  // namespace cdti
