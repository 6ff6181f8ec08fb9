#pragma once

#include <vector>

#include "cdti/scaled_matrix.hpp"

namespace cdti {

/// Truncated transfer matrix over slice sizes 1..truncation, kept in log form
/// so entries stay representable for any (truncation, mu).
struct TransferMatrix {
  int truncation = 0;
  double mu = 0.0;
  std::vector<double> log_entries;  // row-major, index (n-1)*K + (n'-1)

  double log_entry(int n, int n_prime) const;
  double entry(int n, int n_prime) const;
  ScaledMatrix scaled(int sub_truncation = 0) const;  // leading principal block
};

TransferMatrix build_transfer_matrix(int truncation, double mu);

/// Single matrix element: C(n+n'-1, n-1) * exp(-mu (n+n')), assembled in log
/// space and exponentiated.
double transfer_entry(int n, int n_prime, double mu);

/// Closed-form dominant eigenvalue of the infinite transfer matrix; defined
/// for mu >= ln 2 and equal to 1 at mu = ln 2.
double transfer_spectral_radius(double mu);

/// ln(2 cos(pi/(N+1))): below this the N-strip partition function with fixed
/// unit boundary slices diverges. -infinity for N = 1, increasing to ln 2.
double existence_threshold(int strip_count);

/// Free energy of the annealed model in the infinite-temperature limit:
/// ln of the spectral radius at mu - ln 2 for mu >= 2 ln 2 (zero exactly at
/// the boundary), +infinity sentinel below.
double free_energy_infinite_temperature(double mu);

struct PurePartitionReport {
  double mu = 0.0;
  int strip_count = 0;
  int truncation = 0;
  double log_z = 0.0;      // log tr(U_K^N)
  bool converged = false;  // last truncation-doubling increment below tolerance
  bool diverged = false;   // log trace rose by > 1 across two consecutive doublings
  double lambda_log = 0.0; // ln of the closed-form spectral radius; NaN below ln 2
};

/// log tr(U_K^N) by repeated squaring in scaled arithmetic, with the
/// truncation-doubling ladder deciding the converged/diverged flags.
PurePartitionReport pure_log_partition(int strip_count, double mu, int truncation);

struct CylinderPartitionReport {
  double mu = 0.0;
  int strip_count = 0;
  int truncation = 0;
  double log_z = 0.0;      // log (U_K^N)_{1,1}
  bool converged = false;
  bool diverged = false;
};

/// Cylinder partition function with both boundary slices pinned to size 1,
/// i.e. the (1,1) element of U_K^N, with the same doubling ladder. This is
/// the quantity whose divergence onset sits at existence_threshold(N).
CylinderPartitionReport cylinder_log_partition_unit_boundary(int strip_count, double mu,
                                                             int truncation);

/// Direct stream sum over the torus enumeration: log of
/// sum_t exp(-mu n(t)) with all slice sizes <= truncation. Agrees with
/// log tr(U_K^N) at the same truncation.
double log_z_pure_enumerated(int strip_count, double mu, int truncation);

/// Dominant eigenvalue of the truncated transfer matrix by power iteration.
double power_iteration_top_eigenvalue(const TransferMatrix& u, double tol = 1e-13,
                                      int max_iters = 20000);

}  // namespace cdti
