#pragma once

#include <span>
#include <string>

namespace cdti {

/// Norm bound on the spin-dressed transfer operator. The annealed free energy
/// is finite wherever this value drops below 1. Throws std::domain_error at
/// the pole of the c-coefficient and for a negative radicand.
double spin_transfer_bound(double beta, double mu);

/// Smallest mu at which spin_transfer_bound falls below 1, by bisection.
/// The bracket starts just above the pole mu = ln(e^{2 beta} + 1) - beta,
/// where the bound blows up, and both bracket signs are verified explicitly
/// (bracket_error otherwise). Memoized per beta; safe for concurrent readers.
double unique_gibbs_threshold(double beta);

/// Endpoints of the indeterminate band:
/// band_lower  = max(ln 2, 1.5 ln(2 sinh beta))
/// band_upper  = min(unique_gibbs_threshold - ln 2, 1.5 beta + ln 2)
double band_lower(double beta);
double band_upper(double beta);

/// Where the divergence bound switches branch: asinh(2^{-1/3}).
double divergence_kink_beta();

/// Where the two upper bounds cross: 1.5 beta + 2 ln 2 = unique_gibbs_threshold(beta).
double upper_bound_crossover_beta();

enum class Verdict { Divergent, UniqueGibbs, IndeterminateBand };
const char* to_string(Verdict v);

struct RegionVerdict {
  double beta = 0.0;
  double mu = 0.0;
  Verdict verdict = Verdict::IndeterminateBand;
  double lower_curve = 0.0;  // divergence bound at beta
  double upper_curve = 0.0;  // min(threshold, linear upper bound) at beta
};

/// Strict-inequality classification: Divergent below the lower curve,
/// UniqueGibbs above the upper curve, IndeterminateBand otherwise
/// (boundary points fall in the band).
RegionVerdict classify(double beta, double mu);

struct FreeEnergyBounds {
  double beta = 0.0;
  double mu = 0.0;
  double lower = 0.0;  // ln of spectral radius at mu - band_lower
  double upper = 0.0;  // ln of spectral radius at mu - band_upper
  bool valid = false;
  std::string reason;  // set when invalid
};

FreeEnergyBounds free_energy_bounds(double beta, double mu);

/// True when -(1/N) log of the truncated annealed partition sum is
/// non-decreasing along the mu grid (tolerance 1e-12).
bool monotone_free_energy_check(int strip_count, int truncation, double beta,
                                std::span<const double> mu_grid);

}  // namespace cdti
