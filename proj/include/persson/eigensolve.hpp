#pragma once

#include <iosfwd>

#include "persson/kernel.hpp"

namespace persson {

/// Closed interval believed (certified == true) or hoped (false) to contain
/// a spectral target.
struct SpectralInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool certified = false;

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

enum class SolveMode { automatic, dense, iterative };

struct EigenOptions {
  SolveMode mode = SolveMode::automatic;
  /// automatic mode goes dense up to this many sites.
  std::size_t dense_threshold = 2000;
  double tol = 1e-10;
  /// Total Lanczos steps allowed are budget_factor * sqrt(n) (at least n
  /// when n is small).
  double budget_factor = 50.0;
  /// Largest Krylov basis kept before an explicit restart.
  std::size_t max_basis = 120;
  /// When set, Lanczos writes `iter ritz_min ritz_max res_min res_max` rows.
  std::ostream* trace = nullptr;
};

struct ExtremeEigs {
  SpectralInterval min;
  SpectralInterval max;
  std::size_t dimension = 0;
  std::size_t iterations = 0;
  bool dense = false;
};

/// Smallest and largest eigenvalue of the compression of `k` to `window`.
/// Throws PreconditionError if that compression is not self-adjoint at
/// 1e-12 or the window is empty.
ExtremeEigs extreme_eigs(const BandKernel& k, const SiteSet& window,
                         const EigenOptions& opts = {});

/// ||K v - lam v|| on the window; bounds the distance from lam to the
/// spectrum of the compression. `v` must be a unit vector.
double residual_certify(const BandKernel& k, const SiteSet& window,
                        const FiniteVector& v, double lam);

/// Every eigenvalue of the compression, ascending (dense solver).
std::vector<double> all_eigenvalues(const BandKernel& k, const SiteSet& window);

}  // namespace persson
