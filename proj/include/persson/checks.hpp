#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "persson/kernel.hpp"

namespace persson {

using Rng = std::mt19937_64;

/// Band kernel on Z restricted to [-half, half] with integer entries in
/// [-vmax, vmax]. Self-adjoint variants are real symmetric.
BandKernel random_band_kernel(Rng& rng, std::int64_t half, int bandwidth, int vmax,
                              bool self_adjoint);

/// Window [-half, half] with a random finite subset removed.
SiteSet random_cofinite(Rng& rng, std::int64_t half);

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  /// Suite-specific count, e.g. fixtures with a nonzero defect.
  std::size_t nontrivial = 0;
  std::vector<std::string> witnesses;
  bool ok() const { return failures == 0; }
};

/// defect() against defect_middle_sum(), compared exactly.
SuiteResult defect_identity_suite(std::uint64_t seed, std::size_t trials);

/// max|eig| <= schur_bound <= hahn_norm.
SuiteResult norm_chain_suite(std::uint64_t seed, std::size_t trials);

/// M subset of N: lambda_min grows and lambda_max shrinks under restriction.
SuiteResult interlacing_suite(std::uint64_t seed, std::size_t trials,
                              double tol = 1e-12);

}  // namespace persson
