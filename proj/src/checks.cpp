#include "persson/checks.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "persson/eigensolve.hpp"
#include "persson/metric_space.hpp"

namespace persson {

namespace {

std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

}  // namespace

BandKernel random_band_kernel(Rng& rng, std::int64_t half, int bandwidth, int vmax,
                              bool self_adjoint) {
  auto space = integer_line(half);
  std::vector<KernelEntry> entries;
  for (Site x = -half; x <= half; ++x) {
    for (Site y = std::max(-half, x - bandwidth); y <= std::min(half, x + bandwidth); ++y) {
      if (self_adjoint && y < x) continue;
      if (uniform(rng, 0, 2) == 0) continue;
      const auto v = static_cast<double>(uniform(rng, -vmax, vmax));
      entries.push_back({x, y, v});
      if (self_adjoint && y != x) entries.push_back({y, x, v});
    }
  }
  return BandKernel(space, std::move(entries), bandwidth);
}

SiteSet random_cofinite(Rng& rng, std::int64_t half) {
  const auto window = SiteSet::range(-half, half);
  std::vector<Site> removed;
  const auto count = uniform(rng, 0, std::max<std::int64_t>(1, half));
  for (std::int64_t i = 0; i < count; ++i) removed.push_back(uniform(rng, -half, half));
  return SiteSet::cofinite(window, std::move(removed));
}

SuiteResult defect_identity_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult res;
  res.name = "defect_identity";
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto half = uniform(rng, 3, 12);
    const auto k1 = random_band_kernel(rng, half, static_cast<int>(uniform(rng, 0, 3)), 5, false);
    const auto k2 = random_band_kernel(rng, half, static_cast<int>(uniform(rng, 0, 3)), 5, false);
    const auto m = random_cofinite(rng, half);
    const auto sub = defect(k1, k2, m);
    const auto mid = defect_middle_sum(k1, k2, m);
    ++res.trials;
    if (!(sub == mid)) {
      ++res.failures;
      res.witnesses.push_back(fmt::format("trial {}: formulas differ", t));
    }
    if (!sub.is_zero()) ++res.nontrivial;
  }
  return res;
}

SuiteResult norm_chain_suite(std::uint64_t seed, std::size_t trials) {
  SuiteResult res;
  res.name = "norm_chain";
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto half = uniform(rng, 2, 30);
    const auto k = random_band_kernel(rng, half, static_cast<int>(uniform(rng, 0, 4)), 9, true);
    const auto window = SiteSet::range(-half, half);
    const auto eigs = all_eigenvalues(k, window);
    const double spectral_radius = std::max(std::abs(eigs.front()), std::abs(eigs.back()));
    const double schur = schur_bound(k, window);
    const double hahn = hahn_norm(k, window);
    const double slack = 1e-12 * (1.0 + hahn);
    ++res.trials;
    if (spectral_radius > schur + slack || schur > hahn + slack) {
      ++res.failures;
      res.witnesses.push_back(fmt::format("trial {}: |eig| {} schur {} hahn {}", t, spectral_radius, schur, hahn));
    }
    if (schur < hahn) ++res.nontrivial;
  }
  return res;
}

SuiteResult interlacing_suite(std::uint64_t seed, std::size_t trials, double tol) {
  SuiteResult res;
  res.name = "interlacing";
  Rng rng(seed);
  EigenOptions dense;
  dense.mode = SolveMode::dense;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto half = uniform(rng, 3, 30);
    const auto k = random_band_kernel(rng, half, static_cast<int>(uniform(rng, 1, 3)), 9, true);
    const auto n = random_cofinite(rng, half);
    std::vector<Site> extra;
    for (Site s : n) {
      if (uniform(rng, 0, 3) == 0) extra.push_back(s);
    }
    std::vector<Site> keep;
    for (Site s : n) {
      if (!std::binary_search(extra.begin(), extra.end(), s)) keep.push_back(s);
    }
    if (keep.empty()) keep.push_back(n[0]);
    const SiteSet m(keep);
    const auto en = extreme_eigs(k, n, dense);
    const auto em = extreme_eigs(k, m, dense);
    ++res.trials;
    if (em.min.mid() < en.min.mid() - tol || em.max.mid() > en.max.mid() + tol) {
      ++res.failures;
      res.witnesses.push_back(fmt::format("trial {}: N [{}, {}] M [{}, {}]", t, en.min.mid(),
                                          en.max.mid(), em.min.mid(), em.max.mid()));
    }
    if (m.size() < n.size()) ++res.nontrivial;
  }
  return res;
}

}  // namespace persson
