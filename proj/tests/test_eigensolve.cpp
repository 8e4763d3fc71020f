#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"

#include "persson/checks.hpp"
#include "persson/eigensolve.hpp"
#include "persson/errors.hpp"
#include "persson/metric_space.hpp"

using namespace persson;

namespace {

const double kPi = std::acos(-1.0);

BandKernel path(const SpacePtr& s) {
  std::vector<KernelEntry> e;
  for (Site x : s->window()) {
    if (s->window().contains(x + 1)) {
      e.push_back({x, x + 1, 1.0});
      e.push_back({x + 1, x, 1.0});
    }
  }
  return BandKernel(s, e, 1.0);
}

EigenOptions mode(SolveMode m) {
  EigenOptions o;
  o.mode = m;
  return o;
}

}  // namespace

TEST_CASE("one by one") {
  auto s = integer_line(0);
  const BandKernel k(s, {{0, 0, -2.5}}, 0.0);
  for (auto m : {SolveMode::dense, SolveMode::iterative}) {
    const auto e = extreme_eigs(k, s->window(), mode(m));
    CHECK(e.min.lo == -2.5);
    CHECK(e.min.hi == doctest::Approx(-2.5));
    CHECK(e.max.contains(-2.5));
  }
}

TEST_CASE("path graphs") {
  SUBCASE("n = 3") {
    auto s = integer_line(1);
    for (auto m : {SolveMode::dense, SolveMode::iterative}) {
      const auto e = extreme_eigs(path(s), s->window(), mode(m));
      CHECK(e.min.certified);
      CHECK(e.min.contains(-std::sqrt(2.0)));
      CHECK(e.max.contains(std::sqrt(2.0)));
    }
  }
  SUBCASE("n = 1000, both solvers") {
    auto s = integer_line(500);
    const auto window = SiteSet::range(-499, 500);
    const double exact = -2.0 * std::cos(kPi / 1001.0);
    const auto k = restrict(path(s), window);
    const auto d = extreme_eigs(k, window, mode(SolveMode::dense));
    CHECK(d.dense);
    CHECK(std::abs(d.min.mid() - exact) < 1e-10);
    CHECK(d.min.contains(exact));
    const auto it = extreme_eigs(k, window, mode(SolveMode::iterative));
    CHECK_FALSE(it.dense);
    CHECK(it.iterations > 0);
    if (it.min.certified) CHECK(it.min.contains(exact));
  }
}

TEST_CASE("complex Hermitian input") {
  auto s = integer_line(20);
  std::vector<KernelEntry> e;
  for (Site x = -20; x < 20; ++x) {
    e.push_back({x, x + 1, Complex(0, 1)});
    e.push_back({x + 1, x, Complex(0, -1)});
  }
  const BandKernel k(s, e, 1.0);
  const double exact = 2.0 * std::cos(kPi / 42.0);
  for (auto m : {SolveMode::dense, SolveMode::iterative}) {
    const auto r = extreme_eigs(k, s->window(), mode(m));
    CHECK(r.max.contains(exact));
    CHECK(r.min.contains(-exact));
  }
}

TEST_CASE("preconditions") {
  auto s = integer_line(3);
  CHECK_THROWS_AS(extreme_eigs(BandKernel(s, {{0, 1, 1.0}}, 1.0), s->window()), PreconditionError);
  CHECK_THROWS_AS(extreme_eigs(path(s), SiteSet()), PreconditionError);
  // entries off the window are ignored: the compression is what gets solved
  const auto e = extreme_eigs(path(s), SiteSet({-3, 3}));
  CHECK(e.min.lo == 0.0);
  CHECK(e.max.hi == doctest::Approx(0.0));
}

TEST_CASE("residual certificates") {
  auto s = integer_line(10);
  const auto k = path(s);
  const auto w = s->window();
  SUBCASE("exact eigenpair") {
    const double n = 21.0;
    std::vector<Complex> v;
    for (Site x : w) v.emplace_back(std::sin(kPi * static_cast<double>(x + 11) / (n + 1)));
    FiniteVector u(w, v);
    const double norm = u.norm();
    for (auto& c : u.values) c /= norm;
    CHECK(residual_certify(k, w, u, 2.0 * std::cos(kPi / (n + 1))) < 1e-13);
  }
  SUBCASE("unit vector at the origin") {
    FiniteVector e0 = FiniteVector::zeros(w);
    e0.values[static_cast<std::size_t>(w.index_of(0))] = 1.0;
    CHECK(residual_certify(k, w, e0, 0.0) == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("bad vectors") {
    CHECK_THROWS_AS(residual_certify(k, w, FiniteVector::zeros(w), 0.0), PreconditionError);
    FiniteVector two = FiniteVector::zeros(w);
    two.values[0] = 2.0;
    CHECK_THROWS_AS(residual_certify(k, w, two, 0.0), PreconditionError);
  }
  SUBCASE("one Krylov refinement step shrinks the Rayleigh residual") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
      FiniteVector v = FiniteVector::zeros(w);
      for (auto& c : v.values) c = g(rng);
      double nv = v.norm();
      for (auto& c : v.values) c /= nv;
      const auto kv = apply(k, v, w);
      double theta = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) theta += (std::conj(v.values[i]) * kv.values[i]).real();
      const double r0 = residual_certify(k, w, v, theta);

      // Rayleigh-Ritz on span{v, r}, keep the lower Ritz pair
      FiniteVector r = kv;
      for (std::size_t i = 0; i < w.size(); ++i) r.values[i] -= theta * v.values[i];
      const double beta = r.norm();
      for (auto& c : r.values) c /= beta;
      const auto kr = apply(k, r, w);
      double rr = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) rr += (std::conj(r.values[i]) * kr.values[i]).real();
      const double tr = theta + rr;
      const double det = theta * rr - beta * beta;
      const double lam = 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));
      // eigenvector of [[theta, beta], [beta, rr]] for lam
      double a = beta, b = lam - theta;
      const double nab = std::hypot(a, b);
      a /= nab;
      b /= nab;
      FiniteVector u = FiniteVector::zeros(w);
      for (std::size_t i = 0; i < w.size(); ++i) u.values[i] = a * v.values[i] + b * r.values[i];
      const double r1 = residual_certify(k, w, u, lam);
      CHECK(r0 >= 0.0);
      CHECK(lam <= theta);
      CHECK(r1 < r0);
    }
  }
}

TEST_CASE("iterative intervals contain the dense answer") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto k = random_band_kernel(rng, 60 + trial * 7, 2 + trial % 3, 5, true);
    const auto& w = k.space()->window();
    const auto d = extreme_eigs(k, w, mode(SolveMode::dense));
    const auto it = extreme_eigs(k, w, mode(SolveMode::iterative));
    if (it.min.certified) CHECK((it.min.lo <= d.min.hi && it.min.hi >= d.min.lo));
    if (it.max.certified) CHECK((it.max.lo <= d.max.hi && it.max.hi >= d.max.lo));
    // Ritz values never pass the true extremes
    CHECK(it.min.mid() >= d.min.lo - 1e-9);
    CHECK(it.max.mid() <= d.max.hi + 1e-9);
  }
}

TEST_CASE("dense band and general paths agree") {
  auto s = integer_line(300);
  const auto k = path(s);
  const auto all = all_eigenvalues(k, s->window());
  const auto e = extreme_eigs(k, s->window(), mode(SolveMode::dense));
  CHECK(all.front() == doctest::Approx(e.min.mid()).epsilon(1e-13));
  CHECK(all.back() == doctest::Approx(e.max.mid()).epsilon(1e-13));
}

TEST_CASE("lanczos trace rows") {
  auto s = integer_line(200);
  std::ostringstream trace;
  auto o = mode(SolveMode::iterative);
  o.trace = &trace;
  extreme_eigs(path(s), s->window(), o);
  std::istringstream rows(trace.str());
  std::string line;
  int count = 0;
  while (std::getline(rows, line)) {
    std::istringstream cols(line);
    double v[5];
    for (double& x : v) cols >> x;
    CHECK_FALSE(cols.fail());
    ++count;
  }
  CHECK(count > 0);
}

TEST_CASE("deterministic output") {
  Rng rng(5);
  const auto k = random_band_kernel(rng, 1500, 3, 4, true);
  const auto a = extreme_eigs(k, k.space()->window(), mode(SolveMode::iterative));
  const auto b = extreme_eigs(k, k.space()->window(), mode(SolveMode::iterative));
  CHECK(a.min.lo == b.min.lo);
  CHECK(a.max.hi == b.max.hi);
  CHECK(a.iterations == b.iterations);
}
