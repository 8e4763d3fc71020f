// Seeded property tests.

#include <sstream>

#include "doctest.h"

#include "persson/checks.hpp"
#include "persson/eigensolve.hpp"
#include "persson/metric_space.hpp"
#include "persson/subshift.hpp"

using namespace persson;

namespace {

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Random self-adjoint locally constant symbol over {a, b}.
HoppingSymbol random_symbol(Rng& rng) {
  const int p = pick(rng, 0, 2);
  const int len = 2 * p + 1;
  std::vector<HoppingSymbol::Row> rows;
  const int count = pick(rng, 1, 5);
  for (int r = 0; r < count; ++r) {
    Word pattern;
    for (int i = 0; i < len; ++i) pattern.push_back("ab*"[pick(rng, 0, 2)]);
    const int hop = pick(rng, 0, 2);
    const double re = pick(rng, -4, 4);
    if (hop == 0) {
      rows.push_back({pattern, 0, re});
      continue;
    }
    // a hop-invariant pattern (all wildcards) keeps the mirror row exact
    rows.push_back({Word(static_cast<std::size_t>(len), '*'), hop, Complex(re, pick(rng, -2, 2))});
    rows.push_back({Word(static_cast<std::size_t>(len), '*'), -hop, std::conj(rows.back().value)});
  }
  return HoppingSymbol(p, rows);
}

SubshiftModel random_model(Rng& rng) {
  if (pick(rng, 0, 1) == 0) {
    return SubshiftModel(Alphabet({'a', 'b'}), SeqPoint::step('a', 'b', pick(rng, -3, 3)),
                         {SeqPoint::constant('a'), SeqPoint::constant('b')});
  }
  return SubshiftModel(Alphabet({'a', 'b'}), SeqPoint::powers_of_two('a', 'b', pick(rng, 0, 1) == 1),
                       {SeqPoint::constant('a'), SeqPoint::explicit_window({{0, 'b'}}, 'a')});
}

}  // namespace

TEST_CASE("kernel algebra laws on integer kernels") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto half = pick(rng, 3, 15);
    const auto a = random_band_kernel(rng, half, pick(rng, 0, 2), 4, false);
    const auto b = random_band_kernel(rng, half, pick(rng, 0, 2), 4, false);
    const auto c = random_band_kernel(rng, half, pick(rng, 0, 2), 4, false);
    CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
    CHECK(adjoint(compose(a, b)) == compose(adjoint(b), adjoint(a)));
    CHECK(adjoint(adjoint(a)) == a);
    CHECK(add(a, b) == add(b, a));
    const auto m = random_cofinite(rng, half);
    CHECK(restrict(restrict(a, m), m) == restrict(a, m));
    const auto fv = [&] {
      FiniteVector u = FiniteVector::zeros(a.space()->window());
      for (auto& v : u.values) v = pick(rng, -3, 3);
      return u;
    }();
    const auto w = a.space()->window();
    CHECK(apply(compose(a, b), fv, w).values == apply(a, apply(b, fv, w), w).values);
  }
}

TEST_CASE("kernel text round trip on random kernels") {
  Rng rng(12);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int t = 0; t < 30; ++t) {
    const auto half = pick(rng, 1, 20);
    auto space = integer_line(half);
    std::vector<KernelEntry> e;
    for (int i = 0; i < 40; ++i) {
      const Site x = pick(rng, -half, half);
      const Site y = std::clamp<Site>(x + pick(rng, -2, 2), -half, half);
      e.push_back({x, y, Complex(u(rng) / 7.0, u(rng) * 1e-9)});
    }
    const BandKernel k(space, e, 2.0);
    std::stringstream ss;
    write_kernel(ss, k);
    CHECK(read_kernel(ss, space) == k);
  }
}

TEST_CASE("defect identity suite") {
  const auto r = defect_identity_suite(2024, 60);
  CHECK(r.ok());
  CHECK(r.nontrivial > 0);
}

TEST_CASE("norm chain suite") {
  const auto r = norm_chain_suite(2025, 40);
  CHECK(r.ok());
}

TEST_CASE("interlacing suite") {
  const auto r = interlacing_suite(2026, 40);
  CHECK(r.ok());
  CHECK(r.nontrivial > 0);
}

TEST_CASE("lambda bounds within the Schur bound") {
  Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    const auto k = random_band_kernel(rng, pick(rng, 5, 40), pick(rng, 1, 3), 6, true);
    const auto& w = k.space()->window();
    const auto e = extreme_eigs(k, w);
    const double schur = schur_bound(k, w);
    CHECK(e.max.lo <= schur + 1e-12 * (1 + schur));
    CHECK(e.min.hi >= -schur - 1e-12 * (1 + schur));
  }
}

TEST_CASE("ball complements shrink as the radius grows") {
  Rng rng(14);
  auto plane = integer_plane(8);
  for (int t = 0; t < 20; ++t) {
    const Site c = encode_z2(pick(rng, -8, 8), pick(rng, -8, 8));
    double r = 0.0;
    auto prev = ball_complement(*plane, c, r);
    for (int s = 0; s < 12; ++s) {
      r += std::uniform_real_distribution<double>(0.0, 2.0)(rng);
      const auto next = ball_complement(*plane, c, r);
      CHECK(next.is_subset_of(prev));
      prev = next;
    }
  }
}

TEST_CASE("random symbols: self-adjoint, covariant and coherent") {
  Rng rng(15);
  for (int t = 0; t < 25; ++t) {
    const auto h = random_symbol(rng);
    const auto m = random_model(rng);
    const auto rep = validate_symbol(h, m, 24);
    CHECK(rep.ok());
    const auto full = subshift_operator(h, m.generator(), ShellSet::full(), 40);
    CHECK(validate_self_adjoint(full, 0.0));
    const int i = pick(rng, 1, 6);
    const auto shell = fell_shell(m, i);
    const auto sites = trace_set(m.generator(), shell, 40);
    const auto orbit = main_orbit_operator(h, m, shell, 40);
    CHECK(orbit == subshift_operator(h, m.generator(), shell, 40));
    CHECK(orbit == restrict(main_orbit_operator(h, m, ShellSet::full(), 40), sites));
  }
}

TEST_CASE("shell nesting on the shipped models") {
  const SubshiftModel step(Alphabet({'a', 'b'}), SeqPoint::step('a', 'b'),
                           {SeqPoint::constant('a'), SeqPoint::constant('b')});
  for (bool one : {true, false}) {
    const SubshiftModel pow(Alphabet({'a', 'b'}), SeqPoint::powers_of_two('a', 'b', one),
                            {SeqPoint::constant('a'), SeqPoint::explicit_window({{0, 'b'}}, 'a')});
    for (const auto& m : {step, pow}) {
      for (int i = 1; i < 20; ++i) {
        const auto outer = fell_shell(m, i);
        const auto inner = fell_shell(m, i + 1);
        for (std::int64_t k = -300; k <= 300; ++k) {
          const auto y = m.generator().shifted(k);
          if (inner.contains(y)) CHECK(outer.contains(y));
        }
      }
    }
  }
}
