#include <sstream>

#include "doctest.h"

#include "persson/errors.hpp"
#include "persson/kernel.hpp"
#include "persson/metric_space.hpp"

using namespace persson;

namespace {

BandKernel z_adjacency(const SpacePtr& s) {
  std::vector<KernelEntry> e;
  for (Site x : s->window()) {
    if (s->window().contains(x + 1)) {
      e.push_back({x, x + 1, 1.0});
      e.push_back({x + 1, x, 1.0});
    }
  }
  return BandKernel(s, e, 1.0);
}

BandKernel z_tridiag_ones(const SpacePtr& s) {
  std::vector<KernelEntry> e;
  for (Site x : s->window()) {
    for (Site y = x - 1; y <= x + 1; ++y) {
      if (s->window().contains(y)) e.push_back({x, y, 1.0});
    }
  }
  return BandKernel(s, e, 1.0);
}

}  // namespace

TEST_CASE("site sets") {
  const auto w = SiteSet::range(-3, 3);
  CHECK(w.size() == 7);
  CHECK(w.index_of(-3) == 0);
  CHECK(w.index_of(9) == -1);
  const auto c = SiteSet::cofinite(w, {0, 0, 1, 42});
  CHECK(c.is_cofinite());
  CHECK(c.size() == 5);
  CHECK(std::vector<Site>(c.removed().begin(), c.removed().end()) == std::vector<Site>{0, 1});
  CHECK(c.is_subset_of(w));
  CHECK_FALSE(w.is_subset_of(c));
  CHECK(SiteSet({3, 1, 1, 2}) == SiteSet::range(1, 3));
}

TEST_CASE("band kernel construction") {
  auto s = integer_line(5);
  SUBCASE("duplicates are summed and zeros dropped") {
    BandKernel k(s, {{0, 1, 1.0}, {0, 1, 2.0}, {1, 1, 0.0}}, 1.0);
    CHECK(k.nnz() == 1);
    CHECK(k(0, 1) == Complex(3.0));
    CHECK(k(1, 1) == Complex(0.0));
    CHECK(k.sup_bound() == 3.0);
  }
  SUBCASE("entries beyond the bandwidth are rejected") {
    CHECK_THROWS_AS(BandKernel(s, {{0, 2, 1.0}}, 1.0), StructuralError);
  }
  SUBCASE("non-finite values are rejected") {
    CHECK_THROWS_AS(BandKernel(s, {{0, 0, std::nan("")}}, 0.0), StructuralError);
  }
  SUBCASE("row slices") {
    const auto k = z_adjacency(s);
    CHECK(k.row(0).size() == 2);
    CHECK(k.row(5).size() == 1);
    CHECK(k.is_real());
  }
}

TEST_CASE("apply") {
  auto s = integer_line(2);
  const auto w = SiteSet::range(0, 2);
  const FiniteVector u(w, {1.0, 0.0, 0.0});
  SUBCASE("zero kernel") {
    const auto r = apply(BandKernel::zero(s), u, w);
    CHECK(r.norm() == 0.0);
  }
  SUBCASE("identity") {
    const auto r = apply(BandKernel::identity(s, s->window()), u, w);
    CHECK(r.values == u.values);
  }
  SUBCASE("adjacency on {0,1,2}") {
    const auto k = restrict(z_adjacency(s), w);
    const auto r = apply(k, u, w);
    CHECK(r.values == std::vector<Complex>{0.0, 1.0, 0.0});
  }
  SUBCASE("mismatched vector") {
    CHECK_THROWS_AS(apply(z_adjacency(s), u, SiteSet::range(0, 1)), StructuralError);
  }
}

TEST_CASE("compose, adjoint, restrict") {
  auto s = integer_line(6);
  const auto a = z_adjacency(s);
  SUBCASE("identity is a unit and zero annihilates") {
    CHECK(compose(a, BandKernel::identity(s, s->window())) == a);
    CHECK(compose(a, BandKernel::zero(s)).is_zero());
  }
  SUBCASE("adjacency squared on the interior") {
    const auto a2 = compose(a, a);
    CHECK(a2.bandwidth() == 2.0);
    for (Site x = -4; x <= 4; ++x) {
      CHECK(a2(x, x) == Complex(2.0));
      CHECK(a2(x, x + 2) == Complex(1.0));
      CHECK(a2(x, x + 1) == Complex(0.0));
    }
  }
  SUBCASE("kernels from different spaces do not compose") {
    CHECK_THROWS_AS(compose(a, BandKernel::zero(integer_plane(1))), StructuralError);
  }
  SUBCASE("adjoint") {
    CHECK(adjoint(a) == a);
    BandKernel k(s, {{0, 1, Complex(0, 1)}}, 1.0);
    const auto ka = adjoint(k);
    CHECK(ka(1, 0) == Complex(0, -1));
    CHECK(ka.nnz() == 1);
  }
  SUBCASE("restrict") {
    CHECK(restrict(a, s->window()) == a);
    const auto m = SiteSet::range(-2, 2);
    CHECK(restrict(BandKernel::identity(s, s->window()), m) == BandKernel::identity(s, m));
    const auto cut = restrict(a, SiteSet::cofinite(s->window(), {0}));
    CHECK(cut(-1, 0) == Complex(0.0));
    CHECK(cut(0, 1) == Complex(0.0));
    CHECK(cut(-1, 1) == Complex(0.0));
    CHECK(cut(1, 2) == Complex(1.0));
  }
  SUBCASE("add, subtract, scale") {
    CHECK(subtract(a, a).is_zero());
    CHECK(add(a, a) == scale(a, 2.0));
  }
}

TEST_CASE("restriction defect") {
  auto s = integer_line(6);
  const auto t = z_tridiag_ones(s);
  SUBCASE("full window has no defect") {
    CHECK(defect(t, t, s->window()).is_zero());
    CHECK(defect_middle_sum(t, t, s->window()).is_zero());
  }
  SUBCASE("removing the origin") {
    const auto m = SiteSet::cofinite(s->window(), {0});
    const auto d = defect(t, t, m);
    CHECK(d == defect_middle_sum(t, t, m));
    CHECK(d.nnz() == 4);
    CHECK(d(-1, 1) == Complex(1.0));
    CHECK(d(1, -1) == Complex(1.0));
    CHECK(d(-1, -1) == Complex(1.0));
    CHECK(d(1, 1) == Complex(1.0));
  }
  SUBCASE("zero factor") {
    const auto m = SiteSet::cofinite(s->window(), {0});
    CHECK(defect(t, BandKernel::zero(s), m).is_zero());
    CHECK(defect(BandKernel::zero(s), t, m).is_zero());
  }
}

TEST_CASE("hahn norm and schur bound") {
  auto s = integer_line(10);
  const auto inner = SiteSet::range(-5, 5);
  const auto id = BandKernel::identity(s, s->window());
  CHECK(hahn_norm(id, s->window()) == 1.0);
  CHECK(schur_bound(id, s->window()) == 1.0);
  const auto t = z_tridiag_ones(s);
  CHECK(hahn_norm(t, inner) == 3.0);
  CHECK(schur_bound(t, inner) == doctest::Approx(3.0).epsilon(1e-15));
  std::vector<KernelEntry> row;
  for (Site y = 0; y <= 8; ++y) row.push_back({0, y, 1.0});
  const BandKernel rank_one(s, row, 8.0);
  CHECK(schur_bound(rank_one, s->window()) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(hahn_norm(rank_one, s->window()) == 9.0);
}

TEST_CASE("self-adjointness") {
  auto s = integer_line(3);
  CHECK(validate_self_adjoint(z_adjacency(s)));
  CHECK_FALSE(validate_self_adjoint(BandKernel(s, {{0, 1, 1.0}}, 1.0), 1e-12));
  CHECK(validate_self_adjoint(BandKernel(s, {{0, 1, Complex(0, 1)}, {1, 0, Complex(0, -1)}}, 1.0)));
  CHECK(self_adjoint_defect(BandKernel(s, {{0, 1, 2.0}, {1, 0, 1.5}}, 1.0)) == 0.5);
}

TEST_CASE("kernel text round trip") {
  auto s = integer_line(4);
  const BandKernel k(s, {{0, 1, Complex(0.1, -1.0 / 3.0)}, {1, 0, Complex(0.1, 1.0 / 3.0)},
                         {-4, -4, 1e-300}, {3, 2, -7.25}},
                     1.0);
  std::stringstream ss;
  write_kernel(ss, k);
  const auto back = read_kernel(ss, s);
  CHECK(back == k);
  CHECK(back.bandwidth() == k.bandwidth());

  std::istringstream missing("0 1 1 0\n");
  CHECK_THROWS_AS(read_kernel(missing, s), StructuralError);
  std::istringstream garbage("bandwidth 1\n0 1 x 0\n");
  CHECK_THROWS_AS(read_kernel(garbage, s), StructuralError);
}
