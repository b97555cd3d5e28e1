#include <cmath>

#include "doctest.h"
#include "potkit/errors.hpp"
#include "potkit/fields.hpp"
#include "potkit/geometry.hpp"
#include "potkit/quadrature.hpp"

using namespace potkit;

namespace {

GridDomain disk_grid(double R, double h, double pad) {
  GridDomain g = GridDomain::covering(Point{-pad, -pad}, Point{pad, pad}, h);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.center(i).norm() < R) g.set(i, true);
  return g;
}

bool subset(const GridDomain& a, const GridDomain& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.masked(i) && !b.masked(i)) return false;
  return true;
}

}  // namespace

TEST_CASE("inversion examples") {
  CHECK(inversion(Point{2, 0}, Point{0, 0}).point() == Point{0.5, 0});
  CHECK(inversion(Point{0.5, 0, 0}, Point{0, 0, 0}).point() == Point{2, 0, 0});
  CHECK(inversion(Point{1, 1}, Point{1, 0}).point() == Point{1, 1});
  CHECK(inversion(Point{1, 1}, Point{1, 1}).is_infinity());
  CHECK(inversion(ExtPoint::infinity(2), Point{3, 4}).point() == Point{3, 4});
}

TEST_CASE("inversion is an involution") {
  Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    const int d = 2 + k % 2;
    Point x(d), o(d);
    for (int a = 0; a < d; ++a) {
      x[a] = rng.uniform(-5, 5);
      o[a] = rng.uniform(-1, 1);
    }
    Point back = inversion(inversion(x, o), o).point();
    CHECK(distance(back, x) <= 1e-12 * x.norm() + 1e-13);
  }
}

TEST_CASE("kelvin transform closed forms") {
  Domain ext3 = Annulus{Point{0, 0, 0}, 0.5, INFINITY};
  ScalarField one = ScalarField::constant(ext3, 1.0);
  ScalarField v = kelvin_transform(one, Point{0, 0, 0}, 3);
  for (double t : {0.3, 0.7, 1.5})
    CHECK(v(Point{t, 0, 0}).value() == doctest::Approx(1.0 / t).epsilon(1e-14));

  Domain ext2 = Annulus{Point{0, 0}, 0.5, INFINITY};
  ScalarField ln = ScalarField::kernel(ext2, Point{0, 0});
  ScalarField w = kelvin_transform(ln, Point{0, 0}, 2);
  for (double t : {0.3, 0.7, 1.9})
    CHECK(w(Point{0, t}).value() == doctest::Approx(-std::log(t)).epsilon(1e-13));

  CHECK_THROWS_AS(kelvin_transform(ScalarField::constant(Ball{Point{0, 0}, 1.0}, 1.0), Point{0, 0}, 2),
                  PreconditionError);
}

TEST_CASE("kelvin transform keeps subharmonicity on the inverted annulus") {
  // u = ln|x - p| + |x|^2 on 1 < |x| < 2, d = 3 uses |x|^2 and -1/|x - p|.
  for (int d : {2, 3}) {
    Point c = Point::zero(d);
    Domain ann = Annulus{c, 1.0, 2.0};
    Point p = Point::unit(d, 0, 0.2);
    ScalarField u = ScalarField::kernel(ann, p)
                        .plus(ScalarField(ann, [](const Point& x) { return ExtReal(x.norm2()); }));
    ScalarField v = kelvin_transform(u, c, d);
    auto probes = random_probes(v, Ball{c, 1.0}, 60, 5, 0.01);
    auto rep = check_subharmonic(v, probes);
    CHECK(rep.pass());
  }
}

TEST_CASE("parallel sets") {
  Domain b = parallel_set(Ball{Point{0, 0}, 1.0}, 0.5);
  REQUIRE(b.ball());
  CHECK(b.ball()->radius == doctest::Approx(1.5));

  Domain a = parallel_set(Annulus{Point{0, 0}, 1.0, 2.0}, 0.25);
  REQUIRE(a.annulus());
  CHECK(a.annulus()->inner == doctest::Approx(0.75));
  CHECK(a.annulus()->outer == doctest::Approx(2.25));

  GridDomain one(Point{0, 0}, 0.1, {1, 1});
  one.set(0, true);
  Domain dil = parallel_set(one, 0.2);
  const GridDomain& g = *dil.grid();
  // brute force: cells whose centre lies within two cells of the original centre
  std::size_t expect = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto ijk = g.multi_index(i);
    const int di = ijk[0] - 2, dj = ijk[1] - 2;
    const bool in = di * di + dj * dj <= 4;
    expect += in;
    CHECK(g.masked(i) == in);
  }
  CHECK(g.count() == 13);
  CHECK(expect == 13);
}

TEST_CASE("parallel set monotone") {
  GridDomain base = disk_grid(0.3, 0.05, 0.5);
  GridDomain prev;
  for (double r : {0.05, 0.1, 0.2}) {
    Domain p = parallel_set(base, r);
    const GridDomain& g = *p.grid();
    CHECK(g.count() > base.count());
    if (prev.size() != 0) {
      // compare by cell centres since frames differ
      for (std::size_t i = 0; i < prev.size(); ++i) {
        if (!prev.masked(i)) continue;
        std::size_t j;
        REQUIRE(g.locate(prev.center(i), j));
        CHECK(g.masked(j));
      }
    }
    prev = g;
  }
}

TEST_CASE("inward filled hull") {
  const double h = 0.05;
  GridDomain O = disk_grid(2.0, h, 2.2);
  GridDomain K(O.origin(), h, O.shape());
  for (std::size_t i = 0; i < K.size(); ++i)
    if (std::fabs(O.center(i).norm() - 1.0) <= 0.75 * h) K.set(i, true);
  GridDomain hull = inward_filled_hull(K, O);
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const bool expect = K.masked(i) || O.center(i).norm() < 1.0;
    CHECK(hull.masked(i) == expect);
  }
  // idempotent
  GridDomain again = inward_filled_hull(hull, O);
  CHECK(again.mask() == hull.mask());

  // solid squares have no holes
  GridDomain sq(O.origin(), h, O.shape());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    Point c = O.center(i);
    if ((std::fabs(c[0] - 0.5) < 0.3 && std::fabs(c[1]) < 0.3) ||
        (std::fabs(c[0] + 0.8) < 0.2 && std::fabs(c[1] - 0.5) < 0.2))
      sq.set(i, true);
  }
  CHECK(inward_filled_hull(sq, O).mask() == sq.mask());

  // monotone in O
  GridDomain O2 = disk_grid(1.6, h, 2.2);
  CHECK(subset(inward_filled_hull(K, O2), inward_filled_hull(K, O)));

  GridDomain bad = K;
  bad.set(0, true);
  CHECK_THROWS_AS(inward_filled_hull(bad, O), PreconditionError);
}

TEST_CASE("window frame counts as reaching infinity") {
  // O fills the whole frame: a ring of K still encloses its inside, but a
  // region cut off only by the frame is not a hole.
  const double h = 0.1;
  GridDomain O = GridDomain::covering(Point{-1, -1}, Point{1, 1}, h);
  for (std::size_t i = 0; i < O.size(); ++i) O.set(i, true);
  GridDomain K(O.origin(), h, O.shape());
  for (std::size_t i = 0; i < K.size(); ++i) {
    Point c = O.center(i);
    if (std::fabs(c[0]) < 0.5 && std::fabs(std::fabs(c[1]) - 0.45) < 0.06) K.set(i, true);
  }
  // two bars only: region between them reaches the frame sideways
  CHECK(inward_filled_hull(K, O).mask() == K.mask());
}
