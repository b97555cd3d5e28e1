#include <cmath>

#include "doctest.h"
#include "potkit/errors.hpp"
#include "potkit/fields.hpp"
#include "potkit/kernels.hpp"
#include "potkit/quadrature.hpp"

using namespace potkit;

namespace {

const Point O2{0, 0};

GridDomain square_grid(double half, double h) {
  GridDomain g = GridDomain::covering(Point{-half, -half}, Point{half, half}, h);
  for (std::size_t i = 0; i < g.size(); ++i) g.set(i, true);
  return g;
}

}  // namespace

TEST_CASE("sphere averages") {
  Domain plane = Space{2};
  CHECK(sphere_average(ScalarField::constant(plane, 2.5), Point{1, 1}, 0.3).value() ==
        doctest::Approx(2.5).epsilon(1e-15));
  ScalarField ln0 = ScalarField::kernel(plane, O2);
  CHECK(sphere_average(ln0, O2, 2.0).value() == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  Point a{0.3, 0.6};
  double oracle = 0.0;
  const int n = 1 << 14;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * M_PI * k / n;
    oracle += std::log(distance(Point{std::cos(t), std::sin(t)}, a)) / n;
  }
  CHECK(std::fabs(oracle) < 1e-14);
  AverageEstimate est = sphere_average_estimate(ScalarField::kernel(plane, a), O2, 1.0);
  CHECK(est.value.value() == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(est.error < 1e-12);

  CHECK_THROWS_AS(sphere_average(ScalarField::constant(Ball{O2, 1.0}, 1.0), Point{0.5, 0}, 0.6),
                  DomainError);
}

TEST_CASE("ball averages") {
  Domain plane = Space{2};
  CHECK(ball_average(ScalarField::constant(plane, -1.5), Point{2, 0}, 0.7).value() ==
        doctest::Approx(-1.5).epsilon(1e-12));
  ScalarField sq(plane, [](const Point& x) { return ExtReal(x.norm2()); });
  CHECK(ball_average(sq, O2, 1.0).value() == doctest::Approx(0.5).epsilon(1e-13));
  ScalarField ln0 = ScalarField::kernel(plane, O2);
  CHECK(ball_average(ln0, O2, 1.0).value() == doctest::Approx(-0.5).epsilon(1e-10));
  // 3D: average of |x|^2 over the unit ball is 3/5
  ScalarField sq3(Space{3}, [](const Point& x) { return ExtReal(x.norm2()); });
  CHECK(ball_average(sq3, Point{0, 0, 0}, 1.0).value() == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("sub-mean-value checks") {
  Domain box = Ball{O2, 2.0};
  Point y{1.7, 1.7};  // outside the box ball
  ScalarField ky = ScalarField::kernel(box, y);
  auto probes = random_probes(ky, Ball{O2, 2.0}, 200, 1, 0.01);
  ProbeReport rep = check_subharmonic(ky, probes);
  CHECK(rep.pass());
  for (const auto& p : rep.probes)
    if (distance(p.x, y) > p.r) CHECK(std::fabs(p.margin) <= p.tol);

  ScalarField mx(box, [](const Point& x) {
    const double s = x.norm();
    return s == 0.0 ? ExtReal(-1.0) : ExtReal(std::max(std::log(s), -1.0));
  });
  CHECK(check_subharmonic(mx, random_probes(mx, Ball{O2, 2.0}, 200, 2, 0.01)).pass());

  ScalarField neg(box, [](const Point& x) { return ExtReal(-x.norm2()); });
  auto probes3 = random_probes(neg, Ball{O2, 2.0}, 100, 3, 0.01);
  ProbeReport bad = check_subharmonic(neg, probes3);
  CHECK(bad.violations == probes3.size());
  CHECK(bad.csv().rfind("x,r,value,average,margin,pass\n", 0) == 0);
}

TEST_CASE("probes are deterministic and admissible") {
  Domain box = Ball{O2, 1.0};
  ScalarField f = ScalarField::constant(box, 0.0);
  f.with_pole(Point{0.2, 0.1});
  auto a = random_probes(f, Ball{O2, 1.0}, 50, 77, 0.01);
  auto b = random_probes(f, Ball{O2, 1.0}, 50, 77, 0.01);
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].r == b[i].r);
    CHECK(a[i].r >= 0.02);
    CHECK(a[i].r <= 0.5 * f.clearance(a[i].x) + 1e-15);
  }
}

TEST_CASE("riesz measure of quadratics") {
  GridDomain g = square_grid(1.0, 0.05);
  ScalarField sq(Space{2}, [](const Point& x) { return ExtReal(x.norm2()); });
  RieszResult r = riesz_measure(sample(sq, g));
  const auto& dens = std::get<GridDensity>(r.measure.components()[0]);
  std::size_t interior = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_boundary_cell(i)) {
      CHECK(dens.values[i] == 0.0);
      continue;
    }
    ++interior;
    CHECK(std::fabs(dens.values[i] - 2.0 / M_PI) <= 1e-8);
  }
  CHECK(interior == 38 * 38);

  ScalarField hyp(Space{2}, [](const Point& x) { return ExtReal(x[0] * x[0] - x[1] * x[1]); });
  RieszResult z = riesz_measure(sample(hyp, g));
  for (double v : std::get<GridDensity>(z.measure.components()[0]).values) CHECK(std::fabs(v) <= 1e-10);
}

TEST_CASE("riesz measure recovers a unit atom under refinement") {
  Point p{0.0131, -0.0071};
  ScalarField ln = ScalarField::kernel(Space{2}, p);
  double prev = INFINITY;
  for (double h : {0.04, 0.02}) {
    RieszResult r = riesz_measure(sample(ln, square_grid(1.0, h)));
    CHECK(r.singular_cells.empty());
    const double err = std::fabs(r.measure.total_mass() - 1.0);
    CHECK(err <= h);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("riesz measure flags singular cells") {
  GridDomain g(Point{-0.5, -0.5}, 0.1, {11, 11});  // cell 5,5 is centred at the origin
  for (std::size_t i = 0; i < g.size(); ++i) g.set(i, true);
  ScalarField ln = ScalarField::kernel(Space{2}, O2);
  RieszResult r = riesz_measure(sample(ln, g));
  CHECK(r.singular_cells.size() == 5);
}

TEST_CASE("riesz measure is linear") {
  GridDomain g = square_grid(1.0, 0.04);
  Rng rng(8);
  for (int k = 0; k < 10; ++k) {
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    Point p{rng.uniform(2, 3), rng.uniform(-1, 1)};
    ScalarField u(Space{2}, [](const Point& x) { return ExtReal(std::exp(x[0]) * x[1] * x[1]); });
    ScalarField w = ScalarField::kernel(Space{2}, p);
    auto ru = std::get<GridDensity>(riesz_measure(sample(u, g)).measure.components()[0]).values;
    auto rw = std::get<GridDensity>(riesz_measure(sample(w, g)).measure.components()[0]).values;
    auto rs = std::get<GridDensity>(
                  riesz_measure(sample(u.scaled(a).plus(w, b), g)).measure.components()[0])
                  .values;
    for (std::size_t i = 0; i < rs.size(); ++i) CHECK(std::fabs(rs[i] - a * ru[i] - b * rw[i]) <= 1e-10);
  }
}

TEST_CASE("pole coefficient fit") {
  ScalarField f = ScalarField::kernel(Space{2}, O2, -2.5, 7.0).plus(
      ScalarField(Space{2}, [](const Point& x) { return ExtReal(3 * x[0] - x[1]); }));
  f.with_pole(O2);
  PoleFit fit = pole_coefficient_fit(f, O2);
  CHECK(fit.coefficient == doctest::Approx(2.5).epsilon(1e-4));
  CHECK(fit.r_squared > 0.999);

  ScalarField g3 = ScalarField::kernel(Space{3}, Point{0, 0, 0}, -1.5, 2.0);
  g3.with_pole(Point{0, 0, 0});
  CHECK(pole_coefficient_fit(g3, Point{0, 0, 0}).coefficient == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("glue_max") {
  Domain O = Annulus{O2, 1.0, 3.0};
  Domain O0 = Ball{O2, 2.0};

  // identical pieces
  ScalarField v = ScalarField::kernel(Ball{O2, 3.0}, Point{5, 0});
  ScalarField V1 = glue_max(Ball{O2, 3.0}, v, Ball{O2, 3.0}, v);
  for (double t : {0.1, 1.3, 2.9}) CHECK(V1(Point{t, 0.1}) == v(Point{t, 0.1}));

  // v = ln(|x|/2) on the annulus, v0 = 0 inside: V = max(0, ln(|x|/2))
  ScalarField vo(O, [](const Point& x) { return ExtReal(std::log(x.norm() / 2)); });
  ScalarField vz = ScalarField::constant(O0, 0.0);
  ScalarField V = glue_max(O, vo, O0, vz);
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    Point x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    if (x.norm() >= 3) continue;
    CHECK(V(x).value() == doctest::Approx(std::max(0.0, std::log(x.norm() / 2))).epsilon(1e-14));
  }
  CHECK(check_subharmonic(V, random_probes(V, Ball{O2, 3.0}, 500, 4, 0.005)).pass());

  // the reversed assignment violates the inequality on |x| = 1
  ScalarField v0bad(O0, [](const Point& x) { return ExtReal(std::log(x.norm() / 2)); });
  v0bad.with_pole(O2);
  CHECK_THROWS_AS(glue_max(O, ScalarField::constant(O, 0.0), O0, v0bad), RejectError);

  // discontinuous pair
  Domain in = Ball{O2, 1.0};
  Domain out = Annulus{O2, 0.5, 2.0};
  CHECK_THROWS_AS(glue_max(out, ScalarField::constant(out, 0.0), in, ScalarField::constant(in, 1.0)),
                  RejectError);
}

TEST_CASE("glue_quantitative") {
  GreenModel green = green_ball(O2, 1.0, O2, 2);
  const double rin = std::exp(-2.0);
  Domain O = Annulus{O2, rin, 2.0};
  Domain O0 = Ball{O2, 1.0};
  ScalarField g = green.field();

  // coefficient one: v0 = 2g - 2
  ScalarField v(O, [](const Point& x) { return ExtReal(0.5 * std::log(x.norm())); });
  ScalarField V = glue_quantitative({O, v, O0, g, -1.0, 1.0, 0.0, 2.0});
  Point x{0.05, 0.0};
  CHECK(V(x).value() == doctest::Approx(2 * std::log(20.0) - 2).epsilon(1e-13));
  CHECK(check_subharmonic(V, random_probes(V, Ball{O2, 2.0}, 500, 6, 0.005)).pass());

  // zero coefficient: v0 = 0, V = max(0, v)
  ScalarField w(O, [](const Point& x) { return ExtReal(std::log(x.norm())); });
  ScalarField W = glue_quantitative({O, w, O0, g, 0.0, 0.0, 0.0, 2.0});
  CHECK(W(Point{0.05, 0}).value() == 0.0);
  CHECK(W(Point{0.5, 0}).value() == 0.0);
  CHECK(W(Point{1.5, 0}).value() == doctest::Approx(std::log(1.5)));

  CHECK_THROWS_AS(glue_quantitative({O, v, O0, g, -1.0, 1.0, 2.0, 2.0}), PreconditionError);
  // M_g above the boundary minimum of g
  CHECK_THROWS_AS(glue_quantitative({O, v, O0, g, -1.0, 1.0, 0.0, 2.5}), RejectError);
}

TEST_CASE("glue_with_green on the unit disk") {
  const Point p{0.8, 0};
  Domain ring = Annulus{O2, 0.2, 1.0};
  ScalarField v = ScalarField::kernel(ring, p);
  const double m_v = std::log(0.2), M_v = std::log(1.4);
  GreenModel green = green_ball(O2, 0.4, O2, 2);
  Ball So{O2, 0.2}, S{O2, 0.6};
  GreenGlue gg = glue_with_green(v, Ball{O2, 1.0}, green, So, S, m_v, M_v);
  CHECK(gg.M_g == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(gg.coefficient == doctest::Approx(std::log(7.0) / std::log(2.0)).epsilon(1e-12));

  const ScalarField& V = gg.V;
  Rng rng(12);
  int n_ring = 0, n_inner = 0;
  while (n_ring < 300 || n_inner < 100) {
    Point x{rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)};
    const double s = x.norm();
    if (s >= 0.6 || s == 0.0) continue;
    const double g = green(x).value();
    const double val = V(x).value();
    if (s > 0.2) {
      ++n_ring;
      CHECK(val >= v(x).value());
      CHECK(val <= gg.M_v_plus + 2 * gg.coefficient * g + 1e-12);
    } else {
      ++n_inner;
      CHECK(val >= 0.0);
      CHECK(val <= 2 * gg.coefficient * g + 1e-12);
    }
  }
  // V = v outside S
  CHECK(V(Point{0.7, 0.5}) == v(Point{0.7, 0.5}));

  CHECK(check_subharmonic(V, random_probes(V, Ball{O2, 1.0}, 500, 10, 0.005)).pass());
  // harmonic near the pole
  auto inner = random_probes(V, Ball{O2, 0.19}, 100, 11, 0.002);
  std::vector<Probe> off;
  for (const auto& pr : inner)
    if (distance(pr.x, O2) + pr.r < 0.2) off.push_back(pr);
  CHECK(check_harmonic(V, off, 1e-8).pass());

  PoleFit fit = pole_coefficient_fit(V, O2);
  CHECK(fit.coefficient == doctest::Approx(2 * gg.coefficient).epsilon(0.05));
  CHECK(fit.r_squared >= 0.999);

  // the direct ratio at t = 1e-3 carries the constant term
  const double t = 1e-3;
  const double ratio = V(Point{t, 0}).value() / -std::log(t);
  CHECK(std::fabs(ratio / (2 * gg.coefficient) - 1) > 0.05);

  // zero data gives zero amplitude
  GreenGlue zero = glue_with_green(ScalarField::constant(ring, 0.0), Ball{O2, 1.0}, green, So, S, 0.0, 0.0);
  CHECK(zero.coefficient == 0.0);
  CHECK(zero.V(Point{0.1, 0}).value() == 0.0);
  CHECK(zero.V(Point{0.5, 0}).value() == 0.0);

  CHECK_THROWS_AS(glue_with_green(v, Ball{O2, 1.0}, green, So, S, -1.0, M_v), RejectError);
  CHECK_THROWS_AS(glue_with_green(v, Ball{O2, 1.0}, green_ball(O2, 0.7, O2, 2), So, S, m_v, M_v),
                  PreconditionError);
}

TEST_CASE("harmonize_layer") {
  Domain big = Ball{O2, 2.0};
  Domain layer = Annulus{O2, 0.5, 1.0};
  const double h = 0.02;

  ScalarField c = ScalarField::constant(big, 1.25);
  HarmonizeResult hc = harmonize_layer(c, layer, h);
  CHECK(hc.field(Point{0.7, 0.1}).value() == doctest::Approx(1.25).epsilon(1e-14));

  ScalarField hyp(big, [](const Point& x) { return ExtReal(x[0] * x[0] - x[1] * x[1]); });
  HarmonizeResult hh = harmonize_layer(hyp, layer, h);
  CHECK(hh.residual <= 1e-10);
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    Point x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (!layer.contains(x)) continue;
    // bilinear interpolation of a quadratic is exact up to h^2/4 |curvature|
    CHECK(std::fabs(hh.field(x).value() - hyp(x).value()) <= 0.5 * h * h + 1e-6);
  }
  for (std::size_t i = 0; i < hh.nodes.size(); ++i)
    if (hh.nodes.masked(i))
      CHECK(std::fabs(hh.solution[i] - hyp(hh.nodes.center(i)).value()) <= 1e-6);

  // pole inside the layer
  Point p{0.7513, 0.0131};
  ScalarField ln = ScalarField::kernel(big, p);
  ln.with_pole(p);
  HarmonizeResult hl = harmonize_layer(ln, layer, h);
  CHECK(hl.min_domination >= -1e-6);
  CHECK(hl.field(p + Point{0.01, 0.005}).value() > ln(p + Point{0.01, 0.005}).value() + 1.0);
  for (const auto& u : sphere_directions(2, 32)) {
    Point x = 0.5 * u;
    if (distance(x, p) < 0.4) continue;
    // interpolation across the boundary is first order in h
    CHECK(std::fabs(hl.field(x).value() - ln(x).value()) <= h);
  }
  // maximum principle
  for (int k = 0; k < 400; ++k) {
    Point x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (!layer.contains(x)) continue;
    const double val = hl.field(x).value();
    CHECK(val >= hl.min_boundary - 1e-9);
    CHECK(val <= hl.max_boundary + 1e-9);
  }
  CHECK_FALSE(hl.field.pole().has_value());
  CHECK_THROWS_AS(harmonize_layer(ln, Ball{O2, 1.0}, h), PreconditionError);
}
