#include <cmath>

#include "doctest.h"
#include "potkit/errors.hpp"
#include "potkit/fields.hpp"
#include "potkit/green.hpp"
#include "potkit/kernels.hpp"
#include "potkit/quadrature.hpp"

using namespace potkit;

namespace {

Point random_in_ball(Rng& rng, const Point& c, double R) {
  const int d = c.dim();
  while (true) {
    Point x(d);
    for (int a = 0; a < d; ++a) x[a] = rng.uniform(-R, R);
    if (x.norm() < R) return c + x;
  }
}

}  // namespace

TEST_CASE("green values") {
  GreenModel g2 = green_ball(Point{0, 0}, 1.0, Point{0, 0}, 2);
  CHECK(g2(Point{0.5, 0}).value() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(g2(Point{0, 0}).is_pos_inf());
  CHECK(g2(Point{1.5, 0}).value() == 0.0);
  GreenModel g3 = green_ball(Point{0, 0, 0}, 1.0, Point{0, 0, 0}, 3);
  CHECK(g3(Point{0.5, 0, 0}).value() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g3(Point{0, 2, 0}).value() == 0.0);

  CHECK_THROWS_AS(green_ball(Point{0, 0}, 1.0, Point{1.0, 0}, 2), PreconditionError);
  CHECK_THROWS_AS(green_ball(Point{0}, 1.0, Point{0.0}, 1), PreconditionError);
}

TEST_CASE("green properties") {
  for (int d : {2, 3}) {
    Point c = Point::unit(d, 1, 0.3);
    Point o = c + Point::unit(d, 0, 0.4);
    GreenModel g(Ball{c, 1.2}, o);
    // boundary values
    for (const auto& u : sphere_directions(d, 64)) CHECK(g(c + 1.2 * u).value() <= 1e-10);
    // mean value off the pole
    ScalarField f = g.field();
    std::vector<Probe> probes;
    Rng rng(9);
    while (probes.size() < 40) {
      Point x = random_in_ball(rng, c, 1.1);
      const double r = std::min(1.2 - distance(x, c), distance(x, o)) * 0.8;
      if (r > 0.02) probes.push_back({x, r});
    }
    CHECK(check_harmonic(f, probes, 1e-8).pass());
    // pole ratio tends to one
    double prev = INFINITY;
    for (double t : {1e-2, 1e-4, 1e-6}) {
      const double ratio = g(o + Point::unit(d, 0, t)).value() / -k_eval(d - 2, t);
      CHECK(std::fabs(ratio - 1.0) < prev);
      prev = std::fabs(ratio - 1.0);
    }
    CHECK(prev < 1e-2);
  }
}

TEST_CASE("green symmetry") {
  Rng rng(13);
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 2;
    Ball D{Point::zero(d), 1.0};
    Point x = random_in_ball(rng, D.center, 1.0), y = random_in_ball(rng, D.center, 1.0);
    const double a = GreenModel::two_point(D, x, y).value(), b = GreenModel::two_point(D, y, x).value();
    CHECK(std::fabs(a - b) <= 1e-9 * (1 + std::fabs(a)));
  }
}

TEST_CASE("M_g constant") {
  GreenModel g2 = green_ball(Point{0, 0}, 1.0, Point{0, 0}, 2);
  CHECK(mg_constant(g2, Ball{Point{0, 0}, 0.2}) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  GreenModel g3 = green_ball(Point{0, 0, 0}, 1.0, Point{0, 0, 0}, 3);
  CHECK(mg_constant(g3, Ball{Point{0, 0, 0}, 0.5}) == doctest::Approx(1.0).epsilon(1e-12));

  // shifted S_o: sampled minimum against a dense brute-force minimum
  Ball So{Point{0.1, 0.05}, 0.25};
  const double M = mg_constant(g2, So);
  double dense = INFINITY;
  for (int k = 0; k < 100000; ++k) {
    const double t = 2 * M_PI * k / 100000;
    dense = std::min(dense, g2(So.center + 0.25 * Point{std::cos(t), std::sin(t)}).value());
  }
  CHECK(M > 0.0);
  CHECK(M == doctest::Approx(dense).epsilon(1e-5));

  // domination inside S_o
  Rng rng(4);
  for (int k = 0; k < 500; ++k) {
    Point x = random_in_ball(rng, So.center, 0.25);
    if (x == g2.pole()) continue;
    CHECK(g2(x).value() - M >= -1e-9);
  }
  CHECK_THROWS_AS(mg_constant(g2, Ball{Point{0.5, 0}, 0.2}), PreconditionError);
  CHECK_THROWS_AS(mg_constant(g2, Ball{Point{0, 0}, 1.0}), PreconditionError);
}

TEST_CASE("harmonic measure") {
  Ball D{Point{0, 0}, 1.0};
  Measure w0 = harmonic_measure(D, Point{0, 0});
  CHECK_FALSE(std::get<SphereLayer>(w0.components()[0]).poisson_pole.has_value());
  CHECK(w0.total_mass() == doctest::Approx(1.0).epsilon(1e-10));

  Point x{0.5, 0};
  Measure w = harmonic_measure(D, x);
  ScalarField re(Space{2}, [](const Point& z) { return ExtReal(z[0]); });
  ScalarField one = ScalarField::constant(Space{2}, 1.0);
  ScalarField hyp(Space{2}, [](const Point& z) { return ExtReal(z[0] * z[0] - z[1] * z[1]); });
  CHECK(w.integrate(one).value() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w.integrate(re).value() == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(w.integrate(hyp).value() == doctest::Approx(0.25).epsilon(1e-8));

  Point a{0.3, -0.4};
  ScalarField u = ScalarField::kernel(Space{2}, a);
  const double lhs = w0.integrate(u).value();
  CHECK(std::fabs(lhs) <= 1e-10);
  CHECK(lhs >= std::log(a.norm()));

  CHECK_THROWS_AS(harmonic_measure(D, Point{1.2, 0}), PreconditionError);
}

TEST_CASE("harmonic measure in 3D") {
  Ball D{Point{0, 0, 0}, 1.0};
  Point x{0.2, 0.1, -0.3};
  Measure w = harmonic_measure(D, x);
  ScalarField h(Space{3}, [](const Point& z) { return ExtReal(z[0] * z[1] + 2 * z[2] * z[2] - z[0] * z[0] - z[1] * z[1]); });
  CHECK(w.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w.integrate(h).value() == doctest::Approx(0.02 + 0.18 - 0.04 - 0.01).epsilon(1e-8));
}

TEST_CASE("balayage potentials of harmonic measure") {
  for (int d : {2, 3}) {
    Ball D{Point::zero(d), 1.0};
    Point x = Point::unit(d, 0, 0.4);
    Measure w = harmonic_measure(D, x);
    Rng rng(31);
    int outside = 0, inside = 0;
    while (outside < 60 || inside < 200) {
      Point y(d);
      for (int a = 0; a < d; ++a) y[a] = rng.uniform(-2, 2);
      const double s = y.norm();
      if (std::fabs(s - 1.0) < 1e-3 || y == x) continue;
      const double pw = w.kernel_integral(y).value();
      const double pd = k_eval(d - 2, distance(x, y));
      if (s > 1.0) {
        if (outside >= 60) continue;
        ++outside;
        CHECK(std::fabs(pw - pd) <= 1e-7);
      } else {
        if (inside >= 200) continue;
        ++inside;
        CHECK(pw >= pd - 1e-9);
        CHECK(std::fabs((pw - pd) - GreenModel::two_point(D, y, x).value()) <= 1e-7);
      }
    }
  }
}

TEST_CASE("jensen measures") {
  Ball D{Point{0, 0}, 1.0};
  Point x{0.1, 0};
  Measure m = jensen_measure(D, x, JensenMixture{1.0, 0.0});
  CHECK(m.total_mass() == doctest::Approx(1.0));
  CHECK(std::get<Atom>(m.components()[0]).at == x);

  // circle of radius 1 is Jensen for the origin in the disk of radius 1.1
  Measure sigma = jensen_measure(Ball{Point{0, 0}, 1.0}, Point{0, 0}, JensenMixture{0.0, 1.0});
  for (const auto& y : sphere_directions(2, 40)) {
    ScalarField u = ScalarField::kernel(Space{2}, 1.1 * y);
    CHECK(sigma.integrate(u).value() >= std::log(1.1) - 1e-12);
  }

  Measure mol = jensen_measure(D, Point{0, 0}, JensenMollified{0.3});
  CHECK(mol.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  for (const auto& y : sphere_directions(2, 24)) {
    for (double rho : {0.1, 0.5, 0.9}) {
      ScalarField u = ScalarField::kernel(Space{2}, rho * y);
      CHECK(mol.integrate(u).value() >= std::log(rho) - 1e-9);
    }
  }

  Measure sub = jensen_measure(D, Point{0, 0},
                               JensenSubBalls{{{Ball{Point{0, 0}, 0.4}, 0.5}, {Ball{Point{0.1, 0}, 0.6}, 0.5}}});
  CHECK(sub.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(jensen_measure(D, x, JensenMixture{0.6, 0.6}), PreconditionError);
  CHECK_THROWS_AS(jensen_measure(D, x, JensenMixture{-0.1, 1.1}), PreconditionError);
}
