#include <cmath>

#include "doctest.h"
#include "potkit/errors.hpp"
#include "potkit/fields.hpp"
#include "potkit/green.hpp"
#include "potkit/potentials.hpp"
#include "potkit/quadrature.hpp"

using namespace potkit;

TEST_CASE("potential examples") {
  Potential p2 = potential(Measure::dirac(Point{0, 0}));
  CHECK(p2(Point{2, 0}).value() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(p2(Point{0, 0}).is_neg_inf());

  Potential circ = potential(Measure(2, {SphereLayer{Point{0, 0}, 1.0, 1.0, {}}}));
  CHECK(std::fabs(circ(Point{0.5, 0}).value()) <= 1e-14);
  CHECK(circ(Point{0, 3}).value() == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  // quadrature oracle for the circle potential at an interior point
  double q = 0.0;
  const int n = 1 << 14;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * M_PI * (k + 0.5) / n;
    q += std::log(distance(Point{std::cos(t), std::sin(t)}, Point{0.5, 0})) / n;
  }
  CHECK(std::fabs(q) <= 1e-13);

  Potential p3 = potential(Measure::dirac(Point{0, 0, 0}));
  CHECK(p3(Point{2, 0, 0}).value() == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("difference potentials") {
  Ball D{Point{0, 0}, 1.0};
  Measure w = harmonic_measure(D, Point{0, 0});
  Potential dp = difference_potential(w, Measure::dirac(Point{0, 0}));
  CHECK(dp(Point{0.5, 0}).value() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::fabs(dp(Point{1.5, 0.3}).value()) <= 1e-12);
  CHECK(dp.at_infinity().value() == 0.0);

  Measure mu(2, {BallUniform{Point{0.1, 0}, 0.4, 2.0}, Atom{Point{0.3, 0.3}, 0.5}});
  Potential zero = difference_potential(mu, mu);
  for (double t : {0.05, 0.3, 2.0}) CHECK(zero(Point{t, -t}).value() == 0.0);

  // equal masses: decay like |x|^{1-d}
  Measure a(2, {Atom{Point{0.5, 0}, 1.0}});
  Measure b(2, {Atom{Point{-0.2, 0.1}, 1.0}});
  Potential ab = difference_potential(a, b);
  for (double R : {10.0, 100.0})
    for (const auto& u : sphere_directions(2, 16)) CHECK(std::fabs(ab(R * u).value()) * R <= 1.0);

  // both sides -inf: outside Dom
  Potential same = difference_potential(Measure::dirac(Point{0, 0}), Measure::dirac(Point{0, 0}, 2.0));
  CHECK(same(Point{0, 0}).indeterminate_value());
  CHECK(same.at_infinity().is_neg_inf());
}

TEST_CASE("asymptotics") {
  AsymptoticReport r0 = asymptotic_check(Measure::dirac(Point{0, 0}), {10, 20, 40});
  for (double e : r0.e) CHECK(e <= 1e-12);
  CHECK(r0.bounded);

  Measure a(2, {Atom{Point{1, 0}, 1.0}});
  AsymptoticReport r1 = asymptotic_check(a, {10, 20, 40});
  CHECK(r1.bounded);
  for (std::size_t i = 1; i < r1.e.size(); ++i) CHECK(r1.e[i] / r1.e[i - 1] <= 1.1);
  // |integral of y dmu| = 1 plus the next order of the expansion
  for (std::size_t i = 0; i < r1.e.size(); ++i) CHECK(r1.e[i] <= 1.0 + 1.0 / r1.radii[i]);

  Measure pair(3, {Atom{Point{0.5, 0, 0}, 1.0}, Atom{Point{0, -0.3, 0.2}, 2.0}});
  AsymptoticReport r3 = asymptotic_check(pair, {10, 20, 40, 80});
  CHECK(r3.bounded);

  CHECK_THROWS_AS(asymptotic_check(a, {1.5}), PreconditionError);
}

TEST_CASE("lower bounds") {
  LowerBoundReport r = lower_bound_check(Measure::dirac(Point{2, 0}), Ball{Point{0, 0}, 1.0});
  CHECK(r.bound == doctest::Approx(0.0));
  CHECK(r.pass);

  Measure ring(2, {SphereLayer{Point{0, 0}, 2.0, 1.0, {}}});
  LowerBoundReport ri = lower_bound_check(ring, Ball{Point{0, 0}, 1.0});
  CHECK(ri.bound == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ri.probed_inf == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(ri.pass);

  LowerBoundReport ro = lower_bound_check(ring, Ball{Point{0, 0}, 1.0}, Point{3, 0});
  CHECK(ro.bound == doctest::Approx(-std::log(4.0)).epsilon(1e-14));
  CHECK(ro.pass);
  CHECK(ro.probed_inf >= -std::log(4.0));

  CHECK_THROWS_AS(lower_bound_check(ring - Measure::dirac(Point{0, 0}), Ball{Point{0, 0}, 1.0}),
                  PreconditionError);
}

TEST_CASE("linearity of potentials") {
  Rng rng(41);
  Measure mu(2, {BallUniform{Point{0.2, 0.1}, 0.3, 1.0}, SphereLayer{Point{-0.5, 0}, 0.25, 0.7, {}},
                 Atom{Point{0.6, -0.4}, 0.4}});
  Measure th(2, {RadialBump{Point{0, 0.5}, 0.2, 1.3}, Atom{Point{-0.2, -0.6}, 0.9}});
  for (int k = 0; k < 200; ++k) {
    const double a = rng.uniform(0.1, 3), b = rng.uniform(0.1, 3);
    Point y{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    const double lhs = potential(mu.scaled(a) + th.scaled(b))(y).value();
    const double rhs = a * potential(mu)(y).value() + b * potential(th)(y).value();
    CHECK(std::fabs(lhs - rhs) <= 1e-9);
  }
}

TEST_CASE("potentials are harmonic off the support") {
  for (int d : {2, 3}) {
    Measure mu(d, {BallUniform{Point::zero(d), 0.3, 1.0}, Atom{Point::unit(d, 0, 0.5), 0.5},
                   SphereLayer{Point::unit(d, 1, -0.4), 0.2, 0.8, {}}});
    ScalarField f = potential(mu).field();
    Rng rng(7);
    std::vector<Probe> probes;
    while (probes.size() < 40) {
      Point x(d);
      for (int a = 0; a < d; ++a) x[a] = rng.uniform(-2, 2);
      const double r = rng.uniform(0.05, 0.4);
      if (mu.distance_to_support(x) > 2 * r) probes.push_back({x, r});
    }
    CHECK(check_harmonic(f, probes, 1e-7).pass());
  }
}

TEST_CASE("riesz measure of a sampled potential recovers the mass") {
  Measure beta = convolve_balayage(Measure::dirac(Point{0.013, -0.007}, 1.7), Mollifier{0.2},
                                   Ball{Point{0, 0}, 3.0}, 0.02);
  GridDomain g = GridDomain::covering(Point{-0.5, -0.5}, Point{0.5, 0.5}, 0.02);
  for (std::size_t i = 0; i < g.size(); ++i) g.set(i, true);
  RieszResult r = riesz_measure(sample(potential(beta).field(), g));
  CHECK(r.singular_cells.empty());
  CHECK(r.measure.total_mass() == doctest::Approx(1.7).epsilon(0.03));
}

TEST_CASE("mutual energy is symmetric") {
  Rng rng(19);
  for (int k = 0; k < 5; ++k) {
    Point c{rng.uniform(1.0, 1.5), rng.uniform(-0.5, 0.5)};
    Measure mu(2, {BallUniform{Point{0, 0}, 0.3, rng.uniform(0.5, 2)}, Atom{Point{0.1, 0.4}, 0.3}});
    Measure th(2, {SphereLayer{c, 0.2, rng.uniform(0.5, 2), {}}, Atom{c + Point{0.1, 0.5}, 0.6}});
    const double a = mu.integrate(potential(th).field()).value();
    const double b = th.integrate(potential(mu).field()).value();
    CHECK(std::fabs(a - b) <= 1e-7);
  }
}
