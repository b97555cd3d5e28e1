#include <cmath>

#include "doctest.h"
#include "potkit/errors.hpp"
#include "potkit/fields.hpp"
#include "potkit/kernels.hpp"
#include "potkit/quadrature.hpp"

using namespace potkit;

TEST_CASE("k_eval cases") {
  CHECK(k_eval(0, std::exp(1.0)) == doctest::Approx(1.0));
  CHECK(k_eval(1, 2) == doctest::Approx(-0.5));
  CHECK(k_eval(-1, 3) == doctest::Approx(3.0));
  CHECK_THROWS_AS(k_eval(0, 0.0), DomainError);
  CHECK_THROWS_AS(k_eval(1, -1.0), DomainError);
}

TEST_CASE("k_eval strictly increasing") {
  Rng rng(3);
  for (int k = 0; k < 400; ++k) {
    const double t1 = rng.uniform(1e-3, 10), t2 = t1 + rng.uniform(1e-6, 5);
    for (double q : {-1.0, 0.0, 1.0, 2.0}) CHECK(k_eval(q, t1) < k_eval(q, t2));
  }
}

TEST_CASE("riesz kernel diagonal conventions") {
  CHECK(riesz_kernel({2}, Point{0, 0}, Point{2, 0}).value() == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(riesz_kernel({3}, Point{1, 2, 3}, Point{1, 2, 3}).is_neg_inf());
  CHECK(riesz_kernel({1}, Point{0.3}, Point{0.3}).value() == 0.0);
  CHECK(riesz_kernel({1}, Point{0.0}, Point{2.0}).value() == doctest::Approx(2.0));
}

TEST_CASE("riesz kernel symmetric") {
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const int d = 1 + k % 3;
    Point x(d), y(d);
    for (int a = 0; a < d; ++a) {
      x[a] = rng.uniform(-2, 2);
      y[a] = rng.uniform(-2, 2);
    }
    KernelConfig cfg{d};
    CHECK(riesz_kernel(cfg, x, y) == riesz_kernel(cfg, y, x));
  }
}

TEST_CASE("normalizing constants") {
  CHECK(riesz_normalizer(2) == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-14));
  CHECK(riesz_normalizer(3) == doctest::Approx(1.0 / (4 * M_PI)).epsilon(1e-14));
  CHECK(riesz_normalizer(1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(unit_ball_volume(0) == 1.0);
  CHECK(unit_ball_volume(1) == 2.0);
  CHECK(unit_ball_volume(2) == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.18879).epsilon(1e-6));
  for (int d = 1; d <= 8; ++d)
    CHECK(std::fabs(sphere_area(d) * riesz_normalizer(d) * std::max(1, d - 2) - 1.0) <= 1e-14);
}

TEST_CASE("kernel is subharmonic, harmonic off the pole") {
  for (int d : {2, 3}) {
    Point y = Point::unit(d, 0, 0.37);
    Point c = Point::zero(d);
    Domain box = Ball{c, 2.0};
    ScalarField K = ScalarField::kernel(box, y);
    K.with_pole(y);
    auto probes = random_probes(K, Ball{c, 1.5}, 100, 17, 0.02);
    CHECK(check_subharmonic(K, probes).pass());
    std::vector<Probe> off;
    for (const auto& p : probes)
      if (distance(p.x, y) > p.r * 1.2) off.push_back(p);
    auto rep = check_harmonic(K, off, 1e-8);
    CHECK(rep.pass());
  }
}
