#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "potkit/balayage.hpp"
#include "potkit/duality.hpp"
#include "potkit/errors.hpp"
#include "potkit/green.hpp"

using namespace potkit;

namespace {

ASPotential as_potential(const Measure& mu, const Point& x, PotentialKind kind) {
  Certificate c = certify(mu, x, kind);
  REQUIRE_MESSAGE(c.verdict.pass, c.verdict.witness_id);
  return to_potential(mu, x, c);
}

// Ten positive smooth probes.
std::vector<std::function<double(const Point&)>> probes(int d) {
  std::vector<std::function<double(const Point&)>> out;
  out.push_back([](const Point&) { return 1.0; });
  for (int a = 0; a < 2; ++a) out.push_back([a](const Point& p) { return 2.0 + p[a]; });
  out.push_back([](const Point& p) { return 1.0 + p[0] * p[0]; });
  out.push_back([](const Point& p) { return 1.0 + p[0] * p[1]; });
  out.push_back([d](const Point& p) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += p[a] * p[a];
    return std::exp(-s);
  });
  for (double c : {0.3, -0.4}) out.push_back([c](const Point& p) { return std::exp(-4.0 * (p[0] - c) * (p[0] - c)); });
  out.push_back([](const Point& p) { return 1.5 + std::sin(2.0 * p[0] + p[1]); });
  out.push_back([](const Point& p) { return 1.0 / (1.0 + p[0] * p[0] + 2.0 * p[1] * p[1]); });
  return out;
}

double integral(const Measure& mu, const std::function<double(const Point&)>& f) {
  double s = 0.0;
  for (const auto& [z, w] : discretize(mu)) s += w * f(z);
  return s;
}

// Worst relative probe error of the round trip at spacing h.
double round_trip_error(const ASPotential& V, const Measure& mu, double h) {
  RecoveredMeasure rec = from_potential(V, h);
  double worst = 0.0;
  for (const auto& f : probes(mu.dim())) {
    const double a = integral(mu, f), b = integral(rec.measure, f);
    worst = std::max(worst, std::fabs(a - b) / std::fabs(a));
  }
  return worst;
}

}  // namespace

TEST_CASE("to_potential of harmonic measure and of a point mass") {
  const Point o{0, 0};
  ASPotential V = as_potential(harmonic_measure(Ball{o, 1.0}, o), o, PotentialKind::ArensSinger);
  for (double t : {0.1, 0.5, 0.9, 1.2, 3.0}) {
    const Point y{t * 0.6, t * 0.8};
    CHECK(V.field(y).value() == doctest::Approx(std::max(0.0, -std::log(t))).epsilon(1e-9).scale(1.0));
  }
  CHECK(V.pole_coefficient == doctest::Approx(1.0).epsilon(1e-6));

  const Point x{0.3, -0.2};
  ASPotential Z = as_potential(Measure::dirac(x), x, PotentialKind::ArensSinger);
  CHECK(Z.field(Point{0.7, 0.1}).value() == 0.0);
  CHECK(std::fabs(Z.pole_coefficient) <= 1e-12);

  Measure wrong = harmonic_measure(Ball{o, 1.0}, Point{0.5, 0});
  CHECK_THROWS_AS(to_potential(wrong, o, certify(harmonic_measure(Ball{o, 1.0}, o), o, PotentialKind::ArensSinger)),
                  PreconditionError);
  CHECK_FALSE(certify(wrong, o, PotentialKind::ArensSinger).verdict.pass);
}

TEST_CASE("Jensen potentials are nonnegative") {
  const Point o{0, 0};
  const Ball D{o, 1.0};
  for (const JensenKind& k : {JensenKind{JensenMollified{0.1}}, JensenKind{JensenMixture{0.3, 0.7}}}) {
    Measure mu = jensen_measure(D, o, k);
    ASPotential V = as_potential(mu, o, PotentialKind::Jensen);
    double lo = 1e300;
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j) {
        const Point y{-1.2 + 2.4 * (i + 0.5) / 40, -1.2 + 2.4 * (j + 0.5) / 40};
        lo = std::min(lo, V.field(y).value());
      }
    CHECK(lo >= -1e-9);
  }
  // An Arens-Singer measure that is not Jensen: positivity fails at the atom.
  auto ex = lyons_example(2, 0.3, 0.9, 0.6, 4, 0.05);
  CHECK(certify(ex.mu_E, o, PotentialKind::ArensSinger).verdict.pass);
  CHECK_FALSE(certify(ex.mu_E, o, PotentialKind::Jensen).verdict.pass);
}

TEST_CASE("from_potential examples") {
  const Point o{0, 0};
  const Ball D{o, 1.0};
  ASPotential g = make_potential(GreenModel(D, o).field(), o, D, PotentialKind::Jensen);
  CHECK(g.pole_coefficient == doctest::Approx(1.0).epsilon(1e-6));
  Measure omega = harmonic_measure(D, o);
  for (double h : {0.02, 0.01}) {
    RecoveredMeasure rec = from_potential(g, h);
    CHECK(std::fabs(rec.atom) <= 1e-6);
    CHECK(rec.measure.total_mass() == doctest::Approx(1.0).epsilon(0.03));
    CHECK(round_trip_error(g, omega, h) <= 0.02);
  }

  ASPotential half = g.scaled(0.5);
  RecoveredMeasure rh = from_potential(half, 0.02);
  CHECK(rh.atom == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rh.measure.total_mass() == doctest::Approx(1.0).epsilon(0.03));
  const Measure expect = omega.scaled(0.5) + Measure::dirac(o, 0.5);
  CHECK(round_trip_error(half, expect, 0.02) <= 0.02);

  ASPotential zero = make_potential(ScalarField::constant(Space{2}, 0.0), o, Ball{o, 0.1}, PotentialKind::ArensSinger);
  RecoveredMeasure rz = from_potential(zero, 0.02);
  CHECK(rz.atom == doctest::Approx(1.0));
  CHECK(std::fabs(rz.measure.total_mass() - 1.0) <= 1e-12);

  CHECK_THROWS_AS(from_potential(g, 0.0), PreconditionError);
}

TEST_CASE("round trip for Arens-Singer and Jensen measures") {
  const Point o2{0, 0}, o3{0, 0, 0};
  const Ball D2{o2, 1.0};
  struct Case {
    Measure mu;
    Point x;
    PotentialKind kind;
  };
  const Point x{0.2, 0.1};
  // Atoms must avoid cell centres (the pole sits on one, so 0.6 would not).
  auto lyons = lyons_example(2, 0.3, 0.9, 0.6037, 4, 0.05);
  auto shifted = lyons_example(2, 0.25, 0.85, 0.55, 3, 0.07);
  std::vector<Case> cases = {
      {harmonic_measure(D2, o2), o2, PotentialKind::ArensSinger},
      {harmonic_measure(D2, x), x, PotentialKind::ArensSinger},
      {lyons.mu_E, o2, PotentialKind::ArensSinger},
      {shifted.mu_E, o2, PotentialKind::ArensSinger},
      {Measure(2, {SphereLayer{o2, 0.6, 0.5, {}}, SphereLayer{o2, 0.9, 0.5, {}}}), o2, PotentialKind::ArensSinger},
      {jensen_measure(D2, o2, JensenMixture{0.4, 0.6}), o2, PotentialKind::Jensen},
      {jensen_measure(D2, o2, JensenMollified{0.1}), o2, PotentialKind::Jensen},
      {jensen_measure(D2, x, JensenMollified{0.2}), x, PotentialKind::Jensen},
      {Measure(2, {BallUniform{o2, 0.7, 1.0}}), o2, PotentialKind::Jensen},
      {jensen_measure(D2, o2, JensenSubBalls{{{Ball{o2, 0.5}, 0.5}, {Ball{Point{0.1, 0}, 0.8}, 0.5}}}), o2,
       PotentialKind::Jensen},
  };
  int k = 0;
  for (const auto& c : cases) {
    CAPTURE(k);
    ASPotential V = as_potential(c.mu, c.x, c.kind);
    const double e1 = round_trip_error(V, c.mu, 0.02);
    const double e2 = round_trip_error(V, c.mu, 0.01);
    CHECK(e1 <= 0.02);
    CHECK(e2 < e1);
    CHECK(from_potential(V, 0.02).measure.total_mass() == doctest::Approx(c.mu.total_mass()).epsilon(0.03));
    ++k;
  }

  // one 3D case
  ASPotential V3 = as_potential(harmonic_measure(Ball{o3, 1.0}, o3), o3, PotentialKind::Jensen);
  CHECK(round_trip_error(V3, harmonic_measure(Ball{o3, 1.0}, o3), 0.05) <= 0.05);
}

TEST_CASE("classical Poisson-Jensen instance") {
  auto inst = standard_pj_instances();
  REQUIRE(inst.size() == 12);
  PoissonJensenReport r = verify_poisson_jensen(inst[0].theta, inst[0].mu, inst[0].u);
  CHECK(r.int_u_theta.value() == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(std::fabs(r.int_u_mu.value()) <= 1e-9);
  // pt_mu - pt_theta at a is the Green function g(a, 0) = ln 2.
  CHECK((r.pt_mu_dRiesz.value() - r.pt_theta_dRiesz.value()) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(r.pass);
  CHECK(r.rearranged_checked);
  CHECK(r.text().find("PASS") != std::string::npos);
}

TEST_CASE("Poisson-Jensen identity on all instances") {
  for (const auto& i : standard_pj_instances()) {
    CAPTURE(i.name);
    PoissonJensenReport r = verify_poisson_jensen(i.theta, i.mu, i.u);
    CHECK_MESSAGE(r.pass, r.text());
    CHECK(r.rel_error <= 1e-6);
  }
  // harmonic u: both potential integrals vanish
  auto inst = standard_pj_instances();
  PoissonJensenReport h = verify_poisson_jensen(inst[3].theta, inst[3].mu, inst[3].u);
  CHECK(h.pt_mu_dRiesz.value() == 0.0);
  CHECK(h.pt_theta_dRiesz.value() == 0.0);
  CHECK(h.int_u_theta.value() == doctest::Approx(h.int_u_mu.value()).epsilon(1e-9));

  // without the balayage relation the precondition fails
  const Point o{0, 0};
  CHECK_THROWS_AS(verify_poisson_jensen(harmonic_measure(Ball{o, 1.0}, o), Measure::dirac(Point{0.4, 0}), inst[0].u),
                  PreconditionError);
}

TEST_CASE("Phragmen-Lindelof bound") {
  const Point o{0, 0};
  const Ball D{o, 1.0};
  GreenModel g(D, o);
  ASPotential Vg = make_potential(g.field(), o, D, PotentialKind::Jensen);
  PhragmenLindelofReport eq = phragmen_lindelof_bound(Vg, g, Ball{o, 0.2}, 0.1);
  CHECK(eq.probes == 500);
  CHECK(eq.pass());
  CHECK(std::fabs(eq.worst_upper_margin) <= 1e-12);

  ASPotential V = as_potential(harmonic_measure(Ball{o, 0.9}, o), o, PotentialKind::Jensen);
  PhragmenLindelofReport r = phragmen_lindelof_bound(V, g, Ball{o, 0.2}, 0.1);
  CHECK(r.pass());
  CHECK(r.worst_upper_margin >= -1e-9);
  for (double t : {0.05, 0.3, 0.89, 0.95}) {
    const Point y{0.0, t};
    CHECK(V.field(y).value() == doctest::Approx(std::max(0.0, std::log(0.9 / t))).epsilon(1e-9).scale(1.0));
  }
  CHECK(r.lower_checked);
  CHECK(r.lower_bound == doctest::Approx(std::log(0.4) - std::log(0.5)).epsilon(1e-12));
  CHECK(r.probed_inf >= r.lower_bound);

  CHECK_THROWS_AS(phragmen_lindelof_bound(V.scaled(1.5), g, Ball{o, 0.2}, 0.1), PreconditionError);
}
