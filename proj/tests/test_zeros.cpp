#include <cmath>
#include <vector>

#include "doctest.h"
#include "potkit/errors.hpp"
#include "potkit/green.hpp"
#include "potkit/zeros.hpp"

using namespace potkit;

namespace {

const Point kO{0, 0};
const Ball kDisk{kO, 1.0};

HoloFunction poly(std::vector<Complex> c) { return HoloFunction(Polynomial{std::move(c)}); }

// prod (z - r_k)
Polynomial from_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> a{1.0};
  for (Complex r : roots) {
    std::vector<Complex> b(a.size() + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      b[i + 1] += a[i];
      b[i] -= r * a[i];
    }
    a = b;
  }
  return {a};
}

std::vector<Complex> geometric_zeros(int n) {
  std::vector<Complex> z;
  for (int k = 1; k <= n; ++k) z.emplace_back(1.0 - std::ldexp(1.0, -k), 0.0);
  return z;
}

std::vector<Complex> harmonic_zeros(int n) {
  std::vector<Complex> z;
  for (int k = 1; k <= n; ++k) z.emplace_back(1.0 - 1.0 / k, 0.0);
  return z;
}

const HolFamilies& families_small() {
  static const HolFamilies f = hol_families(kDisk, Ball{kO, 0.05}, 0.1, -0.5, 1.0);
  return f;
}

const HolFamilies& families_green() {
  static const HolFamilies f = hol_families(kDisk, Ball{kO, 0.05}, 0.1, -1.0, std::log(20.0));
  return f;
}

}  // namespace

TEST_CASE("counting measures") {
  Measure m = counting_measure(poly({-0.25, 0.0, 1.0}), Domain(kDisk));
  CHECK(m.total_mass() == 2.0);
  CHECK(m.components().size() == 2);
  CHECK(m.distance_to_support(Point{0.5, 0}) <= 1e-15);
  CHECK(m.distance_to_support(Point{-0.5, 0}) <= 1e-15);

  auto dbl = polynomial_roots(from_roots({0.3, 0.3}));
  REQUIRE(dbl.size() == 1);
  CHECK(dbl[0].multiplicity == 2);
  CHECK(std::abs(dbl[0].z - 0.3) <= 1e-12);

  CHECK(counting_measure(poly({1.0}), Domain(kDisk)).empty());

  auto tri = polynomial_roots(from_roots({{0, 0.2}, {0, 0.2}, {0, 0.2}, -0.5}));
  REQUIRE(tri.size() == 2);
  CHECK(tri[0].multiplicity == 1);
  CHECK(tri[1].multiplicity == 3);

  // total mass equals the degree when S contains every root
  Polynomial p{{Complex(0.3, -1), 2.0, Complex(0, 1), -1.5, 0.25, 1.0, Complex(2, 2), 0.5}};
  CHECK(counting_measure(HoloFunction(p), Domain(Space{2})).total_mass() == 7.0);
  for (const auto& w : polynomial_roots(p)) CHECK(std::abs(HoloFunction(p).value(w.z)) <= 1e-10);

  // distinct but close roots are not merged
  auto close = polynomial_roots(from_roots({0.1, 0.1 + 1e-4}));
  CHECK(close.size() == 2);

  BlaschkeProduct b{geometric_zeros(10), 10};
  CHECK(counting_measure(HoloFunction(b), Domain(Ball{kO, 0.9})).total_mass() == 3.0);
  CHECK_THROWS_AS(counting_measure(HoloFunction(b), Domain(kDisk)), PreconditionError);
  CHECK_THROWS_AS(poly({0.0, 0.0}), PreconditionError);
}

TEST_CASE("Blaschke products") {
  BlaschkeProduct b{{Complex(0.5, 0.2), Complex(-0.3, 0.6), 0.0}, 3};
  HoloFunction f(b);
  for (int k = 0; k < 16; ++k) {
    const Complex u = std::polar(1.0, 2 * M_PI * k / 16);
    CHECK(std::abs(f.value(u)) == doctest::Approx(1.0).epsilon(1e-13));
    const Complex z = 0.7 * u;
    CHECK(std::abs(f.value(z)) < 1.0);
    CHECK(f.log_abs(z).value() == doctest::Approx(std::log(std::abs(f.value(z)))).epsilon(1e-12));
  }
  CHECK(f.log_abs(Complex(0.5, 0.2)).is_neg_inf());
  CHECK(blaschke_sum(BlaschkeProduct{geometric_zeros(10), 10}) == doctest::Approx(1.0 - std::ldexp(1.0, -10)));
  CHECK_THROWS_AS(HoloFunction(BlaschkeProduct{{1.0}, 1}), PreconditionError);
}

TEST_CASE("Poincare-Lelong window masses") {
  PoincareLelongReport a = poincare_lelong_check(poly({Complex(-0.5, 0.25), 1.0}), kDisk, 0.01);
  REQUIRE(a.windows.size() == 1);
  CHECK(a.windows[0].mass == doctest::Approx(1.0).epsilon(0.05));
  CHECK(a.pass);

  PoincareLelongReport b = poincare_lelong_check(HoloFunction(from_roots({0.3, 0.3})), kDisk, 0.01);
  REQUIRE(b.windows.size() == 1);
  CHECK(b.windows[0].mass == doctest::Approx(2.0).epsilon(0.05));

  PoincareLelongReport c = poincare_lelong_check(poly({1.0}), kDisk, 0.01);
  CHECK(std::fabs(c.total_mass) <= 1e-6);
  CHECK(c.pass);

  // cell centres sit at -1 + (i + 1/2) h
  CHECK_THROWS_AS(poincare_lelong_check(poly({Complex(-0.005, -0.005), 1.0}), kDisk, 0.01), RegridError);

  // A window of a fixed number of cells sees a scale-invariant stencil error.
  PoincareLelongReport h2 = poincare_lelong_check(poly({Complex(-0.5, 0.25), 1.0}), kDisk, 0.005);
  CHECK(h2.windows[0].rel_error == doctest::Approx(a.windows[0].rel_error).epsilon(0.1));
}

TEST_CASE("Poincare-Lelong refinement trend") {
  for (const HoloFunction& f : {poly({Complex(-0.5, 0.25), 1.0}), HoloFunction(from_roots({0.3, 0.3})),
                                HoloFunction(from_roots({Complex(0.1, -0.6), Complex(-0.45, 0.2)}))}) {
    PoincareLelongTrend t = poincare_lelong_trend(f, kDisk, 0.01);
    CHECK(t.pass);
    for (double r : t.ratios) CHECK(r >= 1.6);
  }
}

TEST_CASE("majorant check") {
  HoloFunction f = poly({-0.25, 0.0, 1.0});
  CHECK_NOTHROW(check_majorant(f, GrowthMajorant::constant(std::log(1.25)), kDisk));
  CHECK_THROWS_AS(check_majorant(f, GrowthMajorant::constant(0.0), kDisk), PreconditionError);
  GrowthMajorant q = GrowthMajorant::quadratic(0.1, 1.0, 0.5, kDisk);
  CHECK(q(Point{0.5, 0}).value() == doctest::Approx(0.1 + 0.125));
  CHECK(q.mu().total_mass() == doctest::Approx(1.0));
  CHECK_THROWS_AS(GrowthMajorant::quadratic(0.0, -1.0, 0.0, kDisk), PreconditionError);
}

TEST_CASE("zero distribution inequalities: polynomial") {
  HoloFunction f = poly({-0.25, 0.0, 1.0});
  const auto& fam = families_small();
  ThmHolReport r = check_thm_hol(f, GrowthMajorant::constant(std::log(1.25)), kDisk, Ball{kO, 0.05}, 0.1, -0.5,
                                 1.0, fam);
  CHECK(r.pass());
  CHECK(r.zIII.C > 0.0);
  CHECK(r.zIII.C <= 2.0 * 1.0 + 1e-12);
  // with mu_M = 0 every constant is the largest zero sum
  for (const HolStage* s : {&r.zI, &r.zII, &r.zIII}) {
    double best = -1e300;
    for (const auto& m : s->verdict.margins) {
      CHECK(m.rhs.value() == 0.0);
      best = std::max(best, m.lhs.value());
    }
    CHECK(s->C == best);
  }
  CHECK(r.layer_mass == 0.0);
  CHECK(r.implication_holds);
  CHECK(r.csv().find("ZIII,") != std::string::npos);

  CHECK_THROWS_AS(check_thm_hol(f, GrowthMajorant::constant(0.0), kDisk, Ball{kO, 0.05}, 0.1, -0.5, 1.0, fam),
                  PreconditionError);
}

TEST_CASE("zero distribution inequalities: Blaschke zeros") {
  HoloFunction f(BlaschkeProduct{geometric_zeros(10), 10});
  const auto& fam = families_green();
  ThmHolReport r =
      check_thm_hol(f, GrowthMajorant::constant(0.0), kDisk, Ball{kO, 0.05}, 0.1, -1.0, std::log(20.0), fam);
  CHECK(r.pass());
  // member 0 of the sbh+0 family is g_D(., 0) itself (b+ = max of g on dS_o)
  double expect = 0.0;
  for (Complex z : geometric_zeros(10)) expect += -std::log(std::abs(z));
  CHECK(expect == doctest::Approx(1.24109).epsilon(1e-5));
  CHECK(std::fabs(expect - 1.242) <= 2e-3);  // the untruncated sum
  REQUIRE(!r.zII.verdict.margins.empty());
  CHECK(r.zII.verdict.margins[0].lhs.value() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r.zII.C >= expect - 1e-12);
  // compact members vanish near dD and see less of the zeros
  CHECK(r.zIII.C < r.zII.C);
}

TEST_CASE("scaled families diverge when mu_M vanishes") {
  HoloFunction f = poly({-0.5, 1.0});
  HolFamilies fam = families_small();
  fam.positive.cone = true;  // v -> t v for every t > 0
  ThmHolReport r = check_thm_hol(f, GrowthMajorant::constant(std::log(1.5)), kDisk, Ball{kO, 0.05}, 0.1, -0.5,
                                 1.0, fam);
  CHECK_FALSE(r.zIII.pass);
  CHECK(std::isinf(r.zIII.C));
  CHECK(r.zII.pass);
}

TEST_CASE("subdivisor monotonicity") {
  HoloFunction f = HoloFunction(from_roots({0.5, Complex(-0.2, 0.6), Complex(-0.4, -0.4), 0.7}));
  const auto& fam = families_small();
  GrowthMajorant M = GrowthMajorant::constant(std::log(4.0));
  ThmHolReport full = check_thm_hol(f, M, kDisk, Ball{kO, 0.05}, 0.1, -0.5, 1.0, fam);
  auto zs = f.zeros();
  std::vector<Zero> sub{zs[0], zs[2]};
  ThmHolReport part = check_thm_hol(f, M, kDisk, Ball{kO, 0.05}, 0.1, -0.5, 1.0, fam, sub);
  REQUIRE(full.zIII.verdict.margins.size() == part.zIII.verdict.margins.size());
  for (std::size_t i = 0; i < full.zIII.verdict.margins.size(); ++i)
    CHECK(part.zIII.verdict.margins[i].lhs.value() <= full.zIII.verdict.margins[i].lhs.value());
  std::vector<Zero> too_many{{zs[0].z, 2}};
  CHECK_THROWS_AS(check_thm_hol(f, M, kDisk, Ball{kO, 0.05}, 0.1, -0.5, 1.0, fam, too_many), PreconditionError);
}

TEST_CASE("implication bound with a charged majorant") {
  HoloFunction f = poly({-0.25, 0.0, 1.0});
  GrowthMajorant M = GrowthMajorant::quadratic(std::log(1.25), 1.0, 0.5, kDisk);
  ThmHolReport r = check_thm_hol(f, M, kDisk, Ball{kO, 0.05}, 0.1, -0.5, 1.0, families_small());
  // |mu_M| = (1/pi) area on the annulus 0.05 < |z| < 0.35
  CHECK(r.layer_mass == doctest::Approx(0.35 * 0.35 - 0.05 * 0.05).epsilon(0.01));
  CHECK(r.implication_holds);
  CHECK(r.zII.C <= r.implication_bound + 1e-6);
  CHECK(r.pass());
}

TEST_CASE("criterium forward chain") {
  const Ball S_o{kO, 0.05};
  {
    BlaschkeProduct b{geometric_zeros(10), 10};
    HoloFunction f(b);
    CriteriumReport c = check_criterium_forward(f.zeros(), f, GrowthMajorant::constant(0.0), kDisk, S_o, 0.1,
                                                -1.0, std::log(20.0), families_green());
    CHECK(c.pass());
  }
  {
    HoloFunction f = poly({-0.25, 0.0, 1.0});
    CriteriumReport c = check_criterium_forward(f.zeros(), f, GrowthMajorant::constant(std::log(1.25)), kDisk, S_o,
                                                0.1, -0.5, 1.0, families_small());
    CHECK(c.pass());
    CHECK_THROWS_AS(check_criterium_forward({{0.5, 1}}, f, GrowthMajorant::constant(std::log(1.25)), kDisk, S_o, 0.1,
                                            -0.5, 1.0, families_small()),
                    PreconditionError);
  }
}

TEST_CASE("growth trend of zero sums") {
  const Ball S_o{kO, 0.05};
  GrowthTrend div = zero_growth_trend(harmonic_zeros(200), GrowthMajorant::constant(0.0), S_o, {25, 50, 100, 200},
                                      families_green());
  CHECK(div.divergent);
  for (std::size_t i = 1; i < div.C.size(); ++i) CHECK(div.C[i] > div.C[i - 1]);
  CHECK(div.blaschke_sums.back() > div.blaschke_sums.front() + 2.0);

  GrowthTrend conv = zero_growth_trend(geometric_zeros(40), GrowthMajorant::constant(0.0), S_o, {10, 20, 30, 40},
                                       families_green());
  CHECK_FALSE(conv.divergent);
  CHECK(conv.blaschke_sums.back() < 1.0);
}
