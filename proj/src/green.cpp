#include "potkit/green.hpp"

#include <algorithm>
#include <cmath>

#include "potkit/errors.hpp"
#include "potkit/kernels.hpp"

namespace potkit {

GreenModel::GreenModel(Ball domain, Point pole) : D_(std::move(domain)), o_(pole) {
  if (dim() != 2 && dim() != 3) throw PreconditionError("Green's functions are provided for d = 2, 3");
  if (!(distance(o_, D_.center) < D_.radius))
    throw PreconditionError("Green pole must lie inside the ball");
}

ExtReal GreenModel::two_point(const Ball& D, const Point& x, const Point& y) {
  const int d = x.dim();
  Point z = (x - D.center) / D.radius;
  Point w = (y - D.center) / D.radius;
  const double z2 = z.norm2(), w2 = w.norm2();
  if (z2 >= 1.0 || w2 >= 1.0) return ExtReal(0.0);
  const double r = distance(z, w);
  if (r == 0.0) return ExtReal::pos_inf();
  const double q = 1.0 - 2.0 * z.dot(w) + z2 * w2;
  double g = 0.0;
  if (d == 2) {
    g = 0.5 * std::log(q) - std::log(r);
  } else {
    g = std::pow(D.radius, 2 - d) * (std::pow(r, 2 - d) - std::pow(q, 0.5 * (2 - d)));
  }
  return ExtReal(std::max(g, 0.0));
}

ScalarField GreenModel::field() const {
  Ball D = D_;
  Point o = o_;
  ScalarField f(Space{dim()}, [D, o](const Point& x) { return two_point(D, x, o); });
  f.with_pole(o_).named("green");
  return f;
}

GreenModel green_ball(const Point& x0, double R, const Point& o, int d) {
  if (x0.dim() != d || o.dim() != d) throw PreconditionError("green_ball: dimension mismatch");
  return GreenModel(Ball{x0, R}, o);
}

double mg_constant(const GreenModel& green, const Domain& S_o) {
  const Point& o = green.pole();
  if (!S_o.contains(o)) throw PreconditionError("mg_constant: pole not interior to S_o");
  Ball sb = S_o.bounding_ball();
  if (!(distance(sb.center, green.domain().center) + sb.radius < green.domain().radius))
    throw PreconditionError("mg_constant: S_o is not compactly inside D");
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : S_o.boundary_samples(720)) m = std::min(m, green(p).to_double());
  if (!(m > 0.0)) throw PreconditionError("mg_constant: nonpositive minimum (geometry violation)");
  return m;
}

Measure harmonic_measure(const Ball& D, const Point& x) {
  if (!(distance(x, D.center) < D.radius)) throw PreconditionError("harmonic_measure: x not in D");
  Measure m(x.dim());
  SphereLayer s{D.center, D.radius, 1.0, std::nullopt};
  if (distance(x, D.center) > 0.0) s.poisson_pole = x;
  m.add(s);
  return m;
}

Measure jensen_measure(const Ball& D, const Point& x, const JensenKind& kind) {
  if (!(distance(x, D.center) < D.radius)) throw PreconditionError("jensen_measure: x not in D");
  if (const auto* mix = std::get_if<JensenMixture>(&kind)) {
    if (mix->a < 0.0 || mix->b < 0.0 || std::fabs(mix->a + mix->b - 1.0) > 1e-12)
      throw PreconditionError("jensen_measure: weights must satisfy a, b >= 0, a + b = 1");
    Measure m(x.dim());
    if (mix->a > 0.0) m.add(Atom{x, mix->a});
    if (mix->b > 0.0) m = m + harmonic_measure(D, x).scaled(mix->b);
    return m;
  }
  if (const auto* mol = std::get_if<JensenMollified>(&kind)) {
    if (!(mol->r > 0.0) || !(distance(x, D.center) + mol->r < D.radius))
      throw PreconditionError("jensen_measure: mollifier ball must lie compactly in D");
    Measure m(x.dim());
    m.add(RadialBump{x, mol->r, 1.0});
    return m;
  }
  const auto& sub = std::get<JensenSubBalls>(kind);
  double total = 0.0;
  Measure m(x.dim());
  for (const auto& [B, w] : sub.balls) {
    if (w < 0.0) throw PreconditionError("jensen_measure: negative sub-ball weight");
    if (!(distance(x, B.center) < B.radius))
      throw PreconditionError("jensen_measure: x outside a sub-ball");
    if (!(distance(B.center, D.center) + B.radius < D.radius))
      throw PreconditionError("jensen_measure: sub-ball not compactly inside D");
    total += w;
    m = m + harmonic_measure(B, x).scaled(w);
  }
  if (std::fabs(total - 1.0) > 1e-12) throw PreconditionError("jensen_measure: weights must sum to 1");
  return m;
}

}  // namespace potkit
