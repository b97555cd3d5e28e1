#include "potkit/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "potkit/errors.hpp"

namespace potkit {

Potential::Potential(Measure mu, QuadratureOptions q)
    : mu_(std::move(mu)), plus_(mu_.dim()), minus_(mu_.dim()), q_(q) {
  auto [p, n] = mu_.jordan();
  plus_ = std::move(p);
  minus_ = std::move(n);
}

Potential Potential::difference(const Measure& mu, const Measure& theta, QuadratureOptions q) {
  Potential p(mu - theta, q);
  auto [mp, mn] = mu.jordan();
  auto [tp, tn] = theta.jordan();
  p.plus_ = mp + tn;
  p.minus_ = mn + tp;
  return p;
}

ExtReal Potential::operator()(const Point& y) const {
  if (y.dim() != dim()) throw DomainError("potential evaluated at a point of wrong dimension");
  ExtReal a = plus_.empty() ? ExtReal(0.0) : plus_.kernel_integral(y, q_);
  ExtReal b = minus_.empty() ? ExtReal(0.0) : minus_.kernel_integral(y, q_);
  return a - b;
}

ExtReal Potential::at_infinity() const {
  const double m = mu_.total_mass();
  const double scale = std::max(1.0, mu_.total_variation());
  if (std::fabs(m) <= 1e-12 * scale) return ExtReal(0.0);
  if (dim() >= 3) return ExtReal(0.0);
  return m > 0 ? ExtReal::pos_inf() : ExtReal::neg_inf();
}

ScalarField Potential::field() const {
  Potential self = *this;
  ScalarField f(Space{dim()}, [self](const Point& y) { return self(y); });
  bool atomic = true;
  KernelExpansion k;
  for (const auto& c : mu_.components()) {
    if (const auto* a = std::get_if<Atom>(&c)) {
      k.terms.emplace_back(a->at, a->weight);
    } else {
      atomic = false;
    }
  }
  if (atomic) f.with_kernel_form(std::move(k));
  f.named("potential");
  return f;
}

Potential potential(const Measure& mu, const QuadratureOptions& q) { return Potential(mu, q); }

Potential difference_potential(const Measure& mu, const Measure& theta, const QuadratureOptions& q) {
  if (mu.dim() != theta.dim()) throw PreconditionError("difference_potential: dimension mismatch");
  return Potential::difference(mu, theta, q);
}

AsymptoticReport asymptotic_check(const Measure& mu, const std::vector<double>& radii) {
  const int d = mu.dim();
  Ball s = mu.support_ball();
  const double reach = s.center.norm() + s.radius;
  Potential pt(mu);
  const double mass = mu.total_mass();
  const auto dirs = sphere_directions(d, 16);
  AsymptoticReport rep;
  for (double R : radii) {
    if (!(R >= 2.0 * reach)) throw PreconditionError("asymptotic_check: radius inside twice the support radius");
    double e = 0.0;
    for (const auto& u : dirs) {
      ExtReal v = pt(R * u);
      e = std::max(e, std::fabs(v.value() - mass * k_eval(d - 2, R)) * std::pow(R, d - 1));
    }
    rep.radii.push_back(R);
    rep.e.push_back(e);
  }
  for (std::size_t i = 1; i < rep.e.size(); ++i)
    if (rep.e[i] > 1.1 * rep.e[i - 1] + 1e-12) rep.bounded = false;
  return rep;
}

namespace {

// Probe points of the closed ball L: centre plus 12 shells.
std::vector<Point> ball_probes(const Ball& L) {
  const int d = L.center.dim();
  std::vector<Point> out{L.center};
  const auto dirs = sphere_directions(d, d == 2 ? 64 : 128);
  for (int k = 1; k <= 12; ++k)
    for (const auto& u : dirs) out.push_back(L.center + (L.radius * k / 12.0) * u);
  return out;
}

LowerBoundReport probe_inf(const Potential& pt, const Ball& L, double bound) {
  LowerBoundReport rep;
  rep.bound = bound;
  rep.probed_inf = std::numeric_limits<double>::infinity();
  for (const auto& x : ball_probes(L)) {
    const double v = pt(x).to_double();
    if (v < rep.probed_inf) {
      rep.probed_inf = v;
      rep.witness = x;
    }
  }
  rep.pass = rep.probed_inf >= bound - 1e-9;
  return rep;
}

double radial_k(int d, double t) { return t == 0.0 ? (d >= 2 ? -INFINITY : 0.0) : k_eval(d - 2, t); }

}  // namespace

LowerBoundReport lower_bound_check(const Measure& mu, const Ball& L) {
  if (!mu.is_positive()) throw PreconditionError("lower_bound_check needs a positive measure");
  const int d = mu.dim();
  const double bound = mu.total_mass() * radial_k(d, mu.distance_to_support(L));
  return probe_inf(Potential(mu), L, bound);
}

LowerBoundReport lower_bound_check(const Measure& mu, const Ball& L, const Point& o) {
  if (!mu.is_positive()) throw PreconditionError("lower_bound_check needs a positive measure");
  if (distance(o, L.center) <= L.radius) throw PreconditionError("lower_bound_check: o lies in L");
  const int d = mu.dim();
  const double sup = distance(o, L.center) + L.radius;
  const double bound = mu.total_mass() * radial_k(d, mu.distance_to_support(L)) - radial_k(d, sup);
  return probe_inf(Potential::difference(mu, Measure::dirac(o)), L, bound);
}

}  // namespace potkit
