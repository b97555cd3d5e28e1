#include "potkit/geometry.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "potkit/errors.hpp"

namespace potkit {

ExtPoint inversion(const Point& x, const Point& o) {
  Point v = x - o;
  double n2 = v.norm2();
  if (n2 == 0.0) return ExtPoint::infinity(x.dim());
  return ExtPoint(o + v / n2);
}

ExtPoint inversion(const ExtPoint& x, const Point& o) {
  if (x.is_infinity()) return ExtPoint(o);
  return inversion(x.point(), o);
}

Domain invert_domain(const Domain& dom, const Point& o, bool& image_has_pole) {
  image_has_pole = false;
  const double inf = std::numeric_limits<double>::infinity();
  if (const auto* b = dom.ball()) {
    double c = distance(b->center, o);
    if (c > b->radius) {
      double den = c * c - b->radius * b->radius;
      return Ball{o + (b->center - o) / den, b->radius / den};
    }
    if (c == 0.0) return Annulus{o, 1.0 / b->radius, inf};
    throw PreconditionError("inversion of a ball containing o off-centre is unbounded");
  }
  if (const auto* a = dom.annulus()) {
    if (distance(a->center, o) != 0.0)
      throw PreconditionError("only annuli centred at the inversion point are supported");
    if (std::isinf(a->outer)) {
      image_has_pole = true;
      return Ball{o, 1.0 / a->inner};
    }
    return Annulus{o, 1.0 / a->outer, 1.0 / a->inner};
  }
  if (std::holds_alternative<Space>(dom.shape())) {
    image_has_pole = true;
    return dom;
  }
  throw PreconditionError("inversion of grid domains is not supported");
}

ScalarField kelvin_transform(const ScalarField& u, const Point& o, int d) {
  if (d < 2) throw PreconditionError("kelvin_transform requires d >= 2");
  if (u.domain().contains(o)) throw PreconditionError("kelvin_transform: o lies in the domain of u");
  bool pole = false;
  Domain image = invert_domain(u.domain(), o, pole);
  ScalarField v(image, [u, o, d](const Point& y) -> ExtReal {
    Point w = y - o;
    double n2 = w.norm2();
    if (n2 == 0.0) throw DomainError("kelvin transform evaluated at the centre of inversion");
    ExtReal val = u.eval_unchecked(o + w / n2);
    return std::pow(n2, 0.5 * (2 - d)) * val;
  });
  v.with_pole(o);
  v.named("kelvin(" + u.name() + ")");
  return v;
}

Domain parallel_set(const Domain& base, double r) {
  if (!(r > 0.0)) throw PreconditionError("parallel_set requires r > 0");
  if (const auto* b = base.ball()) return Ball{b->center, b->radius + r};
  if (const auto* a = base.annulus()) {
    if (a->inner - r <= 0.0) return Ball{a->center, a->outer + r};
    return Annulus{a->center, a->inner - r, a->outer + r};
  }
  if (std::holds_alternative<Space>(base.shape())) return base;

  const auto& g = *base.grid();
  const double h = g.spacing();
  const int pad = static_cast<int>(std::ceil(r / h));
  const int d = g.dim();
  std::vector<int> shape = g.shape();
  Point origin = g.origin();
  for (int a = 0; a < d; ++a) {
    shape[static_cast<std::size_t>(a)] += 2 * pad;
    origin[a] -= pad * h;
  }
  GridDomain out(origin, h, shape);
  const double reach2 = (r / h) * (r / h) * (1.0 + 1e-12);
  // Offsets of the discrete ball of radius r/h (centre-to-centre distance <= r).
  std::vector<std::array<int, kMaxDim>> offs;
  std::array<int, kMaxDim> o{};
  const int span = 2 * pad + 1;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(span);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t t = k;
    double s2 = 0.0;
    for (int a = 0; a < d; ++a) {
      o[a] = static_cast<int>(t % static_cast<std::size_t>(span)) - pad;
      t /= static_cast<std::size_t>(span);
      s2 += double(o[a]) * o[a];
    }
    if (s2 <= reach2) offs.push_back(o);
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.masked(i)) continue;
    auto ijk = g.multi_index(i);
    for (const auto& off : offs) {
      std::array<int, kMaxDim> n{};
      for (int a = 0; a < d; ++a) n[a] = ijk[a] + pad + off[a];
      out.set(out.index(n), true);
    }
  }
  return out;
}

GridDomain inward_filled_hull(const GridDomain& K, const GridDomain& O) {
  if (!K.same_frame(O)) throw PreconditionError("inward_filled_hull: K and O must share a frame");
  for (std::size_t i = 0; i < K.size(); ++i) {
    if (!K.masked(i)) continue;
    if (!O.masked(i)) throw PreconditionError("inward_filled_hull: K is not contained in O");
    if (O.is_boundary_cell(i))
      throw PreconditionError("inward_filled_hull: K touches the boundary of O");
  }
  // Flood O \ K from everything adjacent to the complement of O or the frame.
  std::vector<std::uint8_t> reached(O.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < O.size(); ++i) {
    if (!O.masked(i) || K.masked(i)) continue;
    if (O.is_boundary_cell(i)) {
      reached[i] = 1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    for (auto n : O.neighbours(i)) {
      if (reached[n] || !O.masked(n) || K.masked(n)) continue;
      reached[n] = 1;
      queue.push_back(n);
    }
  }
  GridDomain hull = K;
  for (std::size_t i = 0; i < O.size(); ++i)
    if (O.masked(i) && !reached[i]) hull.set(i, true);
  return hull;
}

}  // namespace potkit
