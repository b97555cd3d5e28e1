#include "potkit/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "potkit/errors.hpp"
#include "potkit/kernels.hpp"
#include "potkit/quadrature.hpp"

namespace potkit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double cube_distance(const Point& p, const Point& c, double half) {
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    double e = std::max(0.0, std::fabs(p[i] - c[i]) - half);
    s += e * e;
  }
  return std::sqrt(s);
}

double cube_far_distance(const Point& p, const Point& c, double half) {
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    double e = std::fabs(p[i] - c[i]) + half;
    s += e * e;
  }
  return std::sqrt(s);
}

const Rule& layer_rule(int d, const QuadratureOptions& q) {
  return d == 2 ? sphere_rule(2, q.sphere_nodes_2d) : sphere_rule(d, q.sphere_gauss_3d);
}

const Rule& solid_rule(int d, const QuadratureOptions& q) {
  return ball_rule(d, q.ball_radial, d == 2 ? q.ball_angular_2d : q.ball_gauss_3d);
}

// Odd extension of the antiderivative of ln sqrt(s^2 + t^2) over [0,a] x [0,b].
double log_rect_corner(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  double sa = a < 0 ? -1.0 : 1.0;
  double sb = b < 0 ? -1.0 : 1.0;
  a = std::fabs(a);
  b = std::fabs(b);
  double v = 0.5 * (a * b * std::log(a * a + b * b) - 3.0 * a * b + a * a * std::atan(b / a) +
                    b * b * std::atan(a / b));
  return sa * sb * v;
}

// Integral of ln|x - y| over the square centred at c with side h (d = 2).
double log_cell_integral(const Point& c, double h, const Point& y) {
  double x1 = c[0] - 0.5 * h - y[0], x2 = c[0] + 0.5 * h - y[0];
  double y1 = c[1] - 0.5 * h - y[1], y2 = c[1] + 0.5 * h - y[1];
  return log_rect_corner(x2, y2) - log_rect_corner(x1, y2) - log_rect_corner(x2, y1) +
         log_rect_corner(x1, y1);
}

// Integral of -1/|x - y| over the cube centred at c with side h (d = 3), by
// recursive 5^3 midpoint refinement around the singular point.
double newton_cube_integral(const Point& c, double h, const Point& y, int depth) {
  if (depth == 0 || cube_distance(y, c, 0.5 * h) > 1.5 * h) {
    double r = distance(c, y);
    if (r < 1e-300) {
      // Cube centred on the singularity: -h^2 * integral of 1/|x| over the unit cube.
      return -2.3800772754370 * h * h;
    }
    if (depth > 0) return -h * h * h / r;
    // Last level: use the exact centred value when the point is inside, midpoint otherwise.
    if (cube_distance(y, c, 0.5 * h) == 0.0) return -2.3800772754370 * h * h;
    return -h * h * h / r;
  }
  const double s = h / 5.0;
  double acc = 0.0;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      for (int k = -2; k <= 2; ++k) {
        Point cc{c[0] + i * s, c[1] + j * s, c[2] + k * s};
        acc += newton_cube_integral(cc, s, y, depth - 1);
      }
  return acc;
}

double abs_segment_integral(double u, double w) {
  auto g = [](double t) { return 0.5 * t * std::fabs(t); };
  return g(w) - g(u);
}

double cell_kernel_integral(int d, const Point& c, double h, const Point& y) {
  if (d == 1) return abs_segment_integral(c[0] - 0.5 * h - y[0], c[0] + 0.5 * h - y[0]);
  if (d == 2) return log_cell_integral(c, h, y);
  if (d == 3) return newton_cube_integral(c, h, y, 4);
  throw PreconditionError("grid density potentials implemented for d <= 3");
}

double bump_profile(double rho, double r) {
  double t = 1.0 - (rho * rho) / (r * r);
  return t > 0.0 ? t * t * t * t : 0.0;
}

double beta_fn(double a, double b) { return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b); }

ExtReal sphere_layer_pt(const SphereLayer& s, int d, const Point& y, const QuadratureOptions& q) {
  const double dist_c = distance(y, s.center);
  if (!s.poisson_pole) return s.total * k_eval(d - 2, std::max(dist_c, s.radius));
  const double gap = std::fabs(dist_c - s.radius);
  const Rule* rule = &layer_rule(d, q);
  Rule focused;
  if (d >= 2 && gap < 0.5 * s.radius && dist_c > 0.0) {
    focused = focused_sphere_rule((y - s.center) / dist_c);
    rule = &focused;
  }
  ExtReal acc(0.0);
  for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
    Point z = s.center + s.radius * rule->nodes[i];
    double w = rule->weights[i] * poisson_kernel(s.center, s.radius, *s.poisson_pole, z);
    acc += (s.total * w) * radial_kernel(d, distance(z, y));
  }
  return acc;
}

double ball_uniform_pt(const BallUniform& b, int d, const Point& y) {
  const double s = distance(y, b.center);
  const double R = b.radius;
  if (s >= R) return b.total * k_eval(d - 2, s);
  if (d == 1) return b.total * (s * s + R * R) / (2.0 * R);
  if (d == 2) return b.total * (std::log(R) - (R * R - s * s) / (2.0 * R * R));
  return -b.total * (d * R * R - (d - 2) * s * s) / (2.0 * std::pow(R, d));
}

double bump_pt(const RadialBump& b, int d, const Point& y) {
  const double s = distance(y, b.center);
  const double r = b.radius;
  if (s >= r) return b.total * k_eval(d - 2, s);
  const double z = Mollifier::normalization(d, r) / sphere_area(d);
  double inner = 0.0;
  if (s > 0.0) {
    Rule1D g = gauss_legendre(12, 0.0, s);
    for (std::size_t i = 0; i < g.x.size(); ++i)
      inner += g.w[i] * bump_profile(g.x[i], r) * std::pow(g.x[i], d - 1);
    inner *= k_eval(d - 2, s);
  }
  double outer = 0.0;
  Rule1D g = s > 0.25 * r ? gauss_legendre(16, s, r) : graded_gauss(12, 30, s, r);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    double rho = g.x[i];
    outer += g.w[i] * bump_profile(rho, r) * std::pow(rho, d - 1) * k_eval(d - 2, rho);
  }
  return b.total * (inner + outer) / z;
}

double grid_density_pt(const GridDensity& g, int d, const Point& y) {
  const auto& grid = g.grid;
  const double h = grid.spacing();
  const double vol = grid.cell_volume();
  std::array<double, kMaxDim> fy{};
  for (int a = 0; a < d; ++a) fy[a] = (y[a] - grid.origin()[a]) / h;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const double v = g.values[i];
    if (v == 0.0) continue;
    auto ijk = grid.multi_index(i);
    double cheb = 0.0;
    for (int a = 0; a < d; ++a) cheb = std::max(cheb, std::fabs(ijk[a] - fy[a]));
    Point c = grid.center(i);
    if (cheb <= 2.5) {
      acc += v * cell_kernel_integral(d, c, h, y);
    } else {
      acc += v * vol * k_eval(d - 2, distance(c, y));
    }
  }
  return acc;
}

// Points of a stratified deterministic sample of the unit ball (equal-volume cells).
std::vector<Point> stratified_ball(int d, int n) {
  std::vector<Point> out;
  if (d == 1) {
    for (int i = 0; i < n; ++i) out.push_back(Point{-1.0 + (2.0 * i + 1.0) / n});
    return out;
  }
  const int nr = d == 2 ? 128 : 16;
  const int na = std::max(1, n / nr);
  const Rule& s = d == 2 ? sphere_rule(2, na) : sphere_rule(3, static_cast<int>(std::sqrt(na / 2.0)));
  for (int i = 0; i < nr; ++i) {
    double rho = std::pow((i + 0.5) / nr, 1.0 / d);
    for (const auto& u : s.nodes) out.push_back(rho * u);
  }
  return out;
}

Ball component_ball(const Component& c) {
  return std::visit(overloaded{
                        [](const Atom& a) { return Ball{a.at, 0.0}; },
                        [](const SphereLayer& s) { return Ball{s.center, s.radius}; },
                        [](const BallUniform& b) { return Ball{b.center, b.radius}; },
                        [](const RadialBump& b) { return Ball{b.center, b.radius}; },
                        [](const GridDensity& g) {
                          Point lo = g.grid.origin(), hi = g.grid.origin();
                          bool any = false;
                          for (std::size_t i = 0; i < g.values.size(); ++i) {
                            if (g.values[i] == 0.0) continue;
                            Point c = g.grid.center(i);
                            if (!any) {
                              lo = hi = c;
                              any = true;
                            }
                            for (int a = 0; a < c.dim(); ++a) {
                              lo[a] = std::min(lo[a], c[a]);
                              hi[a] = std::max(hi[a], c[a]);
                            }
                          }
                          double half_diag = 0.5 * g.grid.spacing() * std::sqrt(lo.dim());
                          return Ball{0.5 * (lo + hi), 0.5 * distance(lo, hi) + half_diag};
                        },
                    },
                    c);
}

double component_mass(const Component& c) {
  return std::visit(overloaded{
                        [](const Atom& a) { return a.weight; },
                        [](const SphereLayer& s) { return s.total; },
                        [](const BallUniform& b) { return b.total; },
                        [](const RadialBump& b) { return b.total; },
                        [](const GridDensity& g) {
                          double s = 0.0;
                          for (double v : g.values) s += v;
                          return s * g.grid.cell_volume();
                        },
                    },
                    c);
}

bool concentric(const Point& a, const Point& b) { return distance(a, b) <= 1e-14 * (1.0 + a.norm()); }

}  // namespace

double poisson_kernel(const Point& c, double R, const Point& x, const Point& zeta) {
  const int d = c.dim();
  double s2 = (x - c).norm2();
  double r = distance(zeta, x);
  return std::pow(R, d - 2) * (R * R - s2) / std::pow(r, d);
}

double Mollifier::normalization(int d, double r) {
  return std::pow(r, d) * 0.5 * sphere_area(d) * beta_fn(0.5 * d, 5.0);
}

double Mollifier::density(const Point& x) const {
  return bump_profile(x.norm(), radius) / normalization(x.dim(), radius);
}

Measure::Measure(int dim, std::vector<Component> comps) : dim_(dim), comps_(std::move(comps)) {}

Measure Measure::dirac(const Point& x, double w) {
  Measure m(x.dim());
  m.add(Atom{x, w});
  return m;
}

Measure& Measure::add(Component c) {
  comps_.push_back(std::move(c));
  return *this;
}

Measure Measure::operator+(const Measure& o) const {
  if (o.dim_ != dim_) throw PreconditionError("adding measures of different dimension");
  Measure m = *this;
  for (const auto& c : o.comps_) m.comps_.push_back(c);
  return m;
}

Measure Measure::scaled(double s) const {
  Measure m(dim_);
  for (auto c : comps_) {
    std::visit(overloaded{
                   [s](Atom& a) { a.weight *= s; },
                   [s](SphereLayer& l) { l.total *= s; },
                   [s](BallUniform& b) { b.total *= s; },
                   [s](RadialBump& b) { b.total *= s; },
                   [s](GridDensity& g) {
                     for (double& v : g.values) v *= s;
                   },
               },
               c);
    m.comps_.push_back(std::move(c));
  }
  return m;
}

double Measure::total_mass() const {
  double s = 0.0;
  for (const auto& c : comps_) s += component_mass(c);
  return s;
}

Measure Measure::simplified() const {
  Measure out(dim_);
  for (const auto& c : comps_) {
    bool merged = false;
    for (auto& e : out.comps_) {
      if (const auto* a = std::get_if<Atom>(&c)) {
        if (auto* b = std::get_if<Atom>(&e); b && b->at == a->at) {
          b->weight += a->weight;
          merged = true;
        }
      } else if (const auto* a = std::get_if<BallUniform>(&c)) {
        if (auto* b = std::get_if<BallUniform>(&e);
            b && b->center == a->center && b->radius == a->radius) {
          b->total += a->total;
          merged = true;
        }
      } else if (const auto* a = std::get_if<SphereLayer>(&c)) {
        if (auto* b = std::get_if<SphereLayer>(&e);
            b && b->center == a->center && b->radius == a->radius && !a->poisson_pole &&
            !b->poisson_pole) {
          b->total += a->total;
          merged = true;
        }
      } else if (const auto* a = std::get_if<GridDensity>(&c)) {
        if (auto* b = std::get_if<GridDensity>(&e); b && b->grid.same_frame(a->grid)) {
          for (std::size_t i = 0; i < b->values.size(); ++i) b->values[i] += a->values[i];
          merged = true;
        }
      }
      if (merged) break;
    }
    if (!merged) out.comps_.push_back(c);
  }
  return out;
}

std::pair<Measure, Measure> Measure::jordan() const {
  Measure plus(dim_), minus(dim_);
  for (const auto& c : simplified().comps_) {
    if (const auto* g = std::get_if<GridDensity>(&c)) {
      GridDensity p = *g, n = *g;
      for (std::size_t i = 0; i < g->values.size(); ++i) {
        p.values[i] = std::max(g->values[i], 0.0);
        n.values[i] = std::max(-g->values[i], 0.0);
      }
      plus.comps_.push_back(p);
      minus.comps_.push_back(n);
      continue;
    }
    double m = component_mass(c);
    if (m > 0.0) plus.comps_.push_back(c);
    if (m < 0.0) minus.comps_.push_back(Measure(dim_, {c}).scaled(-1.0).comps_.front());
  }
  return {plus, minus};
}

double Measure::total_variation() const {
  auto [p, n] = jordan();
  return p.total_mass() + n.total_mass();
}

bool Measure::is_positive() const {
  for (const auto& c : comps_) {
    if (const auto* g = std::get_if<GridDensity>(&c)) {
      for (double v : g->values)
        if (v < 0.0) return false;
    } else if (component_mass(c) < 0.0) {
      return false;
    }
  }
  return true;
}

std::vector<std::pair<Point, double>> discretize(const Measure& mu, const QuadratureOptions& q) {
  std::vector<std::pair<Point, double>> out;
  const int d = mu.dim();
  for (const auto& c : mu.components()) {
    std::visit(overloaded{
                   [&](const Atom& a) { out.emplace_back(a.at, a.weight); },
                   [&](const SphereLayer& s) {
                     const Rule& r = layer_rule(d, q);
                     for (std::size_t i = 0; i < r.nodes.size(); ++i) {
                       Point z = s.center + s.radius * r.nodes[i];
                       double w = r.weights[i] * s.total;
                       if (s.poisson_pole) w *= poisson_kernel(s.center, s.radius, *s.poisson_pole, z);
                       out.emplace_back(z, w);
                     }
                   },
                   [&](const BallUniform& b) {
                     const Rule& r = solid_rule(d, q);
                     for (std::size_t i = 0; i < r.nodes.size(); ++i)
                       out.emplace_back(b.center + b.radius * r.nodes[i], r.weights[i] * b.total);
                   },
                   [&](const RadialBump& b) {
                     Rule1D g = gauss_legendre(16, 0.0, b.radius);
                     const Rule& s = d == 2 ? sphere_rule(2, 128) : sphere_rule(d, 16);
                     double z = 0.0;
                     std::vector<double> wr(g.x.size());
                     for (std::size_t i = 0; i < g.x.size(); ++i) {
                       wr[i] = g.w[i] * bump_profile(g.x[i], b.radius) * std::pow(g.x[i], d - 1);
                       z += wr[i];
                     }
                     for (std::size_t i = 0; i < g.x.size(); ++i)
                       for (std::size_t k = 0; k < s.nodes.size(); ++k)
                         out.emplace_back(b.center + g.x[i] * s.nodes[k],
                                          b.total * wr[i] / z * s.weights[k]);
                   },
                   [&](const GridDensity& g) {
                     const double vol = g.grid.cell_volume();
                     for (std::size_t i = 0; i < g.values.size(); ++i)
                       if (g.values[i] != 0.0) out.emplace_back(g.grid.center(i), g.values[i] * vol);
                   },
               },
               c);
  }
  return out;
}

ExtReal Measure::kernel_integral(const Point& y, const QuadratureOptions& q) const {
  const int d = dim_;
  ExtReal acc(0.0);
  for (const auto& c : comps_) {
    std::visit(overloaded{
                   [&](const Atom& a) { acc += a.weight * radial_kernel(d, distance(a.at, y)); },
                   [&](const SphereLayer& s) { acc += sphere_layer_pt(s, d, y, q); },
                   [&](const BallUniform& b) { acc += ExtReal(ball_uniform_pt(b, d, y)); },
                   [&](const RadialBump& b) { acc += ExtReal(bump_pt(b, d, y)); },
                   [&](const GridDensity& g) { acc += ExtReal(grid_density_pt(g, d, y)); },
               },
               c);
  }
  return acc;
}

ExtReal Measure::integrate(const ScalarField& f, const QuadratureOptions& q) const {
  if (f.dim() != dim_) throw PreconditionError("integrating a field of the wrong dimension");
  if (const auto& k = f.kernel_form()) {
    ExtReal acc = k->constant * total_mass();
    for (const auto& [y, coef] : k->terms) acc += coef * kernel_integral(y, q);
    return acc;
  }
  const int d = dim_;
  ExtReal acc(0.0);
  for (const auto& c : comps_) {
    if (const auto* a = std::get_if<Atom>(&c)) {
      acc += a->weight * f(a->at);
      continue;
    }
    if (const auto* g = std::get_if<GridDensity>(&c)) {
      const double vol = g->grid.cell_volume();
      for (std::size_t i = 0; i < g->values.size(); ++i)
        if (g->values[i] != 0.0) acc += (g->values[i] * vol) * f(g->grid.center(i));
      continue;
    }
    Measure single(d, {c});
    for (const auto& [x, w] : discretize(single, q)) acc += w * f(x);
  }
  return acc;
}

ExtReal integrate(const Measure& mu, const ScalarField& f, const QuadratureOptions& q) {
  return mu.integrate(f, q);
}

double integrate(const Measure& mu, const std::function<double(const Point&)>& f) {
  double acc = 0.0;
  for (const auto& [x, w] : discretize(mu)) acc += w * f(x);
  return acc;
}

Measure Measure::restrict(const Domain& S) const {
  if (std::holds_alternative<Space>(S.shape())) return *this;
  const int d = dim_;
  Measure out(d);
  const Point* sc = nullptr;
  double s_in = 0.0, s_out = 0.0;
  if (const auto* b = S.ball()) {
    sc = &b->center;
    s_out = b->radius;
  } else if (const auto* a = S.annulus()) {
    sc = &a->center;
    s_in = a->inner;
    s_out = a->outer;
  }
  auto sample_layer = [&](const Component& c) {
    Measure single(d, {c});
    double mass = single.total_mass();
    std::vector<std::pair<Point, double>> pts;
    if (const auto* s = std::get_if<SphereLayer>(&c)) {
      const Rule& r = d == 2 ? sphere_rule(2, 1 << 14) : sphere_rule(d, 90);
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        Point z = s->center + s->radius * r.nodes[i];
        double w = r.weights[i] * s->total;
        if (s->poisson_pole) w *= poisson_kernel(s->center, s->radius, *s->poisson_pole, z);
        pts.emplace_back(z, w);
      }
    } else {
      Point ctr = std::holds_alternative<BallUniform>(c) ? std::get<BallUniform>(c).center
                                                         : std::get<RadialBump>(c).center;
      double rad = std::holds_alternative<BallUniform>(c) ? std::get<BallUniform>(c).radius
                                                          : std::get<RadialBump>(c).radius;
      auto cells = stratified_ball(d, 1 << 14);
      double wsum = 0.0;
      for (const auto& u : cells) {
        double w = std::holds_alternative<RadialBump>(c) ? bump_profile(u.norm(), 1.0) : 1.0;
        pts.emplace_back(ctr + rad * u, w);
        wsum += w;
      }
      for (auto& p : pts) p.second *= mass / wsum;
    }
    for (const auto& [x, w] : pts)
      if (S.contains(x)) out.comps_.push_back(Atom{x, w});
  };
  for (const auto& c : comps_) {
    if (const auto* a = std::get_if<Atom>(&c)) {
      if (S.contains(a->at)) out.comps_.push_back(c);
    } else if (const auto* g = std::get_if<GridDensity>(&c)) {
      GridDensity r = *g;
      for (std::size_t i = 0; i < r.values.size(); ++i)
        if (r.values[i] != 0.0 && !S.contains(g->grid.center(i))) r.values[i] = 0.0;
      out.comps_.push_back(r);
    } else if (const auto* s = std::get_if<SphereLayer>(&c)) {
      if (sc && concentric(*sc, s->center)) {
        if (s->radius > s_in && s->radius < s_out) out.comps_.push_back(c);
      } else {
        sample_layer(c);
      }
    } else if (const auto* b = std::get_if<BallUniform>(&c)) {
      if (sc && concentric(*sc, b->center)) {
        auto piece = [&](double rad) {
          double r = std::min(rad, b->radius);
          return b->total * std::pow(r / b->radius, d);
        };
        double hi = piece(s_out), lo = piece(s_in);
        if (hi > 0.0)
          out.comps_.push_back(BallUniform{b->center, std::min(s_out, b->radius), hi});
        if (lo > 0.0)
          out.comps_.push_back(BallUniform{b->center, std::min(s_in, b->radius), -lo});
      } else {
        sample_layer(c);
      }
    } else {
      const auto& rb = std::get<RadialBump>(c);
      if (sc && concentric(*sc, rb.center) && s_in == 0.0 && s_out >= rb.radius) {
        out.comps_.push_back(c);
      } else if (sc && concentric(*sc, rb.center) && s_in >= rb.radius) {
        // entirely inside the hole
      } else {
        sample_layer(c);
      }
    }
  }
  return out;
}

Ball Measure::support_ball() const {
  if (comps_.empty()) return Ball{Point(dim_), 0.0};
  Point lo = component_ball(comps_.front()).center, hi = lo;
  for (const auto& c : comps_) {
    Ball b = component_ball(c);
    for (int a = 0; a < dim_; ++a) {
      lo[a] = std::min(lo[a], b.center[a] - b.radius);
      hi[a] = std::max(hi[a], b.center[a] + b.radius);
    }
  }
  Point mid = 0.5 * (lo + hi);
  double r = 0.0;
  for (const auto& c : comps_) {
    Ball b = component_ball(c);
    r = std::max(r, distance(mid, b.center) + b.radius);
  }
  return Ball{mid, r};
}

double Measure::distance_to_support(const Point& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : comps_) {
    double v = std::visit(
        overloaded{
            [&](const Atom& a) { return a.weight == 0.0 ? best : distance(p, a.at); },
            [&](const SphereLayer& s) { return std::fabs(distance(p, s.center) - s.radius); },
            [&](const BallUniform& b) { return std::max(0.0, distance(p, b.center) - b.radius); },
            [&](const RadialBump& b) { return std::max(0.0, distance(p, b.center) - b.radius); },
            [&](const GridDensity& g) {
              double m = std::numeric_limits<double>::infinity();
              for (std::size_t i = 0; i < g.values.size(); ++i)
                if (g.values[i] != 0.0)
                  m = std::min(m, cube_distance(p, g.grid.center(i), 0.5 * g.grid.spacing()));
              return m;
            },
        },
        c);
    best = std::min(best, v);
  }
  return best;
}

double Measure::distance_to_support(const Ball& L) const {
  return std::max(0.0, distance_to_support(L.center) - L.radius);
}

GridDomain Measure::support_mask(const GridDomain& frame) const {
  GridDomain out = frame;
  for (std::size_t i = 0; i < out.size(); ++i) out.set(i, false);
  const double half = 0.5 * frame.spacing();
  for (std::size_t i = 0; i < frame.size(); ++i) {
    Point c = frame.center(i);
    bool hit = false;
    for (const auto& comp : comps_) {
      hit = std::visit(
          overloaded{
              [&](const Atom& a) { return a.weight != 0.0 && cube_distance(a.at, c, half) == 0.0; },
              [&](const SphereLayer& s) {
                return cube_distance(s.center, c, half) <= s.radius &&
                       cube_far_distance(s.center, c, half) >= s.radius;
              },
              [&](const BallUniform& b) { return cube_distance(b.center, c, half) <= b.radius; },
              [&](const RadialBump& b) { return cube_distance(b.center, c, half) < b.radius; },
              [&](const GridDensity& g) {
                for (std::size_t j = 0; j < g.values.size(); ++j) {
                  if (g.values[j] == 0.0) continue;
                  Point gc = g.grid.center(j);
                  bool overlap = true;
                  for (int a = 0; a < dim_; ++a)
                    overlap = overlap && std::fabs(gc[a] - c[a]) < half + 0.5 * g.grid.spacing();
                  if (overlap) return true;
                }
                return false;
              },
          },
          comp);
      if (hit) break;
    }
    if (hit) out.set(i, true);
  }
  return out;
}

namespace {

double support_clearance(const Measure& mu, const Domain& O) {
  if (std::holds_alternative<Space>(O.shape())) return std::numeric_limits<double>::infinity();
  Ball s = mu.support_ball();
  if (const auto* b = O.ball()) return b->radius - distance(b->center, s.center) - s.radius;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [x, w] : discretize(mu)) best = std::min(best, O.boundary_distance(x));
  return best;
}

}  // namespace

Measure convolve_balayage(const Measure& mu, const Mollifier& m, const Domain& O, double spacing) {
  const int d = mu.dim();
  const double clear = support_clearance(mu, O);
  if (!(m.radius <= 0.5 * clear))
    throw PreconditionError("convolve_balayage: mollifier radius exceeds half the distance to the boundary");
  Ball s = mu.support_ball();
  Point lo = s.center, hi = s.center;
  for (int a = 0; a < d; ++a) {
    lo[a] -= s.radius + m.radius + 2.0 * spacing;
    hi[a] += s.radius + m.radius + 2.0 * spacing;
  }
  GridDomain frame = GridDomain::covering(lo, hi, spacing);
  GridDensity out{frame, std::vector<double>(frame.size(), 0.0)};
  const double vol = frame.cell_volume();
  const int reach = static_cast<int>(std::ceil(m.radius / spacing)) + 1;
  for (const auto& [x, w] : discretize(mu)) {
    std::size_t home = 0;
    if (!frame.locate(x, home)) throw NumericError("convolve_balayage: source outside frame");
    auto base = frame.multi_index(home);
    std::vector<std::pair<std::size_t, double>> cells;
    double sum = 0.0;
    const int span = 2 * reach + 1;
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(span);
    for (std::size_t k = 0; k < total; ++k) {
      std::size_t t = k;
      std::array<int, kMaxDim> ijk{};
      bool inside = true;
      for (int a = 0; a < d; ++a) {
        ijk[a] = base[a] + static_cast<int>(t % static_cast<std::size_t>(span)) - reach;
        t /= static_cast<std::size_t>(span);
        inside = inside && ijk[a] >= 0 && ijk[a] < frame.shape()[a];
      }
      if (!inside) continue;
      std::size_t idx = frame.index(ijk);
      double phi = bump_profile(distance(frame.center(idx), x), m.radius);
      if (phi > 0.0) {
        cells.emplace_back(idx, phi);
        sum += phi;
      }
    }
    if (sum == 0.0) {
      out.values[home] += w / vol;
      continue;
    }
    for (const auto& [idx, phi] : cells) out.values[idx] += w * phi / (sum * vol);
  }
  Measure beta(d);
  beta.add(out);
  return beta;
}

Measure convolve_balayage(const Measure& mu, const std::function<Measure(const Point&)>& family,
                          const Domain& O, const QuadratureOptions& q) {
  const double clear = support_clearance(mu, O);
  Measure beta(mu.dim());
  for (const auto& [x, w] : discretize(mu, q)) {
    Measure iota = family(x);
    Ball s = iota.support_ball();
    if (distance(s.center, x) + s.radius > 0.5 * clear + 1e-12)
      throw PreconditionError("convolve_balayage: support of iota_x leaves B(x, dist/2)");
    beta = beta + iota.scaled(w);
  }
  return beta;
}

}  // namespace potkit
