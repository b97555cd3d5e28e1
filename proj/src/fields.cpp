#include "potkit/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include <Eigen/Dense>

#include "potkit/errors.hpp"
#include "potkit/kernels.hpp"
#include "potkit/quadrature.hpp"

namespace potkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Evaluation that tolerates the pole (returns whatever the closed form gives there).
ExtReal eval_at(const ScalarField& v, const Point& x) {
  if (v.pole() && distance(x, *v.pole()) == 0.0) return v.eval_unchecked(x);
  return v(x);
}

int sphere_nodes(int d, bool fine) {
  if (d == 2) return fine ? 1024 : 512;
  if (d == 3) return fine ? 48 : 24;
  return 2;
}

void require_sphere_inside(const ScalarField& v, const Point& x, double r) {
  if (!(r > 0.0)) throw DomainError("average radius must be positive");
  if (x.dim() != v.dim()) throw DomainError("average centre has the wrong dimension");
  const double bd = v.domain().boundary_distance(x);
  if (r > bd * (1.0 + 1e-12) + 1e-15)
    throw DomainError("sphere of radius " + std::to_string(r) + " about " + x.str() +
                      " exits the domain");
}

ExtReal rule_average(const ScalarField& v, const Point& x, double r, const Rule& rule) {
  ExtReal s(0.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * v.eval_unchecked(x + r * rule.nodes[i]);
  return s;
}

}  // namespace

// ---- averages -------------------------------------------------------------

ExtReal sphere_average(const ScalarField& v, const Point& x, double r) {
  return sphere_average_estimate(v, x, r).value;
}

AverageEstimate sphere_average_estimate(const ScalarField& v, const Point& x, double r) {
  require_sphere_inside(v, x, r);
  const int d = v.dim();
  ExtReal fine = rule_average(v, x, r, sphere_rule(d, sphere_nodes(d, true)));
  if (d == 1) return {fine, 0.0};
  ExtReal coarse = rule_average(v, x, r, sphere_rule(d, sphere_nodes(d, false)));
  double err = 0.0;
  if (fine.finite() && coarse.finite()) err = std::fabs(fine.value() - coarse.value());
  return {fine, err};
}

ExtReal ball_average(const ScalarField& v, const Point& x, double r) {
  require_sphere_inside(v, x, r);
  const int d = v.dim();
  return rule_average(v, x, r, ball_rule(d, 8, d == 2 ? 256 : 24, 24));
}

// ---- probes ---------------------------------------------------------------

double ProbeReport::worst_margin() const {
  double m = kInf;
  for (const auto& p : probes) m = std::min(m, p.margin);
  return m;
}

std::string ProbeReport::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "x,r,value,average,margin,pass\n";
  for (const auto& p : probes) {
    os << '"';
    for (int i = 0; i < p.x.dim(); ++i) os << (i ? " " : "") << p.x[i];
    os << "\"," << p.r << ',' << p.value.to_double() << ',' << p.average.to_double() << ','
       << p.margin << ',' << (p.pass ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<Probe> random_probes(const ScalarField& v, const Ball& window, int count,
                                 std::uint64_t seed, double h) {
  if (!std::isfinite(window.radius)) throw PreconditionError("probe window must be bounded");
  const int d = v.dim();
  Rng rng(seed);
  std::vector<Probe> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  long attempts = 0;
  const long cap = 2000L * std::max(count, 1);
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > cap) throw PreconditionError("could not place probes in the window");
    Point x(d);
    for (int a = 0; a < d; ++a) x[a] = window.center[a] + rng.uniform(-1.0, 1.0) * window.radius;
    if (distance(x, window.center) >= window.radius) continue;
    if (!v.domain().contains(x)) continue;
    const double c = v.clearance(x);
    if (!(c >= 4.0 * h)) continue;
    out.push_back({x, rng.uniform(2.0 * h, 0.5 * c)});
  }
  return out;
}

namespace {

ProbeReport run_probes(const ScalarField& v, const std::vector<Probe>& probes, double base_tol,
                       bool two_sided) {
  ProbeReport rep;
  for (const auto& pr : probes) {
    ProbeResult res;
    res.x = pr.x;
    res.r = pr.r;
    res.value = eval_at(v, pr.x);
    AverageEstimate a = sphere_average_estimate(v, pr.x, pr.r);
    res.average = a.value;
    res.tol = base_tol + a.error;
    if (res.value.is_neg_inf()) {
      res.margin = two_sided && res.average.is_neg_inf() ? 0.0 : kInf;
    } else if (res.value.finite() && res.average.finite()) {
      res.margin = res.average.value() - res.value.value();
    } else {
      res.margin = (res.average - res.value).to_double();
      if (std::isnan(res.margin)) res.margin = -kInf;
    }
    res.pass = two_sided ? std::fabs(res.margin) <= res.tol : res.margin >= -res.tol;
    if (!res.pass) ++rep.violations;
    rep.probes.push_back(res);
  }
  return rep;
}

}  // namespace

ProbeReport check_subharmonic(const ScalarField& v, const std::vector<Probe>& probes,
                              double base_tol) {
  return run_probes(v, probes, base_tol, false);
}

ProbeReport check_harmonic(const ScalarField& v, const std::vector<Probe>& probes,
                           double base_tol) {
  return run_probes(v, probes, base_tol, true);
}

// ---- grid fields ----------------------------------------------------------

GridField sample(const ScalarField& v, const GridDomain& grid) {
  GridField f{grid, std::vector<ExtReal>(grid.size(), ExtReal(0.0))};
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.masked(i)) f.values[i] = eval_at(v, grid.center(i));
  return f;
}

RieszResult riesz_measure(const GridField& v) {
  const GridDomain& g = v.grid;
  const int d = g.dim();
  const double h = g.spacing();
  const double scale = riesz_normalizer(d) / (h * h);
  GridDomain support(g.origin(), h, g.shape());
  GridDensity dens{support, std::vector<double>(g.size(), 0.0)};
  RieszResult out{Measure(d), {}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.masked(i) || g.is_boundary_cell(i)) continue;
    const auto nb = g.neighbours(i);
    bool singular = !v.values[i].finite();
    double sum = 0.0;
    for (auto j : nb) {
      if (!v.values[j].finite()) {
        singular = true;
        break;
      }
      sum += v.values[j].value();
    }
    if (singular) {
      out.singular_cells.push_back(i);
      continue;
    }
    dens.grid.set(i, true);
    dens.values[i] = scale * (sum - 2.0 * d * v.values[i].value());
  }
  out.measure.add(std::move(dens));
  return out;
}

// ---- pole coefficient -----------------------------------------------------

PoleFit pole_coefficient_fit(const ScalarField& V, const Point& o, double r_max, double r_min,
                             int levels, int directions) {
  const int d = V.dim();
  if (levels < 2 || !(r_min > 0.0) || !(r_max > r_min))
    throw PreconditionError("pole fit needs at least two radii in (0, r_max]");
  // Columns: -K_{d-2}(t), 1, t^2; the t^2 term absorbs the smooth part of V
  // (linear terms cancel over the symmetric directions).
  std::vector<double> X, T2, Y;
  const auto dirs = sphere_directions(d, directions);
  for (int l = 0; l < levels; ++l) {
    const double t = r_max * std::pow(r_min / r_max, static_cast<double>(l) / (levels - 1));
    const double x = -k_eval(d - 2, t);
    for (const auto& u : dirs) {
      ExtReal y = V(o + t * u);
      if (!y.finite()) throw NumericError("non-finite value near the pole at radius " + std::to_string(t));
      X.push_back(x);
      T2.push_back(t * t);
      Y.push_back(y.value());
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(X.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  double my = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = X[i];
    A(i, 1) = 1.0;
    A(i, 2) = T2[i] / (r_max * r_max);
    b(i) = Y[i];
    my += Y[i];
  }
  my /= static_cast<double>(n);
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  PoleFit fit;
  fit.coefficient = c(0);
  fit.intercept = c(1);
  double ssr = 0.0, syy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = b(i) - A.row(i).dot(c);
    ssr += e * e;
    syy += (b(i) - my) * (b(i) - my);
  }
  const double scale = std::max(1.0, my * my);
  fit.r_squared = syy <= 1e-24 * static_cast<double>(n) * scale ? 1.0 : 1.0 - ssr / syy;
  return fit;
}

// ---- gluing ---------------------------------------------------------------

namespace {

bool concentric(const Point& a, const Point& b) { return distance(a, b) <= 1e-12; }

bool ball_in_annulus(const Ball& b, const Annulus& a) {
  const double s = distance(b.center, a.center);
  return s - b.radius >= a.inner && s + b.radius <= a.outer;
}

// Strictly inside, so boundary samples of one domain that sit on the boundary of
// the other up to rounding are not treated as interior.
bool well_inside(const Domain& D, const Point& x) {
  return D.contains(x) && D.boundary_distance(x) > 1e-9;
}

// limsup surrogate: for each of 8 directions u take f(x + hu) and f(x + 2hu)
// inside both domains and extrapolate linearly to the boundary point; max over u.
std::optional<ExtReal> limsup_from(const ScalarField& f, const Point& x, const Domain& A,
                                   const Domain& B, double h) {
  std::optional<ExtReal> best;
  auto value = [&](const Point& y) -> std::optional<ExtReal> {
    if (!A.contains(y) || !B.contains(y)) return std::nullopt;
    if (f.pole() && distance(y, *f.pole()) == 0.0) return std::nullopt;
    return f(y);
  };
  for (const auto& u : sphere_directions(x.dim(), 8)) {
    auto f1 = value(x + h * u), f2 = value(x + 2.0 * h * u);
    std::optional<ExtReal> est;
    if (f1 && f2 && f1->finite() && f2->finite()) {
      est = ExtReal(2.0 * f1->value() - f2->value());
    } else if (f1) {
      est = f1;
    } else if (f2) {
      est = f2;
    }
    if (est) best = best ? max(*best, *est) : *est;
  }
  return best;
}

std::string witness(const char* what, const Point& x, const ExtReal& lhs, const ExtReal& rhs) {
  return std::string(what) + " violated at " + x.str() + ": " + lhs.str() + " > " + rhs.str();
}

}  // namespace

Domain union_domain(const Domain& a, const Domain& b) {
  if (a.dim() != b.dim()) throw PreconditionError("union of domains of different dimension");
  if (std::holds_alternative<Space>(a.shape())) return a;
  if (std::holds_alternative<Space>(b.shape())) return b;
  if (a.grid() && b.grid()) {
    if (!a.grid()->same_frame(*b.grid())) throw PreconditionError("grid union needs one frame");
    GridDomain g = *a.grid();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (b.grid()->masked(i)) g.set(i, true);
    return g;
  }
  if (a.ball() && b.ball()) {
    const Ball &p = *a.ball(), &q = *b.ball();
    const double s = distance(p.center, q.center);
    if (s + p.radius <= q.radius) return q;
    if (s + q.radius <= p.radius) return p;
  }
  if (a.annulus() && b.annulus()) {
    const Annulus &p = *a.annulus(), &q = *b.annulus();
    if (concentric(p.center, q.center) && p.inner < q.outer && q.inner < p.outer)
      return Annulus{p.center, std::min(p.inner, q.inner), std::max(p.outer, q.outer)};
  }
  const Ball* bl = a.ball() ? a.ball() : b.ball();
  const Annulus* an = a.annulus() ? a.annulus() : b.annulus();
  if (bl && an) {
    if (concentric(bl->center, an->center) && an->inner < bl->radius) {
      if (!std::isfinite(an->outer)) return Space{a.dim()};
      return Ball{bl->center, std::max(bl->radius, an->outer)};
    }
    if (ball_in_annulus(*bl, *an)) return *an;
  }
  throw PreconditionError("union of these domains is not representable");
}

ScalarField glue_max(const Domain& O, const ScalarField& v, const Domain& O0,
                     const ScalarField& v0, const GlueOptions& opts) {
  if (O.dim() != O0.dim() || v.dim() != O.dim() || v0.dim() != O.dim())
    throw PreconditionError("glue_max: dimension mismatch");
  Domain U = union_domain(O, O0);

  // limsup from O0 n O of v <= v0 on O0 n dO.
  for (const auto& x : O.boundary_samples(opts.boundary_samples)) {
    if (!well_inside(O0, x)) continue;
    auto ls = limsup_from(v, x, O, O0, opts.h);
    if (!ls) continue;
    ExtReal rhs = eval_at(v0, x) + ExtReal(opts.tol);
    if (!(*ls <= rhs)) throw RejectError(witness("boundary inequality on O0 n dO", x, *ls, rhs));
  }
  // limsup from O0 n O of v0 <= v on O n dO0.
  for (const auto& x : O0.boundary_samples(opts.boundary_samples)) {
    if (!well_inside(O, x)) continue;
    auto ls = limsup_from(v0, x, O, O0, opts.h);
    if (!ls) continue;
    ExtReal rhs = eval_at(v, x) + ExtReal(opts.tol);
    if (!(*ls <= rhs)) throw RejectError(witness("boundary inequality on O n dO0", x, *ls, rhs));
  }

  auto fn = [O, O0, v, v0](const Point& x) -> ExtReal {
    bool in0 = O0.contains(x), in1 = O.contains(x);
    if (!in0 && !in1) {
      in0 = O0.contains_closure(x, 1e-9);
      in1 = O.contains_closure(x, 1e-9);
    }
    if (in0 && in1) return max(v0.eval_unchecked(x), v.eval_unchecked(x));
    if (in0) return v0.eval_unchecked(x);
    return v.eval_unchecked(x);
  };
  ScalarField V(U, fn);
  if (v0.pole()) {
    V.with_pole(*v0.pole());
  } else if (v.pole()) {
    V.with_pole(*v.pole());
  }
  V.named("glue_max");
  return V;
}

ScalarField glue_quantitative(const QuantitativeSpec& s, const GlueOptions& opts) {
  if (!(s.M_g > s.m_g)) throw PreconditionError("degenerate gluing spec: M_g <= m_g");
  if (!(s.m_v <= s.M_v)) throw PreconditionError("gluing spec needs m_v <= M_v");
  const double tol = opts.tol;

  for (const auto& x : s.O0.boundary_samples(opts.boundary_samples)) {
    if (!well_inside(s.O, x)) continue;
    ExtReal vx = eval_at(s.v, x);
    if (!(vx >= ExtReal(s.m_v - tol)))
      throw RejectError(witness("lower bound m_v on O n dO0", x, ExtReal(s.m_v), vx));
    if (auto ls = limsup_from(s.g, x, s.O, s.O0, opts.h); ls && !(*ls <= ExtReal(s.m_g + tol)))
      throw RejectError(witness("bound m_g on O n dO0", x, *ls, ExtReal(s.m_g)));
  }
  for (const auto& x : s.O.boundary_samples(opts.boundary_samples)) {
    if (!well_inside(s.O0, x)) continue;
    if (auto ls = limsup_from(s.v, x, s.O, s.O0, opts.h); ls && !(*ls <= ExtReal(s.M_v + tol)))
      throw RejectError(witness("bound M_v on O0 n dO", x, *ls, ExtReal(s.M_v)));
    ExtReal gx = eval_at(s.g, x);
    if (!(gx >= ExtReal(s.M_g - tol)))
      throw RejectError(witness("bound M_g on O0 n dO", x, ExtReal(s.M_g), gx));
  }

  const double coef = (std::max(s.M_v, 0.0) + std::max(-s.m_v, 0.0)) / (s.M_g - s.m_g);
  const ScalarField g = s.g;
  const double shift = s.M_g + s.m_g;
  ScalarField v0(g.domain(), [g, coef, shift](const Point& x) {
    return coef * (2.0 * g.eval_unchecked(x) - ExtReal(shift));
  });
  if (g.pole()) v0.with_pole(*g.pole());
  v0.named("v0");
  ScalarField V = glue_max(s.O, s.v, s.O0, v0, opts);
  V.named("glue_quantitative");
  return V;
}

GreenGlue glue_with_green(const ScalarField& v, const Ball& O, const GreenModel& green,
                          const Ball& S_o, const Ball& S, double m_v, double M_v,
                          const GlueOptions& opts) {
  const Ball& D = green.domain();
  const Point& o = green.pole();
  auto inside = [](const Ball& a, const Ball& b) {  // clos a in int b
    return distance(a.center, b.center) + a.radius < b.radius;
  };
  if (!(distance(o, S_o.center) < S_o.radius)) throw PreconditionError("pole not interior to S_o");
  if (!inside(S_o, D)) throw PreconditionError("S_o is not compactly inside D");
  if (!inside(D, S)) throw PreconditionError("D is not compactly inside S");
  if (!(distance(S.center, O.center) + S.radius <= O.radius))
    throw PreconditionError("S is not contained in O");
  if (!concentric(S_o.center, O.center))
    throw PreconditionError("glue_with_green expects S_o and O concentric");
  if (!(m_v <= M_v)) throw PreconditionError("gluing bounds need m_v <= M_v");

  // Bounds on S \ S_o, sampled on shells about the centre of S.
  const int d = v.dim();
  const auto dirs = sphere_directions(d, d == 2 ? 96 : 192);
  for (int k = 0; k <= 24; ++k) {
    const double rho = S.radius * k / 24.0;
    for (const auto& u : dirs) {
      Point x = S.center + rho * u;
      if (distance(x, S_o.center) <= S_o.radius) continue;
      ExtReal vx = eval_at(v, x);
      if (!(vx >= ExtReal(m_v - opts.tol)) || !(vx <= ExtReal(M_v + opts.tol)))
        throw RejectError("bounds [" + std::to_string(m_v) + ", " + std::to_string(M_v) +
                          "] fail on S \\ S_o at " + x.str() + " (v = " + vx.str() + ")");
    }
  }

  const double M_g = mg_constant(green, Domain(S_o));
  QuantitativeSpec spec{Annulus{O.center, S_o.radius, O.radius}, v, Domain(S), green.field(),
                        m_v, M_v, 0.0, M_g};
  GreenGlue out{glue_quantitative(spec, opts), 0.0, M_g, std::max(M_v, 0.0)};
  out.coefficient = (std::max(M_v, 0.0) + std::max(-m_v, 0.0)) / M_g;
  out.V.with_pole(o).named("glue_with_green");
  return out;
}

// ---- harmonic modification ------------------------------------------------

HarmonizeResult harmonize_layer(const ScalarField& v, const Domain& layer, double h) {
  const int d = v.dim();
  if (!(h > 0.0)) throw PreconditionError("layer spacing must be positive");
  GridDomain frame;
  std::vector<std::uint8_t> interior;
  if (const auto* a = layer.annulus()) {
    if (!std::isfinite(a->outer)) throw PreconditionError("layer must be bounded");
    Point lo = a->center, hi = a->center;
    for (int k = 0; k < d; ++k) {
      lo[k] -= a->outer + 2.0 * h;
      hi[k] += a->outer + 2.0 * h;
    }
    frame = GridDomain::covering(lo, hi, h);
    interior.assign(frame.size(), 0);
    for (std::size_t i = 0; i < frame.size(); ++i) interior[i] = layer.contains(frame.center(i));
  } else if (const auto* g = layer.grid()) {
    frame = *g;
    interior.assign(frame.size(), 0);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      if (!g->masked(i)) continue;
      if (g->on_frame_edge(i)) throw PreconditionError("grid layer touches its frame");
      interior[i] = 1;
    }
    h = g->spacing();
  } else {
    throw PreconditionError("harmonize_layer expects an annulus or a grid ring");
  }

  // Dirichlet data on every node within one cell (Chebyshev) of the interior.
  const std::size_t n = frame.size();
  std::vector<double> u(n, 0.0);
  std::vector<std::uint8_t> known(n, 0);
  double bmin = kInf, bmax = -kInf;
  const auto& shape = frame.shape();
  for (std::size_t i = 0; i < n; ++i) {
    if (!interior[i]) continue;
    auto ijk = frame.multi_index(i);
    std::array<int, kMaxDim> off{};
    for (int k = 0; k < d; ++k) off[k] = -1;
    while (true) {
      std::array<int, kMaxDim> q = ijk;
      bool ok = true;
      for (int k = 0; k < d; ++k) {
        q[k] += off[k];
        if (q[k] < 0 || q[k] >= shape[k]) ok = false;
      }
      if (ok) {
        const std::size_t j = frame.index(q);
        if (!interior[j] && !known[j]) {
          ExtReal b = eval_at(v, frame.center(j));
          if (!b.finite()) throw PreconditionError("non-finite boundary data at " + frame.center(j).str());
          u[j] = b.value();
          known[j] = 1;
          bmin = std::min(bmin, u[j]);
          bmax = std::max(bmax, u[j]);
        }
      }
      int k = 0;
      while (k < d && off[k] == 1) off[k++] = -1;
      if (k == d) break;
      ++off[k];
    }
  }
  if (!(bmin <= bmax)) throw PreconditionError("layer has no interior nodes at this spacing");

  std::vector<std::size_t> red, black;
  for (std::size_t i = 0; i < n; ++i) {
    if (!interior[i]) continue;
    auto ijk = frame.multi_index(i);
    int s = 0;
    for (int k = 0; k < d; ++k) s += ijk[k];
    (s % 2 ? black : red).push_back(i);
    ExtReal vi = v.eval_unchecked(frame.center(i));
    u[i] = vi.finite() ? vi.value() : 0.5 * (bmin + bmax);
  }
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (auto* set : {&red, &black})
    for (auto i : *set) nbrs[i] = frame.neighbours(i);

  int extent = 1;
  for (int k = 0; k < d; ++k) extent = std::max(extent, shape[k]);
  const double omega = 2.0 / (1.0 + std::sin(M_PI / extent));
  auto residual = [&] {
    double r = 0.0;
    for (auto* set : {&red, &black})
      for (auto i : *set) {
        double s = 0.0;
        for (auto j : nbrs[i]) s += u[j];
        r = std::max(r, std::fabs(s / (2.0 * d) - u[i]));
      }
    return r;
  };
  const long cap = 1000000;
  long sweeps = 0;
  double res = residual();
  while (res > 1e-10) {
    if (sweeps >= cap) throw NumericError("layer solver did not converge (residual " + std::to_string(res) + ")");
    for (auto* set : {&red, &black})
      for (auto i : *set) {
        double s = 0.0;
        for (auto j : nbrs[i]) s += u[j];
        u[i] += omega * (s / (2.0 * d) - u[i]);
      }
    ++sweeps;
    if (sweeps % 10 == 0) res = residual();
  }

  HarmonizeResult out{v, frame, u, res, sweeps, bmin, bmax, kInf};
  for (std::size_t i = 0; i < n; ++i) {
    if (!interior[i]) continue;
    ExtReal vi = v.eval_unchecked(frame.center(i));
    if (vi.finite()) out.min_domination = std::min(out.min_domination, u[i] - vi.value());
  }
  GridDomain nodes(frame.origin(), frame.spacing(), frame.shape());
  for (std::size_t i = 0; i < n; ++i)
    if (interior[i]) nodes.set(i, true);
  out.nodes = nodes;

  struct Data {
    GridDomain frame;
    std::vector<double> u;
    std::vector<std::uint8_t> known;
  };
  for (std::size_t i = 0; i < n; ++i)
    if (interior[i]) known[i] = 1;
  auto data = std::make_shared<const Data>(Data{frame, u, known});
  const Domain L = layer;
  ScalarField base = v;
  auto fn = [data, L, base, d](const Point& x) -> ExtReal {
    if (!L.contains_closure(x, 0.0)) return base.eval_unchecked(x);
    const GridDomain& f = data->frame;
    std::array<int, kMaxDim> lo{};
    std::array<double, kMaxDim> t{};
    for (int k = 0; k < d; ++k) {
      const double s = (x[k] - f.origin()[k]) / f.spacing();
      lo[k] = std::clamp(static_cast<int>(std::floor(s)), 0, f.shape()[k] - 2);
      t[k] = s - lo[k];
    }
    ExtReal acc(0.0);
    for (int c = 0; c < (1 << d); ++c) {
      std::array<int, kMaxDim> q = lo;
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        const bool up = (c >> k) & 1;
        q[k] += up;
        w *= up ? t[k] : 1.0 - t[k];
      }
      if (w == 0.0) continue;
      const std::size_t j = f.index(q);
      acc += w * (data->known[j] ? ExtReal(data->u[j]) : base.eval_unchecked(f.center(j)));
    }
    return acc;
  };
  ScalarField field(v.domain(), fn, v.smoothness());
  if (v.pole() && !layer.contains_closure(*v.pole(), 0.0)) field.with_pole(*v.pole());
  field.named("harmonized");
  out.field = field;
  return out;
}

}  // namespace potkit
