#include "potkit/balayage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>

#include "potkit/errors.hpp"
#include "potkit/fields.hpp"
#include "potkit/geometry.hpp"
#include "potkit/kernels.hpp"
#include "potkit/quadrature.hpp"

namespace potkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExtReal integrate_member(const Measure& m, const FamilyMember& f, const QuadratureOptions& q) {
  try {
    return m.integrate(f.field, q);
  } catch (const Error& e) {
    throw FamilyError("family member " + f.id + ": " + e.what());
  }
}

// mu restricted to the complement of clos S_o.
Measure outside_of(const Measure& mu, const Domain& S_o) {
  const int d = mu.dim();
  Measure out(d);
  for (const auto& c : mu.components()) {
    if (const auto* a = std::get_if<Atom>(&c)) {
      if (!S_o.contains_closure(a->at, 0.0)) out.add(c);
      continue;
    }
    if (const auto* g = std::get_if<GridDensity>(&c)) {
      GridDensity r = *g;
      for (std::size_t i = 0; i < r.values.size(); ++i)
        if (r.values[i] != 0.0 && S_o.contains_closure(g->grid.center(i), 0.0)) r.values[i] = 0.0;
      out.add(r);
      continue;
    }
    Measure single(d, {c});
    Measure kept(d);
    if (const auto* b = S_o.ball()) {
      kept = single.restrict(Annulus{b->center, b->radius, kInf});
    } else {
      kept = single - single.restrict(S_o);
    }
    for (const auto& k : kept.components()) out.add(k);
  }
  return out;
}

// Signed distance-like data for the pair S_o in D.
double gap_to_boundary(const Domain& S_o, const Ball& D) {
  double gap = kInf;
  for (const auto& x : S_o.boundary_samples(720))
    gap = std::min(gap, D.radius - distance(x, D.center));
  return gap;
}

bool is_section8(FamilyClass c) {
  return c == FamilyClass::Sbh00PlusLeq || c == FamilyClass::Sbh00Bounded ||
         c == FamilyClass::SbhPlus0Bounded || c == FamilyClass::SbhPlus0Averaged;
}

bool compact_class(FamilyClass c) {
  return c == FamilyClass::Sbh00PlusLeq || c == FamilyClass::Sbh00Bounded;
}

bool positive_near_boundary(FamilyClass c) {
  return c == FamilyClass::Sbh00PlusLeq || c == FamilyClass::SbhPlus0Bounded ||
         c == FamilyClass::SbhPlus0Averaged;
}

// Points x with S_o^{+s} boundary membership, s in [s0, s1].
std::vector<Point> shell_samples(const Domain& S_o, double s0, double s1, int shells, int per) {
  std::vector<Point> out;
  for (int k = 0; k <= shells; ++k) {
    const double s = s0 + (s1 - s0) * k / std::max(shells, 1);
    Domain level = s > 0.0 ? parallel_set(S_o, s) : S_o;
    auto pts = level.boundary_samples(per);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

// h_k vanishing on dD, harmonic off the centre of D (normalized radius rho).
double harmonic_mode(const Ball& D, int k, const Point& axis, const Point& x) {
  const int d = x.dim();
  Point z = (x - D.center) / D.radius;
  const double rho = z.norm();
  if (rho == 0.0) return -kInf;
  if (d == 2) {
    const double th = std::atan2(z[1], z[0]) - std::atan2(axis[1], axis[0]);
    return (std::pow(rho, k) - std::pow(rho, -k)) * std::cos(k * th);
  }
  double u = 0.0;
  for (int a = 0; a < d; ++a) u += z[a] * axis[a];
  u /= rho;
  return (std::pow(rho, k) - std::pow(rho, -k - (d - 2))) * std::legendre(k, u);
}

}  // namespace

std::string to_string(FamilyClass c) {
  switch (c) {
    case FamilyClass::Sbh00PlusLeq: return "sbh00+(<=b+)";
    case FamilyClass::Sbh00Bounded: return "sbh00(r,b-<b+)";
    case FamilyClass::SbhPlus0Bounded: return "sbh+0(r,b-<b+)";
    case FamilyClass::SbhPlus0Averaged: return "sbh+0(or,b-<b+)";
    case FamilyClass::HarmonicKernels: return "harmonic-kernels";
    case FamilyClass::HarmonicPolynomials: return "harmonic-polynomials";
    case FamilyClass::SubharmonicKernels: return "subharmonic-kernels";
    case FamilyClass::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(Relation r) { return r == Relation::Linear ? "linear" : "affine"; }

std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

TestFamily& TestFamily::add(std::string id, ScalarField f) {
  members.push_back({std::move(id), std::move(f)});
  return *this;
}

TestFamily TestFamily::subset(const std::vector<std::size_t>& idx) const {
  TestFamily out = *this;
  out.members.clear();
  for (auto i : idx) {
    if (i >= members.size()) throw PreconditionError("subset index out of range");
    out.members.push_back(members[i]);
  }
  return out;
}

std::string BalayageVerdict::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "member,lhs,rhs,margin,tol,ok\n";
  for (const auto& m : margins)
    os << m.id << ',' << m.lhs.str() << ',' << m.rhs.str() << ',' << m.margin << ',' << m.tol
       << ',' << (m.indeterminate ? "indeterminate" : (m.ok ? "1" : "0")) << '\n';
  return os.str();
}

// ---- verdicts -------------------------------------------------------------

BalayageVerdict check_linear(const Measure& theta, const Measure& mu, const TestFamily& family,
                             const BalayageOptions& opts) {
  if (theta.dim() != mu.dim()) throw PreconditionError("measures of different dimensions");
  BalayageVerdict v;
  v.relation = Relation::Linear;
  v.worst_margin = kInf;
  bool failed = false, indet = false;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& f = family.members[i];
    MemberMargin m;
    m.id = f.id;
    m.lhs = integrate_member(theta, f, opts.quad);
    m.rhs = integrate_member(mu, f, opts.quad);
    const double a = m.lhs.to_double(), b = m.rhs.to_double();
    if (m.lhs.indeterminate_value() || m.rhs.indeterminate_value()) {
      m.indeterminate = true;
      m.ok = false;
      m.margin = std::numeric_limits<double>::quiet_NaN();
      indet = true;
      v.margins.push_back(m);
      continue;
    }
    const bool both_inf = std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0);
    if (std::isfinite(a) && std::isfinite(b)) m.tol = opts.tol_scale * 1e-7 * (1.0 + std::fabs(a) + std::fabs(b));
    if (both_inf) {
      m.margin = 0.0;
    } else if (family.symmetric) {
      m.margin = -std::fabs(b - a);
    } else {
      m.margin = b - a;
    }
    m.ok = m.margin >= -m.tol;
    if (!m.ok) failed = true;
    if (m.margin < v.worst_margin) {
      v.worst_margin = m.margin;
      v.witness = i;
      v.witness_id = f.id;
    }
    v.margins.push_back(m);
  }
  if (family.members.empty()) v.worst_margin = 0.0;
  v.status = failed ? VerdictStatus::Fail : (indet ? VerdictStatus::Indeterminate : VerdictStatus::Pass);
  v.pass = v.status == VerdictStatus::Pass;
  if (indet) v.diagnostics = "some member integrals are indeterminate (inf - inf)";
  return v;
}

BalayageVerdict check_affine(const Measure& theta, const Measure& mu, const TestFamily& family,
                             const Domain& S_o, const BalayageOptions& opts) {
  if (theta.dim() != mu.dim()) throw PreconditionError("measures of different dimensions");
  Measure th = theta, m = mu;
  if (family.D) {
    th = th.restrict(Domain(*family.D));
    m = m.restrict(Domain(*family.D));
  }
  th = outside_of(th, S_o);
  m = outside_of(m, S_o);

  BalayageVerdict v;
  v.relation = Relation::Affine;
  v.C = -kInf;
  bool indet = false;
  std::ostringstream diag;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& f = family.members[i];
    MemberMargin mm;
    mm.id = f.id;
    mm.lhs = integrate_member(th, f, opts.quad);
    mm.rhs = integrate_member(m, f, opts.quad);
    const double a = mm.lhs.to_double(), b = mm.rhs.to_double();
    const bool nan = mm.lhs.indeterminate_value() || mm.rhs.indeterminate_value();
    const bool inf_inf = std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0);
    if (nan || inf_inf || mm.lhs.is_pos_inf()) {
      mm.indeterminate = true;
      mm.ok = false;
      mm.margin = std::numeric_limits<double>::quiet_NaN();
      indet = true;
      diag << "member " << f.id << ": integrals " << mm.lhs.str() << " vs " << mm.rhs.str()
           << " are not well defined; ";
      v.margins.push_back(mm);
      continue;
    }
    mm.margin = a - b;  // -inf when lhs = -inf, +inf when rhs = -inf
    if (std::isfinite(a) && std::isfinite(b)) mm.tol = opts.tol_scale * 1e-7 * (1.0 + std::fabs(a) + std::fabs(b));
    mm.ok = std::isfinite(mm.margin) || mm.margin < 0.0;
    if (mm.margin > v.C) {
      v.C = mm.margin;
      v.witness = i;
      v.witness_id = f.id;
    }
    v.margins.push_back(mm);
  }
  if (family.members.empty()) v.C = 0.0;

  // A cone family with a strict violation has unbounded margins t * C.
  if (family.cone && std::isfinite(v.C) && v.C > 0.0) {
    const auto& w = v.margins[v.witness];
    double prev = -kInf;
    bool grows = true;
    diag << "amplitude probe on " << w.id << ":";
    for (double t : {1.0, 2.0, 4.0, 8.0}) {
      const double mt = (t * w.lhs - t * w.rhs).to_double();
      diag << " t=" << t << " -> " << mt;
      if (!(mt > prev + w.tol)) grows = false;
      prev = mt;
    }
    diag << "; ";
    if (grows) {
      v.C = kInf;
      v.margins[v.witness].ok = false;
      diag << "margin diverges under scaling; ";
    }
  }
  v.worst_margin = v.C;
  if (indet) {
    v.status = VerdictStatus::Indeterminate;
  } else {
    v.status = std::isfinite(v.C) || v.C < 0.0 ? VerdictStatus::Pass : VerdictStatus::Fail;
  }
  v.pass = v.status == VerdictStatus::Pass;
  v.diagnostics = diag.str();
  return v;
}

// ---- standard families ----------------------------------------------------

std::vector<Point> probe_ring(const Point& c, double radius, int count) {
  std::vector<Point> out;
  for (const auto& u : sphere_directions(c.dim(), count)) out.push_back(c + radius * u);
  return out;
}

TestFamily harmonic_kernel_family(const Domain& S, const std::vector<Point>& probes) {
  TestFamily f;
  f.tag = FamilyClass::HarmonicKernels;
  f.symmetric = true;
  f.cone = true;
  const int d = S.dim();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Point& y = probes[i];
    if (S.contains_closure(y, 0.0))
      throw PreconditionError("harmonic kernel probe " + y.str() + " lies in clos S");
    auto plus = ScalarField::kernel(Space{d}, y, 1.0);
    plus.with_pole(y).named("+k@" + y.str());
    auto minus = ScalarField::kernel(Space{d}, y, -1.0);
    minus.with_pole(y).named("-k@" + y.str());
    f.add("+k" + std::to_string(i), plus);
    f.add("-k" + std::to_string(i), minus);
  }
  return f;
}

TestFamily subharmonic_kernel_family(const std::vector<Point>& centres) {
  TestFamily f;
  f.tag = FamilyClass::SubharmonicKernels;
  f.cone = true;
  for (std::size_t i = 0; i < centres.size(); ++i) {
    const Point& y = centres[i];
    auto k = ScalarField::kernel(Space{y.dim()}, y, 1.0);
    k.with_pole(y).named("k@" + y.str());
    f.add("k" + std::to_string(i), k);
  }
  return f;
}

TestFamily harmonic_polynomial_family(const Point& c, int max_degree) {
  if (max_degree < 0) throw PreconditionError("negative polynomial degree");
  const int d = c.dim();
  if (d != 2 && d != 3) throw PreconditionError("harmonic polynomials need d = 2 or 3");
  TestFamily f;
  f.tag = FamilyClass::HarmonicPolynomials;
  f.symmetric = true;
  f.cone = true;
  auto push = [&](const std::string& id, std::function<double(const Point&)> p) {
    for (double s : {1.0, -1.0}) {
      ScalarField v(Space{d}, [p, s](const Point& x) { return ExtReal(s * p(x)); });
      v.named((s > 0 ? "+" : "-") + id);
      f.add((s > 0 ? "+" : "-") + id, v);
    }
  };
  push("1", [](const Point&) { return 1.0; });
  if (d == 2) {
    for (int n = 1; n <= max_degree; ++n) {
      push("re" + std::to_string(n), [c, n](const Point& x) {
        Point z = x - c;
        return std::pow(std::hypot(z[0], z[1]), n) * std::cos(n * std::atan2(z[1], z[0]));
      });
      push("im" + std::to_string(n), [c, n](const Point& x) {
        Point z = x - c;
        return std::pow(std::hypot(z[0], z[1]), n) * std::sin(n * std::atan2(z[1], z[0]));
      });
    }
    return f;
  }
  if (max_degree >= 1)
    for (int a = 0; a < 3; ++a)
      push("x" + std::to_string(a), [c, a](const Point& x) { return x[a] - c[a]; });
  if (max_degree >= 2) {
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        push("x" + std::to_string(a) + "x" + std::to_string(b),
             [c, a, b](const Point& x) { return (x[a] - c[a]) * (x[b] - c[b]); });
    push("q01", [c](const Point& x) {
      return (x[0] - c[0]) * (x[0] - c[0]) - (x[1] - c[1]) * (x[1] - c[1]);
    });
    push("q02", [c](const Point& x) {
      return (x[0] - c[0]) * (x[0] - c[0]) - (x[2] - c[2]) * (x[2] - c[2]);
    });
  }
  for (int l = 3; l <= max_degree; ++l)
    for (int a = 0; a < 3; ++a)
      push("z" + std::to_string(l) + "_" + std::to_string(a), [c, l, a](const Point& x) {
        Point z = x - c;
        const double rho = z.norm();
        if (rho == 0.0) return 0.0;
        return std::pow(rho, l) * std::legendre(l, z[a] / rho);
      });
  return f;
}

TestFamily with_constants(TestFamily f, bool both) {
  const int d = f.members.empty() ? (f.D ? f.D->center.dim() : 2) : f.members.front().field.dim();
  f.add("+1", ScalarField::constant(Space{d}, 1.0).named("+1"));
  if (both) f.add("-1", ScalarField::constant(Space{d}, -1.0).named("-1"));
  return f;
}

// ---- classes of test functions --------------------------------------------

ClassCheck validate_member(const TestFamily& family, const ScalarField& v, std::uint64_t seed,
                           int subharmonic_probes) {
  if (!family.S_o || !family.D) throw PreconditionError("family carries no class data");
  const Domain& S_o = *family.S_o;
  const Ball& D = *family.D;
  const int d = D.center.dim();
  const double bp = family.b_plus, bm = family.b_minus, r = family.r;
  auto fail = [](std::string s) { return ClassCheck{false, std::move(s)}; };
  auto val = [&](const Point& x) { return v.eval_unchecked(x); };

  for (const auto& x : S_o.boundary_samples(256))
    if (!(val(x) <= ExtReal(bp + 1e-9 * (1.0 + std::fabs(bp)))))
      return fail("v > b+ on dS_o at " + x.str());

  const auto dirs = sphere_directions(d, d == 2 ? 128 : 256);
  auto near_boundary = [&](double delta) {
    std::vector<Point> pts;
    for (const auto& u : dirs) pts.push_back(D.center + (D.radius - delta) * u);
    return pts;
  };
  const double dmin = 1e-9 * D.radius;
  for (const auto& x : near_boundary(dmin)) {
    ExtReal y = val(x);
    if (!y.finite() || std::fabs(y.value()) > 1e-6) return fail("v does not vanish at dD near " + x.str());
  }
  if (compact_class(family.tag)) {
    for (double delta : {dmin, 0.5 * r})
      for (const auto& x : near_boundary(delta))
        if (!(val(x) == ExtReal(0.0))) return fail("support reaches dD near " + x.str());
  }
  if (positive_near_boundary(family.tag)) {
    for (double delta : {dmin, 1e-6 * D.radius, 1e-3 * D.radius})
      for (const auto& x : near_boundary(delta))
        if (!(val(x) >= ExtReal(0.0))) return fail("v < 0 near dD at " + x.str());
  }
  if (family.tag == FamilyClass::Sbh00PlusLeq) {
    for (const auto& x : shell_samples(S_o, 0.0, 3.0 * r, 12, 64))
      if (!(val(x) >= ExtReal(0.0))) return fail("v < 0 at " + x.str());
  }
  if (family.tag == FamilyClass::Sbh00Bounded || family.tag == FamilyClass::SbhPlus0Bounded) {
    for (const auto& x : shell_samples(S_o, 0.0, 3.0 * r, 12, 128))
      if (!(val(x) >= ExtReal(bm - 1e-9 * (1.0 + std::fabs(bm)))))
        return fail("v < b- on the 3r layer at " + x.str());
  }
  if (family.tag == FamilyClass::SbhPlus0Averaged) {
    for (const auto& x : shell_samples(S_o, r, 2.0 * r, 8, 64))
      if (!(sphere_average(v, x, r) >= ExtReal(bm - 1e-9 * (1.0 + std::fabs(bm)))))
        return fail("sphere average < b- at " + x.str());
  }

  // Sub-mean-value probes on D \ clos S_o.
  Rng rng(seed);
  std::vector<Probe> probes;
  long attempts = 0;
  while (static_cast<int>(probes.size()) < subharmonic_probes) {
    if (++attempts > 100000L) throw PreconditionError("could not place probes in D \\ S_o");
    Point x(d);
    for (int a = 0; a < d; ++a) x[a] = D.center[a] + rng.uniform(-1.0, 1.0) * D.radius;
    const double to_D = D.radius - distance(x, D.center);
    if (to_D <= 0.0 || S_o.contains_closure(x, 0.0)) continue;
    const double c = std::min(to_D, S_o.boundary_distance(x));
    if (c < 1e-3 * D.radius) continue;
    probes.push_back({x, rng.uniform(0.05, 0.5) * c});
  }
  auto rep = check_subharmonic(v, probes, 1e-6);
  if (!rep.pass()) return fail("sub-mean-value probe violated (worst margin " +
                               std::to_string(rep.worst_margin()) + ")");
  return {};
}

TestFamily build_test_family(FamilyClass tag, const Domain& S_o, double r, double b_minus,
                             double b_plus, const Ball& D, int count) {
  if (!is_section8(tag)) throw PreconditionError("build_test_family expects a test-function class");
  const int d = D.center.dim();
  if (d != 2 && d != 3) throw PreconditionError("test families need d = 2 or 3");
  const Ball sb = S_o.bounding_ball();
  if (!std::isfinite(sb.radius)) throw PreconditionError("S_o must be bounded");
  const Point o = sb.center;
  if (!S_o.contains(o)) throw PreconditionError("centre of S_o is not an interior point");
  const double gap = gap_to_boundary(S_o, D);
  if (!(gap > 0.0)) throw PreconditionError("S_o is not compactly inside D");
  if (!(r > 0.0 && 3.0 * r < gap))
    throw PreconditionError("geometry requires 0 < 3r < dist(S_o, dD)");
  if (!(b_plus > 0.0)) throw PreconditionError("b+ must be positive");
  if (tag != FamilyClass::Sbh00PlusLeq && !(b_minus < 0.0))
    throw PreconditionError("b- must be negative");

  TestFamily fam;
  fam.tag = tag;
  fam.S_o = S_o;
  fam.D = D;
  fam.o = o;
  fam.r = r;
  fam.b_minus = tag == FamilyClass::Sbh00PlusLeq ? 0.0 : b_minus;
  fam.b_plus = b_plus;

  const GreenModel green(D, o);
  const auto rim = S_o.boundary_samples(720);
  double gmax = 0.0;
  for (const auto& x : rim) gmax = std::max(gmax, green(x).value());
  // Lowest level whose superlevel set stays r away from dD.
  double g_in = 0.0;
  for (const auto& u : sphere_directions(d, d == 2 ? 256 : 512))
    g_in = std::max(g_in, green(D.center + (D.radius - r) * u).value());
  const bool compact = compact_class(tag);
  const double c_lo = compact ? g_in : 0.0;
  if (!(c_lo < gmax)) throw PreconditionError("S_o too close to dD for compactly supported members");

  auto positive_member = [&](double t, double c) {
    return ScalarField(Space{d}, [green, t, c, b_plus](const Point& x) {
      ExtReal g = green(x);
      if (!g.finite()) return ExtReal(b_plus);
      return ExtReal(std::min(b_plus, t * std::max(g.value() - c, 0.0)));
    });
  };

  std::vector<std::pair<std::string, ScalarField>> pos, alt;
  const int levels = std::max(count / 2, 2);
  for (int j = 0; j < levels; ++j) {
    const double c = c_lo + (gmax - c_lo) * (compact ? (j + 1.0) / (levels + 1.0) : double(j) / levels);
    for (double s : {1.0, 0.5}) {
      const double t = s * b_plus / (gmax - c);
      pos.emplace_back("pos_c" + std::to_string(j) + "_s" + std::to_string(int(s * 100)),
                       positive_member(t, c));
    }
    if (j == 0) pos.emplace_back("zero", positive_member(1.0, gmax));
  }

  // Modes need the centre of D inside S_o (where h_k is singular).
  if (tag != FamilyClass::Sbh00PlusLeq && S_o.contains(D.center)) {
    const double kappa = d == 2 ? 1.0 : 1.0 / D.radius;
    const auto axes = sphere_directions(d, d == 2 ? 8 : 6);
    const auto layer = shell_samples(S_o, 0.0, 3.0 * r, 12, 128);
    const auto avg_layer = shell_samples(S_o, r, 2.0 * r, 8, 64);
    for (int k = 1; k <= 3; ++k)
      for (double eta : {0.9, 0.5})
        for (std::size_t ai = 0; ai < axes.size(); ++ai) {
          const Point axis = axes[ai];
          const double eps = eta * kappa / (2.0 * k + d - 2.0);
          const double c = compact ? c_lo + 0.5 * (gmax - c_lo) : 0.0;
          auto w1 = [green, D, k, axis, eps, c](const Point& x) -> ExtReal {
            ExtReal g = green(x);
            if (!g.finite() || distance(x, D.center) >= D.radius) return ExtReal(g.finite() ? -c : kInf);
            return ExtReal(g.value() - c + eps * harmonic_mode(D, k, axis, x));
          };
          double top = -kInf, low = kInf;
          for (const auto& x : rim) top = std::max(top, w1(x).value());
          if (tag == FamilyClass::SbhPlus0Averaged) {
            ScalarField wf(Space{d}, w1);
            for (const auto& x : avg_layer) low = std::min(low, sphere_average(wf, x, r).value());
          } else {
            for (const auto& x : layer) low = std::min(low, w1(x).value());
          }
          if (!(top > 0.0)) continue;
          double a = b_plus / top;
          if (low < 0.0) a = std::min(a, b_minus / low);
          ScalarField m(Space{d}, [w1, a, b_plus, compact](const Point& x) {
            ExtReal w = w1(x);
            if (!w.finite()) return ExtReal(b_plus);
            double y = std::min(b_plus, a * w.value());
            return ExtReal(compact ? std::max(y, 0.0) : y);
          });
          alt.emplace_back("mode_k" + std::to_string(k) + "_e" + std::to_string(int(eta * 10)) +
                               "_a" + std::to_string(ai),
                           m);
        }
  }

  // Interleave the two kinds; validate each candidate.
  std::size_t ip = 0, ia = 0;
  std::uint64_t seed = 1;
  while (static_cast<int>(fam.members.size()) < count && (ip < pos.size() || ia < alt.size())) {
    const bool take_alt = ia < alt.size() && (ip >= pos.size() || fam.members.size() % 2 == 1);
    auto& cand = take_alt ? alt[ia++] : pos[ip++];
    // Members live on D \ S_o; they are extended by 0 to the interior of S_o.
    const ScalarField raw = cand.second;
    ScalarField m(Space{d}, [raw, S_o](const Point& x) {
      if (S_o.contains(x) && S_o.boundary_distance(x) > 1e-9) return ExtReal(0.0);
      return raw.eval_unchecked(x);
    });
    m.named(cand.first);
    if (validate_member(fam, m, seed++, 32).pass) fam.add(cand.first, m);
  }
  return fam;
}

// ---- potentials approximating the glued function ---------------------------

PotentialSequence potential_sequence(const TestFamily& family, const ScalarField& v,
                                     const std::vector<int>& orders, double h) {
  if (!is_section8(family.tag) || !family.S_o || !family.D)
    throw PreconditionError("potential_sequence needs a test-function class");
  const Ball* So = family.S_o->ball();
  if (!So) throw PreconditionError("potential_sequence supports ball S_o");
  const Ball& D = *family.D;
  const int d = D.center.dim();
  const double r = family.r;
  const Point o = *family.o;
  const bool positive = family.tag == FamilyClass::Sbh00PlusLeq;
  const double m_v = positive ? 0.0 : family.b_minus;

  const Ball S1{So->center, So->radius + r}, S2{So->center, So->radius + 2.0 * r};
  const Ball Dr{So->center, So->radius + 1.5 * r};
  const Ball O{So->center, distance(So->center, D.center) + D.radius + r};

  ScalarField base = v;
  if (family.tag == FamilyClass::SbhPlus0Averaged)
    base = harmonize_layer(v, Annulus{So->center, So->radius, So->radius + 3.0 * r}, h).field;

  GreenGlue gg = glue_with_green(base, O, GreenModel(Dr, o), S1, S2, m_v, family.b_plus);
  PotentialSequence out{2.0 * gg.coefficient, gg.M_g, gg.V, GreenModel(D, o), {}, {}};

  // Cells of {V < 1/n}; flood from cells outside D.
  Point lo = D.center, hi = D.center;
  for (int a = 0; a < d; ++a) {
    lo[a] -= D.radius + 2.0 * h;
    hi[a] += D.radius + 2.0 * h;
  }
  GridDomain frame = GridDomain::covering(lo, hi, h);
  std::vector<double> Vc(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Point x = frame.center(i);
    Vc[i] = distance(x, D.center) >= D.radius ? 0.0 : gg.V.eval_unchecked(x).to_double();
  }
  ScalarField V = gg.V;
  for (int n : orders) {
    if (n < 1) throw PreconditionError("orders must be positive");
    const double lvl = 1.0 / n;
    std::vector<std::uint8_t> reached(frame.size(), 0);
    std::deque<std::size_t> q;
    for (std::size_t i = 0; i < frame.size(); ++i)
      if (Vc[i] < lvl && (frame.on_frame_edge(i) || distance(frame.center(i), D.center) >= D.radius)) {
        reached[i] = 1;
        q.push_back(i);
      }
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop_front();
      for (auto j : frame.neighbours(i))
        if (!reached[j] && Vc[j] < lvl) {
          reached[j] = 1;
          q.push_back(j);
        }
    }
    // A point below the level whose own cell is above it takes the status of
    // the adjacent cells.
    ScalarField vn(Space{d}, [V, D, frame, reached, Vc, lvl, positive](const Point& x) -> ExtReal {
      if (distance(x, D.center) >= D.radius) return ExtReal(0.0);
      ExtReal Vx = V.eval_unchecked(x);
      ExtReal y = Vx - ExtReal(lvl);
      if (Vx < ExtReal(lvl)) {
        std::size_t i = 0;
        if (frame.locate(x, i)) {
          if (reached[i]) return ExtReal(0.0);
          if (!(Vc[i] < lvl)) {
            const int dd = frame.dim();
            auto ijk = frame.multi_index(i);
            std::array<int, kMaxDim> off{};
            for (int a = 0; a < dd; ++a) off[a] = -1;
            while (true) {
              std::array<int, kMaxDim> q = ijk;
              bool ok = true;
              for (int a = 0; a < dd; ++a) {
                q[a] += off[a];
                if (q[a] < 0 || q[a] >= frame.shape()[a]) ok = false;
              }
              if (ok && reached[frame.index(q)]) return ExtReal(0.0);
              int a = 0;
              while (a < dd && off[a] == 1) off[a++] = -1;
              if (a == dd) break;
              ++off[a];
            }
          }
        }
      }
      return positive ? max(y, ExtReal(0.0)) : y;
    });
    vn.with_pole(o).named("v_" + std::to_string(n));
    out.orders.push_back(n);
    out.v.push_back(vn);
  }
  return out;
}

// ---- closure and examples -------------------------------------------------

TestFamily max_closure(const TestFamily& f) {
  TestFamily out = f;
  for (std::size_t i = 0; i < f.members.size(); ++i)
    for (std::size_t j = i + 1; j < f.members.size(); ++j) {
      const ScalarField a = f.members[i].field, b = f.members[j].field;
      ScalarField m(a.domain(), [a, b](const Point& x) {
        return max(a.eval_unchecked(x), b.eval_unchecked(x));
      });
      const std::string id = "max(" + f.members[i].id + "," + f.members[j].id + ")";
      m.named(id);
      out.add(id, m);
    }
  return out;
}

ExtReal family_sup(const TestFamily& f, const Point& x) {
  ExtReal s = ExtReal::neg_inf();
  for (const auto& m : f.members) s = max(s, m.field.eval_unchecked(x));
  return s;
}

LyonsExample lyons_example(int d, double r0, double r, double ring, int count, double rj) {
  if (d != 2 && d != 3) throw PreconditionError("lyons_example needs d = 2 or 3");
  if (!(0.0 < r0 && r0 < ring - rj && ring + rj < r && r < 1.0 && rj > 0.0))
    throw PreconditionError("need 0 < r0 < ring - rj and ring + rj < r < 1");
  LyonsExample ex{Measure(d), Measure(d), Measure(d), {}, {}};
  const Point zero(d);
  ex.theta.add(BallUniform{zero, r0, 1.0});
  ex.mu.add(BallUniform{zero, r, 1.0});
  ex.mu_E = ex.mu;
  ex.E = probe_ring(zero, ring, count);
  for (std::size_t j = 0; j < ex.E.size(); ++j)
    for (std::size_t k = 0; k < j; ++k)
      if (distance(ex.E[j], ex.E[k]) <= 2.0 * rj) throw PreconditionError("balls around E overlap");
  const double w = std::pow(rj / r, d);
  for (const auto& e : ex.E) {
    ex.mu_E.add(BallUniform{e, rj, -w});
    ex.mu_E.add(Atom{e, w});
    ex.radii.push_back(rj);
  }
  return ex;
}

}  // namespace potkit
