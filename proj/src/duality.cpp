#include "potkit/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "potkit/errors.hpp"
#include "potkit/fields.hpp"
#include "potkit/geometry.hpp"
#include "potkit/kernels.hpp"
#include "potkit/quadrature.hpp"

namespace potkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Ball window_of(const Measure& mu, const std::vector<Point>& extra) {
  Ball b = mu.support_ball();
  if (mu.empty() && !extra.empty()) b = Ball{extra.front(), 0.0};
  for (const auto& p : extra) b.radius = std::max(b.radius, distance(p, b.center));
  return b;
}

void append(TestFamily& into, const TestFamily& from) {
  for (const auto& m : from.members) into.members.push_back(m);
}

double atom_weight_at(const Measure& mu, const Point& x) {
  double w = 0.0;
  for (const auto& c : mu.components())
    if (const auto* a = std::get_if<Atom>(&c))
      if (distance(a->at, x) == 0.0) w += a->weight;
  return w;
}

std::vector<double> fingerprint(const Measure& mu) {
  const int d = mu.dim();
  std::vector<double> f(static_cast<std::size_t>(2 * d + 2), 0.0);
  f[0] = static_cast<double>(mu.components().size());
  for (const auto& [z, w] : discretize(mu)) {
    f[1] += w * z.norm() * z.norm();
    for (int a = 0; a < d; ++a) {
      f[2 + a] += w * z[a];
      f[2 + d + a] += w * z[a] * z[(a + 1) % d];
    }
  }
  return f;
}

ScalarField potential_field(const Potential& P, const Point& pole) {
  ScalarField f(Space{P.dim()}, [P](const Point& y) { return P(y); });
  f.with_pole(pole);
  return f;
}

// Integral of pt against the (restricted) Riesz measure.
ExtReal integrate_potential(const Measure& riesz, const Potential& P) {
  ExtReal acc(0.0);
  for (const auto& [z, w] : discretize(riesz)) acc += w * P(z);
  return acc;
}

}  // namespace

std::string to_string(PotentialKind k) {
  return k == PotentialKind::Jensen ? "jensen" : "arens-singer";
}

TestFamily certification_family(const Measure& mu, const Point& x, PotentialKind kind) {
  const int d = x.dim();
  const Ball W = window_of(mu, {x});
  const double R = std::max(W.radius, 1e-3);
  TestFamily fam = harmonic_kernel_family(Domain(Ball{W.center, R * (1.0 + 1e-6)}),
                                          probe_ring(W.center, 1.25 * R, 24));
  append(fam, harmonic_kernel_family(Domain(Ball{W.center, R * (1.0 + 1e-6)}),
                                     probe_ring(W.center, 2.0 * R, 24)));
  append(fam, harmonic_polynomial_family(W.center, 4));
  fam.tag = FamilyClass::Custom;
  fam.symmetric = kind == PotentialKind::ArensSinger;
  if (kind == PotentialKind::Jensen) {
    std::vector<Point> ys;
    for (double f : {0.2, 0.45, 0.7, 0.9}) {
      auto ring = probe_ring(W.center, f * R, d == 2 ? 16 : 12);
      ys.insert(ys.end(), ring.begin(), ring.end());
    }
    for (const auto& c : mu.components())
      if (const auto* a = std::get_if<Atom>(&c))
        if (distance(a->at, x) > 0.0) ys.push_back(a->at);
    append(fam, subharmonic_kernel_family(ys));
  }
  return fam;
}

Certificate certify(const Measure& mu, const Point& x, PotentialKind kind, const BalayageOptions& opts) {
  Certificate c;
  c.x = x;
  c.kind = kind;
  c.verdict = check_linear(Measure::dirac(x), mu, certification_family(mu, x, kind), opts);
  c.mass = mu.total_mass();
  c.fingerprint = fingerprint(mu);
  return c;
}

ASPotential ASPotential::scaled(double s) const {
  ASPotential out = *this;
  out.field = field.scaled(s);
  out.pole_coefficient = s * pole_coefficient;
  out.source.reset();
  return out;
}

ASPotential make_potential(const ScalarField& V, const Point& pole, const Ball& window,
                           PotentialKind kind) {
  PoleFit fit = pole_coefficient_fit(V, pole);
  ASPotential out{V, pole, fit.coefficient, fit.r_squared, window, kind, std::nullopt};
  out.field.with_pole(pole);
  return out;
}

ASPotential to_potential(const Measure& mu, const Point& x, const Certificate& cert) {
  if (!cert.verdict.pass || distance(cert.x, x) != 0.0 || cert.mass != mu.total_mass() ||
      cert.fingerprint != fingerprint(mu))
    throw PreconditionError("to_potential: no passing certificate for this measure and pole");
  const int d = x.dim();
  Potential P = Potential::difference(mu, Measure::dirac(x));
  ScalarField V = potential_field(P, x);
  V.named("pt(mu - delta_x)");
  const Ball W = window_of(mu, {x});
  ASPotential out = make_potential(V, x, W, cert.kind);
  out.source = mu;

  const double R = std::max(W.radius, 1e-3);
  for (double f : {1.05, 1.5, 3.0})
    for (const auto& u : sphere_directions(d, d == 2 ? 64 : 96)) {
      const Point y = W.center + f * R * u;
      ExtReal v = V(y);
      if (!v.finite() || std::fabs(v.value()) > 1e-8)
        throw RejectError("potential does not vanish outside its window at " + y.str() + " (" + v.str() + ")");
    }
  const double expect = 1.0 - atom_weight_at(mu, x) / 1.0;
  if (std::fabs(out.pole_coefficient - expect) > 1e-3)
    throw RejectError("pole coefficient " + std::to_string(out.pole_coefficient) + " differs from " +
                      std::to_string(expect));
  if (cert.kind == PotentialKind::Jensen) {
    Rng rng(0x5eed);
    int placed = 0;
    while (placed < 400) {
      Point y(d);
      for (int a = 0; a < d; ++a) y[a] = W.center[a] + rng.uniform(-1.0, 1.0) * 1.2 * R;
      if (distance(y, x) < 1e-9) continue;
      ++placed;
      ExtReal v = V(y);
      if (!(v >= ExtReal(-1e-9))) throw RejectError("Jensen potential negative at " + y.str() + " (" + v.str() + ")");
    }
  }
  return out;
}

RecoveredMeasure from_potential(const ASPotential& V, double h) {
  if (!(h > 0.0)) throw PreconditionError("grid spacing must be positive");
  if (V.fit_r_squared < 0.999)
    throw NumericError("pole coefficient fit is unreliable (R^2 = " + std::to_string(V.fit_r_squared) + ")");
  const int d = V.pole.dim();
  const double reach = distance(V.window.center, V.pole) + V.window.radius + 4.0 * h;
  const int n = static_cast<int>(std::ceil(reach / h));
  Point origin = V.pole;
  for (int a = 0; a < d; ++a) origin[a] -= n * h;
  GridDomain grid(origin, h, std::vector<int>(static_cast<std::size_t>(d), 2 * n + 1));
  for (std::size_t i = 0; i < grid.size(); ++i) grid.set(i, true);
  // Laplacian of the regular part W = V + a K(., x), valued at the pole by the
  // fitted intercept; the kernel term only feeds the atom.
  const PoleFit fit = pole_coefficient_fit(V.field, V.pole);
  const double a = V.pole_coefficient;
  const Point x = V.pole;
  const ScalarField& f = V.field;
  ScalarField W(Space{d}, [f, a, x, d, b = fit.intercept](const Point& y) {
    const double t = distance(y, x);
    if (t == 0.0) return ExtReal(b);
    return f.eval_unchecked(y) + a * radial_kernel(d, t);
  });
  RieszResult rz = riesz_measure(sample(W, grid));

  RecoveredMeasure out{rz.measure, V.pole_coefficient, 1.0 - V.pole_coefficient, h,
                       rz.singular_cells.size()};
  if (out.atom != 0.0) out.measure.add(Atom{V.pole, out.atom});
  return out;
}

RieszFunction log_modulus(const std::vector<std::pair<Point, double>>& zeros,
                          std::function<double(const Point&)> harmonic) {
  if (zeros.empty() && !harmonic) throw PreconditionError("log_modulus needs zeros or a harmonic part");
  const int d = zeros.empty() ? 2 : zeros.front().first.dim();
  Measure riesz(d);
  KernelExpansion k;
  for (const auto& [z, m] : zeros) {
    if (m < 0.0) throw PreconditionError("negative multiplicity");
    riesz.add(Atom{z, m});
    k.terms.emplace_back(z, m);
  }
  if (!harmonic) return {ScalarField::from_expansion(Space{d}, k), riesz, "log-modulus"};
  ScalarField u(Space{d}, [k, harmonic, d](const Point& x) {
    ExtReal s(harmonic(x));
    for (const auto& [y, c] : k.terms) s += c * radial_kernel(d, distance(x, y));
    return s;
  });
  return {u, riesz, "log-modulus+harmonic"};
}

std::string PoissonJensenReport::text() const {
  std::ostringstream os;
  os.precision(12);
  os << "int u dtheta        = " << int_u_theta.str() << '\n'
     << "int_K pt_mu dRiesz  = " << pt_mu_dRiesz.str() << '\n'
     << "int_K pt_th dRiesz  = " << pt_theta_dRiesz.str() << '\n'
     << "int u dmu           = " << int_u_mu.str() << '\n'
     << "lhs = " << lhs.str() << ", rhs = " << rhs.str() << ", rel error = " << rel_error << '\n';
  if (rearranged_checked) os << "rearranged form rel error = " << rearranged_rel_error << '\n';
  os << (pass ? "PASS" : "FAIL");
  if (!diagnosis.empty()) os << " (" << diagnosis << ")";
  os << '\n';
  return os.str();
}

PoissonJensenReport verify_poisson_jensen(const Measure& theta, const Measure& mu,
                                          const RieszFunction& u, double tol) {
  const int d = theta.dim();
  if (mu.dim() != d || u.riesz.dim() != d) throw PreconditionError("dimension mismatch");
  // theta <=_har mu on a neighbourhood of the supports.
  const Ball W = window_of(theta + mu, {});
  const double R = std::max(W.radius, 1e-3);
  TestFamily har = harmonic_kernel_family(Domain(Ball{W.center, R * (1.0 + 1e-6)}),
                                          probe_ring(W.center, 1.5 * R, 24));
  append(har, harmonic_polynomial_family(W.center, 4));
  if (!check_linear(theta, mu, har).pass)
    throw PreconditionError("verify_poisson_jensen: theta <=_har mu is not certified");

  // K: inward-filled hull of the supports on a covering grid, padded one cell.
  const double hK = R / 48.0;
  Point lo = W.center, hi = W.center;
  for (int a = 0; a < d; ++a) {
    lo[a] -= R + 4.0 * hK;
    hi[a] += R + 4.0 * hK;
  }
  GridDomain frame = GridDomain::covering(lo, hi, hK);
  GridDomain supp = theta.support_mask(frame);
  const GridDomain supp_mu = mu.support_mask(frame);
  for (std::size_t i = 0; i < frame.size(); ++i)
    if (supp_mu.masked(i)) supp.set(i, true);
  GridDomain all = frame;
  for (std::size_t i = 0; i < all.size(); ++i) all.set(i, !all.on_frame_edge(i));
  GridDomain K = inward_filled_hull(supp, all);
  GridDomain Kp = K;
  for (std::size_t i = 0; i < K.size(); ++i)
    if (K.masked(i))
      for (auto j : K.neighbours(i)) Kp.set(j, true);
  const Measure riesz_K = u.riesz.restrict(Domain(Kp));

  PoissonJensenReport rep;
  rep.int_u_theta = theta.integrate(u.u);
  rep.int_u_mu = mu.integrate(u.u);
  rep.pt_mu_dRiesz = integrate_potential(riesz_K, Potential(mu));
  rep.pt_theta_dRiesz = integrate_potential(riesz_K, Potential(theta));
  rep.lhs = rep.int_u_theta + rep.pt_mu_dRiesz;
  rep.rhs = rep.pt_theta_dRiesz + rep.int_u_mu;

  if (rep.lhs.indeterminate_value() || rep.rhs.indeterminate_value()) {
    rep.pass = false;
    rep.rel_error = std::numeric_limits<double>::quiet_NaN();
    rep.diagnosis = "indeterminate side (inf - inf)";
    return rep;
  }
  if (rep.lhs.finite() && rep.rhs.finite()) {
    const double a = rep.lhs.value(), b = rep.rhs.value();
    rep.rel_error = std::fabs(a - b) / (1.0 + std::fabs(a) + std::fabs(b));
  } else {
    rep.rel_error = rep.lhs == rep.rhs ? 0.0 : kInf;
    rep.diagnosis = "infinite sides";
  }
  rep.pass = rep.rel_error <= tol;

  if (rep.int_u_theta.finite()) {
    ExtReal diff = integrate_potential(riesz_K, Potential::difference(mu, theta));
    ExtReal rhs2 = rep.int_u_mu - diff;
    if (rhs2.finite()) {
      rep.rearranged_checked = true;
      const double a = rep.int_u_theta.value(), b = rhs2.value();
      rep.rearranged_rel_error = std::fabs(a - b) / (1.0 + std::fabs(a) + std::fabs(b));
      rep.pass = rep.pass && rep.rearranged_rel_error <= tol;
    } else {
      rep.diagnosis += rep.diagnosis.empty() ? "" : "; ";
      rep.diagnosis += "rearranged form not finite (" + rhs2.str() + ")";
    }
  }
  return rep;
}

std::vector<PJInstance> standard_pj_instances() {
  std::vector<PJInstance> out;
  const Point o2{0, 0}, o3{0, 0, 0};
  const Ball disk{o2, 1.0}, ball{o3, 1.0};

  out.push_back({"disk-classical", Measure::dirac(o2), harmonic_measure(disk, o2),
                 log_modulus({{Point{0.5, 0}, 1.0}})});
  out.push_back({"disk-two-zeros", Measure::dirac(o2), harmonic_measure(disk, o2),
                 log_modulus({{Point{0.5, 0}, 1.0}, {Point{-0.5, 0}, 1.0}})});
  const Point x{0.2, 0.1};
  out.push_back({"disk-off-centre", Measure::dirac(x), harmonic_measure(disk, x),
                 log_modulus({{Point{-0.3, 0.4}, 1.0}, {Point{0.6, -0.2}, 2.0}})});
  out.push_back({"disk-harmonic-u", Measure::dirac(x), harmonic_measure(disk, x),
                 log_modulus({}, [](const Point& p) { return p[0] * p[0] - p[1] * p[1] + p[0]; })});
  out.push_back({"disk-jensen-mixture", Measure::dirac(o2),
                 jensen_measure(disk, o2, JensenMixture{0.4, 0.6}),
                 log_modulus({{Point{0.3, 0.3}, 1.0}})});
  out.push_back({"disk-mollified", Measure::dirac(o2), jensen_measure(disk, o2, JensenMollified{0.4}),
                 log_modulus({{Point{0.05, 0.0}, 1.0}, {Point{-0.7, 0.1}, 1.0}})});
  out.push_back({"disk-ball-to-sphere", Measure(2, {BallUniform{o2, 0.3, 1.0}}),
                 Measure(2, {SphereLayer{o2, 0.8, 1.0, {}}}),
                 log_modulus({{Point{0.5, 0}, 1.0}, {Point{0.1, 0.1}, 1.0}})});
  {
    auto ex = lyons_example(2, 0.3, 0.9, 0.6, 4, 0.05);
    out.push_back({"disk-lyons", ex.theta, ex.mu_E,
                   log_modulus({{ex.E.front() + Point{0.02, 0.0}, 1.0}, {Point{0.1, -0.1}, 1.0}})});
  }
  out.push_back({"ball-classical", Measure::dirac(o3), harmonic_measure(ball, o3),
                 log_modulus({{Point{0.5, 0, 0}, 1.0}})});
  const Point x3{0.1, 0.0, 0.2};
  out.push_back({"ball-off-centre", Measure::dirac(x3), harmonic_measure(ball, x3),
                 log_modulus({{Point{0.4, 0.3, 0}, 1.0}, {Point{-0.2, 0, -0.5}, 0.5}})});
  out.push_back({"ball-ball-to-sphere", Measure(3, {BallUniform{o3, 0.3, 1.0}}),
                 Measure(3, {SphereLayer{o3, 0.8, 1.0, {}}}), log_modulus({{Point{0, 0.5, 0}, 1.0}})});
  {
    auto ex = lyons_example(3, 0.3, 0.9, 0.6, 4, 0.05);
    out.push_back({"ball-lyons", ex.theta, ex.mu_E,
                   log_modulus({{ex.E.front() + Point{0.0, 0.02, 0.0}, 1.0}})});
  }
  return out;
}

PhragmenLindelofReport phragmen_lindelof_bound(const ASPotential& V, const GreenModel& green,
                                               const Ball& S_o, double r, int probes,
                                               std::uint64_t seed) {
  if (V.pole_coefficient > 1.0 + 1e-3)
    throw PreconditionError("phragmen_lindelof_bound: pole coefficient " +
                            std::to_string(V.pole_coefficient) + " exceeds 1");
  if (distance(V.pole, green.pole()) != 0.0)
    throw PreconditionError("potential and Green function have different poles");
  const Ball& D = green.domain();
  const int d = D.center.dim();
  PhragmenLindelofReport rep;
  rep.worst_upper_margin = kInf;
  Rng rng(seed);
  while (static_cast<int>(rep.probes) < probes) {
    Point x(d);
    for (int a = 0; a < d; ++a) x[a] = D.center[a] + rng.uniform(-1.0, 1.0) * D.radius;
    if (distance(x, D.center) >= D.radius || distance(x, V.pole) < 1e-6) continue;
    ++rep.probes;
    const double m = (green(x) - V.field.eval_unchecked(x)).to_double();
    rep.worst_upper_margin = std::min(rep.worst_upper_margin, m);
  }
  rep.upper_pass = rep.worst_upper_margin >= -1e-7;

  if (V.source) {
    const Measure& mu = *V.source;
    const Ball L{S_o.center, S_o.radius + 3.0 * r};
    const double dist = mu.distance_to_support(L);
    if (dist > 0.0) {
      const double sup = distance(V.pole, L.center) + L.radius;
      rep.lower_bound = mu.total_mass() * radial_kernel(d, dist).value() - radial_kernel(d, sup).value();
      rep.probed_inf = kInf;
      for (int k = 0; k <= 12; ++k)
        for (const auto& u : sphere_directions(d, d == 2 ? 64 : 128)) {
          const Point y = L.center + (L.radius * k / 12.0) * u;
          if (distance(y, V.pole) < 1e-9) continue;
          rep.probed_inf = std::min(rep.probed_inf, V.field.eval_unchecked(y).to_double());
        }
      rep.lower_checked = true;
      rep.lower_pass = rep.probed_inf >= rep.lower_bound - 1e-9;
    }
  }
  return rep;
}

}  // namespace potkit
