#include "potkit/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "potkit/errors.hpp"
#include "potkit/fields.hpp"
#include "potkit/quadrature.hpp"

namespace potkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// p^{(j)}(z) and the matching absolute scale sum |a_i| i!/(i-j)! |z|^{i-j}.
std::pair<Complex, double> derivative(const std::vector<Complex>& a, int j, Complex z) {
  Complex v = 0.0;
  double s = 0.0;
  const double az = std::abs(z);
  for (int i = static_cast<int>(a.size()) - 1; i >= j; --i) {
    double f = 1.0;
    for (int k = 0; k < j; ++k) f *= i - k;
    v = v * z + f * a[static_cast<std::size_t>(i)];
    s = s * az + f * std::abs(a[static_cast<std::size_t>(i)]);
  }
  return {v, s};
}

Complex newton_polish(const std::vector<Complex>& a, Complex z) {
  for (int it = 0; it < 3; ++it) {
    const Complex d1 = derivative(a, 1, z).first;
    if (std::abs(d1) == 0.0) break;
    const Complex step = derivative(a, 0, z).first / d1;
    if (!std::isfinite(std::abs(step))) break;
    z -= step;
  }
  return z;
}

ScalarField constant_field(double c) { return ScalarField::constant(Domain(Space{2}), c); }

ScalarField quadratic_field(double c, double a) {
  return ScalarField(Domain(Space{2}), [c, a](const Point& p) { return ExtReal(c + a * (p[0] * p[0] + p[1] * p[1])); });
}

Ball layer_of(const Ball& S_o, double r) { return Ball{S_o.center, S_o.radius + 3.0 * r}; }

HolStage stage(std::string name, const Measure& theta, const Measure& mu, const TestFamily& fam,
               const Ball& S_o, const BalayageOptions& opts) {
  HolStage s;
  s.name = std::move(name);
  s.verdict = check_affine(theta, mu, fam, Domain(S_o), opts);
  s.C = s.verdict.C;
  s.pass = s.verdict.pass && std::isfinite(s.C);
  return s;
}

}  // namespace

// ---- holomorphic functions -------------------------------------------------

HoloFunction::HoloFunction(Polynomial p) : f_(std::move(p)), domain_(Space{2}) {
  const auto& a = std::get<Polynomial>(f_).coeffs;
  if (std::none_of(a.begin(), a.end(), [](Complex c) { return c != 0.0; }))
    throw PreconditionError("the zero polynomial has no locally finite zero set");
  name = "polynomial";
}

HoloFunction::HoloFunction(BlaschkeProduct b) : f_(std::move(b)), domain_(Ball{Point{0, 0}, 1.0}) {
  const auto& B = std::get<BlaschkeProduct>(f_);
  for (std::size_t k = 0; k < std::min(B.length, B.zeros.size()); ++k)
    if (!(std::abs(B.zeros[k]) < 1.0)) throw PreconditionError("Blaschke zeros must lie in the unit disk");
  name = "blaschke";
}

HoloFunction::HoloFunction(ExplicitZeroSet z, Domain domain) : f_(std::move(z)), domain_(std::move(domain)) {
  const auto& E = std::get<ExplicitZeroSet>(f_);
  if (!E.log_abs) throw PreconditionError("explicit zero set needs an evaluable |f|");
  for (const auto& w : E.zeros) {
    if (w.multiplicity < 1) throw PreconditionError("multiplicities must be positive");
    if (!domain_.contains(to_point(w.z))) throw PreconditionError("declared zero outside the domain");
  }
  name = "explicit";
}

ExtReal HoloFunction::log_abs(Complex z) const {
  if (const auto* p = std::get_if<Polynomial>(&f_)) {
    const double m = std::abs(derivative(p->coeffs, 0, z).first);
    return m == 0.0 ? ExtReal::neg_inf() : ExtReal(std::log(m));
  }
  if (const auto* b = std::get_if<BlaschkeProduct>(&f_)) {
    double s = 0.0;
    for (std::size_t k = 0; k < std::min(b->length, b->zeros.size()); ++k) {
      const Complex a = b->zeros[k];
      const double num = std::abs(a - z);
      if (num == 0.0) return ExtReal::neg_inf();
      s += std::log(num) - std::log(std::abs(1.0 - std::conj(a) * z));
    }
    return ExtReal(s);
  }
  const double v = std::get<ExplicitZeroSet>(f_).log_abs(z);
  return std::isinf(v) && v < 0 ? ExtReal::neg_inf() : ExtReal(v);
}

Complex HoloFunction::value(Complex z) const {
  if (const auto* p = std::get_if<Polynomial>(&f_)) return derivative(p->coeffs, 0, z).first;
  if (const auto* b = std::get_if<BlaschkeProduct>(&f_)) {
    Complex v = 1.0;
    for (std::size_t k = 0; k < std::min(b->length, b->zeros.size()); ++k) {
      const Complex a = b->zeros[k];
      const Complex u = a == 0.0 ? Complex(1.0) : std::abs(a) / a;
      v *= a == 0.0 ? z : u * (a - z) / (1.0 - std::conj(a) * z);
    }
    return v;
  }
  throw PreconditionError("an explicit zero set only provides |f|");
}

std::vector<Zero> HoloFunction::zeros() const {
  if (const auto* p = std::get_if<Polynomial>(&f_)) return polynomial_roots(*p);
  if (const auto* b = std::get_if<BlaschkeProduct>(&f_)) {
    std::vector<Zero> out;
    for (std::size_t k = 0; k < std::min(b->length, b->zeros.size()); ++k) {
      auto it = std::find_if(out.begin(), out.end(), [&](const Zero& w) { return w.z == b->zeros[k]; });
      if (it == out.end())
        out.push_back({b->zeros[k], 1});
      else
        ++it->multiplicity;
    }
    return out;
  }
  return std::get<ExplicitZeroSet>(f_).zeros;
}

ScalarField HoloFunction::log_modulus() const {
  HoloFunction self = *this;
  ScalarField f(domain_, [self](const Point& p) { return self.log_abs(to_complex(p)); });
  f.named("ln|" + name + "|");
  return f;
}

double blaschke_sum(const BlaschkeProduct& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < std::min(b.length, b.zeros.size()); ++k) s += 1.0 - std::abs(b.zeros[k]);
  return s;
}

std::vector<Zero> polynomial_roots(const Polynomial& p) {
  std::vector<Complex> a = p.coeffs;
  while (!a.empty() && a.back() == 0.0) a.pop_back();
  if (a.empty()) throw PreconditionError("the zero polynomial has no locally finite zero set");
  const int n = static_cast<int>(a.size()) - 1;
  if (n == 0) return {};

  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -a[static_cast<std::size_t>(i)] / a.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  if (es.info() != Eigen::Success) throw NumericError("companion eigenvalues did not converge");
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);

  // Cluster nearby eigenvalues; a cluster of size m is one zero of multiplicity
  // m when p, ..., p^{(m-1)} vanish (tolerance 1e-9) at its mean.
  std::vector<bool> used(ev.size(), false);
  std::vector<Zero> out;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> cl{i};
    used[i] = true;
    for (std::size_t j = i + 1; j < ev.size(); ++j)
      if (!used[j] && std::abs(ev[j] - ev[i]) <= 1e-3 * (1.0 + std::abs(ev[i]))) {
        cl.push_back(j);
        used[j] = true;
      }
    Complex c = 0.0;
    for (auto j : cl) c += ev[j];
    c /= static_cast<double>(cl.size());
    const int m = static_cast<int>(cl.size());
    bool multiple = m > 1;
    for (int j = 0; multiple && j < m; ++j) {
      auto [v, s] = derivative(a, j, c);
      if (std::abs(v) > 1e-9 * s) multiple = false;
    }
    if (m == 1 || !multiple) {
      for (auto j : cl) out.push_back({newton_polish(a, ev[j]), 1});
    } else {
      out.push_back({c, m});
    }
  }
  for (const auto& w : out) {
    auto [v, s] = derivative(a, 0, w.z);
    if (std::abs(v) > 1e-8 * s)
      throw NumericError("root residual " + std::to_string(std::abs(v) / s) + " exceeds 1e-8");
  }
  std::sort(out.begin(), out.end(), [](const Zero& x, const Zero& y) {
    return x.z.real() != y.z.real() ? x.z.real() < y.z.real() : x.z.imag() < y.z.imag();
  });
  return out;
}

Measure counting_measure(const std::vector<Zero>& zeros, const Domain& S) {
  Measure mu(2);
  for (const auto& w : zeros)
    if (S.contains(to_point(w.z))) mu.add(Atom{to_point(w.z), static_cast<double>(w.multiplicity)});
  return mu;
}

Measure counting_measure(const HoloFunction& f, const Domain& S) {
  if (!std::holds_alternative<Space>(f.domain().shape())) {
    const Ball b = S.bounding_ball();
    const Ball D = f.domain().bounding_ball();
    const bool inside = std::isfinite(b.radius) && f.domain().contains(b.center) &&
                        f.domain().boundary_distance(b.center) > b.radius;
    if (!inside || !(D.radius > 0.0)) throw PreconditionError("counting set is not compactly contained in the domain");
  }
  return counting_measure(f.zeros(), S);
}

// ---- Poincare-Lelong -------------------------------------------------------

PoincareLelongReport poincare_lelong_check(const HoloFunction& f, const Ball& region, double h,
                                           std::optional<double> window) {
  if (!(h > 0.0) || !(region.radius > 0.0)) throw PreconditionError("spacing and region radius must be positive");
  if (region.center.dim() != 2) throw PreconditionError("Poincare-Lelong check is planar");
  PoincareLelongReport rep;
  rep.h = h;
  rep.window = window.value_or(5.0 * h);

  const Point lo = region.center - Point{region.radius, region.radius};
  const Point hi = region.center + Point{region.radius, region.radius};
  GridDomain grid = GridDomain::covering(lo, hi, h);
  for (std::size_t i = 0; i < grid.size(); ++i) grid.set(i, true);

  std::vector<Zero> zs;
  for (const auto& w : f.zeros()) {
    const Point p = to_point(w.z);
    if (std::fabs(p[0] - region.center[0]) + rep.window > region.radius ||
        std::fabs(p[1] - region.center[1]) + rep.window > region.radius)
      continue;
    double dc = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double t = (p[a] - grid.origin()[a]) / h;
      dc += std::pow((t - std::round(t)) * h, 2);
    }
    if (std::sqrt(dc) < 0.25 * h)
      throw RegridError("zero " + p.str() + " lies within h/4 of a cell centre; shift or refine the grid");
    zs.push_back(w);
  }

  RieszResult rz = riesz_measure(sample(f.log_modulus(), grid));
  const auto& dens = std::get<GridDensity>(rz.measure.components().front());
  const double vol = dens.grid.cell_volume();
  for (std::size_t i = 0; i < dens.values.size(); ++i) rep.total_mass += dens.values[i] * vol;

  for (const auto& w : zs) {
    const Point p = to_point(w.z);
    ZeroWindow zw{w, 0.0, 0.0};
    for (std::size_t i = 0; i < dens.values.size(); ++i) {
      if (dens.values[i] == 0.0) continue;
      const Point c = dens.grid.center(i);
      if (std::fabs(c[0] - p[0]) <= 0.5 * rep.window && std::fabs(c[1] - p[1]) <= 0.5 * rep.window)
        zw.mass += dens.values[i] * vol;
    }
    zw.rel_error = std::fabs(zw.mass - w.multiplicity) / w.multiplicity;
    rep.worst_rel_error = std::max(rep.worst_rel_error, zw.rel_error);
    rep.windows.push_back(zw);
  }
  rep.pass = zs.empty() ? std::fabs(rep.total_mass) <= 1e-6 && rz.singular_cells.empty()
                        : rep.worst_rel_error <= 0.05;
  return rep;
}

PoincareLelongTrend poincare_lelong_trend(const HoloFunction& f, const Ball& region, double h) {
  PoincareLelongTrend t;
  t.coarse = poincare_lelong_check(f, region, h, 5.0 * h);
  t.fine = poincare_lelong_check(f, region, 0.5 * h, 5.0 * h);
  t.pass = t.coarse.pass && t.fine.pass;
  for (std::size_t k = 0; k < t.coarse.windows.size() && k < t.fine.windows.size(); ++k) {
    const double e = t.fine.windows[k].rel_error;
    t.ratios.push_back(e > 0.0 ? t.coarse.windows[k].rel_error / e : kInf);
    if (t.ratios.back() < 1.6) t.pass = false;
  }
  return t;
}

// ---- growth majorants ------------------------------------------------------

ExtReal GrowthMajorant::operator()(const Point& x) const { return M_plus(x) - M_minus(x); }

GrowthMajorant GrowthMajorant::constant(double c) {
  return {constant_field(c), constant_field(0.0), Measure(2), Measure(2), "const"};
}

GrowthMajorant GrowthMajorant::quadratic(double c, double a_plus, double a_minus, const Ball& D) {
  if (a_plus < 0.0 || a_minus < 0.0) throw PreconditionError("M_+ and M_- must be subharmonic");
  const double R2 = D.radius * D.radius;
  Measure mp(2), mm(2);
  if (a_plus > 0.0) mp.add(BallUniform{D.center, D.radius, 2.0 * a_plus * R2});
  if (a_minus > 0.0) mm.add(BallUniform{D.center, D.radius, 2.0 * a_minus * R2});
  return {quadratic_field(c, a_plus), quadratic_field(0.0, a_minus), mp, mm, "quadratic"};
}

void check_majorant(const HoloFunction& f, const GrowthMajorant& M, const Ball& D, int samples,
                    std::uint64_t seed) {
  Rng rng(seed);
  int done = 0;
  while (done < samples) {
    const Point p{D.center[0] + D.radius * rng.uniform(-1.0, 1.0), D.center[1] + D.radius * rng.uniform(-1.0, 1.0)};
    if (!(distance(p, D.center) < D.radius)) continue;
    ++done;
    const ExtReal lf = f.log_abs(to_complex(p));
    if (lf.is_neg_inf()) continue;
    const double m = M(p).to_double();
    if (lf.value() > m + 1e-12 * (1.0 + std::fabs(m)))
      throw PreconditionError("|f| > exp M at " + p.str() + " (ln|f| = " + lf.str() + ", M = " + std::to_string(m) + ")");
  }
}

// ---- zero distribution inequalities ----------------------------------------

HolFamilies hol_families(const Ball& D, const Ball& S_o, double r, double b_minus, double b_plus, int count) {
  HolFamilies h;
  const Domain S(S_o);
  h.pointwise = build_test_family(FamilyClass::SbhPlus0Bounded, S, r, b_minus, b_plus, D, count);
  h.averaged = build_test_family(FamilyClass::SbhPlus0Averaged, S, r, b_minus, b_plus, D, count);
  // a pointwise bound on b- implies the averaged one
  for (const auto& m : h.pointwise.members) h.averaged.members.push_back({"pw:" + m.id, m.field});
  h.compact = build_test_family(FamilyClass::Sbh00Bounded, S, r, b_minus, b_plus, D, count);
  h.positive = build_test_family(FamilyClass::Sbh00PlusLeq, S, r, b_minus, b_plus, D, count);
  return h;
}

std::string ThmHolReport::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "stage,member,lhs,rhs,margin,indeterminate\n";
  for (const HolStage* s : {&zI, &zII, &zIII})
    for (const auto& m : s->verdict.margins)
      os << s->name << ',' << m.id << ',' << m.lhs.str() << ',' << m.rhs.str() << ',' << m.margin << ','
         << (m.indeterminate ? 1 : 0) << '\n';
  return os.str();
}

ThmHolReport check_thm_hol(const HoloFunction& f, const GrowthMajorant& M, const Ball& D, const Ball& S_o,
                           double r, double b_minus, double b_plus, const HolFamilies& families,
                           const std::optional<std::vector<Zero>>& subdivisor, const BalayageOptions& opts) {
  if (!(0.0 < 3.0 * r) || !(b_minus < 0.0 && 0.0 < b_plus))
    throw PreconditionError("need 0 < 3r and b- < 0 < b+");
  check_majorant(f, M, D);
  const std::vector<Zero> zeros = f.zeros();
  const Measure theta = counting_measure(zeros, Domain(D));
  const Ball L = layer_of(S_o, r);

  ThmHolReport rep;
  const Measure mu_I = M.mu_plus.restrict(Domain(Annulus{L.center, L.radius, kInf})) - M.mu_minus;
  rep.zI = stage("ZI", theta, mu_I, families.averaged, S_o, opts);
  rep.zII = stage("ZII", theta, M.mu(), families.pointwise, S_o, opts);
  if (subdivisor) {
    for (const auto& w : *subdivisor) {
      auto it = std::find_if(zeros.begin(), zeros.end(), [&](const Zero& z) { return std::abs(z.z - w.z) <= 1e-9; });
      if (it == zeros.end() || w.multiplicity > it->multiplicity)
        throw PreconditionError("subdivisor exceeds the zero divisor at " + to_point(w.z).str());
    }
  }
  rep.zIII = stage("ZIII", counting_measure(subdivisor.value_or(zeros), Domain(D)), M.mu(), families.positive,
                   S_o, opts);

  rep.layer_mass = M.mu().simplified().restrict(Domain(Annulus{S_o.center, S_o.radius, L.radius})).total_variation();
  rep.implication_bound = rep.zI.C + std::max(b_plus, -b_minus) * rep.layer_mass;
  rep.implication_holds = rep.zII.C <= rep.implication_bound + 1e-6 * (1.0 + std::fabs(rep.implication_bound));
  return rep;
}

CriteriumReport check_criterium_forward(const std::vector<Zero>& Z, const HoloFunction& f, const GrowthMajorant& M,
                                        const Ball& D, const Ball& S_o, double r, double b_minus, double b_plus,
                                        const HolFamilies& families, const BalayageOptions& opts) {
  if (!(0.0 < 3.0 * r) || !(b_minus < 0.0 && 0.0 < b_plus))
    throw PreconditionError("need 0 < 3r and b- < 0 < b+");
  auto fz = f.zeros();
  for (const auto& w : Z) {
    auto it = std::find_if(fz.begin(), fz.end(), [&](const Zero& z) { return std::abs(z.z - w.z) <= 1e-9; });
    if (it == fz.end() || it->multiplicity != w.multiplicity)
      throw PreconditionError("f does not realize the zero set at " + to_point(w.z).str());
    fz.erase(it);
  }
  for (const auto& w : fz)
    if (distance(to_point(w.z), D.center) < D.radius)
      throw PreconditionError("f has an extra zero at " + to_point(w.z).str());

  CriteriumReport rep;
  try {
    check_majorant(f, M, D);
    rep.z1 = true;
  } catch (const PreconditionError&) {
    rep.z1 = false;
  }
  const Measure theta = counting_measure(Z, Domain(D));
  const Ball L = layer_of(S_o, r);
  const Measure mu_I = M.mu_plus.restrict(Domain(Annulus{L.center, L.radius, kInf})) - M.mu_minus;
  rep.z2 = stage("z2", theta, mu_I, families.averaged, S_o, opts);
  rep.z3 = stage("z3", theta, M.mu(), families.pointwise, S_o, opts);
  rep.z4 = stage("z4", theta, M.mu(), families.compact, S_o, opts);
  return rep;
}

GrowthTrend zero_growth_trend(const std::vector<Complex>& Z, const GrowthMajorant& M, const Ball& S_o,
                              const std::vector<std::size_t>& lengths, const HolFamilies& families) {
  if (lengths.size() < 3) throw PreconditionError("growth trend needs at least three truncations");
  const Ball D{Point{0, 0}, 1.0};
  GrowthTrend t;
  for (std::size_t N : lengths) {
    if (N > Z.size()) throw PreconditionError("truncation longer than the zero set");
    BlaschkeProduct b{Z, N};
    HoloFunction f(b);
    check_majorant(f, M, D);
    const HolStage s = stage("z3", counting_measure(f.zeros(), Domain(D)), M.mu(), families.pointwise, S_o, {});
    t.lengths.push_back(N);
    t.C.push_back(s.C);
    t.blaschke_sums.push_back(blaschke_sum(b));
  }
  const double first = t.C[1] - t.C[0];
  const double last = t.C.back() - t.C[t.C.size() - 2];
  t.divergent = !std::isfinite(t.C.back()) ||
                (last >= 0.5 * first && last > 1e-3 * (1.0 + std::fabs(t.C.back())));
  return t;
}

}  // namespace potkit
