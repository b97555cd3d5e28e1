// Acceptance run: one PASS/FAIL line per criterion, exit 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "potkit/balayage.hpp"
#include "potkit/duality.hpp"
#include "potkit/fields.hpp"
#include "potkit/green.hpp"
#include "potkit/kernels.hpp"
#include "potkit/potentials.hpp"
#include "potkit/quadrature.hpp"
#include "potkit/scenario.hpp"
#include "potkit/zeros.hpp"

#ifndef POTKIT_BIN
#define POTKIT_BIN "potkit"
#endif

using namespace potkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) note << "failed: ";
    else note << "; ";
    note << what;
    pass = false;
  }
};

struct Criterion {
  int number;
  std::string name;
  double budget_s;  // 0 = no runtime requirement
  std::function<void(Outcome&)> run;
};

std::string fmt_num(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

ScenarioReport run_preset(const std::string& name) {
  const Preset* p = find_preset(name);
  if (p == nullptr) throw Error("missing preset " + name);
  return run_scenario(parse_scenario(p->text, "preset:" + name));
}

const CheckOutcome* find_check(const ScenarioReport& r, const std::string& id) {
  for (const auto& c : r.checks)
    if (c.id == id) return &c;
  return nullptr;
}

void require_preset(Outcome& o, const ScenarioReport& r) {
  for (const auto& c : r.checks)
    o.require(c.pass(), r.name + "/" + c.id + (c.error.empty() ? "" : " (" + c.error + ")"));
}

// Gamma at d/2 by the recursion from Gamma(1/2) and Gamma(1).
double gamma_half(int d) {
  double g = d % 2 == 0 ? 1.0 : std::sqrt(M_PI);
  for (int k = d % 2 == 0 ? 2 : 1; k < d; k += 2) g *= k / 2.0;
  return g;
}

void kernel_constants(Outcome& o) {
  for (int d = 1; d <= 8; ++d) {
    const double want = gamma_half(d) / (2.0 * std::pow(M_PI, d / 2.0) * std::max(1, d - 2));
    const double got = riesz_normalizer(d);
    o.require(std::fabs(got - want) <= 1e-13 * want, "c_" + std::to_string(d));
  }
  const double ball[] = {1.0, 2.0, M_PI, 4.0 * M_PI / 3.0, M_PI * M_PI / 2.0, 8.0 * M_PI * M_PI / 15.0};
  for (int p = 0; p <= 5; ++p)
    o.require(std::fabs(unit_ball_volume(p) - ball[p]) <= 1e-14 * ball[p], "b_" + std::to_string(p));
  Rng rng(2024);
  const double qs[] = {-1.0, 0.0, 1.0, 2.0};
  int bad = 0;
  for (int k = 0; k < 10000; ++k) {
    const double q = qs[rng.next() % 4];
    const double t1 = std::exp(rng.uniform(-8, 4)), t2 = t1 * (1.0 + std::exp(rng.uniform(-12, 2)));
    if (!(k_eval(q, t1) < k_eval(q, t2))) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " non-monotone pairs");
  o.note << "c_d d=1..8, b_p p=0..5, 10000 pairs";
}

void asymptotics(Outcome& o) {
  const std::vector<Measure> ms = {
      Measure(2, {Atom{Point{1, 0}, 1.0}}),
      Measure(2, {Atom{Point{0.5, 0.2}, 1.0}, Atom{Point{-0.3, 0.4}, 2.0}}),
      Measure(2, {BallUniform{Point{0.4, -0.3}, 0.5, 1.5}}),
      Measure(3, {SphereLayer{Point{0.3, 0, 0.1}, 0.6, 1.0, {}}}),
      Measure(3, {Atom{Point{0.5, 0, 0}, 1.0}, RadialBump{Point{0, -0.4, 0.2}, 0.3, 2.0}}),
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const AsymptoticReport r = asymptotic_check(ms[i], {10, 20, 40});
    bool ok = r.bounded;
    for (std::size_t k = 1; k < r.e.size(); ++k) {
      const double ratio = r.e[k] / r.e[k - 1];
      worst = std::max(worst, ratio);
      ok = ok && ratio <= 1.1;
    }
    o.require(ok, "measure " + std::to_string(i));
  }
  o.note << "5 measures, worst ratio " << fmt_num(worst);
}

void green_suite(Outcome& o) {
  const ScenarioReport r = run_preset("green-disk");
  require_preset(o, r);
  const CheckOutcome* g = find_check(r, "g-half");
  const CheckOutcome* p = find_check(r, "poisson");
  const CheckOutcome* j = find_check(r, "jensen");
  o.require(g && p && j, "preset checks present");
  if (!(g && p && j)) return;
  o.require(std::fabs(g->metrics["value"].get<double>() - std::log(2.0)) <= 1e-9, "g(0.5e1, 0) = ln 2");
  o.require(p->metrics["probes"] == 6 && p->metrics["worst_error"].get<double>() <= 1e-8, "Poisson reproduction");
  o.require(j->metrics["probes"] == 20, "20 Jensen probes");
  o.note << "|g - ln 2| = " << fmt_num(g->metrics["error"].get<double>()) << ", Poisson worst "
         << fmt_num(p->metrics["worst_error"].get<double>());
}

void poisson_jensen(Outcome& o) {
  const auto inst = standard_pj_instances();
  o.require(inst.size() == 12, "12 instances");
  std::vector<std::future<PoissonJensenReport>> jobs;
  for (const auto& i : inst)
    jobs.push_back(std::async(std::launch::async, [&i] { return verify_poisson_jensen(i.theta, i.mu, i.u); }));
  double worst = 0.0;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const PoissonJensenReport r = jobs[k].get();
    worst = std::max(worst, r.rel_error);
    o.require(r.pass && r.rel_error <= 1e-6, inst[k].name);
    if (k == 0) {
      o.require(std::fabs(r.int_u_theta.value() - std::log(0.5)) <= 1e-9, "classical: int u dtheta = ln 0.5");
      o.require(std::fabs(r.int_u_mu.value()) <= 1e-9, "classical: int u dmu = 0");
      o.require(std::fabs(r.pt_mu_dRiesz.value() - r.pt_theta_dRiesz.value() - std::log(2.0)) <= 1e-9,
                "classical: potential term ln 2");
    }
  }
  o.note << "12 instances, worst rel error " << fmt_num(worst);
}

void gluing(Outcome& o) {
  for (const char* name : {"gluing-max", "gluing-green"}) {
    const ScenarioReport r = run_preset(name);
    require_preset(o, r);
    for (const auto& c : r.checks) {
      if (c.type != "glue_with_green") continue;
      o.require(c.metrics["bound_violations"] == 0, c.id + " bounds");
      const double ratio = c.metrics["pole_fit_ratio"].get<double>();
      o.require(std::fabs(ratio - 1.0) <= 0.05, c.id + " pole ratio");
      o.note << c.id << " pole ratio " << fmt_num(ratio) << "; ";
    }
  }
  o.note << "500 probes per gluing";
}

void balayage(Outcome& o) {
  const ScenarioReport masses = run_preset("balayage-masses");
  require_preset(o, masses);
  const ScenarioReport lyons = run_preset("lyons-example");
  require_preset(o, lyons);
  const CheckOutcome* har = find_check(lyons, "harmonic");
  const CheckOutcome* sub = find_check(lyons, "subharmonic");
  o.require(har && sub, "Lyons checks present");
  if (har && sub) {
    o.require(har->result, "Lyons: harmonic family passes");
    o.require(!sub->result, "Lyons: subharmonic kernel family fails");
  }
  if (const CheckOutcome* c = find_check(masses, "convolution"))
    o.note << "convolution degradation " << fmt_num(c->metrics["worst_degradation"].get<double>()) << ", ";
  o.note << "Lyons PASS(har)/FAIL(sub)";
}

// Ten positive smooth probes.
std::vector<std::function<double(const Point&)>> probes() {
  std::vector<std::function<double(const Point&)>> out;
  out.push_back([](const Point&) { return 1.0; });
  for (int a = 0; a < 2; ++a) out.push_back([a](const Point& p) { return 2.0 + p[a]; });
  out.push_back([](const Point& p) { return 1.0 + p[0] * p[0]; });
  out.push_back([](const Point& p) { return 1.0 + p[0] * p[1]; });
  out.push_back([](const Point& p) { return std::exp(-(p[0] * p[0] + p[1] * p[1])); });
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

double round_trip_error(const ASPotential& V, const Measure& mu, double h) {
  const RecoveredMeasure rec = from_potential(V, h);
  double worst = 0.0;
  for (const auto& f : probes()) {
    const double a = integral(mu, f), b = integral(rec.measure, f);
    worst = std::max(worst, std::fabs(a - b) / std::fabs(a));
  }
  return worst;
}

void duality(Outcome& o) {
  const Point o2{0, 0}, x{0.2, 0.1};
  const Ball D{o2, 1.0};
  struct Case {
    std::string name;
    Measure mu;
    Point x;
    PotentialKind kind;
  };
  const auto lyons = lyons_example(2, 0.3, 0.9, 0.6037, 4, 0.05);
  const auto shifted = lyons_example(2, 0.25, 0.85, 0.55, 3, 0.07);
  const std::vector<Case> cases = {
      {"AS harmonic measure at 0", harmonic_measure(D, o2), o2, PotentialKind::ArensSinger},
      {"AS harmonic measure at x", harmonic_measure(D, x), x, PotentialKind::ArensSinger},
      {"AS Lyons", lyons.mu_E, o2, PotentialKind::ArensSinger},
      {"AS Lyons shifted", shifted.mu_E, o2, PotentialKind::ArensSinger},
      {"AS two spheres", Measure(2, {SphereLayer{o2, 0.6, 0.5, {}}, SphereLayer{o2, 0.9, 0.5, {}}}), o2,
       PotentialKind::ArensSinger},
      {"J mixture", jensen_measure(D, o2, JensenMixture{0.4, 0.6}), o2, PotentialKind::Jensen},
      {"J mollified at 0", jensen_measure(D, o2, JensenMollified{0.1}), o2, PotentialKind::Jensen},
      {"J mollified at x", jensen_measure(D, x, JensenMollified{0.2}), x, PotentialKind::Jensen},
      {"J ball", Measure(2, {BallUniform{o2, 0.7, 1.0}}), o2, PotentialKind::Jensen},
      {"J sub-balls", jensen_measure(D, o2, JensenSubBalls{{{Ball{o2, 0.5}, 0.5}, {Ball{Point{0.1, 0}, 0.8}, 0.5}}}),
       o2, PotentialKind::Jensen},
  };
  struct Errs {
    bool certified = false;
    double coarse = INFINITY, fine = INFINITY;
  };
  std::vector<std::future<Errs>> jobs;
  for (const auto& c : cases)
    jobs.push_back(std::async(std::launch::async, [&c] {
      Errs e;
      const Certificate cert = certify(c.mu, c.x, c.kind);
      e.certified = cert.verdict.pass;
      if (!e.certified) return e;
      const ASPotential V = to_potential(c.mu, c.x, cert);
      e.coarse = round_trip_error(V, c.mu, 0.02);
      e.fine = round_trip_error(V, c.mu, 0.01);
      return e;
    }));
  double worst = 0.0;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const Errs e = jobs[k].get();
    worst = std::max(worst, e.coarse);
    o.require(e.certified, cases[k].name + " certificate");
    o.require(e.coarse <= 0.02, cases[k].name + " error at h=0.02");
    o.require(e.fine < e.coarse, cases[k].name + " refinement");
  }

  const GreenModel g(D, o2);
  const Measure omega = harmonic_measure(Ball{o2, 0.9}, o2);
  const Certificate cert = certify(omega, o2, PotentialKind::Jensen);
  o.require(cert.verdict.pass, "Phragmen-Lindelof certificate");
  if (cert.verdict.pass) {
    const PhragmenLindelofReport pl = phragmen_lindelof_bound(to_potential(omega, o2, cert), g, Ball{o2, 0.2}, 0.1);
    o.require(pl.probes == 500 && pl.upper_pass, "V <= g_D at 500 probes");
  }
  o.note << "10 measures, worst error at h=0.02 " << fmt_num(worst);
}

void riesz_recovery(Outcome& o) {
  GridDomain grid = GridDomain::covering(Point{-1, -1}, Point{1, 1}, 0.05);
  for (std::size_t i = 0; i < grid.size(); ++i) grid.set(i, true);
  const ScalarField sq(Space{2}, [](const Point& p) { return ExtReal(p.norm2()); });
  const RieszResult r = riesz_measure(sample(sq, grid));
  const auto& dens = std::get<GridDensity>(r.measure.components()[0]);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!grid.is_boundary_cell(i)) worst = std::max(worst, std::fabs(dens.values[i] - 2.0 / M_PI));
  o.require(worst <= 1e-8, "density of |x|^2");

  const Ball disk{Point{0, 0}, 1.0};
  const std::vector<HoloFunction> fs_ = {HoloFunction(Polynomial{{Complex(-0.5, 0.25), 1.0}}),
                                         HoloFunction(Polynomial{{0.09, -0.6, 1.0}}),
                                         HoloFunction(Polynomial{{Complex(0.075, 0.29), Complex(0.35, 0.4), 1.0}})};
  double window = 0.0;
  for (std::size_t k = 0; k < fs_.size(); ++k) {
    const PoincareLelongTrend t = poincare_lelong_trend(fs_[k], disk, 0.01);
    window = std::max(window, t.coarse.worst_rel_error);
    o.require(t.pass && t.coarse.worst_rel_error <= 0.05, "Poincare-Lelong function " + std::to_string(k));
  }
  o.note << "density error " << fmt_num(worst) << ", worst window error " << fmt_num(window);
}

void zeros(Outcome& o) {
  for (const char* name : {"zeros-polynomial", "zeros-blaschke"}) {
    const ScenarioReport r = run_preset(name);
    require_preset(o, r);
    for (const auto& c : r.checks) {
      if (c.type == "zeros_thm") o.require(c.metrics["implication_holds"] == true, std::string(name) + " implication");
      if (c.type == "zeros_thm" || c.type == "criterium") o.require(c.result, std::string(name) + "/" + c.id);
    }
  }
  const ScenarioReport div = run_preset("zeros-divergent");
  require_preset(o, div);
  const CheckOutcome* h = find_check(div, "harmonic-zeros");
  o.require(h && h->metrics["divergent"] == true, "divergent zeros flagged");
  o.note << "polynomial, Blaschke, divergent";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void cli_determinism(Outcome& o) {
  std::random_device rd;
  const fs::path root = fs::temp_directory_path() / ("potkit-acceptance-" + std::to_string(rd()));
  int checked = 0;
  for (const auto& p : presets()) {
    std::string text[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path dir = root / (p.name + "-" + std::to_string(k));
      const std::string cmd = std::string("\"") + POTKIT_BIN + "\" preset " + p.name + " --seed 0 -q --out \"" +
                              dir.string() + "\" > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      o.require(rc == 0, p.name + " run " + std::to_string(k) + " exit status");
      text[k] = slurp(dir / "verdicts.json");
    }
    o.require(!text[0].empty() && text[0] == text[1], p.name + " verdicts differ");
    ++checked;
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  o.note << checked << " presets byte-identical";
}

}  // namespace

int main() {
  const std::vector<Criterion> all = {
      {1, "kernel and constant suite", 1.0, kernel_constants},
      {2, "potential asymptotics", 5.0, asymptotics},
      {3, "Green and harmonic-measure suite", 0.0, green_suite},
      {4, "generalized Poisson-Jensen", 30.0, poisson_jensen},
      {5, "gluing suite", 0.0, gluing},
      {6, "balayage suite", 0.0, balayage},
      {7, "duality round trip", 0.0, duality},
      {8, "Riesz recovery and Poincare-Lelong", 0.0, riesz_recovery},
      {9, "zeros criteria", 300.0, zeros},
      {10, "CLI determinism", 0.0, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0) o.require(secs < c.budget_s, "runtime over " + fmt_num(c.budget_s) + " s");
    failed += o.pass ? 0 : 1;
    std::printf("%s [%2d] %-36s %8.2f s  %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name.c_str(), secs,
                o.note.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
