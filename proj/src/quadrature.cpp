#include "potkit/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "potkit/errors.hpp"

namespace potkit {

namespace {

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw PreconditionError("gauss_legendre requires n >= 1");
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  Rule1D r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    gsl_integration_glfixed_point(a, b, static_cast<size_t>(i), &r.x[i], &r.w[i], t);
  gsl_integration_glfixed_table_free(t);
  return r;
}

Rule1D graded_gauss(int n, int levels, double a, double b) {
  Rule1D out;
  double hi = b;
  auto add = [&](double lo, double up) {
    Rule1D p = gauss_legendre(n, lo, up);
    out.x.insert(out.x.end(), p.x.begin(), p.x.end());
    out.w.insert(out.w.end(), p.w.begin(), p.w.end());
  };
  for (int k = 0; k < levels; ++k) {
    double mid = a + 0.5 * (hi - a);
    add(mid, hi);
    hi = mid;
  }
  add(a, hi);
  return out;
}

const Rule& sphere_rule(int d, int n) {
  static std::map<std::pair<int, int>, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex());
  auto& slot = cache[{d, n}];
  if (slot) return *slot;
  auto r = std::make_unique<Rule>();
  if (d == 1) {
    r->nodes = {Point{-1.0}, Point{1.0}};
    r->weights = {0.5, 0.5};
  } else if (d == 2) {
    for (int k = 0; k < n; ++k) {
      double t = 2.0 * std::numbers::pi * k / n;
      r->nodes.push_back(Point{std::cos(t), std::sin(t)});
      r->weights.push_back(1.0 / n);
    }
  } else if (d == 3) {
    Rule1D z = gauss_legendre(n, -1.0, 1.0);
    const int m = 2 * n;
    for (int i = 0; i < n; ++i) {
      double rho = std::sqrt(std::max(0.0, 1.0 - z.x[i] * z.x[i]));
      for (int k = 0; k < m; ++k) {
        double phi = 2.0 * std::numbers::pi * (k + 0.5) / m;
        r->nodes.push_back(Point{rho * std::cos(phi), rho * std::sin(phi), z.x[i]});
        r->weights.push_back(0.5 * z.w[i] / m);
      }
    }
  } else {
    throw PreconditionError("sphere quadrature implemented for d <= 3");
  }
  slot = std::move(r);
  return *slot;
}

Rule focused_sphere_rule(const Point& focus, int levels, int n, int azimuth) {
  const int d = focus.dim();
  Rule r;
  Point f = focus / focus.norm();
  if (d == 1) return sphere_rule(1, 2);
  if (d == 2) {
    Rule1D t = graded_gauss(n, levels, 0.0, std::numbers::pi);
    const double base = std::atan2(f[1], f[0]);
    for (std::size_t i = 0; i < t.x.size(); ++i) {
      for (int s : {-1, 1}) {
        double a = base + s * t.x[i];
        r.nodes.push_back(Point{std::cos(a), std::sin(a)});
        r.weights.push_back(t.w[i] / (2.0 * std::numbers::pi));
      }
    }
    return r;
  }
  if (d != 3) throw PreconditionError("focused sphere rule implemented for d <= 3");
  // Orthonormal frame with e3 = f.
  Point e1 = std::fabs(f[0]) < 0.9 ? Point{1.0, 0.0, 0.0} : Point{0.0, 1.0, 0.0};
  e1 -= f.dot(e1) * f;
  e1 = e1 / e1.norm();
  Point e2{f[1] * e1[2] - f[2] * e1[1], f[2] * e1[0] - f[0] * e1[2], f[0] * e1[1] - f[1] * e1[0]};
  Rule1D t = graded_gauss(n, levels, 0.0, std::numbers::pi);
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    double st = std::sin(t.x[i]);
    double ct = std::cos(t.x[i]);
    for (int k = 0; k < azimuth; ++k) {
      double phi = 2.0 * std::numbers::pi * (k + 0.5) / azimuth;
      r.nodes.push_back(ct * f + st * std::cos(phi) * e1 + st * std::sin(phi) * e2);
      r.weights.push_back(0.5 * st * t.w[i] / azimuth);
    }
  }
  return r;
}

const Rule& ball_rule(int d, int radial, int angular, int levels) {
  static std::map<std::tuple<int, int, int, int>, std::unique_ptr<Rule>> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto it = cache.find({d, radial, angular, levels});
    if (it != cache.end() && it->second) return *it->second;
  }
  const Rule& s = sphere_rule(d, angular);
  auto r = std::make_unique<Rule>();
  // Radial density d * rho^{d-1} on [0, 1]; graded towards 0 so that kernels
  // centred at the ball centre are integrated accurately.
  Rule1D rad = graded_gauss(radial, levels, 0.0, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rad.x.size(); ++i) {
    double wr = rad.w[i] * d * std::pow(rad.x[i], d - 1);
    for (std::size_t k = 0; k < s.nodes.size(); ++k) {
      r->nodes.push_back(rad.x[i] * s.nodes[k]);
      r->weights.push_back(wr * s.weights[k]);
      total += wr * s.weights[k];
    }
  }
  for (auto& w : r->weights) w /= total;
  std::lock_guard<std::mutex> lock(cache_mutex());
  auto& slot = cache[{d, radial, angular, levels}];
  if (!slot) slot = std::move(r);
  return *slot;
}

}  // namespace potkit
