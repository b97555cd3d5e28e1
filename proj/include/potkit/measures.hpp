#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "potkit/domain.hpp"
#include "potkit/ext_real.hpp"
#include "potkit/scalar_field.hpp"

namespace potkit {

struct Atom {
  Point at;
  double weight = 1.0;
};

// Layer on the sphere |x - center| = radius.  Uniform when `poisson_pole` is
// empty; otherwise the density is the Poisson kernel of the ball for that pole
// (the harmonic measure), scaled to `total`.
struct SphereLayer {
  Point center;
  double radius = 1.0;
  double total = 1.0;
  std::optional<Point> poisson_pole;
};

struct BallUniform {
  Point center;
  double radius = 1.0;
  double total = 1.0;
};

// Radial bump (1 - |x - c|^2/r^2)^4 on B(c, r), scaled to `total`.
struct RadialBump {
  Point center;
  double radius = 1.0;
  double total = 1.0;
};

// Piecewise-constant density per unit volume on the cells of a grid frame.
struct GridDensity {
  GridDomain grid;
  std::vector<double> values;
};

using Component = std::variant<Atom, SphereLayer, BallUniform, RadialBump, GridDensity>;

// Quadrature sizes used by integration; defaults follow the documented choices.
struct QuadratureOptions {
  int sphere_nodes_2d = 4096;
  int sphere_gauss_3d = 45;  // 45 x 90 product nodes, about 2^12
  int ball_radial = 8;
  int ball_angular_2d = 128;
  int ball_gauss_3d = 12;
};

class Measure {
 public:
  explicit Measure(int dim) : dim_(dim) {}
  Measure(int dim, std::vector<Component> comps);

  static Measure dirac(const Point& x, double w = 1.0);
  static Measure zero(int dim) { return Measure(dim); }

  int dim() const { return dim_; }
  const std::vector<Component>& components() const { return comps_; }
  Measure& add(Component c);
  bool empty() const { return comps_.empty(); }

  Measure operator+(const Measure& o) const;
  Measure operator-(const Measure& o) const { return *this + o.scaled(-1.0); }
  Measure scaled(double s) const;

  double total_mass() const;
  // Total variation of the charge after merging components with equal geometry.
  double total_variation() const;
  // Upper and lower variations (both returned as positive measures).
  std::pair<Measure, Measure> jordan() const;
  // Merge components that share geometry (atoms at one point, balls, uniform spheres).
  Measure simplified() const;
  bool is_positive() const;

  Measure restrict(const Domain& S) const;

  // Ball containing the support; radius 0 and centre at the origin when empty.
  Ball support_ball() const;
  double distance_to_support(const Point& p) const;
  // Distance between a closed ball and the support.
  double distance_to_support(const Ball& L) const;
  // Cells of `frame` whose closed cube meets the support.
  GridDomain support_mask(const GridDomain& frame) const;

  // Integral of f (extended-real conventions, 0 * inf = 0).  Kernel-form fields
  // are integrated exactly through potentials.
  ExtReal integrate(const ScalarField& f, const QuadratureOptions& q = {}) const;
  // pt_mu(y) = integral of K_{d-2}(x, y) dmu(x).
  ExtReal kernel_integral(const Point& y, const QuadratureOptions& q = {}) const;

 private:
  int dim_;
  std::vector<Component> comps_;
};

double integrate(const Measure& mu, const std::function<double(const Point&)>& f);
ExtReal integrate(const Measure& mu, const ScalarField& f, const QuadratureOptions& q = {});

// Normalized Poisson kernel P(x, zeta) of the ball B(c, R) (density against the
// normalized surface measure of the sphere).
double poisson_kernel(const Point& c, double R, const Point& x, const Point& zeta);

// Profile (1 - |x/r|^2)^4 normalized to unit mass.
struct Mollifier {
  double radius = 0.1;
  double density(const Point& x) const;
  static double normalization(int d, double r);
};

// Convolution of mu with a single mollifier, realized on a grid of the given
// spacing (mass is conserved exactly cell by cell).  `O` is the open set of the
// support condition.
Measure convolve_balayage(const Measure& mu, const Mollifier& m, const Domain& O, double spacing);
// Convolution with a point-dependent family x -> iota_x (pushed component list).
Measure convolve_balayage(const Measure& mu, const std::function<Measure(const Point&)>& family,
                          const Domain& O, const QuadratureOptions& q = {});

// Weighted point discretization of mu (atoms exact, layers by their quadrature rules).
std::vector<std::pair<Point, double>> discretize(const Measure& mu, const QuadratureOptions& q = {});

}  // namespace potkit
