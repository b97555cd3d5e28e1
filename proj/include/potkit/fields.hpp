#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "potkit/domain.hpp"
#include "potkit/ext_real.hpp"
#include "potkit/green.hpp"
#include "potkit/measures.hpp"
#include "potkit/scalar_field.hpp"

namespace potkit {

// ---- averages -------------------------------------------------------------

struct AverageEstimate {
  ExtReal value;
  double error = 0.0;  // |A_n - A_2n|, a practical bound for the quadrature error
};

// (1/s_{d-1}) * integral over the unit sphere of v(x + r s).
ExtReal sphere_average(const ScalarField& v, const Point& x, double r);
AverageEstimate sphere_average_estimate(const ScalarField& v, const Point& x, double r);
// (1/b_d) * integral over the unit ball of v(x + r s).
ExtReal ball_average(const ScalarField& v, const Point& x, double r);

// ---- sub-mean-value probes ------------------------------------------------

struct Probe {
  Point x;
  double r = 0.0;
};

struct ProbeResult {
  Point x;
  double r = 0.0;
  ExtReal value;
  ExtReal average;
  double margin = 0.0;  // average - value (+inf when value = -inf)
  double tol = 0.0;
  bool pass = true;
};

struct ProbeReport {
  std::vector<ProbeResult> probes;
  std::size_t violations = 0;
  bool pass() const { return violations == 0; }
  double worst_margin() const;
  std::string csv() const;
};

// `count` probes with centres uniform in `window` intersected with the field's
// domain, radii uniform in [2h, clearance/2]; deterministic in `seed`.
std::vector<Probe> random_probes(const ScalarField& v, const Ball& window, int count,
                                 std::uint64_t seed, double h);

// v(x) <= average + tol, tol = base_tol + quadrature error estimate.
ProbeReport check_subharmonic(const ScalarField& v, const std::vector<Probe>& probes,
                              double base_tol = 1e-6);
// |v(x) - average| <= tol.
ProbeReport check_harmonic(const ScalarField& v, const std::vector<Probe>& probes,
                           double base_tol = 1e-8);

// ---- grid fields and Riesz measures ---------------------------------------

struct GridField {
  GridDomain grid;
  std::vector<ExtReal> values;  // per cell of the frame; unmasked cells unused
};

GridField sample(const ScalarField& v, const GridDomain& grid);

struct RieszResult {
  Measure measure;  // a single GridDensity component
  std::vector<std::size_t> singular_cells;
};

// c_d * (2d-point discrete Laplacian) as a density; boundary ring excluded and
// cells touching a non-finite value flagged.
RieszResult riesz_measure(const GridField& v);

// ---- pole coefficient -----------------------------------------------------

struct PoleFit {
  double coefficient = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

// Least-squares fit V(x) ~ a * (-K_{d-2}(x, o)) + b on radii 1e-2 .. 1e-4.
PoleFit pole_coefficient_fit(const ScalarField& V, const Point& o, double r_max = 1e-2,
                             double r_min = 1e-4, int levels = 9, int directions = 8);

// ---- gluing ---------------------------------------------------------------

struct GlueOptions {
  double h = 1e-4;             // inward offset for the limsup surrogate
  int boundary_samples = 256;  // points per boundary sphere
  double tol = 1e-6;
};

// Union of two model domains (nested or concentric cases, or grids on one frame).
Domain union_domain(const Domain& a, const Domain& b);

// V = v0 on O0 \ O, max(v0, v) on O0 n O, v on O \ O0.
ScalarField glue_max(const Domain& O, const ScalarField& v, const Domain& O0,
                     const ScalarField& v0, const GlueOptions& opts = {});

struct QuantitativeSpec {
  Domain O;
  ScalarField v;
  Domain O0;
  ScalarField g;
  double m_v = 0.0, M_v = 0.0, m_g = 0.0, M_g = 1.0;
};

// v0 = ((M_v^+ + m_v^-)/(M_g - m_g)) (2g - M_g - m_g), then glue_max.
ScalarField glue_quantitative(const QuantitativeSpec& spec, const GlueOptions& opts = {});

struct GreenGlue {
  ScalarField V;
  double coefficient = 0.0;  // (M_v^+ + m_v^-)/M_g
  double M_g = 0.0;
  double M_v_plus = 0.0;
};

// Green-function gluing on concentric balls S_o in D in S in O.  v lives on O \ S_o.
GreenGlue glue_with_green(const ScalarField& v, const Ball& O, const GreenModel& green,
                          const Ball& S_o, const Ball& S, double m_v, double M_v,
                          const GlueOptions& opts = {});

// ---- harmonic modification ------------------------------------------------

struct HarmonizeResult {
  ScalarField field;
  GridDomain nodes;              // interior nodes of the layer
  std::vector<double> solution;  // per frame cell (interior entries meaningful)
  double residual = 0.0;
  long sweeps = 0;
  double min_boundary = 0.0, max_boundary = 0.0;
  double min_domination = 0.0;  // min over interior nodes of (v~ - v), finite v only
};

// Replace v on the layer by the discrete harmonic function with boundary data v
// (red-black SOR, residual 1e-10, cap 1e6 sweeps).
HarmonizeResult harmonize_layer(const ScalarField& v, const Domain& layer, double h);

}  // namespace potkit
