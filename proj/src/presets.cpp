#include <algorithm>

#include "potkit/scenario.hpp"

namespace potkit {

namespace {

const char* const kGluingMax = R"({
  "schema": 1,
  "name": "gluing-max",
  "description": "max-gluing of ln(|x|/2) with 0 and the quantitative Green gluing",
  "dimension": 2,
  "fields": {
    "v": {"type": "kernel", "domain": {"type": "annulus", "center": [0, 0], "inner": 1, "outer": 3},
          "pole": [0, 0], "constant": {"log_of": 0.5}},
    "zero": {"type": "constant", "domain": {"type": "ball", "center": [0, 0], "radius": 2}, "value": 0},
    "half_log": {"type": "kernel", "domain": {"type": "annulus", "center": [0, 0], "inner": 0.1353352832366127, "outer": 2},
                 "pole": [0, 0], "coef": 0.5},
    "g": {"type": "green", "ball": {"center": [0, 0], "radius": 1}, "pole": [0, 0]}
  },
  "checks": [
    {"id": "max", "type": "glue_max",
     "O": {"type": "annulus", "center": [0, 0], "inner": 1, "outer": 3}, "v": "v",
     "O0": {"type": "ball", "center": [0, 0], "radius": 2}, "v0": "zero",
     "window": {"center": [0, 0], "radius": 3}, "plot": true},
    {"id": "quantitative", "type": "glue_quantitative",
     "O": {"type": "annulus", "center": [0, 0], "inner": 0.1353352832366127, "outer": 2}, "v": "half_log",
     "O0": {"type": "ball", "center": [0, 0], "radius": 1}, "g": "g",
     "m_v": -1, "M_v": 1, "m_g": 0, "M_g": 2,
     "window": {"center": [0, 0], "radius": 2}}
  ]
})";

const char* const kGluingGreen = R"({
  "schema": 1,
  "name": "gluing-green",
  "description": "Green-function gluing on concentric disks: sub-mean values, two-sided bounds, pole ratio",
  "dimension": 2,
  "fields": {
    "k1": {"type": "kernel", "domain": {"type": "annulus", "center": [0, 0], "inner": 0.2, "outer": 1},
           "pole": [0.8, 0]},
    "k2": {"type": "kernel", "domain": {"type": "annulus", "center": [0, 0], "inner": 0.2, "outer": 1},
           "pole": [0, -0.9]}
  },
  "checks": [
    {"id": "pole-right", "type": "glue_with_green", "v": "k1",
     "O": {"center": [0, 0], "radius": 1}, "D": {"center": [0, 0], "radius": 0.4},
     "S_o": {"center": [0, 0], "radius": 0.2}, "S": {"center": [0, 0], "radius": 0.6},
     "m_v": {"log_of": 0.2}, "M_v": {"log_of": 1.4}, "plot": true},
    {"id": "pole-below", "type": "glue_with_green", "v": "k2",
     "O": {"center": [0, 0], "radius": 1}, "D": {"center": [0, 0], "radius": 0.4},
     "S_o": {"center": [0, 0], "radius": 0.2}, "S": {"center": [0, 0], "radius": 0.6},
     "m_v": {"log_of": 0.3}, "M_v": {"log_of": 1.5}}
  ]
})";

const char* const kGreenDisk = R"({
  "schema": 1,
  "name": "green-disk",
  "description": "unit-disk Green value, Poisson reproduction and the Jensen inequality",
  "dimension": 2,
  "checks": [
    {"id": "g-half", "type": "green_value", "ball": {"center": [0, 0], "radius": 1}, "pole": [0, 0],
     "x": [0.5, 0], "expected": {"log_of": 2}, "plot": true},
    {"id": "g-symmetric", "type": "green_value", "ball": {"center": [0, 0], "radius": 1}, "pole": [0.3, 0],
     "x": [0, 0], "expected": {"log_of": 3.3333333333333335}},
    {"id": "poisson", "type": "poisson_reproduction", "ball": {"center": [0, 0], "radius": 1}, "x": [0.2, 0.1]},
    {"id": "jensen", "type": "jensen_inequality", "ball": {"center": [0, 0], "radius": 1}, "x": [0.2, 0.1],
     "count": 20}
  ]
})";

const char* const kBalayageMasses = R"({
  "schema": 1,
  "name": "balayage-masses",
  "description": "mass relations of swept measures, sub-mean sweeping and convolution closure",
  "dimension": 2,
  "domain": {"type": "ball", "center": [0, 0], "radius": 1},
  "measures": {
    "delta_x": {"type": "dirac", "at": [0.1, -0.2]},
    "heavy": {"type": "dirac", "at": [0.1, -0.2], "weight": 1.5},
    "omega_x": {"type": "harmonic_measure", "ball": {"center": [0, 0], "radius": 1}, "x": [0.1, -0.2]},
    "ball03": {"components": [{"type": "ball_uniform", "center": [0, 0], "radius": 0.3}]},
    "sphere08": {"components": [{"type": "sphere", "center": [0, 0], "radius": 0.8}]},
    "delta_0": {"type": "dirac", "at": [0, 0]},
    "omega_085": {"type": "harmonic_measure", "ball": {"center": [0, 0], "radius": 0.85}, "x": [0, 0]}
  },
  "families": {
    "sub": {"type": "subharmonic_kernels", "constants": "plus",
            "rings": [{"center": [0, 0], "radius": 0.4, "count": 12}]},
    "har": {"type": "harmonic_kernels", "constants": "both",
            "exclude": {"type": "ball", "center": [0, 0], "radius": 1},
            "rings": [{"center": [0, 0], "radius": 2, "count": 8}]},
    "lattice": {"type": "subharmonic_kernels",
                "rings": [{"center": [0, 0], "radius": 0.15, "count": 24},
                          {"center": [0, 0], "radius": 0.45, "count": 24},
                          {"center": [0, 0], "radius": 0.6, "count": 24},
                          {"center": [0, 0], "radius": 0.75, "count": 24}]}
  },
  "checks": [
    {"id": "jensen-sub", "type": "balayage", "theta": "delta_x", "mu": "omega_x", "family": "sub"},
    {"id": "jensen-mass", "type": "mass", "theta": "delta_x", "mu": "omega_x", "relation": "le"},
    {"id": "arens-singer-har", "type": "balayage", "theta": "delta_x", "mu": "omega_x", "family": "har"},
    {"id": "arens-singer-mass", "type": "mass", "theta": "delta_x", "mu": "omega_x", "relation": "eq"},
    {"id": "heavier-theta", "type": "balayage", "theta": "heavy", "mu": "omega_x", "family": "sub",
     "expect": "fail"},
    {"id": "ball-to-sphere", "type": "balayage", "theta": "ball03", "mu": "sphere08", "family": "lattice"},
    {"id": "sphere-to-ball", "type": "balayage", "theta": "sphere08", "mu": "ball03", "family": "lattice",
     "expect": "fail"},
    {"id": "convolution", "type": "convolution_closure", "theta": "delta_0", "mu": "omega_085",
     "family": "lattice", "mollifier_radius": 0.05, "spacing": 0.005,
     "domain": {"type": "ball", "center": [0, 0], "radius": 1}}
  ]
})";

const char* const kLyons = R"({
  "schema": 1,
  "name": "lyons-example",
  "description": "collapsed small balls: harmonic family passes, subharmonic kernel family fails",
  "dimension": 2,
  "measures": {
    "theta": {"type": "lyons", "part": "theta", "r0": 0.3, "r": 0.9, "ring": 0.6, "count": 6, "rj": 0.05},
    "mu": {"type": "lyons", "part": "mu", "r0": 0.3, "r": 0.9, "ring": 0.6, "count": 6, "rj": 0.05},
    "mu_E": {"type": "lyons", "part": "mu_E", "r0": 0.3, "r": 0.9, "ring": 0.6, "count": 6, "rj": 0.05}
  },
  "families": {
    "har": {"type": "harmonic_kernels", "exclude": {"type": "ball", "center": [0, 0], "radius": 1},
            "rings": [{"center": [0, 0], "radius": 1.5, "count": 40}]},
    "sub": {"type": "subharmonic_kernels", "atoms_of": "mu_E",
            "rings": [{"center": [0, 0], "radius": 0.15, "count": 24},
                      {"center": [0, 0], "radius": 0.45, "count": 24},
                      {"center": [0, 0], "radius": 0.6, "count": 24},
                      {"center": [0, 0], "radius": 0.75, "count": 24}]}
  },
  "checks": [
    {"id": "harmonic", "type": "balayage", "theta": "theta", "mu": "mu_E", "family": "har"},
    {"id": "subharmonic", "type": "balayage", "theta": "theta", "mu": "mu_E", "family": "sub",
     "expect": "fail"},
    {"id": "uncollapsed", "type": "balayage", "theta": "theta", "mu": "mu", "family": "sub"}
  ]
})";

const char* const kDualityRoundTrip = R"({
  "schema": 1,
  "name": "duality-roundtrip",
  "description": "potential of a swept point mass and its recovery by the grid Laplacian",
  "dimension": 2,
  "measures": {
    "omega_x": {"type": "harmonic_measure", "ball": {"center": [0, 0], "radius": 1}, "x": [0.2, 0.1]},
    "mollified": {"type": "jensen", "ball": {"center": [0, 0], "radius": 1}, "x": [0.2, 0.1], "mollified": 0.2}
  },
  "checks": [
    {"id": "arens-singer", "type": "duality_roundtrip", "mu": "omega_x", "x": [0.2, 0.1],
     "kind": "arens-singer", "spacings": [0.02, 0.01]},
    {"id": "jensen", "type": "duality_roundtrip", "mu": "mollified", "x": [0.2, 0.1],
     "kind": "jensen", "spacings": [0.02, 0.01], "plot": true}
  ]
})";

const char* const kPhragmenLindelof = R"({
  "schema": 1,
  "name": "phragmen-lindelof",
  "description": "Jensen potentials under the Green function and above the potential lower bound",
  "dimension": 2,
  "measures": {
    "omega_09": {"type": "harmonic_measure", "ball": {"center": [0, 0], "radius": 0.9}, "x": [0, 0]},
    "mollified": {"type": "jensen", "ball": {"center": [0, 0], "radius": 1}, "x": [0, 0], "mollified": 0.3}
  },
  "checks": [
    {"id": "harmonic-measure", "type": "phragmen_lindelof", "mu": "omega_09", "x": [0, 0], "kind": "jensen",
     "D": {"center": [0, 0], "radius": 1}, "S_o": {"center": [0, 0], "radius": 0.2}, "r": 0.1, "plot": true},
    {"id": "mollified", "type": "phragmen_lindelof", "mu": "mollified", "x": [0, 0], "kind": "jensen",
     "D": {"center": [0, 0], "radius": 1}, "S_o": {"center": [0, 0], "radius": 0.2}, "r": 0.1}
  ]
})";

const char* const kClassicalPJ = R"({
  "schema": 1,
  "name": "classical-pj",
  "description": "Poisson-Jensen on the unit disk: ln 0.5 = 0 - ln 2",
  "dimension": 2,
  "measures": {
    "delta_0": {"type": "dirac", "at": [0, 0]},
    "omega_0": {"type": "harmonic_measure", "ball": {"center": [0, 0], "radius": 1}, "x": [0, 0]}
  },
  "fields": {
    "u": {"type": "log_modulus", "zeros": [{"at": [0.5, 0]}]}
  },
  "checks": [
    {"id": "classical", "type": "poisson_jensen", "theta": "delta_0", "mu": "omega_0", "u": "u",
     "expect_values": {"int_u_theta": {"log_of": 0.5}, "int_u_mu": 0, "green_term": {"log_of": 2}}}
  ]
})";

const char* const kPJSuite = R"({
  "schema": 1,
  "name": "pj-suite",
  "description": "Poisson-Jensen identity on twelve (theta, mu, u) instances in two and three dimensions",
  "dimension": 2,
  "checks": [
    {"id": "instances", "type": "pj_suite"}
  ]
})";

const char* const kZerosPolynomial = R"({
  "schema": 1,
  "name": "zeros-polynomial",
  "description": "zero-distribution inequalities, forward criterion and window masses for polynomials",
  "dimension": 2,
  "domain": {"type": "ball", "center": [0, 0], "radius": 1},
  "functions": {
    "f": {"type": "polynomial", "coeffs": [-0.25, 0, 1]},
    "simple": {"type": "polynomial", "roots": [{"re": 0.5, "im": -0.25}]},
    "double": {"type": "polynomial", "roots": [{"re": 0.3, "im": 0, "multiplicity": 2}]}
  },
  "checks": [
    {"id": "thm", "type": "zeros_thm", "function": "f", "majorant": {"type": "constant", "value": {"log_of": 1.25}},
     "D": {"center": [0, 0], "radius": 1}, "S_o": {"center": [0, 0], "radius": 0.05}, "r": 0.1,
     "b_minus": -0.5, "b_plus": 1, "plot": true},
    {"id": "thm-charged", "type": "zeros_thm", "function": "f",
     "majorant": {"type": "quadratic", "c": {"log_of": 1.25}, "a_plus": 1, "a_minus": 0.5},
     "D": {"center": [0, 0], "radius": 1}, "S_o": {"center": [0, 0], "radius": 0.05}, "r": 0.1,
     "b_minus": -0.5, "b_plus": 1},
    {"id": "criterium", "type": "criterium", "function": "f",
     "majorant": {"type": "constant", "value": {"log_of": 1.25}},
     "D": {"center": [0, 0], "radius": 1}, "S_o": {"center": [0, 0], "radius": 0.05}, "r": 0.1,
     "b_minus": -0.5, "b_plus": 1},
    {"id": "windows-simple", "type": "poincare_lelong", "function": "simple",
     "region": {"center": [0, 0], "radius": 1}, "h": 0.01},
    {"id": "windows-double", "type": "poincare_lelong", "function": "double",
     "region": {"center": [0, 0], "radius": 1}, "h": 0.01}
  ]
})";

const char* const kZerosBlaschke = R"({
  "schema": 1,
  "name": "zeros-blaschke",
  "description": "zero-distribution inequalities and forward criterion for a truncated Blaschke product",
  "dimension": 2,
  "domain": {"type": "ball", "center": [0, 0], "radius": 1},
  "functions": {
    "B": {"type": "blaschke", "zeros": {"generator": "geometric", "count": 10}, "length": 10}
  },
  "checks": [
    {"id": "thm", "type": "zeros_thm", "function": "B", "majorant": {"type": "constant", "value": 0},
     "D": {"center": [0, 0], "radius": 1}, "S_o": {"center": [0, 0], "radius": 0.05}, "r": 0.1,
     "b_minus": -1, "b_plus": {"log_of": 20}},
    {"id": "criterium", "type": "criterium", "function": "B", "majorant": {"type": "constant", "value": 0},
     "D": {"center": [0, 0], "radius": 1}, "S_o": {"center": [0, 0], "radius": 0.05}, "r": 0.1,
     "b_minus": -1, "b_plus": {"log_of": 20}}
  ]
})";

const char* const kZerosDivergent = R"({
  "schema": 1,
  "name": "zeros-divergent",
  "description": "zero sums of growing Blaschke truncations: 1 - 1/k is flagged, 1 - 2^-k settles",
  "dimension": 2,
  "checks": [
    {"id": "harmonic-zeros", "type": "growth_trend", "zeros": {"generator": "harmonic", "count": 200},
     "lengths": [25, 50, 100, 200], "majorant": {"type": "constant", "value": 0},
     "S_o": {"center": [0, 0], "radius": 0.05}, "r": 0.1, "b_minus": -1, "b_plus": {"log_of": 20},
     "expect": "fail"},
    {"id": "geometric-zeros", "type": "growth_trend", "zeros": {"generator": "geometric", "count": 40},
     "lengths": [10, 20, 30, 40], "majorant": {"type": "constant", "value": 0},
     "S_o": {"center": [0, 0], "radius": 0.05}, "r": 0.1, "b_minus": -1, "b_plus": {"log_of": 20}}
  ]
})";

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"gluing-max", "gluing", "max-gluing and quantitative Green gluing pass sub-mean-value probes", kGluingMax},
      {"gluing-green", "gluing", "Green gluing: sub-mean values, two-sided bounds, pole ratio", kGluingGreen},
      {"green-disk", "green", "unit-disk Green value, Poisson reproduction, Jensen inequality", kGreenDisk},
      {"balayage-masses", "balayage", "mass relations, sub-mean sweeping, convolution closure", kBalayageMasses},
      {"lyons-example", "balayage", "harmonic family passes, subharmonic family fails (expected)", kLyons},
      {"duality-roundtrip", "duality", "potential of a swept point mass and its grid recovery", kDualityRoundTrip},
      {"phragmen-lindelof", "duality", "Jensen potentials between the lower bound and g_D", kPhragmenLindelof},
      {"classical-pj", "pj", "Poisson-Jensen on the unit disk: ln 0.5 = 0 - ln 2", kClassicalPJ},
      {"pj-suite", "pj", "Poisson-Jensen identity on twelve instances", kPJSuite},
      {"zeros-polynomial", "zeros", "zero inequalities, criterion and window masses for polynomials",
       kZerosPolynomial},
      {"zeros-blaschke", "zeros", "zero inequalities and criterion for a Blaschke product", kZerosBlaschke},
      {"zeros-divergent", "zeros", "divergent zero sums are flagged, summable ones settle", kZerosDivergent},
  };
  return all;
}

const Preset* find_preset(const std::string& name) {
  const auto& all = presets();
  auto it = std::find_if(all.begin(), all.end(), [&](const Preset& p) { return p.name == name; });
  return it == all.end() ? nullptr : &*it;
}

}  // namespace potkit
