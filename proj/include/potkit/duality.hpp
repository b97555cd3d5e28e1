#pragma once

#include <optional>
#include <string>
#include <vector>

#include "potkit/balayage.hpp"
#include "potkit/domain.hpp"
#include "potkit/ext_real.hpp"
#include "potkit/green.hpp"
#include "potkit/measures.hpp"
#include "potkit/potentials.hpp"
#include "potkit/scalar_field.hpp"

namespace potkit {

enum class PotentialKind { ArensSinger, Jensen };

std::string to_string(PotentialKind k);

// delta_x <=_H mu for the harmonic (Arens-Singer) or subharmonic (Jensen) probe family.
struct Certificate {
  Point x;
  PotentialKind kind = PotentialKind::ArensSinger;
  BalayageVerdict verdict;
  double mass = 0.0;                // total mass of the certified measure
  std::vector<double> fingerprint;  // component count and low moments
};

// Harmonic kernels on two rings outside the support window plus harmonic
// polynomials of degree <= 4 and +-1; the Jensen family adds subharmonic
// kernels on a lattice inside the window.
TestFamily certification_family(const Measure& mu, const Point& x, PotentialKind kind);
Certificate certify(const Measure& mu, const Point& x, PotentialKind kind,
                    const BalayageOptions& opts = {});

struct ASPotential {
  ScalarField field;                  // on R^d minus the pole
  Point pole;
  double pole_coefficient = 1.0;      // fitted limit of V / (-K_{d-2}(., x))
  double fit_r_squared = 1.0;
  Ball window;                        // S(V): V vanishes outside
  PotentialKind kind = PotentialKind::ArensSinger;
  std::optional<Measure> source;      // mu when built by to_potential

  ASPotential scaled(double s) const;
};

// pt_{mu - delta_x}; needs a passing certificate for (mu, x).  Checks that V
// vanishes outside the window (|V| <= 1e-8 on 3 shells), that the pole
// coefficient is 1 - mu({x}) within 1e-3, and V >= -1e-9 at probes for Jensen
// inputs.  Throws RejectError on a violated property.
ASPotential to_potential(const Measure& mu, const Point& x, const Certificate& cert);

// Wraps a closed-form potential (e.g. a Green function); fits the pole coefficient.
ASPotential make_potential(const ScalarField& V, const Point& pole, const Ball& window,
                           PotentialKind kind);

struct RecoveredMeasure {
  Measure measure;             // grid density of c_d Lap V plus the atom at the pole
  double pole_coefficient = 0.0;
  double atom = 0.0;           // 1 - pole coefficient
  double spacing = 0.0;
  std::size_t singular_cells = 0;
};

// c_d Lap V off the pole on a grid of spacing h over the padded window, plus
// (1 - pole coefficient) delta_x.  The pole is placed at a cell centre; other
// point masses of the underlying measure must lie off the cell centres.
// Throws NumericError when the pole fit has R^2 < 0.999.
RecoveredMeasure from_potential(const ASPotential& V, double h);

// A subharmonic function with known Riesz measure: u = pt_riesz + harmonic.
struct RieszFunction {
  ScalarField u;
  Measure riesz;
  std::string name;
};

RieszFunction log_modulus(const std::vector<std::pair<Point, double>>& zeros,
                          std::function<double(const Point&)> harmonic = {});

struct PoissonJensenReport {
  ExtReal int_u_theta, int_u_mu;
  ExtReal pt_mu_dRiesz, pt_theta_dRiesz;
  ExtReal lhs, rhs;          // both sides of the identity
  double rel_error = 0.0;    // |lhs - rhs| / (1 + |lhs| + |rhs|)
  bool rearranged_checked = false;
  double rearranged_rel_error = 0.0;
  bool pass = false;
  std::string diagnosis;
  std::string text() const;
};

// The generalized Poisson-Jensen identity over K = inward-filled hull (one cell
// padded) of supp theta u supp mu.  Certifies theta <=_har mu first.
PoissonJensenReport verify_poisson_jensen(const Measure& theta, const Measure& mu,
                                          const RieszFunction& u, double tol = 1e-6);

struct PJInstance {
  std::string name;
  Measure theta;
  Measure mu;
  RieszFunction u;
};

// Twelve (theta, mu, u) instances in d = 2 and 3, including the classical
// disk instance with u = ln|. - (0.5, 0)|.
std::vector<PJInstance> standard_pj_instances();

struct PhragmenLindelofReport {
  std::size_t probes = 0;
  double worst_upper_margin = 0.0;  // min of g_D - V over probes
  bool upper_pass = true;
  double lower_bound = 0.0;         // B'' from the potential lower bound
  double probed_inf = 0.0;          // inf of V over S_o^{+3r} probes
  bool lower_checked = false;
  bool lower_pass = true;
  bool pass() const { return upper_pass && lower_pass; }
};

// V <= g_D(., o) + 1e-7 at `probes` points of D (pole coefficient must be <= 1),
// and, when V carries its source measure, inf over S_o^{+3r} of V >= B''.
PhragmenLindelofReport phragmen_lindelof_bound(const ASPotential& V, const GreenModel& green,
                                               const Ball& S_o, double r, int probes = 500,
                                               std::uint64_t seed = 0);

}  // namespace potkit
