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

enum class FamilyClass {
  Sbh00PlusLeq,        // sbh00+(<= b+): positive, compact support in D
  Sbh00Bounded,        // sbh00(r, b- < b+)
  SbhPlus0Bounded,     // sbh+0(r, b- < b+)
  SbhPlus0Averaged,    // sbh+0(o r, b- < b+): lower bound on sphere averages
  HarmonicKernels,     // +-k_{d-2}(|y - .|), y off clos S
  HarmonicPolynomials, // +-harmonic polynomials up to a degree
  SubharmonicKernels,  // k_{d-2}(|y - .|) on a lattice of centres
  Custom,
};

std::string to_string(FamilyClass c);

struct FamilyMember {
  std::string id;
  ScalarField field;
};

struct TestFamily {
  FamilyClass tag = FamilyClass::Custom;
  std::optional<Domain> S_o;
  std::optional<Ball> D;
  std::optional<Point> o;
  double r = 0.0, b_minus = 0.0, b_plus = 0.0;
  bool symmetric = false;  // closed under v -> -v: equality semantics
  bool cone = false;       // closed under v -> t v, t > 0
  std::vector<FamilyMember> members;

  std::size_t size() const { return members.size(); }
  TestFamily& add(std::string id, ScalarField f);
  // Members with the given indices, in that order (other data unchanged).
  TestFamily subset(const std::vector<std::size_t>& idx) const;
};

enum class Relation { Linear, Affine };
enum class VerdictStatus { Pass, Fail, Indeterminate };

std::string to_string(Relation r);
std::string to_string(VerdictStatus s);

struct MemberMargin {
  std::string id;
  ExtReal lhs;           // integral against theta
  ExtReal rhs;           // integral against mu
  double margin = 0.0;   // linear: rhs - lhs (equality: -|rhs - lhs|); affine: lhs - rhs
  double tol = 0.0;
  bool ok = true;
  bool indeterminate = false;
};

struct BalayageVerdict {
  Relation relation = Relation::Linear;
  VerdictStatus status = VerdictStatus::Pass;
  bool pass = true;
  double worst_margin = 0.0;  // linear: min margin; affine: the constant C
  std::size_t witness = 0;    // member index attaining worst_margin (lowest on ties)
  std::string witness_id;
  double C = 0.0;             // affine only; +inf when divergent
  std::vector<MemberMargin> margins;
  std::string label = "sampled verdict";
  std::string diagnostics;

  std::string csv() const;
};

struct BalayageOptions {
  double tol_scale = 1.0;  // tol = tol_scale * 1e-7 * (1 + |lhs| + |rhs|)
  QuadratureOptions quad;
};

// theta <=_H mu: integral h dtheta <= integral h dmu for all members; equality
// when the family is symmetric.
BalayageVerdict check_linear(const Measure& theta, const Measure& mu, const TestFamily& family,
                             const BalayageOptions& opts = {});

// C = max over members of (integral over D \ S_o of v dtheta - the same for mu).
// Cone families are probed at amplitudes 1, 2, 4, 8 to detect C = +inf.
BalayageVerdict check_affine(const Measure& theta, const Measure& mu, const TestFamily& family,
                             const Domain& S_o, const BalayageOptions& opts = {});

// {+-k_{d-2}(|y - .|) : y in probes}; throws when a probe meets clos S.
TestFamily harmonic_kernel_family(const Domain& S, const std::vector<Point>& probes);
// {k_{d-2}(|y - .|) : y in centres}.
TestFamily subharmonic_kernel_family(const std::vector<Point>& centres);
// +-(harmonic polynomials of degree <= N) centred at c.
TestFamily harmonic_polynomial_family(const Point& c, int max_degree);
// `count` points on the sphere |y - c| = radius.
std::vector<Point> probe_ring(const Point& c, double radius, int count);
// Appends the constants +1 (and -1 when `both`) as members.
TestFamily with_constants(TestFamily f, bool both);

// Members of the sbh classes on D \ S_o: scaled truncated Green potentials
// min(b+, t max(g_D(., o) - c, 0)) and, for the b- classes, members with added
// harmonic modes vanishing on dD.  Every member is validated before inclusion.
TestFamily build_test_family(FamilyClass tag, const Domain& S_o, double r, double b_minus,
                             double b_plus, const Ball& D, int count = 64);

struct ClassCheck {
  bool pass = true;
  std::string failure;  // first violated constraint
};

// Sampled class constraints for a member of `family` (which carries the class data).
ClassCheck validate_member(const TestFamily& family, const ScalarField& v,
                           std::uint64_t seed = 0, int subharmonic_probes = 64);

// ---- approximation by potentials ------------------------------------------

struct PotentialSequence {
  double B = 0.0;             // 2 (b+ - b-) / M_g
  double M_g = 0.0;
  ScalarField V;              // glued function, pole coefficient B
  GreenModel green_D;         // g_D(., o)
  std::vector<int> orders;    // n values
  std::vector<ScalarField> v; // v_n = B V_n
};

// The increasing sequence B V_n built from a class member v (pointwise b-
// classes, the averaged class through a harmonic modification of the layer,
// or the positive classes with v_n^+).  Components of {V < 1/n} are found on a
// grid of spacing h.
PotentialSequence potential_sequence(const TestFamily& family, const ScalarField& v,
                                     const std::vector<int>& orders, double h = 0.01);

// ---- closure and examples -------------------------------------------------

// Adds max(v_i, v_j) for all pairs i < j.
TestFamily max_closure(const TestFamily& f);
// sup over the members at x.
ExtReal family_sup(const TestFamily& f, const Point& x);

struct LyonsExample {
  Measure theta;   // normalized volume on r0 B
  Measure mu;      // normalized volume on r B
  Measure mu_E;    // mu with the small balls collapsed to atoms at e_j
  std::vector<Point> E;
  std::vector<double> radii;
};

// `count` points e_j on the sphere of radius `ring` (probe_ring layout), each
// surrounded by a ball of radius rj.
LyonsExample lyons_example(int d, double r0, double r, double ring, int count, double rj);

}  // namespace potkit
