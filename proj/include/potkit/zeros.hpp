#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "potkit/balayage.hpp"
#include "potkit/domain.hpp"
#include "potkit/ext_real.hpp"
#include "potkit/measures.hpp"
#include "potkit/scalar_field.hpp"

namespace potkit {

using Complex = std::complex<double>;

inline Point to_point(Complex z) { return Point{z.real(), z.imag()}; }
inline Complex to_complex(const Point& p) { return {p[0], p[1]}; }

// A zero with its multiplicity.
struct Zero {
  Complex z;
  int multiplicity = 1;
};

struct Polynomial {
  std::vector<Complex> coeffs;  // ascending powers
};

// prod_k (|z_k| / z_k) (z_k - z) / (1 - conj(z_k) z) over the first `length` zeros.
struct BlaschkeProduct {
  std::vector<Complex> zeros;
  std::size_t length = 10;
};

struct ExplicitZeroSet {
  std::vector<Zero> zeros;
  std::function<double(Complex)> log_abs;  // ln|f|, -inf at the zeros
};

class HoloFunction {
 public:
  using Variant = std::variant<Polynomial, BlaschkeProduct, ExplicitZeroSet>;

  // Polynomials live on the plane, Blaschke products on the unit disk.
  explicit HoloFunction(Polynomial p);
  explicit HoloFunction(BlaschkeProduct b);
  HoloFunction(ExplicitZeroSet z, Domain domain);

  const Variant& variant() const { return f_; }
  const Domain& domain() const { return domain_; }

  // ln|f(z)|; -inf at a zero.
  ExtReal log_abs(Complex z) const;
  // Polynomial and Blaschke variants only.
  Complex value(Complex z) const;
  // All zeros in the domain (computed for polynomials, declared otherwise).
  std::vector<Zero> zeros() const;
  // ln|f| as a field on the domain.
  ScalarField log_modulus() const;

  std::string name;

 private:
  Variant f_;
  Domain domain_;
};

// sum (1 - |z_k|) over the truncated zeros.
double blaschke_sum(const BlaschkeProduct& b);

// Companion-matrix roots clustered into multiplicities; throws NumericError
// when a residual exceeds 1e-8 (relative to the coefficient scale).
std::vector<Zero> polynomial_roots(const Polynomial& p);

// Atoms at the zeros in S weighted by multiplicity.  S must be compactly
// contained in the domain of f.
Measure counting_measure(const HoloFunction& f, const Domain& S);
Measure counting_measure(const std::vector<Zero>& zeros, const Domain& S);

// ---- Poincare-Lelong ------------------------------------------------------

struct ZeroWindow {
  Zero zero;
  double mass = 0.0;       // recovered mass in the window
  double rel_error = 0.0;  // |mass - multiplicity| / multiplicity
};

struct PoincareLelongReport {
  double h = 0.0;
  double window = 0.0;     // side of the square window
  std::vector<ZeroWindow> windows;
  double total_mass = 0.0;
  double worst_rel_error = 0.0;
  bool pass = false;       // every window within 5% (total <= 1e-6 without zeros)
};

// Riesz measure of ln|f| on a grid of spacing h over `region`, integrated over
// a square of side `window` (default 5h) centred at each zero.  Throws
// RegridError when a zero lies within h/4 of a cell centre.
PoincareLelongReport poincare_lelong_check(const HoloFunction& f, const Ball& region, double h,
                                           std::optional<double> window = std::nullopt);

struct PoincareLelongTrend {
  PoincareLelongReport coarse, fine;
  std::vector<double> ratios;  // coarse / fine error per zero
  bool pass = false;           // coarse passes and every ratio >= 1.6
};

// Same physical window (5 cells at h) evaluated at h and h/2.
PoincareLelongTrend poincare_lelong_trend(const HoloFunction& f, const Ball& region, double h = 0.01);

// ---- growth majorants -----------------------------------------------------

struct GrowthMajorant {
  ScalarField M_plus, M_minus;
  Measure mu_plus, mu_minus;  // Riesz measures on D
  std::string name;

  ExtReal operator()(const Point& x) const;
  Measure mu() const { return mu_plus - mu_minus; }

  // M = c.
  static GrowthMajorant constant(double c);
  // M = c + (a_plus - a_minus) |z|^2 with M_+- = a_+- |z|^2 (+ c in M_+); Riesz
  // measures uniform on D.
  static GrowthMajorant quadratic(double c, double a_plus, double a_minus, const Ball& D);
};

// |f| <= exp M at `samples` seeded points of D; throws PreconditionError with
// the witness point otherwise.
void check_majorant(const HoloFunction& f, const GrowthMajorant& M, const Ball& D,
                    int samples = 10000, std::uint64_t seed = 0);

// ---- zero distribution inequalities ----------------------------------------

struct HolFamilies {
  TestFamily averaged;   // sbh+0(o r, b- < b+), extended by the pointwise members
  TestFamily pointwise;  // sbh+0(r, b- < b+)
  TestFamily compact;    // sbh00(r, b- < b+)
  TestFamily positive;   // sbh00+(<= b+)
};

HolFamilies hol_families(const Ball& D, const Ball& S_o, double r, double b_minus, double b_plus,
                         int count = 32);

struct HolStage {
  std::string name;
  BalayageVerdict verdict;  // affine: C = max(lhs - rhs)
  double C = 0.0;
  bool pass = false;        // C finite, no indeterminate member
};

struct ThmHolReport {
  HolStage zI, zII, zIII;
  double layer_mass = 0.0;         // |mu_M|(S_o^{+3r} \ S_o)
  double implication_bound = 0.0;  // C_I + max(b+, -b-) layer_mass
  bool implication_holds = false;  // C_II <= implication_bound + tol
  bool pass() const { return zI.pass && zII.pass && zIII.pass && implication_holds; }
  std::string csv() const;
};

// The three zero-distribution inequalities for f with |f| <= exp M (checked
// first).  lhs sums v over the zeros in D \ S_o; [ZIII] uses `subdivisor`
// (default: all zeros) against the positive family.
ThmHolReport check_thm_hol(const HoloFunction& f, const GrowthMajorant& M, const Ball& D,
                           const Ball& S_o, double r, double b_minus, double b_plus,
                           const HolFamilies& families,
                           const std::optional<std::vector<Zero>>& subdivisor = std::nullopt,
                           const BalayageOptions& opts = {});

struct CriteriumReport {
  bool z1 = false;  // |f| <= exp M on the samples
  HolStage z2, z3, z4;
  bool pass() const { return z1 && z2.pass && z3.pass && z4.pass; }
};

// Forward chain for a zero set realized by f on D: [z2] with the averaged
// family, [z3] with the pointwise family, [z4] with the compact family.
CriteriumReport check_criterium_forward(const std::vector<Zero>& Z, const HoloFunction& f,
                                        const GrowthMajorant& M, const Ball& D, const Ball& S_o,
                                        double r, double b_minus, double b_plus,
                                        const HolFamilies& families, const BalayageOptions& opts = {});

struct GrowthTrend {
  std::vector<std::size_t> lengths;
  std::vector<double> C;              // [z3] constant per truncation
  std::vector<double> blaschke_sums;  // sum (1 - |z_k|) per truncation
  bool divergent = false;
};

// [z3] constants for the Blaschke products of growing truncations of Z in the
// unit disk.  Divergent when the last increment of C is at least half the
// first and above 1e-3 (1 + |C|).
GrowthTrend zero_growth_trend(const std::vector<Complex>& Z, const GrowthMajorant& M,
                              const Ball& S_o, const std::vector<std::size_t>& lengths,
                              const HolFamilies& families);

}  // namespace potkit
