#pragma once

// Eisenstein series attached to the cusps of the Bianchi group of an
// imaginary quadratic field.  Cusps are indexed by ideal classes, one per
// class.  Each series can be evaluated two independent ways: from its
// Fourier expansion, whose coefficients are built out of class-group
// L-functions and K-Bessel kernels (usable near the critical line), or from
// the defining sum over stabilizer cosets (absolutely convergent for
// Re s >= 3).  Agreement of the two routes is the main correctness oracle
// for both this module and the L-function layer underneath.

#include <complex>
#include <functional>
#include <vector>

#include "bqe/class_group.hpp"
#include "bqe/l_functions.hpp"
#include "bqe/number_field.hpp"

namespace bqe {

// Point (z, r) of hyperbolic 3-space in upper half-space coordinates, r > 0.
struct HPoint {
  std::complex<double> z;
  double r = 1.0;
};

// Moebius action on H^3 through the embedding; r scales by |det g|.
HPoint apply_matrix(const Matrix2F& g, const HPoint& v);

// Cusp attached to one ideal class.  index is 1-based; index 1 is infinity
// with A = id and m = O_F.  A finite cusp is num/den in P^1(F); A has
// determinant 1, bottom row (1, -num/den), and every product of an upper-row
// entry with a lower-row entry is integral, so conjugating the stabilizer by
// A gives the translations by m^{-2}.  m = <1, num/den> is a fractional
// ideal lying in the cusp's class.
struct CuspData {
  int index = 0;
  bool at_infinity = false;
  FieldElement num, den;  // den = 0 exactly at infinity
  Matrix2F A;
  Ideal m;
  double norm_m = 1.0;                 // = N(m), as a double
  std::complex<double> point() const;  // embedding; throws at infinity
};

// One cusp per ideal class, deterministic order: position k represents the
// class of reps[k], so position 0 (index 1) is the principal class.
std::vector<CuspData> cusp_data(const ClassGroup& G);

// Shared per-field state: cusps, characters, and an L-series context used
// by the constant-term consistency checks.  Immutable after construction.
class EisensteinContext {
 public:
  explicit EisensteinContext(const ClassGroup& G, long norm_cache_limit = 2000);

  const ClassGroup& group() const { return *G_; }
  const QuadField& field() const { return *G_->F; }
  const std::vector<CuspData>& cusps() const { return cusps_; }
  const std::vector<Character>& chars() const { return chars_; }
  const LSeriesContext& lseries() const { return ls_; }
  int h() const { return static_cast<int>(cusps_.size()); }

 private:
  const ClassGroup* G_;
  std::vector<CuspData> cusps_;
  std::vector<Character> chars_;
  LSeriesContext ls_;
};

// Constant-term coefficient of r^{2-s} in the expansion of the series at
// cusp j read in the chart of cusp i (both 1-based).  Computed two ways --
// as a ratio of completed-xi values at s-1 and s, and from Dirichlet
// L-values with the explicit 2 pi / ((s-1) sqrt|d_F|) prefactor -- and the
// two must agree to 1e-5 relative or a std::runtime_error is thrown.  The
// xi-route value is returned.  Poles at s = 1 and s = 2.
std::complex<double> tau_entry(const EisensteinContext& E, int i, int j,
                               std::complex<double> s);

// h x h matrix of tau entries, rows indexed by the chart cusp i.  All
// entries share two completed-xi sweeps, so this is much cheaper than h^2
// tau_entry calls and performs no per-entry cross-check.
std::vector<std::vector<std::complex<double>>> scattering_matrix(
    const EisensteinContext& E, std::complex<double> s);

// Coefficient of the lattice mode n in the chart-i expansion of the cusp-j
// series: a character sum of divisor functions sigma_{1-s} of the integral
// ideal (n) m_i^{-2} against inverse completed-xi values.  Requires
// 0 != n in m_i^2.  Even in n.
std::complex<double> omega_coeff(const EisensteinContext& E, int i, int j,
                                 const FieldElement& n, std::complex<double> s);

// Truncated Fourier expansion at fixed (i, j, s): constant term plus all
// lattice modes n in m_i^2 with |n| <= R, grouped by |n| so the Bessel
// kernel is evaluated once per group.  eval() is pure; the struct can be
// reused across many points at the same s.
struct FourierEval {
  std::complex<double> s{};
  int i = 1, j = 1;
  double R = 0.0;         // modulus cutoff actually enumerated
  long term_count = 0;    // retained modes, counting each +-n pair once
  double est_tail = 0.0;  // absolute bound for the dropped modes at r_min
  bool diag = false;      // i == j, so the r^s term is present
  std::complex<double> tau{};  // r^{2-s} coefficient
  double arg_scale = 0.0;      // Bessel argument per unit |n| r

  struct Shell {
    double absn;                              // common |n| of the group
    std::vector<std::complex<double>> coeff;  // omega(n,s) |n|^{s-1} per pair
    std::vector<std::complex<double>> w;      // frequency of cos(2pi<w,z>)
  };
  std::vector<Shell> shells;

  std::complex<double> eval(const HPoint& v) const;

  // Sampled-kernel acceleration for evaluation sweeps at Re(s) = 1: tabulate
  // e^{pi t/2} K_{it} on a log grid covering r in [r_lo, r_hi] and replace
  // the quadrature kernel by local cubic interpolation.  kernel_est records
  // the worst relative deviation seen at off-grid probe points.  Throws for
  // Re(s) != 1; arguments outside the table fall back to direct evaluation.
  void build_kernel_table(double r_lo, double r_hi);
  double kernel_est = 0.0;

 private:
  double kernel(double x) const;
  std::vector<double> ktab_;
  double ku0_ = 0.0, kdu_ = 0.0;
  double kxlo_ = 0.0, kxhi_ = 0.0;
  bool have_table_ = false;
};

// Builds the expansion with the retention rule "Bessel argument at r_min
// stays below t + 12 t^{1/3} + 40" scaled by cutoff_factor (cutoff_factor 2
// doubles the modulus cutoff, for truncation certificates).  est_tail is
// measured from the first dropped band of modes; if it exceeds tol the
// truncation rule cannot meet the request and a std::runtime_error is
// thrown.  Valid for s away from the constant-term poles s = 1, 2.
FourierEval eisenstein_fourier_series(const EisensteinContext& E, int i, int j,
                                      std::complex<double> s,
                                      double tol = 1e-10, double r_min = 0.5,
                                      double cutoff_factor = 1.0);

// One-point convenience wrapper: builds the expansion with r_min = v.r and
// evaluates it at v.
std::complex<double> eisenstein_fourier_eval(const EisensteinContext& E, int i,
                                             int j, const HPoint& v,
                                             std::complex<double> s,
                                             double tol = 1e-10);

// Defining coset sum of the cusp-j series at v: over pairs (c, d) in m_j^2
// generating m_j, modulo sign, of (r / (|cz+d|^2 + |c|^2 r^2))^s.  Requires
// Re s >= 3.  Pairs with small |c| r are summed explicitly over a large
// disk in d; once |c| r clears a level set by the dual lattice minimum of
// m_j, each c contributes the closed form
// rho_c pi r^s (|c| r)^{2-2s} / ((s-1) covol), rho_c the density of d
// generating m_j against (c) m_j^{-1}.  The density model's own defect
// falls off like a power of that level (see the source), leaving ~1e-9
// relative at Re s = 4.  trunc bounds |c|^2 in the closed-form zone and the
// explicit d-disks; doubling it is the caller's truncation certificate.
std::complex<double> eisenstein_direct_sum(const EisensteinContext& E, int j,
                                           const HPoint& v,
                                           std::complex<double> s,
                                           double trunc = 20000.0);

// Incomplete series at cusp i: sum of psi over the coset heights
// r / (|cz+d|^2 + |c|^2 r^2), (c, d) running over the pairs in m_i^2
// generating m_i (the same family whose s-th powers form the cusp-i series,
// plus r/N(g) for a generator g when m_i is principal).  An exact finite sum
// once psi vanishes below r0 > 0: heights above r0 force |c| <= sqrt(r/r0)/r
// and a bounded d-disk.  psi is only ever evaluated on [r0, infinity).
double incomplete_eisenstein_eval(const EisensteinContext& E, int i,
                                  const HPoint& v,
                                  const std::function<double(double)>& psi,
                                  double r0);

struct ResidueResult {
  double numeric = 0.0;  // Richardson limit of eps * E(v, 2 + eps)
  double formula = 0.0;  // 2 pi^2 N(m_j)^{-2} / (|d_F| zeta_F(2))
};

// Residue of the cusp-j series at s = 2, extracted from the Fourier route
// on eps in {1e-3, 5e-4, 2.5e-4} and compared against the closed form.
ResidueResult residue_at_2(const EisensteinContext& E, int j, const HPoint& v);

}  // namespace bqe
