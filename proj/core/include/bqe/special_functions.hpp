#pragma once

#include <complex>

namespace bqe {

// log Gamma(z) for complex z, |z| <= ~300.  exp(lgamma_complex(z)) recovers
// Gamma(z) to rel ~1e-12; the imaginary part is only meaningful modulo 2*pi
// (shift/reflection steps may add whole turns).  Throws std::domain_error at
// nonpositive integers.
std::complex<double> lgamma_complex(std::complex<double> z);

// Gamma(z); overflows to inf for large positive Re(z) (use lgamma_complex in
// log space there).
std::complex<double> complex_gamma(std::complex<double> z);

// Upper incomplete gamma Gamma(s, x) = int_x^inf u^{s-1} e^{-u} du, x > 0.
// Continued fraction for x >> |s|, otherwise Gamma(s) minus the lower series.
std::complex<double> upper_incomplete_gamma(std::complex<double> s, double x);

enum class BesselScaling { raw, exp_weighted };

struct BesselEval {
  double value;
  double est_err;    // relative two-grid self-consistency estimate
  bool in_envelope;  // (t, x) inside the validated accuracy region
};

// K_{it}(x) for real t and x > 0 (real-valued; even in t).
// exp_weighted returns e^{pi |t|/2} K_{it}(x), finite throughout |t| <= 200,
// x >= 1e-3.  Validated envelope: rel <= 1e-9 for x >= max(1e-3, |t|/8) at
// |t| <= 200, plus the small-order regime |t| <= 10 at any x > 0.
BesselEval bessel_k_imag_eval(double t, double x, BesselScaling scaling,
                              int refine = 0);
double bessel_k_imag(double t, double x,
                     BesselScaling scaling = BesselScaling::raw);

// K_nu(x) for complex order, unscaled.  Same envelope in t = |Im nu|;
// |Re nu| <= ~3 validated.
std::complex<double> bessel_k(std::complex<double> nu, double x);

struct BesselMellinResult {
  std::complex<double> numeric;        // int_0^inf K_{it}(r) K_{inu}(r) r^{s-1} dr
  std::complex<double> gamma_formula;  // prod Gamma((s +- it +- inu)/2) / Gamma(s)
  double calibration;                  // |numeric / gamma_formula|
};

// Both sides of the Mellin transform of K_{it} K_{inu}; the quadrature side is
// independent of the gamma side, so their ratio pins down the constant
// relating them (2^{s-3} for this normalization of gamma_formula).
BesselMellinResult bessel_mellin(double t, double nu, std::complex<double> s);

// |T(1-it)/Gamma(1+it)| with T(s) the four-gamma quotient of bessel_mellin,
// evaluated entirely in log space (the raw factors underflow near t ~ 200).
double gamma_factor_ratio(double t, double nu);

namespace detail {
// Exposed for cross-validation tests: force the cosh-integral branch (0) or
// the rotated-contour branch (1) of K_{it}; branch 1 requires t > x.
double bessel_k_imag_branch(double t, double x, int branch);
}  // namespace detail

}  // namespace bqe
