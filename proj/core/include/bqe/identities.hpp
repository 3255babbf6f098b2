#pragma once

// Verification drivers for the identities the measure computation leans on:
// the Hecke-recursion series identity, the quadruple L-product, the modulus
// symmetry of the completed L-function, the Bessel-Mellin constant, and
// unitarity of the constant-term matrix on the critical line.  Each driver
// returns a report; nothing here is assumed elsewhere without being checked.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bqe/class_group.hpp"
#include "bqe/eisenstein.hpp"
#include "bqe/l_functions.hpp"

namespace bqe {

// Power series truncated at a fixed order; binary operations require equal
// orders and inversion requires a nonzero constant term.
class FormalSeries {
 public:
  explicit FormalSeries(int order);
  static FormalSeries constant(int order, std::complex<double> value);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  std::complex<double>& operator[](int k) { return c_.at(static_cast<std::size_t>(k)); }
  const std::complex<double>& operator[](int k) const {
    return c_.at(static_cast<std::size_t>(k));
  }

  FormalSeries operator+(const FormalSeries& o) const;
  FormalSeries operator-(const FormalSeries& o) const;
  FormalSeries operator*(const FormalSeries& o) const;
  FormalSeries inverse() const;

 private:
  std::vector<std::complex<double>> c_;
};

struct VerificationReport {
  std::string name;
  std::string parameters;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;  // max_residual <= tolerance, nothing else
  double runtime_seconds = 0.0;
};

// Per-prime series identity: sum_k sigma_k lambda_k chi2^k X^k against the
// four-factor rational function with the central-character numerator, with
// lambda_k produced by the Hecke recursion from a random unitary alpha and
// the prime-power character values realized as random roots of unity.  In
// exact mode (order <= 10) everything lives in the rational group ring of
// Z/24 and the residual is required to vanish identically.
VerificationReport verify_R_series(int trials, int order, std::uint64_t seed,
                                   bool exact_mode = false);

// Truncated double-divisor-sum Dirichlet series against the product of five
// continued L-values:
//   sum_m sigma_{-it}(chi1,m) sigma_{it}(chi2,m) chi3(m) / N(m)^{s/2}
//     = L(s/2,chi3) L(s/2,chi1chi2chi3) L(s/2+it,chi1chi3)
//       L(s/2-it,chi2chi3) / L(s,chi1chi2chi3^2).
// Requires Re(s) >= 4.  norm_cutoff 0 picks the cutoff from the tolerance;
// throws std::runtime_error when the final truncation octave stays above the
// tolerance (raise the cutoff).
VerificationReport verify_quadruple_L(const LSeriesContext& ctx,
                                      std::complex<double> s, double t,
                                      const Character& chi1,
                                      const Character& chi2,
                                      const Character& chi3,
                                      long norm_cutoff = 0,
                                      double tolerance = 1e-6);

// | xi(1+it, chi) | = | xi(it, chi) | = | xi(-it, chi^{-1}) | over the grid
// and all characters; the trivial character is skipped at t = 0 (pole).
VerificationReport verify_xi_modulus(const ClassGroup& G,
                                     const std::vector<double>& t_grid);

struct BesselMellinPoint {
  double t = 0.0;
  double nu = 0.0;
  std::complex<double> s{2.0, 0.0};
};

// The quadrature/gamma-quotient ratio of bessel_mellin, divided by the
// expected 2^{Re s - 3}, must be one constant across the grid; the fitted
// value is recorded in the parameters string.
VerificationReport verify_bessel_mellin(const std::vector<BesselMellinPoint>& grid);

// Frobenius-norm residual of Phi(1+it) Phi(1-it) - I over the grid (an
// upper bound for the operator norm).
VerificationReport verify_scattering_unitary(const EisensteinContext& E,
                                             const std::vector<double>& t_grid);

}  // namespace bqe
