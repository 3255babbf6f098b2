#pragma once

// Hecke L-functions of class-group characters over imaginary quadratic
// fields, through partial zeta functions of ideal classes.  Each class C is
// represented by the primitive integral binary form of discriminant d_F
// attached to an ideal in C^{-1}; its Epstein zeta is continued with the
// theta-integral split, so evaluation is possible anywhere away from s = 1
// and stays well-conditioned near the pole.

#include <complex>
#include <cstdint>
#include <vector>

#include "bqe/class_group.hpp"
#include "bqe/number_field.hpp"

namespace bqe {

struct LValue {
  std::complex<double> s{};
  std::complex<double> value{};
  enum class Method { truncated_series, continued } method = Method::continued;
  double est_error = 0.0;  // relative
};

struct ZetaOptions {
  double split_scale = 1.0;  // theta split at split_scale / sqrt(det A)
  double tail_tol = 1e-14;   // lattice tail target, relative to the result
  long min_prec = 96;        // working precision floor in bits
};

// Integer binary quadratic form A x^2 + B xy + C y^2 attached to a class
// (positive definite, discriminant d_F, represents the norms of the integral
// ideals in the class).
struct ClassForm {
  Int A, B, C;
  // all values v = Q(x,y) <= bound over nonzero (x,y) up to sign, ascending
  // with multiplicity
  std::vector<long> values_up_to(long bound) const;
};

ClassForm class_form(const ClassGroup& G, const IdealClass& C);

class LSeriesContext {
 public:
  explicit LSeriesContext(const ClassGroup& G, long norm_cache_limit = 100000);

  const ClassGroup& group() const { return *G_; }
  const QuadField& field() const { return *G_->F; }
  long cache_limit() const { return limit_; }
  ZetaOptions& options() { return opt_; }
  const ZetaOptions& options() const { return opt_; }

  // number of integral ideals of norm n in class C
  long class_ideal_count(const IdealClass& C, long n) const;
  // empirical constant k with |#{ideals in C, norm <= u} - density*u| <=
  // k*u^{1/3} over the cached range; used for truncation error reporting
  double fluct_constant(const IdealClass& C) const;

  // Dirichlet sum over the cache, Re(s) > 1 required.  With complete_tail the
  // mean density's tail is added back analytically and est_error reflects
  // only the fluctuation term.
  LValue truncated_zeta(const IdealClass& C, std::complex<double> s,
                        bool complete_tail = true) const;

 private:
  const ClassGroup* G_;
  long limit_;
  ZetaOptions opt_;
  std::vector<std::vector<uint32_t>> counts_;  // [class][norm]
  std::vector<double> fluct_;
};

// sum of chi(a) N(a)^s over integral ideals a dividing m
std::complex<double> divisor_sigma(const Character& chi, std::complex<double> s,
                                   const Ideal& m);

// zeta(s, C) continued; s != 0, 1.  est_error cross-validated by a second
// theta split point.
LValue partial_zeta(const ClassGroup& G, const IdealClass& C,
                    std::complex<double> s, const ZetaOptions& opt = {});

// L(s, chi) = sum over classes of chi(C) zeta(s, C); entire for nontrivial
// chi (the class-independent boundary terms cancel exactly and are dropped).
LValue hecke_L(const Character& chi, std::complex<double> s,
               const LSeriesContext& ctx);

// xi(s, chi) = 2 (2 pi)^{-s} |d_F|^{s/2} Gamma(s) L(s, chi), assembled
// without dividing by Gamma so heights cost no extra cancellation
std::complex<double> completed_xi(const Character& chi, std::complex<double> s,
                                  const ZetaOptions& opt = {});
// all characters at once (shared per-class work); order matches characters(G)
std::vector<std::complex<double>> completed_xi_all(const ClassGroup& G,
                                                   std::complex<double> s,
                                                   const ZetaOptions& opt = {});

// L'/L by central difference of the continued values; est_error optional out
std::complex<double> L_log_derivative(const Character& chi,
                                      std::complex<double> s,
                                      const LSeriesContext& ctx,
                                      double* est_error = nullptr);

}  // namespace bqe
