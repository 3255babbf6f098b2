#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <complex>
#include <string>

// Minimal arbitrary-precision real/complex layer over MPFR, sized for the
// theta-integral L-continuation: completed values shrink like e^{-pi|t|/2},
// so recovering the finite part at height t costs about 2.27|t| extra bits.
namespace bqe::mp {

class Real {
 public:
  explicit Real(long prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(double x, long prec) { mpfr_init2(v_, prec); mpfr_set_d(v_, x, MPFR_RNDN); }
  Real(long x, long prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(const mpz_class& z, long prec) {
    mpfr_init2(v_, prec);
    mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN);
  }
  Real(const mpq_class& q, long prec) {
    mpfr_init2(v_, prec);
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
  }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  long prec() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_); }
  int sign() const { return mpfr_sgn(v_); }
  // binary exponent, for magnitude thresholds; very negative for zero
  long exp2() const { return mpfr_zero_p(v_) ? -(1L << 40) : mpfr_get_exp(v_); }
  std::string str(size_t digits = 30) const;

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

 private:
  mpfr_t v_;
};

inline long join_prec(const Real& a, const Real& b) {
  return a.prec() > b.prec() ? a.prec() : b.prec();
}

inline Real operator+(const Real& a, const Real& b) {
  Real r(join_prec(a, b));
  mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real operator-(const Real& a, const Real& b) {
  Real r(join_prec(a, b));
  mpfr_sub(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real operator*(const Real& a, const Real& b) {
  Real r(join_prec(a, b));
  mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real operator/(const Real& a, const Real& b) {
  Real r(join_prec(a, b));
  mpfr_div(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real operator-(const Real& a) {
  Real r(a);
  mpfr_neg(r.raw(), r.raw(), MPFR_RNDN);
  return r;
}
inline bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.raw(), b.raw()) < 0; }
inline bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.raw(), b.raw()) > 0; }
inline bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.raw(), b.raw()) <= 0; }
inline bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.raw(), b.raw()) >= 0; }

Real sqrt(const Real& a);
Real exp(const Real& a);
Real log(const Real& a);
Real abs(const Real& a);
Real pi(long prec);
// a * 2^k, exact
Real mul_2exp(const Real& a, long k);

struct Complex {
  Real re, im;

  explicit Complex(long prec) : re(prec), im(prec) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Complex(std::complex<double> z, long prec) : re(z.real(), prec), im(z.imag(), prec) {}

  long prec() const { return join_prec(re, im); }
  std::complex<double> to_double() const { return {re.to_double(), im.to_double()}; }

  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
  Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
};

inline Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
inline Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
inline Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
inline Complex operator*(const Real& a, const Complex& b) { return {a * b.re, a * b.im}; }
inline Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
inline Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }

inline Complex conj(const Complex& a) { return {a.re, -a.im}; }
Real abs(const Complex& a);
Complex exp(const Complex& a);
Complex log(const Complex& a);
// base^s for positive real base
Complex pow(const Real& base, const Complex& s);
Complex inv(const Complex& a);

// exact Bernoulli number B_n (B_1 = -1/2 convention)
mpq_class bernoulli(int n);

// log Gamma by argument raising + Stirling with exact Bernoulli coefficients;
// imaginary part may differ from the principal branch by multiples of 2 pi
Complex lgamma(const Complex& z);
Complex gamma(const Complex& z);

// Gamma(s, x) for x > 0; continued fraction for x >= |s| + 6, else the
// lower series against Gamma(s) (pass a precomputed Gamma(s) to amortize)
Complex upper_incomplete_gamma(const Complex& s, const Real& x,
                               const Complex* gamma_s = nullptr);

}  // namespace bqe::mp
