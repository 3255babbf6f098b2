#include "bqe/mp.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace bqe::mp {

std::string Real::str(size_t digits) const {
  mpfr_exp_t e;
  char* s = mpfr_get_str(nullptr, &e, 10, digits, v_, MPFR_RNDN);
  std::string out(s);
  mpfr_free_str(s);
  out += "e" + std::to_string(e);
  return out;
}

Real sqrt(const Real& a) {
  Real r(a.prec());
  mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}
Real exp(const Real& a) {
  Real r(a.prec());
  mpfr_exp(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}
Real log(const Real& a) {
  Real r(a.prec());
  mpfr_log(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}
Real abs(const Real& a) {
  Real r(a.prec());
  mpfr_abs(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}
Real pi(long prec) {
  Real r(prec);
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}
Real mul_2exp(const Real& a, long k) {
  Real r(a);
  mpfr_mul_2si(r.raw(), r.raw(), k, MPFR_RNDN);
  return r;
}

Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

Complex operator/(const Complex& a, const Complex& b) {
  Real n = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}

Complex inv(const Complex& a) {
  Real n = a.re * a.re + a.im * a.im;
  return {a.re / n, -a.im / n};
}

Real abs(const Complex& a) {
  Real r(a.prec());
  mpfr_hypot(r.raw(), a.re.raw(), a.im.raw(), MPFR_RNDN);
  return r;
}

Complex exp(const Complex& a) {
  long p = a.prec();
  Real m = exp(a.re);
  Real s(p), c(p);
  mpfr_sin_cos(s.raw(), c.raw(), a.im.raw(), MPFR_RNDN);
  return {m * c, m * s};
}

Complex log(const Complex& a) {
  long p = a.prec();
  Real ang(p);
  mpfr_atan2(ang.raw(), a.im.raw(), a.re.raw(), MPFR_RNDN);
  return {log(abs(a)), ang};
}

Complex pow(const Real& base, const Complex& s) {
  Real lb = log(base);
  return exp(Complex{s.re * lb, s.im * lb});
}

mpq_class bernoulli(int n) {
  static std::vector<mpq_class> cache;  // cache[m] = B_m
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (n < static_cast<int>(cache.size())) return cache[n];
  if (cache.empty()) cache.emplace_back(1);
  // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
  for (int m = static_cast<int>(cache.size()); m <= n; m++) {
    mpq_class acc(0);
    for (int j = 0; j < m; j++) {
      if (j > 1 && j % 2 == 1) continue;  // odd Bernoulli numbers vanish
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), m + 1, j);
      acc += mpq_class(binom) * cache[j];
    }
    acc /= -(m + 1);
    acc.canonicalize();
    cache.push_back(acc);
  }
  return cache[n];
}

namespace {

// Stirling series at |z| large enough for the working precision; the error
// floor on the imaginary axis behaves like e^{-sqrt(2) pi |z|}, so |z| must
// grow with precision
Complex lgamma_stirling(const Complex& z) {
  long p = z.prec();
  Complex lz = log(z);
  Real half(0.5, p);
  Complex res = (z - Complex{half, Real(p)}) * lz - z;
  Real l2pi = log(mul_2exp(pi(p), 1));
  res.re += mul_2exp(l2pi, -1);
  Complex z2 = inv(z * z);
  Complex zpow = inv(z);
  long target = res.re.exp2() > res.im.exp2() ? res.re.exp2() : res.im.exp2();
  target -= p + 5;
  int kmax = static_cast<int>(4.6 * (0.16 * p + 6)) + 8;
  for (int k = 1; k <= kmax; k++) {
    Real coeff(bernoulli(2 * k) / mpq_class(2 * k * (2 * k - 1)), p);
    Complex term = coeff * zpow;
    res += term;
    long texp = abs(term).exp2();
    if (texp < target) return res;
    zpow = zpow * z2;
  }
  throw std::runtime_error("mp lgamma: Stirling series failed to converge");
}

}  // namespace

Complex lgamma(const Complex& z) {
  long p = z.prec();
  if (z.im.is_zero() && z.re.sign() <= 0) {
    Real t(z.re);
    mpfr_frac(t.raw(), t.raw(), MPFR_RNDN);
    if (t.is_zero()) throw std::domain_error("mp lgamma at a pole");
  }
  Real halfv(0.5, p);
  if (z.re < halfv) {
    // reflection; complex sin is safe at any height in mpfr exponent range
    Real pp = pi(p);
    Real sa(p), ca(p);
    Real aa = z.re * pp;
    mpfr_sin_cos(sa.raw(), ca.raw(), aa.raw(), MPFR_RNDN);
    Real bb = z.im * pp;
    Real shb(p), chb(p);
    mpfr_sinh_cosh(shb.raw(), chb.raw(), bb.raw(), MPFR_RNDN);
    Complex sinpz{sa * chb, ca * shb};
    Complex one{Real(1.0, p), Real(p)};
    return log(Complex{pp, Real(p)}) - log(sinpz) -
           lgamma(one - z);
  }
  // raise until |z| reaches the Stirling threshold
  double zr = z.re.to_double(), zi = z.im.to_double();
  double z0 = 0.16 * p + 6;
  Complex shifted = z;
  Complex logsum(p);
  bool any = false;
  while (std::sqrt(zr * zr + zi * zi) < z0) {
    if (!any) { logsum = log(shifted); any = true; }
    else logsum += log(shifted);
    shifted.re += Real(1.0, p);
    zr += 1.0;
  }
  Complex res = lgamma_stirling(shifted);
  if (any) res -= logsum;
  return res;
}

Complex gamma(const Complex& z) { return exp(lgamma(z)); }

Complex upper_incomplete_gamma(const Complex& s, const Real& x,
                               const Complex* gamma_s) {
  long p = join_prec(s.re, x);
  if (!(x.sign() > 0)) throw std::invalid_argument("mp incomplete gamma needs x > 0");
  Complex prefactor = exp(Complex{s.re * log(x) - x, s.im * log(x)});
  double xd = x.to_double();
  double red = s.re.to_double();
  double sd = std::abs(std::complex<double>(red, s.im.to_double()));
  // the series branch goes through Gamma(s), which poles at 0, -1, -2, ...;
  // the fraction is entire in s, so it also takes over the left half plane
  // unless x is so small that it converges too slowly
  if (xd >= sd + 6.0 || (red < 0.5 && xd >= 0.25)) {
    // modified Lentz continued fraction
    Real tiny = mul_2exp(Real(1.0, p), -4 * p - 64);
    Complex b{x + Real(1.0, p) - s.re, -s.im};
    Complex c = inv(Complex{tiny, Real(p)});
    Complex d = inv(b);
    Complex f = d;
    Real one(1.0, p);
    int settled = 0;  // small x converges slowly and can plateau early
    for (long i = 1; i < 400000; i++) {
      Real ir(static_cast<long>(i), p);
      Complex an = Complex{ir, Real(p)} * (s - Complex{ir, Real(p)});
      b.re += Real(2.0, p);
      d = an * d + b;
      if (abs(d) < tiny) d.re = tiny;
      c = b + an / c;
      if (abs(c) < tiny) c.re = tiny;
      d = inv(d);
      Complex delta = d * c;
      f = f * delta;
      Real dev = abs(Complex{delta.re - one, delta.im});
      if (dev.exp2() < -(p + 3)) {
        if (++settled >= 2) return prefactor * f;
      } else {
        settled = 0;
      }
    }
    throw std::runtime_error("mp incomplete gamma continued fraction stalled");
  }
  if (red < 0.5) {
    double frac = std::abs(red - std::round(red));
    if (std::abs(s.im.to_double()) < 0.05 && (frac < 0.05 || frac > 0.95))
      throw std::domain_error("mp incomplete gamma: series branch near a gamma pole");
  }
  // lower series, then subtract from Gamma(s)
  Complex sum = inv(s);
  Complex term = sum;
  for (long n = 1; n < 400000; n++) {
    Complex denom{s.re + Real(n, p), s.im};
    term = term * Complex{x, Real(p)} / denom;
    sum += term;
    if (abs(term).exp2() < abs(sum).exp2() - p - 3) {
      Complex g = gamma_s ? *gamma_s : gamma(s);
      return g - prefactor * sum;
    }
  }
  throw std::runtime_error("mp incomplete gamma series stalled");
}

}  // namespace bqe::mp
