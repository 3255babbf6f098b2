#include <doctest.h>

#include <cmath>
#include <complex>

#include "bqe/mp.hpp"
#include "bqe/special_functions.hpp"

using namespace bqe;
using Cd = std::complex<double>;

namespace {

double rel(Cd a, Cd b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("mp arithmetic, precision carry, elementary functions" *
          doctest::test_suite("mp")) {
  mp::Real a(1.0, 200), b(3.0, 200);
  mp::Real t = a / b;
  // 1/3 at 200 bits: residual of 3*(1/3)-1 is at the rounding floor
  mp::Real r = t * b - a;
  CHECK(mp::abs(r).exp2() < -195);
  CHECK(t.to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // pi and sqrt
  mp::Real p = mp::pi(256);
  CHECK(p.to_double() == doctest::Approx(3.14159265358979).epsilon(1e-14));
  mp::Real s2 = mp::sqrt(mp::Real(2.0, 256));
  mp::Real diff = s2 * s2 - mp::Real(2.0, 256);
  CHECK(mp::abs(diff).exp2() < -250);
  // exp/log round trip
  mp::Real x(1.7, 180);
  mp::Real y = mp::log(mp::exp(x)) - x;
  CHECK(mp::abs(y).exp2() < -170);
  // complex multiplication and inverse
  mp::Complex z(Cd(2.5, -1.25), 190);
  mp::Complex w = z * mp::inv(z);
  CHECK(std::abs(w.to_double() - Cd(1, 0)) < 1e-50);
  // complex exp against double
  mp::Complex e = mp::exp(mp::Complex(Cd(0.3, 2.1), 120));
  CHECK(rel(e.to_double(), std::exp(Cd(0.3, 2.1))) < 1e-14);
  // pow of a positive base
  mp::Complex pw = mp::pow(mp::Real(2.0, 120), mp::Complex(Cd(0.5, 3.0), 120));
  CHECK(rel(pw.to_double(), std::pow(Cd(2, 0), Cd(0.5, 3.0))) < 1e-13);
  // mul_2exp is exact
  mp::Real m = mp::mul_2exp(mp::Real(3.0, 64), -5);
  CHECK(m.to_double() == 3.0 / 32.0);
}

TEST_CASE("mp Bernoulli numbers are exact" * doctest::test_suite("mp")) {
  CHECK(mp::bernoulli(0) == mpq_class(1));
  CHECK(mp::bernoulli(1) == mpq_class(-1, 2));
  CHECK(mp::bernoulli(2) == mpq_class(1, 6));
  CHECK(mp::bernoulli(3) == 0);
  CHECK(mp::bernoulli(4) == mpq_class(-1, 30));
  CHECK(mp::bernoulli(10) == mpq_class(5, 66));
  CHECK(mp::bernoulli(12) == mpq_class(-691, 2730));
  CHECK(mp::bernoulli(20) == mpq_class(-174611, 330));
  // von Staudt-Clausen: denominator of B_2k is the product of primes p
  // with (p-1) | 2k
  mpq_class b28 = mp::bernoulli(28);
  CHECK(b28.get_den() == 2 * 3 * 5 * 29);
}

TEST_CASE("mp lgamma against double implementation and exact values" *
          doctest::test_suite("mp")) {
  // exact: Gamma(5) = 24
  mp::Complex g5 = mp::gamma(mp::Complex(Cd(5, 0), 160));
  CHECK(std::abs(g5.to_double() - Cd(24, 0)) < 1e-40);
  // Gamma(1/2) = sqrt(pi)
  mp::Complex gh = mp::gamma(mp::Complex(Cd(0.5, 0), 160));
  mp::Real want = mp::sqrt(mp::pi(160));
  CHECK(std::abs(gh.re.to_double() - want.to_double()) < 1e-15);
  // |Gamma(1+it)|^2 = pi t / sinh(pi t) at t = 12, high precision
  {
    long p = 220;
    mp::Complex g = mp::gamma(mp::Complex(Cd(1, 12), p));
    mp::Real n = g.re * g.re + g.im * g.im;
    mp::Real pt = mp::pi(p) * mp::Real(12.0, p);
    mp::Real sh(p);
    mpfr_sinh(sh.raw(), pt.raw(), MPFR_RNDN);
    mp::Real resid = n * sh / pt - mp::Real(1.0, p);
    CHECK(mp::abs(resid).exp2() < -200);
  }
  // agreement with the double path across shift/reflection zones
  for (Cd z : {Cd(3.3, 4.0), Cd(0.2, -7.5), Cd(-4.7, 2.2), Cd(12.0, 40.0),
               Cd(0.5, 25.0), Cd(2.5, -60.0)}) {
    Cd ref = lgamma_complex(z);
    Cd got = mp::lgamma(mp::Complex(z, 160)).to_double();
    // compare as Gamma ratios: phases may differ by 2 pi turns
    CHECK(std::abs(std::exp(got - ref) - 1.0) < 1e-12);
  }
  // functional equation at height 80 with precision to spare
  {
    long p = 300;
    mp::Complex z(Cd(1.25, 80.0), p);
    mp::Complex one(Cd(1, 0), p);
    mp::Complex lhs = mp::lgamma(z + one);
    mp::Complex rhs = mp::lgamma(z) + mp::log(z);
    mp::Complex d = mp::exp(lhs - rhs) - one;
    CHECK(mp::abs(d).exp2() < -280);
  }
  // pole rejection
  CHECK_THROWS_AS((void)mp::lgamma(mp::Complex(Cd(-2, 0), 100)), std::domain_error);
}

TEST_CASE("mp incomplete gamma: both branches, recurrence, double agreement" *
          doctest::test_suite("mp")) {
  // Gamma(1, x) = e^{-x}
  {
    long p = 180;
    mp::Complex g = mp::upper_incomplete_gamma(mp::Complex(Cd(1, 0), p),
                                               mp::Real(2.5, p));
    mp::Real want = mp::exp(mp::Real(-2.5, p));
    mp::Real resid = g.re / want - mp::Real(1.0, p);
    CHECK(mp::abs(resid).exp2() < -170);
    CHECK(std::abs(g.im.to_double()) < 1e-50);
  }
  // against the validated double implementation on both branches
  for (Cd s : {Cd(2.5, 3.0), Cd(1.2, -6.0), Cd(0.7, 14.0)}) {
    for (double x : {0.9, 6.0, 35.0}) {
      Cd ref = upper_incomplete_gamma(s, x);
      Cd got =
          mp::upper_incomplete_gamma(mp::Complex(s, 170), mp::Real(x, 170))
              .to_double();
      CHECK(rel(got, ref) < 1e-9);
    }
  }
  // recurrence at conditioning-aware scale, high precision, tall s
  {
    long p = 260;
    mp::Complex s(Cd(2.2, 31.0), p);
    mp::Real x(9.5, p);
    mp::Complex one(Cd(1, 0), p);
    mp::Complex lhs = mp::upper_incomplete_gamma(s + one, x);
    mp::Complex t1 = s * mp::upper_incomplete_gamma(s, x);
    mp::Complex t2 = mp::exp(mp::Complex{s.re * mp::log(x) - x, s.im * mp::log(x)});
    mp::Complex resid = lhs - t1 - t2;
    long scale = mp::abs(t1) > mp::abs(t2) ? mp::abs(t1).exp2() : mp::abs(t2).exp2();
    CHECK(mp::abs(resid).exp2() < scale - 230);
  }
  // series/fraction threshold consistency: same value from both regimes
  {
    long p = 200;
    mp::Complex s(Cd(1.5, 20.0), p);  // |s| ~ 20.06, threshold x = |s| + 6
    mp::Real xlo(26.05, p), xhi(26.07, p);
    Cd a = mp::upper_incomplete_gamma(s, xlo).to_double();
    Cd b = mp::upper_incomplete_gamma(s, xhi).to_double();
    // the two regimes must join smoothly: difference ~ derivative * dx
    CHECK(std::abs(a - b) < std::max(std::abs(a), std::abs(b)) * 0.05);
  }
}
