#include <doctest.h>

#include <algorithm>
#include <complex>
#include <map>
#include <numeric>
#include <set>

#include "bqe/class_group.hpp"
#include "bqe/number_field.hpp"

using namespace bqe;

namespace {

// Independent oracle: class number via reduced primitive binary quadratic
// forms (a,b,c), b^2 - 4ac = disc, |b| <= a <= c, gcd(a,b,c) = 1,
// b >= 0 when |b| = a or a = c.
long form_class_number(long disc) {
  long count = 0;
  for (long a = 1; a * a <= (-disc) / 3 + 1; a++) {
    for (long b = -a; b <= a; b++) {
      long num = b * b - disc;
      if (num % (4 * a) != 0) continue;
      long c = num / (4 * a);
      if (c < a) continue;
      if ((b < 0) && (b == -a || a == c)) continue;
      if (std::gcd(std::gcd(a, b), c) != 1) continue;
      count++;
    }
  }
  return count;
}

// Independent oracle for the 2-torsion subgroup size: 2^(mu - 1) where mu is
// the number of distinct primes dividing the discriminant.
long genus_two_torsion(long disc) {
  long m = -disc;
  long mu = 0;
  for (long p = 2; p * p <= m; p++) {
    if (m % p == 0) {
      mu++;
      while (m % p == 0) m /= p;
    }
  }
  if (m > 1) mu++;
  long r = 1;
  for (long i = 1; i < mu; i++) r *= 2;
  return r;
}

struct FieldCase {
  long d;
  long h;
  std::vector<long> orders;
};

const std::vector<FieldCase> kCases = {
    {-5, 2, {2}},  {-6, 2, {2}},      {-10, 2, {2}}, {-13, 2, {2}},
    {-14, 4, {4}}, {-21, 4, {2, 2}},  {-23, 3, {3}}, {-30, 4, {2, 2}},
};

}  // namespace

TEST_CASE("class numbers and invariant factors match the form-count oracle" *
          doctest::test_suite("class_group")) {
  for (const auto& tc : kCases) {
    CAPTURE(tc.d);
    QuadField F = make_field(tc.d, true);
    ClassGroup G = compute_class_group(F);
    CHECK(G.h == tc.h);
    CHECK(G.h == form_class_number(F.disc));
    REQUIRE(G.orders.size() == tc.orders.size());
    for (size_t i = 0; i < tc.orders.size(); i++) CHECK(G.orders[i] == tc.orders[i]);
    // invariant factor chain: each order divides the previous
    for (size_t i = 1; i < G.orders.size(); i++)
      CHECK(G.orders[i - 1] % G.orders[i] == 0);
    long prod = 1;
    for (long n : G.orders) prod *= n;
    CHECK(prod == G.h);
    CHECK(static_cast<long>(G.two_torsion().size()) == genus_two_torsion(F.disc));
  }
}

TEST_CASE("group table is a consistent abelian group" *
          doctest::test_suite("class_group")) {
  for (long d : {-5L, -14L, -21L, -23L, -30L}) {
    CAPTURE(d);
    QuadField F = make_field(d, true);
    ClassGroup G = compute_class_group(F);
    // identity, commutativity, associativity, inverses
    for (int i = 0; i < G.h; i++) {
      CHECK(G.mul_table[0][i] == i);
      IdealClass ci = G.class_at(i);
      IdealClass inv = G.inverse(ci);
      CHECK(G.mul(ci, inv).is_identity());
      for (int j = 0; j < G.h; j++) {
        CHECK(G.mul_table[i][j] == G.mul_table[j][i]);
        for (int k = 0; k < G.h; k++)
          CHECK(G.mul_table[G.mul_table[i][j]][k] == G.mul_table[i][G.mul_table[j][k]]);
      }
    }
    // representative 0 is the ring itself, and orders divide h
    CHECK(G.reps[0].is_one());
    for (int i = 0; i < G.h; i++) CHECK(G.h % G.order_of(G.class_at(i)) == 0);
    // exponent tuples determine the element through the generators
    for (int i = 0; i < G.h; i++) {
      int rebuilt = 0;
      const auto& e = G.exps_of[i];
      REQUIRE(e.size() == G.generator_index.size());
      for (size_t g = 0; g < e.size(); g++)
        for (long t = 0; t < e[g]; t++)
          rebuilt = G.mul_table[rebuilt][G.generator_index[g]];
      CHECK(rebuilt == i);
    }
  }
}

TEST_CASE("class_of respects multiplication and inversion" *
          doctest::test_suite("class_group")) {
  for (long d : {-5L, -21L, -23L}) {
    CAPTURE(d);
    QuadField F = make_field(d, true);
    ClassGroup G = compute_class_group(F);
    std::vector<Ideal> pool;
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L})
      for (const PrimeIdeal& P : factor_rational_prime(F, p)) pool.push_back(P.ideal);
    for (size_t i = 0; i < pool.size(); i++) {
      for (size_t j = i; j < pool.size(); j++) {
        IdealClass a = class_of(G, pool[i]);
        IdealClass b = class_of(G, pool[j]);
        IdealClass ab = class_of(G, ideal_mul(pool[i], pool[j]));
        CHECK(G.mul(a, b).index == ab.index);
      }
      // inverse class = class of the inverse ideal = class of the conjugate
      IdealClass a = class_of(G, pool[i]);
      CHECK(G.inverse(a).index == class_of(G, ideal_inverse(pool[i])).index);
      CHECK(G.inverse(a).index == class_of(G, pool[i].conjugate()).index);
    }
    // principal ideals land in the identity class
    FieldElement x(F, Rat(3), Rat(2));
    CHECK(class_of(G, ideal_from_element(x)).is_identity());
  }
}

TEST_CASE("characters: count, duals, multiplicativity, values" *
          doctest::test_suite("class_group")) {
  for (const auto& tc : kCases) {
    CAPTURE(tc.d);
    QuadField F = make_field(tc.d, true);
    ClassGroup G = compute_class_group(F);
    std::vector<Character> chars = characters(G);
    REQUIRE(static_cast<long>(chars.size()) == G.h);
    CHECK(chars[0].is_trivial());
    for (int c = 0; c < G.h; c++) CHECK(chars[0].eval(G.class_at(c)).is_one());
    for (const Character& chi : chars) {
      // multiplicative in the group argument
      for (int i = 0; i < G.h; i++)
        for (int j = 0; j < G.h; j++) {
          RootOfUnity lhs = chi.eval(G.mul(G.class_at(i), G.class_at(j)));
          RootOfUnity rhs = chi.eval(G.class_at(i)) * chi.eval(G.class_at(j));
          CHECK(lhs == rhs);
        }
      // chi * chi^-1 is trivial
      Character inv = char_inverse(chi);
      CHECK(char_mul(chi, inv).is_trivial());
      // real characters take values +-1 only
      if (chi.is_real()) {
        for (int c = 0; c < G.h; c++) {
          std::complex<double> v = chi(G.class_at(c));
          CHECK(std::abs(std::abs(v.real()) - 1.0) < 1e-14);
          CHECK(std::abs(v.imag()) < 1e-14);
        }
      }
    }
    // distinct characters differ somewhere
    for (size_t i = 0; i < chars.size(); i++)
      for (size_t j = i + 1; j < chars.size(); j++) {
        bool differ = false;
        for (int c = 0; c < G.h && !differ; c++)
          differ = !(chars[i].eval(G.class_at(c)) == chars[j].eval(G.class_at(c)));
        CHECK(differ);
      }
  }
}

TEST_CASE("orthogonality: exact and floating forms" *
          doctest::test_suite("class_group")) {
  for (const auto& tc : kCases) {
    CAPTURE(tc.d);
    QuadField F = make_field(tc.d, true);
    ClassGroup G = compute_class_group(F);
    std::vector<Character> chars = characters(G);
    for (int c = 0; c < G.h; c++) {
      long exact = character_sum_exact(G, G.class_at(c));
      CHECK(exact == (c == 0 ? G.h : 0));
      std::complex<double> s{0.0, 0.0};
      for (const Character& chi : chars) s += chi(G.class_at(c));
      CHECK(std::abs(s - std::complex<double>(static_cast<double>(exact), 0.0)) <= 1e-12);
    }
    // column form: sum over classes of chi(c) is h for trivial chi else 0
    for (const Character& chi : chars) {
      std::complex<double> s{0.0, 0.0};
      for (int c = 0; c < G.h; c++) s += chi(G.class_at(c));
      double expect = chi.is_trivial() ? static_cast<double>(G.h) : 0.0;
      CHECK(std::abs(s - std::complex<double>(expect, 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("class selector sums pick out a single coset" *
          doctest::test_suite("class_group")) {
  // (1/h) sum_chi chi(m_j^2 m) equals 1 exactly when [m] = [m_j^-2]
  for (long d : {-5L, -14L, -21L, -23L}) {
    CAPTURE(d);
    QuadField F = make_field(d, true);
    ClassGroup G = compute_class_group(F);
    for (int j = 0; j < G.h; j++) {
      IdealClass cj = G.class_at(j);
      IdealClass cj2 = G.mul(cj, cj);
      IdealClass target = G.inverse(cj2);
      for (int m = 0; m < G.h; m++) {
        IdealClass prod = G.mul(cj2, G.class_at(m));
        long sel = character_sum_exact(G, prod);
        CHECK(sel == (m == target.index ? G.h : 0));
      }
    }
  }
}

TEST_CASE("cube root character appears for discriminant -23" *
          doctest::test_suite("class_group")) {
  QuadField F = make_field(-23, true);
  ClassGroup G = compute_class_group(F);
  REQUIRE(G.h == 3);
  std::vector<Character> chars = characters(G);
  // (2) splits; its factors generate the order-3 group
  std::vector<PrimeIdeal> above2 = factor_rational_prime(F, 2);
  REQUIRE(above2.size() == 2);
  IdealClass c2 = class_of(G, above2[0].ideal);
  CHECK(G.order_of(c2) == 3);
  int nontrivial_cube_roots = 0;
  for (const Character& chi : chars) {
    if (chi.is_trivial()) continue;
    std::complex<double> v = chi(c2);
    // primitive cube root of unity: v^3 = 1, v != 1
    CHECK(std::abs(std::pow(v, 3) - std::complex<double>(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(v - std::complex<double>(1.0, 0.0)) > 0.5);
    nontrivial_cube_roots++;
  }
  CHECK(nontrivial_cube_roots == 2);
}

TEST_CASE("root of unity arithmetic stays normalized" *
          doctest::test_suite("class_group")) {
  RootOfUnity a = root_of_unity(1, 4);
  RootOfUnity b = root_of_unity(1, 4);
  RootOfUnity c = a * b;  // i * i = -1
  CHECK(c.num == 1);
  CHECK(c.den == 2);
  CHECK((a * a.inverse()).is_one());
  RootOfUnity d = root_of_unity(6, 4);  // reduces to 1/2
  CHECK(d.num == 1);
  CHECK(d.den == 2);
  RootOfUnity e = root_of_unity(-1, 3);  // wraps to 2/3
  CHECK(e.num == 2);
  CHECK(e.den == 3);
  CHECK(std::abs(root_of_unity(1, 6).value() -
                 std::polar(1.0, M_PI / 3.0)) < 1e-15);
}
