#pragma once

// Exact arithmetic in imaginary quadratic fields F = Q(sqrt(d)), d < 0 squarefree.
// Elements are rational linear combinations of (1, omega) where omega is
// (1+sqrt(d))/2 for d = 1 mod 4 and sqrt(d) otherwise, so Z + Z*omega = O_F.
// Fractional ideals are kept as scale * (aZ + (b+c*omega)Z) with the integer
// triple (a,b,c) in lattice HNF and content folded into the rational scale.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace bqe {

using Int = mpz_class;
using Rat = mpq_class;

long to_long(const Int& z);
double to_double(const Rat& q);

struct QuadField {
  long d = 0;         // squarefree, negative
  long disc = 0;      // d if d = 1 mod 4, else 4d
  bool one_mod_four = false;
  int unit_count = 2;          // order of O_F^*; 4 for d=-1, 6 for d=-3
  long minkowski_bound = 0;    // floor((2/pi) sqrt(|disc|))

  // omega data: omega^2 = om2_const + om2_omega * omega
  Rat om2_const, om2_omega;

  std::complex<double> omega_embed() const;
  std::complex<double> sqrt_disc() const;  // +i sqrt(|disc|)
};

// Raises std::invalid_argument unless d < 0, squarefree, and != -1, -3 when
// require_class_number_gt_one is set (those have h=1 and extra units).
QuadField make_field(long d, bool require_class_number_gt_one = false);

struct FieldElement {
  const QuadField* F = nullptr;
  Rat x, y;  // value = x + y*omega

  FieldElement() = default;
  FieldElement(const QuadField& f, Rat re, Rat om) : F(&f), x(std::move(re)), y(std::move(om)) {}
  FieldElement(const QuadField& f, long n) : F(&f), x(n), y(0) {}

  bool is_zero() const { return x == 0 && y == 0; }
  bool is_integral() const;       // lies in O_F
  bool is_rational() const { return y == 0; }
  bool is_unit() const;           // +-1 (fields here have no other units)

  FieldElement conj() const;
  Rat norm() const;               // x^2 + ... , equals |embed()|^2 exactly
  Rat trace() const;
  std::complex<double> embed() const;

  FieldElement operator-() const;
  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator/(const FieldElement& o) const;  // requires o != 0
  bool operator==(const FieldElement& o) const { return x == o.x && y == o.y; }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

  std::string str() const;
};

struct Ideal {
  const QuadField* F = nullptr;
  Rat scale;        // > 0
  Int a, b, c;      // primitive HNF: gcd(a,b,c)=1, c|a, c|b (hence c=1), 0<=b<a

  bool is_zero() const { return F == nullptr || a == 0; }
  bool is_integral() const;       // contained in O_F
  bool is_one() const;            // equals O_F
  Rat norm() const;               // scale^2 * a * c
  // Z-basis of the lattice: (g1, g2) = (scale*a, scale*(b+c*omega))
  FieldElement basis1() const;
  FieldElement basis2() const;
  bool contains(const FieldElement& v) const;
  bool contains(const Ideal& other) const;  // other subseteq this
  Ideal conjugate() const;
  bool operator==(const Ideal& o) const;
  bool operator!=(const Ideal& o) const { return !(*this == o); }
  bool operator<(const Ideal& o) const;  // lexicographic on (norm, a, b, c, scale)
  std::string str() const;
};

// Smallest O_F-module containing all generators (the zero ideal if all are 0).
Ideal ideal_hnf(const QuadField& F, const std::vector<FieldElement>& gens);
Ideal ideal_from_element(const FieldElement& v);       // principal (v)
Ideal ideal_one(const QuadField& F);                   // O_F
Ideal ideal_mul(const Ideal& x, const Ideal& y);
Ideal ideal_add(const Ideal& x, const Ideal& y);       // gcd
Ideal ideal_mul_element(const Ideal& x, const FieldElement& v);
Ideal ideal_inverse(const Ideal& x);
Ideal ideal_pow(const Ideal& x, long e);               // e may be negative

struct PrimeIdeal {
  Ideal ideal;
  long p = 0;   // rational prime below
  int e = 1;    // ramification index
  int f = 1;    // residue degree; N = p^f
  Rat norm() const { return Rat(p) * (f == 2 ? Rat(p) : Rat(1)); }
};

// Primes of O_F above p, in deterministic order (split primes ordered by the
// HNF of their ideals). p must be a rational prime.
std::vector<PrimeIdeal> factor_rational_prime(const QuadField& F, long p);

// Factorization of a nonzero fractional ideal as {(prime, exponent)}, primes
// sorted by (rational prime, HNF). Exponents may be negative.
std::vector<std::pair<PrimeIdeal, int>> factor_ideal(const Ideal& x);

int valuation(const Ideal& x, const PrimeIdeal& p);
int valuation(const FieldElement& v, const PrimeIdeal& p);  // v != 0

// All nonzero v in the lattice x with |v| <= R, sorted by (norm, x, y).
std::vector<FieldElement> enumerate_elements(const Ideal& x, double R);

// A generator of x if x is principal. Deterministic: among generators (all of
// equal norm) returns the one with lexicographically largest (x, y) pair sign
// convention, i.e. smallest coordinates after fixing sign.
std::optional<FieldElement> principal_generator(const Ideal& x);

// Solve v = r_i mod m_i for pairwise coprime integral ideals m_i; the residues
// must be integral. Result is reduced modulo prod m_i.
FieldElement crt_solve(const QuadField& F,
                       const std::vector<std::pair<FieldElement, Ideal>>& congruences);

struct Matrix2F {
  FieldElement m[2][2];

  const QuadField* field() const { return m[0][0].F; }
  FieldElement det() const;
  Matrix2F mul(const Matrix2F& o) const;
  Matrix2F inverse() const;            // requires det != 0
  Matrix2F scalar_mul(const FieldElement& s) const;
  bool is_integral() const;            // all entries in O_F
  // a*c, a*d, b*c, b*d all integral (rows (a b) / (c d)).
  bool quasi_integral() const;
  std::string str() const;
};

Matrix2F matrix2(const FieldElement& a, const FieldElement& b,
                 const FieldElement& c, const FieldElement& d);
Matrix2F matrix_identity(const QuadField& F);

// ---- small integer utilities shared across modules ----

bool is_squarefree(long n);                  // n != 0
std::vector<long> primes_up_to(long n);
bool is_prime_long(long p);
// Prime factorization of |n| (n != 0), sorted, via trial division + Pollard rho.
std::vector<std::pair<Int, int>> factor_int(const Int& n);
// Solutions of x^2 = a mod p for odd prime p, empty if none; {0} if a = 0.
std::vector<long> sqrt_mod(long a, long p);

// Column HNF with transform: given 2 x n integer matrix M, returns (H, U) with
// H = M * U, U unimodular n x n, H = [[h11, 0, 0...], [h21, h22, 0...]] lower
// triangular with h11 > 0, h22 > 0, 0 <= h21 < ... (columns beyond 2 zero).
// Used to express HNF basis vectors as integer combinations of generators.
struct HnfTransform {
  Int h11, h21, h22;           // h22 = 0 when rank < 2
  std::vector<Int> u1, u2;     // combinations giving the two basis vectors
};
HnfTransform hnf_with_transform(std::vector<std::array<Int, 2>> cols);

}  // namespace bqe
