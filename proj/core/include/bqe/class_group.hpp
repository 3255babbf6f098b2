#pragma once

// Ideal class group of an imaginary quadratic field, computed exactly by
// classifying all primitive integral ideals of norm up to the Minkowski bound
// with principality tests. Class representatives are the smallest-norm ideals
// in each class (ties broken by HNF order), the unit class first.

#include <complex>
#include <vector>

#include "bqe/number_field.hpp"

namespace bqe {

// exp(2*pi*i * num/den) held exactly; 0 <= num < den, gcd(num, den) = 1
struct RootOfUnity {
  long num = 0;
  long den = 1;
  std::complex<double> value() const;
  RootOfUnity operator*(const RootOfUnity& o) const;
  RootOfUnity inverse() const;
  bool is_one() const { return num == 0; }
  bool operator==(const RootOfUnity& o) const { return num == o.num && den == o.den; }
};

RootOfUnity root_of_unity(long num, long den);

struct IdealClass {
  int index = 0;                // position in ClassGroup::reps
  std::vector<long> exps;       // coordinates along the cyclic decomposition
  bool is_identity() const { return index == 0; }
};

// The group; keeps a pointer to the field, which must outlive it.
struct ClassGroup {
  const QuadField* F = nullptr;
  long h = 0;
  std::vector<Ideal> reps;          // reps[0] = O_F
  std::vector<long> orders;         // cyclic factors, n_{i+1} | n_i
  std::vector<int> generator_index; // reps index of each cyclic generator
  std::vector<std::vector<int>> mul_table;
  std::vector<std::vector<long>> exps_of;  // index -> exponent vector

  IdealClass class_at(int index) const;
  IdealClass mul(const IdealClass& a, const IdealClass& b) const;
  IdealClass inverse(const IdealClass& a) const;
  long order_of(const IdealClass& a) const;
  std::vector<IdealClass> two_torsion() const;       // Cl[2], identity included
  std::string structure_str() const;                 // e.g. "Z/2 x Z/2"
};

ClassGroup compute_class_group(const QuadField& F);

IdealClass class_of(const ClassGroup& G, const Ideal& x);  // x nonzero

// Characters of the class group in a fixed order; index 0 is trivial.
struct Character {
  const ClassGroup* G = nullptr;
  int index = 0;
  std::vector<long> exps;  // dual exponents along the cyclic factors

  RootOfUnity eval(const IdealClass& c) const;
  RootOfUnity eval_ideal(const Ideal& x) const;
  std::complex<double> operator()(const IdealClass& c) const { return eval(c).value(); }
  std::complex<double> operator()(const Ideal& x) const { return eval_ideal(x).value(); }
  bool is_trivial() const { return index == 0; }
  bool is_real() const;  // takes values in {+-1}
};

std::vector<Character> characters(const ClassGroup& G);
Character char_mul(const Character& a, const Character& b);
Character char_inverse(const Character& a);

// Exact value of sum over all characters of chi(c): h if c is the identity
// class, else 0 (each cyclic factor contributes a full geometric sum of roots
// of unity, which vanishes identically unless the exponent is 0 mod order).
long character_sum_exact(const ClassGroup& G, const IdealClass& c);

}  // namespace bqe
