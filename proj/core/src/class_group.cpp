#include "bqe/class_group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bqe {

std::complex<double> RootOfUnity::value() const {
  return std::polar(1.0, 2.0 * M_PI * static_cast<double>(num) / static_cast<double>(den));
}

RootOfUnity root_of_unity(long num, long den) {
  if (den <= 0) throw std::invalid_argument("root of unity needs positive order");
  long g = std::gcd(((num % den) + den) % den, den);
  RootOfUnity r;
  if (g == 0) {  // num = 0 mod den
    r.num = 0;
    r.den = 1;
    return r;
  }
  r.num = (((num % den) + den) % den) / g;
  r.den = den / g;
  return r;
}

RootOfUnity RootOfUnity::operator*(const RootOfUnity& o) const {
  long l = std::lcm(den, o.den);
  return root_of_unity(num * (l / den) + o.num * (l / o.den), l);
}

RootOfUnity RootOfUnity::inverse() const { return root_of_unity(-num, den); }

// ---- group construction ----

namespace {

// primitive integral ideals of norm n, ascending HNF order
std::vector<Ideal> primitive_ideals_of_norm(const QuadField& F, long n) {
  std::vector<Ideal> out;
  FieldElement omega(F, Rat(0), Rat(1));
  for (long b = 0; b < n; b++) {
    // candidate lattice n Z + (b + omega) Z; it is an ideal iff closed under omega
    Ideal I;
    I.F = &F;
    I.scale = 1;
    I.a = n;
    I.b = b;
    I.c = 1;
    FieldElement g2 = I.basis2();
    if (I.contains(g2 * omega) && I.contains(I.basis1() * omega)) out.push_back(I);
  }
  return out;
}

bool classes_equal(const Ideal& x, const Ideal& y) {
  // [x] = [y] iff x * conj(y) is principal
  return principal_generator(ideal_mul(x, y.conjugate())).has_value();
}

}  // namespace

ClassGroup compute_class_group(const QuadField& F) {
  ClassGroup G;
  G.F = &F;
  G.reps.push_back(ideal_one(F));
  for (long n = 2; n <= std::max(F.minkowski_bound, 1L); n++) {
    for (const Ideal& I : primitive_ideals_of_norm(F, n)) {
      bool known = false;
      for (const Ideal& R : G.reps) {
        if (classes_equal(I, R)) {
          known = true;
          break;
        }
      }
      if (!known) G.reps.push_back(I);
    }
  }
  G.h = static_cast<long>(G.reps.size());

  auto index_of = [&](const Ideal& x) {
    for (size_t k = 0; k < G.reps.size(); k++)
      if (classes_equal(x, G.reps[k])) return static_cast<int>(k);
    throw std::logic_error("ideal class not represented");
  };

  G.mul_table.assign(G.h, std::vector<int>(G.h, 0));
  for (int i = 0; i < G.h; i++)
    for (int j = i; j < G.h; j++) {
      int k = index_of(ideal_mul(G.reps[i], G.reps[j]));
      G.mul_table[i][j] = k;
      G.mul_table[j][i] = k;
    }

  // cyclic decomposition: repeatedly take an element of maximal order in the
  // quotient by the subgroup generated so far
  std::vector<int> inv(G.h);
  for (int i = 0; i < G.h; i++)
    for (int j = 0; j < G.h; j++)
      if (G.mul_table[i][j] == 0) inv[i] = j;
  std::vector<char> in_sub(G.h, 0);
  in_sub[0] = 1;
  long covered = 1;
  // least k >= 1 with g^k inside the current subgroup
  auto quotient_order = [&](int g) {
    long k = 1;
    int x = g;
    while (!in_sub[x]) {
      x = G.mul_table[x][g];
      k++;
    }
    return k;
  };
  while (covered < G.h) {
    int best = -1;
    long best_ord = 0;
    for (int g = 0; g < G.h; g++) {
      if (in_sub[g]) continue;
      long ord = quotient_order(g);
      if (ord > best_ord) {
        best_ord = ord;
        best = g;
      }
    }
    long k = best_ord;
    G.generator_index.push_back(best);
    G.orders.push_back(k);
    // extend subgroup: sub * <best>
    std::vector<char> next = in_sub;
    for (int s = 0; s < G.h; s++) {
      if (!in_sub[s]) continue;
      int y = s;
      for (long e = 1; e < k; e++) {
        y = G.mul_table[y][best];
        next[y] = 1;
      }
    }
    in_sub.swap(next);
    covered = std::count(in_sub.begin(), in_sub.end(), char(1));
  }

  // exponent vectors by enumerating all tuples
  size_t ng = G.orders.size();
  G.exps_of.assign(G.h, {});
  std::vector<long> tuple(ng, 0);
  while (true) {
    int idx = 0;
    for (size_t i = 0; i < ng; i++) {
      int g = G.generator_index[i];
      for (long e = 0; e < tuple[i]; e++) idx = G.mul_table[idx][g];
    }
    if (G.exps_of[idx].empty() && !(idx == 0 && std::any_of(tuple.begin(), tuple.end(),
                                                            [](long t) { return t != 0; })))
      G.exps_of[idx] = tuple;
    // increment mixed-radix tuple
    size_t pos = 0;
    while (pos < ng) {
      tuple[pos]++;
      if (tuple[pos] < G.orders[pos]) break;
      tuple[pos] = 0;
      pos++;
    }
    if (pos == ng) break;
  }
  if (ng == 0) G.exps_of[0] = {};
  for (int i = 0; i < G.h; i++)
    if (G.h > 1 && G.exps_of[i].empty() && i != 0)
      throw std::logic_error("exponent enumeration incomplete");

  return G;
}

IdealClass ClassGroup::class_at(int index) const {
  IdealClass c;
  c.index = index;
  c.exps = exps_of[index];
  return c;
}

IdealClass ClassGroup::mul(const IdealClass& a, const IdealClass& b) const {
  return class_at(mul_table[a.index][b.index]);
}

IdealClass ClassGroup::inverse(const IdealClass& a) const {
  for (int j = 0; j < h; j++)
    if (mul_table[a.index][j] == 0) return class_at(j);
  throw std::logic_error("no inverse");
}

long ClassGroup::order_of(const IdealClass& a) const {
  long ord = 1;
  int x = a.index;
  while (x != 0) {
    x = mul_table[x][a.index];
    ord++;
  }
  return ord;
}

std::vector<IdealClass> ClassGroup::two_torsion() const {
  std::vector<IdealClass> out;
  for (int i = 0; i < h; i++)
    if (mul_table[i][i] == 0) out.push_back(class_at(i));
  return out;
}

std::string ClassGroup::structure_str() const {
  if (orders.empty()) return "trivial";
  std::ostringstream os;
  for (size_t i = 0; i < orders.size(); i++) {
    if (i) os << " x ";
    os << "Z/" << orders[i];
  }
  return os.str();
}

IdealClass class_of(const ClassGroup& G, const Ideal& x) {
  if (x.is_zero()) throw std::invalid_argument("class of zero ideal");
  for (int k = 0; k < G.h; k++) {
    if (principal_generator(ideal_mul(x, G.reps[k].conjugate())).has_value())
      return G.class_at(k);
  }
  throw std::logic_error("class not found");
}

// ---- characters ----

RootOfUnity Character::eval(const IdealClass& c) const {
  RootOfUnity r = root_of_unity(0, 1);
  for (size_t i = 0; i < exps.size(); i++)
    r = r * root_of_unity(exps[i] * c.exps[i], G->orders[i]);
  return r;
}

RootOfUnity Character::eval_ideal(const Ideal& x) const {
  return eval(class_of(*G, x));
}

bool Character::is_real() const {
  for (size_t i = 0; i < exps.size(); i++)
    if ((2 * exps[i]) % G->orders[i] != 0) return false;
  return true;
}

std::vector<Character> characters(const ClassGroup& G) {
  std::vector<Character> out;
  size_t ng = G.orders.size();
  std::vector<long> tuple(ng, 0);
  for (long t = 0; t < G.h; t++) {
    Character c;
    c.G = &G;
    c.index = static_cast<int>(t);
    c.exps = tuple;
    out.push_back(c);
    size_t pos = 0;
    while (pos < ng) {
      tuple[pos]++;
      if (tuple[pos] < G.orders[pos]) break;
      tuple[pos] = 0;
      pos++;
    }
  }
  return out;
}

static int char_index_from_exps(const ClassGroup& G, const std::vector<long>& exps) {
  // characters enumerate tuples in mixed radix, least significant first
  long idx = 0, base = 1;
  for (size_t i = 0; i < exps.size(); i++) {
    idx += exps[i] * base;
    base *= G.orders[i];
  }
  return static_cast<int>(idx);
}

Character char_mul(const Character& a, const Character& b) {
  if (a.G != b.G) throw std::invalid_argument("characters of different groups");
  Character c;
  c.G = a.G;
  c.exps.resize(a.exps.size());
  for (size_t i = 0; i < a.exps.size(); i++)
    c.exps[i] = (a.exps[i] + b.exps[i]) % a.G->orders[i];
  c.index = char_index_from_exps(*a.G, c.exps);
  return c;
}

Character char_inverse(const Character& a) {
  Character c;
  c.G = a.G;
  c.exps.resize(a.exps.size());
  for (size_t i = 0; i < a.exps.size(); i++)
    c.exps[i] = (a.G->orders[i] - a.exps[i]) % a.G->orders[i];
  c.index = char_index_from_exps(*a.G, c.exps);
  return c;
}

long character_sum_exact(const ClassGroup& G, const IdealClass& c) {
  for (size_t i = 0; i < G.orders.size(); i++)
    if (c.exps[i] % G.orders[i] != 0) return 0;
  return G.h;
}

}  // namespace bqe
