#include "bqe/number_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace bqe {

long to_long(const Int& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("integer does not fit in long");
  return z.get_si();
}

double to_double(const Rat& q) { return q.get_d(); }

static Rat make_rat(Int num, Int den) {
  Rat r(std::move(num), std::move(den));
  r.canonicalize();
  return r;
}

std::complex<double> QuadField::omega_embed() const {
  double s = std::sqrt(static_cast<double>(-d));
  if (one_mod_four) return {0.5, 0.5 * s};
  return {0.0, s};
}

std::complex<double> QuadField::sqrt_disc() const {
  return {0.0, std::sqrt(static_cast<double>(-disc))};
}

QuadField make_field(long d, bool require_class_number_gt_one) {
  if (d >= 0) throw std::invalid_argument("d must be negative");
  if (!is_squarefree(d)) throw std::invalid_argument("d must be squarefree");
  QuadField F;
  F.d = d;
  F.one_mod_four = ((d % 4 + 4) % 4) == 1;
  F.disc = F.one_mod_four ? d : 4 * d;
  F.unit_count = (d == -1) ? 4 : (d == -3) ? 6 : 2;
  if (require_class_number_gt_one && (d == -1 || d == -3))
    throw std::invalid_argument("field has extra units and class number one");
  F.minkowski_bound = static_cast<long>(std::floor(2.0 * std::sqrt(static_cast<double>(-F.disc)) / M_PI));
  if (F.one_mod_four) {
    F.om2_const = make_rat(Int(d) - 1, Int(4));  // omega^2 = (d-1)/4 + omega
    F.om2_omega = 1;
  } else {
    F.om2_const = d;  // omega^2 = d
    F.om2_omega = 0;
  }
  return F;
}

// ---- FieldElement ----

static void check_same_field(const FieldElement& a, const FieldElement& b) {
  if (a.F != b.F) throw std::invalid_argument("elements of different fields");
}

bool FieldElement::is_integral() const {
  return x.get_den() == 1 && y.get_den() == 1;
}

bool FieldElement::is_unit() const { return is_integral() && norm() == 1; }

FieldElement FieldElement::conj() const {
  // conj(omega) = 1 - omega when d = 1 mod 4, else -omega
  if (F->one_mod_four) return FieldElement(*F, x + y, -y);
  return FieldElement(*F, x, -y);
}

Rat FieldElement::norm() const {
  if (F->one_mod_four) {
    // N(x + y w) = x^2 + x y + y^2 (1-d)/4
    return x * x + x * y + y * y * make_rat(1 - Int(F->d), 4);
  }
  return x * x - y * y * F->d;
}

Rat FieldElement::trace() const {
  if (F->one_mod_four) return 2 * x + y;
  return 2 * x;
}

std::complex<double> FieldElement::embed() const {
  return to_double(x) + to_double(y) * F->omega_embed();
}

FieldElement FieldElement::operator-() const { return FieldElement(*F, -x, -y); }

FieldElement FieldElement::operator+(const FieldElement& o) const {
  check_same_field(*this, o);
  return FieldElement(*F, x + o.x, y + o.y);
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  check_same_field(*this, o);
  return FieldElement(*F, x - o.x, y - o.y);
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  check_same_field(*this, o);
  // (x1 + y1 w)(x2 + y2 w) = x1 x2 + (x1 y2 + y1 x2) w + y1 y2 w^2
  Rat cross = y * o.y;
  return FieldElement(*F, x * o.x + cross * F->om2_const,
                      x * o.y + y * o.x + cross * F->om2_omega);
}

FieldElement FieldElement::operator/(const FieldElement& o) const {
  check_same_field(*this, o);
  if (o.is_zero()) throw std::invalid_argument("division by zero field element");
  FieldElement num = *this * o.conj();
  Rat n = o.norm();
  return FieldElement(*F, num.x / n, num.y / n);
}

std::string FieldElement::str() const {
  std::ostringstream os;
  os << x.get_str();
  if (y != 0) os << (y > 0 ? " + " : " - ") << Rat(abs(y)).get_str() << "*w";
  return os.str();
}

// ---- HNF machinery ----

HnfTransform hnf_with_transform(std::vector<std::array<Int, 2>> cols) {
  size_t n = cols.size();
  std::vector<std::vector<Int>> U(n, std::vector<Int>(n, 0));
  for (size_t i = 0; i < n; i++) U[i][i] = 1;
  auto col_sub = [&](size_t dst, size_t src, const Int& q) {
    cols[dst][0] -= q * cols[src][0];
    cols[dst][1] -= q * cols[src][1];
    for (size_t i = 0; i < n; i++) U[i][dst] -= q * U[i][src];
  };
  auto col_neg = [&](size_t j) {
    cols[j][0] = -cols[j][0];
    cols[j][1] = -cols[j][1];
    for (size_t i = 0; i < n; i++) U[i][j] = -U[i][j];
  };

  // Euclid on the given row across columns until one nonzero entry remains;
  // returns its index, or n if the row is identically zero.
  auto sweep_row = [&](int row, const std::vector<size_t>& active) -> size_t {
    while (true) {
      size_t piv = n;
      for (size_t j : active)
        if (cols[j][row] != 0 && (piv == n || abs(cols[j][row]) < abs(cols[piv][row]))) piv = j;
      if (piv == n) return n;
      bool clean = true;
      for (size_t j : active) {
        if (j == piv || cols[j][row] == 0) continue;
        Int q = cols[j][row] / cols[piv][row];  // truncated division is fine for Euclid
        if (q != 0) col_sub(j, piv, q);
        if (cols[j][row] != 0) clean = false;
      }
      if (clean) {
        if (cols[piv][row] < 0) col_neg(piv);
        return piv;
      }
    }
  };

  std::vector<size_t> all(n);
  for (size_t j = 0; j < n; j++) all[j] = j;
  HnfTransform T;
  size_t jy = sweep_row(1, all);
  std::vector<size_t> rest;
  for (size_t j = 0; j < n; j++)
    if (j != jy) rest.push_back(j);
  size_t jx = sweep_row(0, rest);

  T.h11 = 0;
  T.h21 = 0;
  T.h22 = 0;
  T.u1.assign(n, Int(0));
  T.u2.assign(n, Int(0));
  if (jx != n) {
    T.h11 = cols[jx][0];
    for (size_t i = 0; i < n; i++) T.u1[i] = U[i][jx];
  }
  if (jy != n) {
    // reduce the mixed column modulo the pure one
    if (jx != n && T.h11 != 0) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), cols[jy][0].get_mpz_t(), T.h11.get_mpz_t());
      if (q != 0) col_sub(jy, jx, q);
    }
    T.h21 = cols[jy][0];
    T.h22 = cols[jy][1];
    for (size_t i = 0; i < n; i++) T.u2[i] = U[i][jy];
  }
  return T;
}

// ---- Ideal ----

static Ideal make_ideal_canonical(const QuadField& F, Rat scale, Int a, Int b, Int c) {
  Ideal I;
  I.F = &F;
  if (a == 0) {
    I.scale = 0;
    I.a = I.b = I.c = 0;
    return I;
  }
  Int content = gcd(gcd(a, b), c);
  if (content > 1) {
    a /= content;
    b /= content;
    c /= content;
    scale *= content;
  }
  if (c != 0) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), b.get_mpz_t(), a.get_mpz_t());
    b -= q * a;
  }
  I.scale = std::move(scale);
  I.a = std::move(a);
  I.b = std::move(b);
  I.c = std::move(c);
  return I;
}

Ideal ideal_hnf(const QuadField& F, const std::vector<FieldElement>& gens) {
  // The module generated over O_F: append omega multiples, clear denominators.
  std::vector<FieldElement> full;
  FieldElement omega(F, Rat(0), Rat(1));
  for (const auto& g : gens) {
    if (g.F != &F) throw std::invalid_argument("generator from wrong field");
    if (g.is_zero()) continue;
    full.push_back(g);
    full.push_back(g * omega);
  }
  if (full.empty()) {
    Ideal z;
    z.F = &F;
    z.scale = 0;
    z.a = z.b = z.c = 0;
    return z;
  }
  Int den(1);
  for (const auto& g : full) {
    den = lcm(den, g.x.get_den());
    den = lcm(den, g.y.get_den());
  }
  std::vector<std::array<Int, 2>> cols;
  for (const auto& g : full) {
    Rat gx = g.x * den, gy = g.y * den;
    cols.push_back({gx.get_num(), gy.get_num()});
  }
  HnfTransform T = hnf_with_transform(std::move(cols));
  if (T.h22 == 0)
    throw std::logic_error("ideal lattice is not full rank");
  return make_ideal_canonical(F, make_rat(1, den), T.h11, T.h21, T.h22);
}

Ideal ideal_from_element(const FieldElement& v) { return ideal_hnf(*v.F, {v}); }

Ideal ideal_one(const QuadField& F) {
  return make_ideal_canonical(F, Rat(1), Int(1), Int(0), Int(1));
}

FieldElement Ideal::basis1() const { return FieldElement(*F, scale * a, Rat(0)); }

FieldElement Ideal::basis2() const { return FieldElement(*F, scale * b, scale * c); }

Rat Ideal::norm() const { return scale * scale * a * c; }

bool Ideal::is_integral() const {
  return !is_zero() && basis1().is_integral() && basis2().is_integral();
}

bool Ideal::is_one() const {
  return !is_zero() && scale == 1 && a == 1 && b == 0 && c == 1;
}

bool Ideal::contains(const FieldElement& v) const {
  if (v.is_zero()) return true;
  if (is_zero()) return false;
  // v = scale * (m*a + n*(b + c*omega)) with m, n integers
  Rat vy = v.y / scale;
  Rat n = vy / c;
  if (n.get_den() != 1) return false;
  Rat vx = v.x / scale - n * b;
  Rat m = vx / a;
  return m.get_den() == 1;
}

bool Ideal::contains(const Ideal& o) const {
  if (o.is_zero()) return true;
  return contains(o.basis1()) && contains(o.basis2());
}

Ideal Ideal::conjugate() const {
  if (is_zero()) return *this;
  return ideal_hnf(*F, {basis1(), basis2().conj()});
}

bool Ideal::operator==(const Ideal& o) const {
  return F == o.F && scale == o.scale && a == o.a && b == o.b && c == o.c;
}

bool Ideal::operator<(const Ideal& o) const {
  Rat n1 = norm(), n2 = o.norm();
  if (n1 != n2) return n1 < n2;
  if (a != o.a) return a < o.a;
  if (b != o.b) return b < o.b;
  if (c != o.c) return c < o.c;
  return scale < o.scale;
}

std::string Ideal::str() const {
  std::ostringstream os;
  os << scale.get_str() << "*[" << a.get_str() << ", " << b.get_str() << " + "
     << c.get_str() << "*w]";
  return os.str();
}

Ideal ideal_mul(const Ideal& x, const Ideal& y) {
  if (x.F != y.F) throw std::invalid_argument("ideals of different fields");
  if (x.is_zero() || y.is_zero()) {
    Ideal z;
    z.F = x.F;
    z.scale = 0;
    z.a = z.b = z.c = 0;
    return z;
  }
  return ideal_hnf(*x.F, {x.basis1() * y.basis1(), x.basis1() * y.basis2(),
                          x.basis2() * y.basis1(), x.basis2() * y.basis2()});
}

Ideal ideal_add(const Ideal& x, const Ideal& y) {
  if (x.F != y.F) throw std::invalid_argument("ideals of different fields");
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  return ideal_hnf(*x.F, {x.basis1(), x.basis2(), y.basis1(), y.basis2()});
}

Ideal ideal_mul_element(const Ideal& x, const FieldElement& v) {
  if (v.is_zero()) throw std::invalid_argument("multiplying ideal by zero");
  return ideal_hnf(*x.F, {x.basis1() * v, x.basis2() * v});
}

Ideal ideal_inverse(const Ideal& x) {
  if (x.is_zero()) throw std::invalid_argument("inverse of zero ideal");
  Ideal c = x.conjugate();
  Rat n = x.norm();
  c.scale /= n;
  return c;
}

Ideal ideal_pow(const Ideal& x, long e) {
  if (e < 0) return ideal_pow(ideal_inverse(x), -e);
  Ideal r = ideal_one(*x.F);
  Ideal base = x;
  unsigned long k = static_cast<unsigned long>(e);
  while (k) {
    if (k & 1) r = ideal_mul(r, base);
    k >>= 1;
    if (k) base = ideal_mul(base, base);
  }
  return r;
}

// ---- prime decomposition ----

std::vector<PrimeIdeal> factor_rational_prime(const QuadField& F, long p) {
  if (!is_prime_long(p)) throw std::invalid_argument("not a rational prime");
  FieldElement omega(F, Rat(0), Rat(1));
  FieldElement pe(F, p);
  auto prime_from_root = [&](long r, int e, int f) {
    PrimeIdeal P;
    P.ideal = ideal_hnf(F, {pe, omega - FieldElement(F, r)});
    P.p = p;
    P.e = e;
    P.f = f;
    return P;
  };
  std::vector<PrimeIdeal> out;
  if (p == 2) {
    long dm8 = ((F.d % 8) + 8) % 8;
    if (!F.one_mod_four) {
      // 2 ramifies; double root of the minimal polynomial mod 2
      long r = (dm8 % 2 == 0) ? 0 : 1;
      out.push_back(prime_from_root(r, 2, 1));
      return out;
    }
    if (dm8 == 1) {  // x^2 - x - (d-1)/4 splits mod 2 with roots 0, 1
      out.push_back(prime_from_root(0, 1, 1));
      out.push_back(prime_from_root(1, 1, 1));
    } else {
      PrimeIdeal P;
      P.ideal = ideal_from_element(pe);
      P.p = p;
      P.e = 1;
      P.f = 2;
      out.push_back(P);
    }
    if (out.size() == 2 && out[1].ideal < out[0].ideal) std::swap(out[0], out[1]);
    return out;
  }
  long dmod = ((F.disc % p) + p) % p;
  if (dmod == 0) {
    // ramified: single root r of the minimal polynomial mod p
    long r;
    if (F.one_mod_four) {
      // (2t-1)^2 = d mod p and d = 0: t = (p+1)/2
      r = (p + 1) / 2;
    } else {
      r = 0;
    }
    out.push_back(prime_from_root(r, 2, 1));
    return out;
  }
  long dres = ((F.d % p) + p) % p;
  std::vector<long> roots = sqrt_mod(dres, p);
  if (roots.empty()) {
    PrimeIdeal P;
    P.ideal = ideal_from_element(pe);
    P.p = p;
    P.e = 1;
    P.f = 2;
    out.push_back(P);
    return out;
  }
  for (long s : roots) {
    // root of min poly: omega = (1+sqrt d)/2 -> t = (1+s)/2 mod p; omega = sqrt d -> t = s
    long r = F.one_mod_four ? (((1 + s) % p) * ((p + 1) / 2)) % p : s;
    out.push_back(prime_from_root(r, 1, 1));
  }
  if (out.size() == 2 && out[1].ideal < out[0].ideal) std::swap(out[0], out[1]);
  return out;
}

int valuation(const Ideal& x, const PrimeIdeal& P) {
  if (x.is_zero()) throw std::invalid_argument("valuation of zero ideal");
  // split off the rational scale
  Rat s = x.scale;
  long vp_num = 0, vp_den = 0;
  Int num = s.get_num(), den = s.get_den();
  while (mpz_divisible_ui_p(num.get_mpz_t(), P.p)) {
    num /= static_cast<unsigned long>(P.p);
    vp_num++;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), P.p)) {
    den /= static_cast<unsigned long>(P.p);
    vp_den++;
  }
  int v = static_cast<int>(P.e * (vp_num - vp_den));
  Ideal L0 = make_ideal_canonical(*x.F, Rat(1), x.a, x.b, x.c);
  Ideal pk = ideal_one(*x.F);
  int k = 0;
  while (true) {
    Ideal next = ideal_mul(pk, P.ideal);
    if (!next.contains(L0)) break;
    pk = next;
    k++;
    if (k > 4096) throw std::logic_error("runaway valuation");
  }
  return v + k;
}

int valuation(const FieldElement& v, const PrimeIdeal& P) {
  if (v.is_zero()) throw std::invalid_argument("valuation of zero element");
  return valuation(ideal_from_element(v), P);
}

std::vector<std::pair<PrimeIdeal, int>> factor_ideal(const Ideal& x) {
  if (x.is_zero()) throw std::invalid_argument("factoring zero ideal");
  // candidate rational primes: the scale (as an explicit rational) and the
  // primitive lattice norm a*c; the total norm itself may cancel between a
  // prime and its conjugate and cannot be used alone
  std::map<long, std::vector<PrimeIdeal>> primes;
  for (const Int& part : {x.scale.get_num(), x.scale.get_den(), Int(x.a * x.c)}) {
    if (part == 1) continue;
    for (const auto& [q, e] : factor_int(part)) {
      (void)e;
      long p = to_long(q);
      if (!primes.count(p)) primes[p] = factor_rational_prime(*x.F, p);
    }
  }
  std::vector<std::pair<PrimeIdeal, int>> out;
  for (const auto& [p, ps] : primes) {
    for (const auto& P : ps) {
      int v = valuation(x, P);
      if (v != 0) out.emplace_back(P, v);
    }
  }
  return out;
}

// ---- lattice enumeration ----

std::vector<FieldElement> enumerate_elements(const Ideal& x, double R) {
  if (x.is_zero()) throw std::invalid_argument("enumerating zero ideal");
  if (R < 0) return {};
  std::complex<double> B1 = x.basis1().embed();
  std::complex<double> B2 = x.basis2().embed();
  double b1 = B1.real();  // basis1 is real positive
  double imb2 = std::abs(B2.imag());
  Rat R_rat = Rat(R);
  Rat R2 = R_rat * R_rat;
  long nmax = static_cast<long>(std::floor(R / imb2)) + 1;
  double expected = (2.0 * nmax + 1) * (2.0 * R / b1 + 2);
  if (expected > 4e7) throw std::runtime_error("element enumeration too large");
  std::vector<FieldElement> out;
  for (long n = -nmax; n <= nmax; n++) {
    double xc = -n * B2.real() / b1;
    double halfw = std::sqrt(std::max(0.0, R * R - n * n * imb2 * imb2)) / b1;
    long mlo = static_cast<long>(std::floor(xc - halfw)) - 1;
    long mhi = static_cast<long>(std::ceil(xc + halfw)) + 1;
    for (long m = mlo; m <= mhi; m++) {
      if (m == 0 && n == 0) continue;
      FieldElement v(*x.F, x.scale * (m * x.a + n * x.b), x.scale * (n * x.c));
      if (v.norm() <= R2) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end(), [](const FieldElement& u, const FieldElement& v) {
    Rat nu = u.norm(), nv = v.norm();
    if (nu != nv) return nu < nv;
    if (u.x != v.x) return u.x < v.x;
    return u.y < v.y;
  });
  return out;
}

std::optional<FieldElement> principal_generator(const Ideal& x) {
  if (x.is_zero()) throw std::invalid_argument("zero ideal");
  Rat n = x.norm();
  double R = std::sqrt(to_double(n)) * (1.0 + 1e-9) + 1e-12;
  std::optional<FieldElement> best;
  for (const auto& v : enumerate_elements(x, R)) {
    if (v.norm() != n) continue;
    if (ideal_from_element(v) != x) continue;
    if (!best || v.x > best->x || (v.x == best->x && v.y > best->y)) best = v;
  }
  return best;
}

// ---- CRT ----

static FieldElement reduce_mod_lattice(const FieldElement& v, const Ideal& m) {
  // subtract the nearest lattice point; exact arithmetic, rounding in doubles
  std::complex<double> B2 = m.basis2().embed();
  double b1 = to_double(m.scale * m.a);
  double vy = to_double(v.y), vx = to_double(v.x);
  double omy = v.F->omega_embed().imag();
  double n_d = vy * omy / B2.imag();
  long nn = std::lround(n_d);
  double m_d = (vx + vy * v.F->omega_embed().real() - nn * B2.real()) / b1;
  long mm = std::lround(m_d);
  FieldElement w(*v.F, v.x - m.scale * (mm * m.a + nn * m.b), v.y - m.scale * (nn * m.c));
  return w;
}

FieldElement crt_solve(const QuadField& F,
                       const std::vector<std::pair<FieldElement, Ideal>>& congruences) {
  if (congruences.empty()) throw std::invalid_argument("no congruences");
  for (const auto& [r, m] : congruences) {
    if (!r.is_integral() || !m.is_integral() || m.is_zero())
      throw std::invalid_argument("crt needs integral residues and nonzero integral moduli");
  }
  for (size_t i = 0; i < congruences.size(); i++)
    for (size_t j = i + 1; j < congruences.size(); j++)
      if (!ideal_add(congruences[i].second, congruences[j].second).is_one())
        throw std::invalid_argument("crt moduli are not pairwise coprime");

  FieldElement acc = congruences[0].first;
  Ideal mod = congruences[0].second;
  for (size_t i = 1; i < congruences.size(); i++) {
    const auto& [r2, m2] = congruences[i];
    // find u in mod, v2 in m2 with u + v2 = 1
    std::vector<FieldElement> gens = {mod.basis1(), mod.basis2(), m2.basis1(), m2.basis2()};
    std::vector<std::array<Int, 2>> cols;
    for (const auto& g : gens) cols.push_back({g.x.get_num(), g.y.get_num()});
    HnfTransform T = hnf_with_transform(std::move(cols));
    if (!(T.h11 == 1 && T.h21 == 0 && T.h22 == 1))
      throw std::logic_error("coprime moduli with non-unit hnf");
    // 1 = sum u1[k] * gens[k]
    FieldElement u(F, 0);
    for (int k = 0; k < 2; k++) {
      FieldElement t = gens[k];
      u = u + FieldElement(F, Rat(T.u1[k]) * t.x, Rat(T.u1[k]) * t.y);
    }
    // x = acc * (1 - u) + r2 * u satisfies x = acc mod `mod`, x = r2 mod m2
    FieldElement one(F, 1);
    acc = acc * (one - u) + r2 * u;
    mod = ideal_mul(mod, m2);
    acc = reduce_mod_lattice(acc, mod);
  }
  return acc;
}

// ---- matrices ----

Matrix2F matrix2(const FieldElement& a, const FieldElement& b,
                 const FieldElement& c, const FieldElement& d) {
  Matrix2F M;
  M.m[0][0] = a;
  M.m[0][1] = b;
  M.m[1][0] = c;
  M.m[1][1] = d;
  return M;
}

Matrix2F matrix_identity(const QuadField& F) {
  return matrix2(FieldElement(F, 1), FieldElement(F, 0), FieldElement(F, 0),
                 FieldElement(F, 1));
}

FieldElement Matrix2F::det() const {
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

Matrix2F Matrix2F::mul(const Matrix2F& o) const {
  Matrix2F r;
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++)
      r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
  return r;
}

Matrix2F Matrix2F::inverse() const {
  FieldElement D = det();
  if (D.is_zero()) throw std::invalid_argument("singular matrix");
  return matrix2(m[1][1] / D, -m[0][1] / D, -m[1][0] / D, m[0][0] / D);
}

Matrix2F Matrix2F::scalar_mul(const FieldElement& s) const {
  Matrix2F r;
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) r.m[i][j] = m[i][j] * s;
  return r;
}

bool Matrix2F::is_integral() const {
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++)
      if (!m[i][j].is_integral()) return false;
  return true;
}

bool Matrix2F::quasi_integral() const {
  const FieldElement &a = m[0][0], &b = m[0][1], &c = m[1][0], &d = m[1][1];
  return (a * c).is_integral() && (a * d).is_integral() && (b * c).is_integral() &&
         (b * d).is_integral();
}

std::string Matrix2F::str() const {
  std::ostringstream os;
  os << "[" << m[0][0].str() << ", " << m[0][1].str() << "; " << m[1][0].str()
     << ", " << m[1][1].str() << "]";
  return os.str();
}

// ---- integer utilities ----

bool is_squarefree(long n) {
  if (n == 0) return false;
  Int m = abs(Int(n));
  for (const auto& [p, e] : factor_int(m))
    if (e > 1) return false;
  return true;
}

std::vector<long> primes_up_to(long n) {
  std::vector<long> out;
  if (n < 2) return out;
  std::vector<bool> comp(static_cast<size_t>(n) + 1, false);
  for (long i = 2; i <= n; i++) {
    if (!comp[static_cast<size_t>(i)]) {
      out.push_back(i);
      for (long j = i * 2; j <= n; j += i) comp[static_cast<size_t>(j)] = true;
    }
  }
  return out;
}

bool is_prime_long(long p) {
  if (p < 2) return false;
  Int z(p);
  return mpz_probab_prime_p(z.get_mpz_t(), 32) != 0;
}

static Int pollard_rho(const Int& n) {
  // n odd composite, not a prime power guard needed by caller loop
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(12345);
  while (true) {
    Int x = rng.get_z_range(n - 3) + 2;
    Int y = x, c = rng.get_z_range(n - 2) + 1, d(1);
    while (d == 1) {
      x = (x * x + c) % n;
      y = (y * y + c) % n;
      y = (y * y + c) % n;
      Int diff = x > y ? x - y : y - x;
      if (diff == 0) break;
      d = gcd(diff, n);
    }
    if (d != 1 && d != n) return d;
  }
}

std::vector<std::pair<Int, int>> factor_int(const Int& n_in) {
  if (n_in == 0) throw std::invalid_argument("factoring zero");
  Int n = abs(n_in);
  std::map<Int, int> acc;
  for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
      n /= static_cast<unsigned long>(p);
      acc[Int(p)]++;
    }
  }
  long p = 17;
  while (n > 1 && p <= 100000 && Int(p) * p <= n) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
      n /= static_cast<unsigned long>(p);
      acc[Int(p)]++;
    }
    p += 2;
  }
  // remaining cofactor: prime, or split recursively with rho
  std::vector<Int> stack;
  if (n > 1) stack.push_back(n);
  while (!stack.empty()) {
    Int m = stack.back();
    stack.pop_back();
    if (mpz_probab_prime_p(m.get_mpz_t(), 32)) {
      acc[m]++;
      continue;
    }
    // perfect square check speeds the common case
    if (mpz_perfect_square_p(m.get_mpz_t())) {
      Int r = sqrt(m);
      stack.push_back(r);
      stack.push_back(r);
      continue;
    }
    Int d = pollard_rho(m);
    stack.push_back(d);
    stack.push_back(m / d);
  }
  return {acc.begin(), acc.end()};
}

std::vector<long> sqrt_mod(long a, long p) {
  a = ((a % p) + p) % p;
  if (a == 0) return {0};
  auto mulmod = [p](long u, long v) { return static_cast<long>((__int128)u * v % p); };
  auto powmod = [&](long b, long e) {
    long r = 1;
    b %= p;
    while (e) {
      if (e & 1) r = mulmod(r, b);
      b = mulmod(b, b);
      e >>= 1;
    }
    return r;
  };
  if (powmod(a, (p - 1) / 2) != 1) return {};
  long x;
  if (p % 4 == 3) {
    x = powmod(a, (p + 1) / 4);
  } else {
    // Tonelli-Shanks
    long q = p - 1, s = 0;
    while (q % 2 == 0) {
      q /= 2;
      s++;
    }
    long z = 2;
    while (powmod(z, (p - 1) / 2) == 1) z++;
    long m = s, c = powmod(z, q), t = powmod(a, q), r = powmod(a, (q + 1) / 2);
    while (t != 1) {
      long i = 0, tt = t;
      while (tt != 1) {
        tt = mulmod(tt, tt);
        i++;
      }
      long b = powmod(c, 1L << (m - i - 1));
      m = i;
      c = mulmod(b, b);
      t = mulmod(t, c);
      r = mulmod(r, b);
    }
    x = r;
  }
  long x2 = p - x;
  if (x == x2) return {x};
  return {std::min(x, x2), std::max(x, x2)};
}

}  // namespace bqe
