#include "bqe/adelic_checks.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace bqe {

// ---- AdelicContext ----

// Determinant-one completion of the bottom row (c, d) = HNF basis of m_j:
// the top row lives in m_j^{-1}, which makes all cross products integral.
static Matrix2F complete_scaling(const QuadField& F, const Ideal& rep) {
  FieldElement cc = rep.basis1(), dd = rep.basis2();
  Ideal inv = ideal_inverse(rep);
  FieldElement one(F, 1);
  for (double R = 4.0; R <= 64.0; R *= 2.0) {
    for (const auto& a : enumerate_elements(inv, R)) {
      FieldElement b = (a * dd - one) / cc;
      if (!inv.contains(b)) continue;
      Matrix2F A = matrix2(a, b, cc, dd);
      if (!A.quasi_integral()) continue;
      return A;
    }
  }
  throw std::runtime_error("no determinant-one completion found for " + rep.str());
}

AdelicContext::AdelicContext(const ClassGroup& G) : G_(&G), reps_(G.reps) {
  A_.push_back(matrix_identity(*G.F));
  for (std::size_t k = 1; k < reps_.size(); ++k)
    A_.push_back(complete_scaling(*G.F, reps_[k]));
}

const Ideal& AdelicContext::rep(int j) const {
  if (j < 1 || j > h()) throw std::out_of_range("class index out of range");
  return reps_[static_cast<std::size_t>(j - 1)];
}

const Matrix2F& AdelicContext::scaling(int j) const {
  if (j < 1 || j > h()) throw std::out_of_range("class index out of range");
  return A_[static_cast<std::size_t>(j - 1)];
}

// ---- local profiles ----

static void push_prime(std::vector<PrimeIdeal>& support, const PrimeIdeal& P) {
  for (const auto& q : support)
    if (q.ideal == P.ideal) return;
  support.push_back(P);
}

static void add_support(std::vector<PrimeIdeal>& support, const Ideal& x) {
  if (x.is_zero()) return;
  for (const auto& pe : factor_ideal(x)) push_prime(support, pe.first);
}

// Primes under the coordinate denominators: outside these (and the primes of
// det and the representative) every entry is locally integral.
static void add_denominator_support(std::vector<PrimeIdeal>& support,
                                    const QuadField& F, const FieldElement& v) {
  for (const Rat* r : {&v.x, &v.y}) {
    Int den = r->get_den();
    if (den == 1) continue;
    for (const auto& [q, e] : factor_int(den)) {
      (void)e;
      if (!q.fits_slong_p())
        throw std::overflow_error("denominator prime exceeds long");
      for (const auto& P : factor_rational_prime(F, q.get_si()))
        push_prime(support, P);
    }
  }
}

LocalProfile local_profile(const AdelicContext& ctx, const Matrix2F& g, int j,
                           int shift_multiplier,
                           const std::vector<PrimeIdeal>& extra_support) {
  const Ideal& rep = ctx.rep(j);
  FieldElement det = g.det();
  if (det.is_zero()) throw std::invalid_argument("matrix must be invertible");

  // Primes outside this support contribute nothing: the shift is zero there,
  // all entries are local integers, and the unit determinant forces one of
  // them to be a local unit, so the row minimum is exactly zero.
  std::vector<PrimeIdeal> support;
  add_support(support, ideal_from_element(det));
  add_support(support, rep);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      add_denominator_support(support, ctx.field(), g.m[r][c]);
  for (const auto& q : extra_support) push_prime(support, q);
  std::sort(support.begin(), support.end(), [](const PrimeIdeal& a, const PrimeIdeal& b) {
    if (a.p != b.p) return a.p < b.p;
    return a.ideal < b.ideal;
  });

  LocalProfile out;
  for (const auto& P : support) {
    LocalProfile::Row row;
    row.prime = P;
    row.shift = shift_multiplier * valuation(rep, P);
    if (!g.m[0][0].is_zero()) row.a = valuation(g.m[0][0], P);
    if (!g.m[0][1].is_zero()) row.b = valuation(g.m[0][1], P) + row.shift;
    if (!g.m[1][0].is_zero()) row.c = valuation(g.m[1][0], P) - row.shift;
    if (!g.m[1][1].is_zero()) row.d = valuation(g.m[1][1], P);
    row.det = valuation(det, P);
    out.rows.push_back(std::move(row));
  }
  return out;
}

static bool profile_integral(const LocalProfile& pr) {
  for (const auto& row : pr.rows)
    if (row.min_shifted() < 0 || row.det != 0) return false;
  return true;
}

static bool profile_balanced(const LocalProfile& pr) {
  for (const auto& row : pr.rows)
    if (2 * row.min_shifted() != row.det) return false;
  return true;
}

MembershipResult membership(const AdelicContext& ctx, MembershipKind kind,
                            const Matrix2F& g, int j) {
  MembershipResult res;
  res.profile = local_profile(ctx, g, j);
  res.member = kind == MembershipKind::gamma_j ? profile_integral(res.profile)
                                               : profile_balanced(res.profile);
  return res;
}

IdealClass rho_class(const AdelicContext& ctx, const Matrix2F& g, int j) {
  auto mr = membership(ctx, MembershipKind::gamma_tilde_j, g, j);
  if (!mr.member)
    throw std::invalid_argument("class map needs the balanced valuation profile");
  Ideal prod = ideal_one(ctx.field());
  for (const auto& row : mr.profile.rows) {
    long m = row.min_shifted();
    if (m != 0) prod = ideal_mul(prod, ideal_pow(row.prime.ideal, m));
  }
  return class_of(ctx.group(), prod);
}

// ---- witnesses ----

// First prime in the target class by rational prime, skipping the avoid list.
static std::optional<PrimeIdeal> prime_in_class(const ClassGroup& G,
                                                const IdealClass& target,
                                                const std::vector<Ideal>& avoid,
                                                long norm_bound) {
  for (long p = 2; p <= norm_bound; ++p) {
    if (!is_prime_long(p)) continue;
    for (const auto& Q : factor_rational_prime(*G.F, p)) {
      long nq = Q.f == 2 ? p * p : p;
      if (nq > norm_bound) continue;
      bool skip = false;
      for (const auto& x : avoid) skip = skip || x == Q.ideal;
      if (skip) continue;
      if (class_of(G, Q.ideal).index == target.index) return Q;
    }
  }
  return std::nullopt;
}

TorsionWitness two_torsion_witness(const AdelicContext& ctx,
                                   const PrimeIdeal& p, int j,
                                   long norm_bound) {
  const ClassGroup& G = ctx.group();
  const QuadField& F = ctx.field();
  const Ideal& mj = ctx.rep(j);

  IdealClass cp = class_of(G, p.ideal);
  if (G.mul(cp, cp).index != 0)
    throw std::invalid_argument("prime class is not 2-torsion");

  auto lam = principal_generator(ideal_mul(p.ideal, p.ideal));
  if (!lam) throw std::runtime_error("square of the prime is not principal");

  auto n2 = prime_in_class(G, class_of(G, ideal_mul(p.ideal, mj)), {p.ideal},
                           norm_bound);
  if (!n2)
    throw std::runtime_error("no auxiliary prime below the norm bound; raise it");
  auto n1 = prime_in_class(G, cp, {p.ideal, n2->ideal}, norm_bound);
  if (!n1)
    throw std::runtime_error("no auxiliary prime below the norm bound; raise it");

  // (l1) = p n1 and (l2) = p n2 m_j^{-1} are principal by the class choices.
  auto l1 = principal_generator(ideal_mul(p.ideal, n1->ideal));
  auto l2 = principal_generator(
      ideal_mul(p.ideal, ideal_mul(n2->ideal, ideal_inverse(mj))));
  if (!l1 || !l2) throw std::runtime_error("expected principal ideal is not");

  FieldElement mu = crt_solve(
      F, {{FieldElement(F, 1), n2->ideal},
          {FieldElement(F, 0), ideal_mul(p.ideal, n1->ideal)}});

  // (l4) = p (mu) n1^{-1}; then (l1 l4) = (lambda mu), so after at most a
  // sign flip the equality l1 l4 = lambda mu holds exactly.
  auto l4 = principal_generator(ideal_mul(
      p.ideal, ideal_mul(ideal_from_element(mu), ideal_inverse(n1->ideal))));
  if (!l4) throw std::runtime_error("expected principal ideal is not");
  if (*l1 * *l4 != *lam * mu) {
    l1 = -*l1;
    if (*l1 * *l4 != *lam * mu)
      throw std::logic_error("generator mismatch beyond a unit");
  }

  FieldElement l3 = *lam * (mu - FieldElement(F, 1)) / *l2;

  TorsionWitness w;
  w.p = p;
  w.n1 = n1->ideal;
  w.n2 = n2->ideal;
  w.lambda = *lam;
  w.lambda1 = *l1;
  w.lambda2 = *l2;
  w.lambda3 = l3;
  w.lambda4 = *l4;
  w.mu = mu;
  w.g = matrix2(*l1, *l2, l3, *l4);
  if (w.g.det() != *lam) throw std::logic_error("witness determinant is off");
  return w;
}

bool square_descends(const AdelicContext& ctx, const Matrix2F& g, int j) {
  FieldElement det = g.det();
  if (det.is_zero()) throw std::invalid_argument("matrix must be invertible");
  Matrix2F h = g.mul(g).scalar_mul(FieldElement(ctx.field(), 1) / det);
  return membership(ctx, MembershipKind::gamma_j, h, j).member;
}

bool conjugation_check(const AdelicContext& ctx, const Matrix2F& X, int j,
                       ConjDirection direction) {
  const Matrix2F& A = ctx.scaling(j);
  if (X.det().is_zero()) throw std::invalid_argument("matrix must be invertible");
  if (direction == ConjDirection::forward) {
    if (!X.is_integral() || !X.det().is_unit())
      throw std::invalid_argument(
          "forward transport needs an integral matrix with unit determinant");
    Matrix2F M = A.mul(X).mul(A.inverse());
    return profile_integral(local_profile(ctx, M, j, 2));
  }
  if (!profile_integral(local_profile(ctx, X, j, 2)))
    throw std::invalid_argument(
        "backward transport needs the doubled-shift profile");
  Matrix2F Y = A.inverse().mul(X).mul(A);
  return Y.is_integral() && Y.det().is_unit();
}

Matrix2F random_sl2(const QuadField& F, std::mt19937_64& rng, int factors) {
  std::uniform_int_distribution<int> coef(-2, 2);
  std::uniform_int_distribution<int> side(0, 1);
  FieldElement zero(F, 0), one(F, 1);
  Matrix2F g = matrix_identity(F);
  for (int k = 0; k < factors; ++k) {
    FieldElement mu(F, Rat(coef(rng)), Rat(coef(rng)));
    Matrix2F e = side(rng) ? matrix2(one, mu, zero, one)
                           : matrix2(one, zero, mu, one);
    g = g.mul(e);
  }
  return g;
}

}  // namespace bqe
