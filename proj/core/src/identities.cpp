#include "bqe/identities.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bqe/special_functions.hpp"

namespace bqe {

using Cd = std::complex<double>;

// ---- FormalSeries ----

FormalSeries::FormalSeries(int order) {
  if (order < 0) throw std::invalid_argument("negative series order");
  c_.assign(static_cast<std::size_t>(order) + 1, Cd(0.0));
}

FormalSeries FormalSeries::constant(int order, Cd value) {
  FormalSeries s(order);
  s.c_[0] = value;
  return s;
}

static void check_orders(const FormalSeries& a, const FormalSeries& b) {
  if (a.order() != b.order())
    throw std::invalid_argument("series orders differ");
}

FormalSeries FormalSeries::operator+(const FormalSeries& o) const {
  check_orders(*this, o);
  FormalSeries out(order());
  for (int k = 0; k <= order(); ++k) out[k] = c_[k] + o[k];
  return out;
}

FormalSeries FormalSeries::operator-(const FormalSeries& o) const {
  check_orders(*this, o);
  FormalSeries out(order());
  for (int k = 0; k <= order(); ++k) out[k] = c_[k] - o[k];
  return out;
}

FormalSeries FormalSeries::operator*(const FormalSeries& o) const {
  check_orders(*this, o);
  FormalSeries out(order());
  for (int i = 0; i <= order(); ++i)
    for (int j = 0; i + j <= order(); ++j) out[i + j] += c_[i] * o[j];
  return out;
}

FormalSeries FormalSeries::inverse() const {
  if (std::abs(c_[0]) == 0.0)
    throw std::invalid_argument("inverting series with zero constant term");
  FormalSeries out(order());
  out[0] = 1.0 / c_[0];
  for (int k = 1; k <= order(); ++k) {
    Cd acc(0.0);
    for (int j = 1; j <= k; ++j) acc += c_[j] * out[k - j];
    out[k] = -acc / c_[0];
  }
  return out;
}

// ---- report plumbing ----

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

VerificationReport finish(std::string name, std::string params, double residual,
                          double tol, const Stopwatch& watch) {
  VerificationReport r;
  r.name = std::move(name);
  r.parameters = std::move(params);
  r.max_residual = residual;
  r.tolerance = tol;
  r.pass = residual <= tol;
  r.runtime_seconds = watch.seconds();
  return r;
}

// ---- the series identity, generic over the coefficient ring ----
//
// In either ring, with a = alpha, b = beta, x1/x2 the character values at
// the prime and u the stand-in for N^{-it}:
//   sum_k h_k x2^k (sum_{l<=k} (x1 u)^l) Y^k
//     = (1 - a b x1 x2^2 u Y^2)
//       / ((1 - a x2 Y)(1 - b x2 Y)(1 - a x1 x2 u Y)(1 - b x1 x2 u Y))
// where h_k follows the Hecke recursion h_{k+1} = (a+b) h_k - a b h_{k-1}.

template <class R>
using Series = std::vector<R>;  // coefficients 0..order

template <class R>
Series<R> series_mul(const Series<R>& a, const Series<R>& b, const R& zero) {
  Series<R> out(a.size(), zero);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

template <class R>
Series<R> geometric(const R& z, const R& one, int order) {
  Series<R> out(static_cast<std::size_t>(order) + 1, one);
  for (int k = 1; k <= order; ++k) out[static_cast<std::size_t>(k)] =
      out[static_cast<std::size_t>(k - 1)] * z;
  return out;
}

template <class R>
Series<R> hecke_side(const R& a, const R& b, const R& x1, const R& x2,
                     const R& u, const R& zero, const R& one, int order) {
  std::size_t n = static_cast<std::size_t>(order) + 1;
  Series<R> h(n, zero), sigma(n, zero), out(n, zero);
  h[0] = one;
  if (order >= 1) h[1] = a + b;
  for (std::size_t k = 2; k < n; ++k) h[k] = (a + b) * h[k - 1] - (a * b) * h[k - 2];
  R x1u = x1 * u, pw = one, x2pow = one;
  sigma[0] = one;
  for (std::size_t k = 1; k < n; ++k) {
    pw = pw * x1u;
    sigma[k] = sigma[k - 1] + pw;
  }
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = h[k] * x2pow * sigma[k];
    x2pow = x2pow * x2;
  }
  return out;
}

template <class R>
Series<R> rational_side(const R& a, const R& b, const R& x1, const R& x2,
                        const R& u, const R& zero, const R& one, int order) {
  std::size_t n = static_cast<std::size_t>(order) + 1;
  Series<R> num(n, zero);
  num[0] = one;
  if (order >= 2) num[2] = zero - a * b * x1 * x2 * x2 * u;
  Series<R> out = num;
  for (const R& z : {a * x2, b * x2, a * x1 * x2 * u, b * x1 * x2 * u})
    out = series_mul(out, geometric(z, one, order), zero);
  return out;
}

// Exact coefficient ring: the rational group ring of Z/24, multiplication by
// cyclic convolution.  Roots of unity are basis elements, so equality of two
// expressions here implies the identity for every specialization.
struct Cyclo {
  static constexpr int M = 24;
  std::vector<Rat> c;

  Cyclo() : c(M, Rat(0)) {}
  static Cyclo basis(int k) {
    Cyclo z;
    z.c[static_cast<std::size_t>(((k % M) + M) % M)] = 1;
    return z;
  }
  Cyclo operator+(const Cyclo& o) const {
    Cyclo z;
    for (int i = 0; i < M; ++i) z.c[i] = c[i] + o.c[i];
    return z;
  }
  Cyclo& operator+=(const Cyclo& o) {
    for (int i = 0; i < M; ++i) c[i] += o.c[i];
    return *this;
  }
  Cyclo operator-(const Cyclo& o) const {
    Cyclo z;
    for (int i = 0; i < M; ++i) z.c[i] = c[i] - o.c[i];
    return z;
  }
  Cyclo operator*(const Cyclo& o) const {
    Cyclo z;
    for (int i = 0; i < M; ++i) {
      if (c[i] == 0) continue;
      for (int j = 0; j < M; ++j) {
        if (o.c[j] == 0) continue;
        z.c[(i + j) % M] += c[i] * o.c[j];
      }
    }
    return z;
  }
  bool is_zero() const {
    for (int i = 0; i < M; ++i)
      if (c[i] != 0) return false;
    return true;
  }
  double abs_value() const {
    Cd acc(0.0);
    for (int i = 0; i < M; ++i)
      acc += to_double(c[i]) *
             std::polar(1.0, 2.0 * kPi * i / static_cast<double>(M));
    return std::abs(acc);
  }
  static constexpr double kPi = 3.14159265358979323846;
};

double float_trial(std::mt19937_64& rng, int order) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * Cyclo::kPi);
  std::uniform_int_distribution<long> den_pick(1, 6);
  auto unit = [&] { return std::polar(1.0, angle(rng)); };
  auto root = [&] {
    long den = den_pick(rng);
    std::uniform_int_distribution<long> num_pick(0, den - 1);
    return root_of_unity(num_pick(rng), den).value();
  };
  Cd omega = root();  // central character value; forces alpha beta = omega
  Cd alpha = unit(), beta = omega / alpha;
  Cd x1 = root(), x2 = root(), u = unit();
  Cd zero(0.0), one(1.0);
  Series<Cd> lhs = hecke_side(alpha, beta, x1, x2, u, zero, one, order);
  Series<Cd> rhs = rational_side(alpha, beta, x1, x2, u, zero, one, order);
  double worst = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k)
    worst = std::max(worst, std::abs(lhs[k] - rhs[k]));
  return worst;
}

double exact_trial(std::mt19937_64& rng, int order) {
  std::uniform_int_distribution<int> exp_pick(0, Cyclo::M - 1);
  Cyclo alpha = Cyclo::basis(exp_pick(rng)), beta = Cyclo::basis(exp_pick(rng));
  Cyclo x1 = Cyclo::basis(exp_pick(rng)), x2 = Cyclo::basis(exp_pick(rng));
  Cyclo u = Cyclo::basis(exp_pick(rng));
  Cyclo zero, one = Cyclo::basis(0);
  Series<Cyclo> lhs = hecke_side(alpha, beta, x1, x2, u, zero, one, order);
  Series<Cyclo> rhs = rational_side(alpha, beta, x1, x2, u, zero, one, order);
  double worst = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    Cyclo diff = lhs[k] - rhs[k];
    if (!diff.is_zero()) worst = std::max(worst, std::max(diff.abs_value(), 1e-300));
  }
  return worst;
}

}  // namespace

VerificationReport verify_R_series(int trials, int order, std::uint64_t seed,
                                   bool exact_mode) {
  if (order < 5) throw std::invalid_argument("order must be at least 5");
  if (exact_mode && order > 10)
    throw std::invalid_argument("exact mode supports order <= 10");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  Stopwatch watch;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t)
    worst = std::max(worst,
                     exact_mode ? exact_trial(rng, order) : float_trial(rng, order));
  std::ostringstream params;
  params << "trials=" << trials << " order=" << order << " seed=" << seed
         << " mode=" << (exact_mode ? "exact" : "float");
  return finish("r-series", params.str(), worst, exact_mode ? 0.0 : 1e-10,
                watch);
}

// ---- quadruple L ----

namespace {

struct QuadPrime {
  long norm = 0;
  Cd c1, c2, c3;  // character values at the prime
  Cd u1, u2;      // N^{-it}, N^{+it}
};

// Classifying every prime ideal below the cutoff costs far more than the
// divisor sums, so the (norm, class) table is cached per field and cutoff;
// class indices are deterministic for a given discriminant.
struct PrimeClassEntry {
  long norm = 0;
  int cls = 0;
};

const std::vector<PrimeClassEntry>& prime_class_table(const ClassGroup& G,
                                                      long cutoff) {
  static std::mutex mu;
  static std::map<std::pair<long, long>,
                  std::unique_ptr<std::vector<PrimeClassEntry>>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(G.F->d, cutoff);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto table = std::make_unique<std::vector<PrimeClassEntry>>();
    for (long p : primes_up_to(cutoff))
      for (const auto& P : factor_rational_prime(*G.F, p)) {
        long nq = P.f == 2 ? p * p : p;
        if (nq > cutoff) continue;
        table->push_back({nq, class_of(G, P.ideal).index});
      }
    std::sort(table->begin(), table->end(),
              [](const PrimeClassEntry& a, const PrimeClassEntry& b) {
                return a.norm < b.norm;
              });
    it = cache.emplace(key, std::move(table)).first;
  }
  return *it->second;
}

// All ideals of norm <= cutoff by depth-first products of prime powers,
// carrying the three multiplicative weights along; sums accumulate into
// full and (for the tail proxy) half-cutoff totals.
struct QuadSum {
  const std::vector<QuadPrime>* primes;
  std::complex<double> shalf;
  long cutoff;
  Cd total{0.0}, half_total{0.0};

  void visit(long norm, Cd s1, Cd s2, Cd c3v) {
    Cd term = s1 * s2 * c3v *
              std::exp(-shalf * std::log(static_cast<double>(norm)));
    total += term;
    if (2 * norm <= cutoff) half_total += term;
  }

  void descend(std::size_t idx, long norm, Cd s1, Cd s2, Cd c3v) {
    visit(norm, s1, s2, c3v);
    for (std::size_t i = idx; i < primes->size(); ++i) {
      const QuadPrime& P = (*primes)[i];
      if (norm > cutoff / P.norm) break;  // ascending norms
      long n = norm;
      Cd q1 = P.c1 * P.u1, q2 = P.c2 * P.u2;
      Cd sig1(1.0), sig2(1.0), pw1(1.0), pw2(1.0), c3p(1.0);
      while (n <= cutoff / P.norm) {
        n *= P.norm;
        pw1 *= q1;
        pw2 *= q2;
        sig1 += pw1;
        sig2 += pw2;
        c3p *= P.c3;
        descend(i + 1, n, s1 * sig1, s2 * sig2, c3v * c3p);
      }
    }
  }
};

}  // namespace

VerificationReport verify_quadruple_L(const LSeriesContext& ctx,
                                      std::complex<double> s, double t,
                                      const Character& chi1,
                                      const Character& chi2,
                                      const Character& chi3, long norm_cutoff,
                                      double tolerance) {
  if (s.real() < 4.0) throw std::invalid_argument("need Re(s) >= 4");
  Stopwatch watch;
  const QuadField& F = ctx.field();

  long cutoff = norm_cutoff;
  if (cutoff == 0) {
    // tail ~ 0.5 (log X)^3 X^{1 - Re(s)/2} for the divisor-square weights;
    // double until the predicted tail clears the tolerance with margin
    double rate = s.real() / 2.0 - 1.0;
    cutoff = 2000;
    while (cutoff < 150000) {
      double lx = std::log(static_cast<double>(cutoff));
      if (0.5 * lx * lx * lx * std::pow(static_cast<double>(cutoff), -rate) <=
          tolerance / 8.0)
        break;
      cutoff *= 2;
    }
  }

  std::vector<QuadPrime> primes;
  for (const PrimeClassEntry& e : prime_class_table(ctx.group(), cutoff)) {
    QuadPrime q;
    q.norm = e.norm;
    IdealClass c = ctx.group().class_at(e.cls);
    q.c1 = chi1(c);
    q.c2 = chi2(c);
    q.c3 = chi3(c);
    double ln = std::log(static_cast<double>(e.norm));
    q.u1 = std::polar(1.0, -t * ln);
    q.u2 = std::conj(q.u1);
    primes.push_back(q);
  }

  QuadSum sum;
  sum.primes = &primes;
  sum.shalf = s * 0.5;
  sum.cutoff = cutoff;
  sum.descend(0, 1, Cd(1.0), Cd(1.0), Cd(1.0));

  Character c123 = char_mul(char_mul(chi1, chi2), chi3);
  Character denom_chi = char_mul(c123, chi3);  // chi1 chi2 chi3^2
  Cd it(0.0, t);
  Cd rhs = hecke_L(chi3, s * 0.5, ctx).value *
           hecke_L(c123, s * 0.5, ctx).value *
           hecke_L(char_mul(chi1, chi3), s * 0.5 + it, ctx).value *
           hecke_L(char_mul(chi2, chi3), s * 0.5 - it, ctx).value /
           hecke_L(denom_chi, s, ctx).value;

  double tail_proxy = std::abs(sum.total - sum.half_total) / std::abs(rhs);
  if (tail_proxy > tolerance)
    throw std::runtime_error("truncation octave above tolerance; raise cutoff");
  double residual = std::abs(sum.total - rhs) / std::abs(rhs);

  std::ostringstream params;
  params << "d=" << F.d << " s=" << s.real() << "+" << s.imag() << "i t=" << t
         << " chi=(" << chi1.index << "," << chi2.index << "," << chi3.index
         << ") cutoff=" << cutoff;
  return finish("quadruple-l", params.str(), residual, tolerance, watch);
}

// ---- xi modulus ----

VerificationReport verify_xi_modulus(const ClassGroup& G,
                                     const std::vector<double>& t_grid) {
  Stopwatch watch;
  double worst = 0.0;
  for (const Character& chi : characters(G)) {
    Character chibar = char_inverse(chi);
    for (double t : t_grid) {
      if (chi.is_trivial() && t == 0.0) continue;  // pole of xi at 0 and 1
      Cd m1 = completed_xi(chi, Cd(1.0, t));
      Cd m0 = completed_xi(chi, Cd(0.0, t));
      Cd mb = completed_xi(chibar, Cd(0.0, -t));
      double ref = std::abs(m1);
      worst = std::max(worst, std::abs(std::abs(m0) - ref) / ref);
      worst = std::max(worst, std::abs(std::abs(mb) - ref) / ref);
    }
  }
  std::ostringstream params;
  params << "d=" << G.F->d << " grid_size=" << t_grid.size();
  return finish("xi-modulus", params.str(), worst, 1e-6, watch);
}

// ---- Bessel-Mellin constant ----

VerificationReport verify_bessel_mellin(const std::vector<BesselMellinPoint>& grid) {
  if (grid.empty()) throw std::invalid_argument("empty grid");
  Stopwatch watch;
  std::vector<double> ratios;
  for (const auto& p : grid) {
    if (p.s.real() < 1.0) throw std::invalid_argument("need Re(s) >= 1");
    BesselMellinResult r = bessel_mellin(p.t, p.nu, p.s);
    ratios.push_back(r.calibration / std::pow(2.0, p.s.real() - 3.0));
  }
  double fitted = 0.0;
  for (double r : ratios) fitted += r;
  fitted /= static_cast<double>(ratios.size());
  double worst = 0.0;
  for (double r : ratios) worst = std::max(worst, std::abs(r / fitted - 1.0));
  std::ostringstream params;
  params << "points=" << grid.size() << " fitted_multiplier_of_2^(Re s-3)="
         << fitted;
  return finish("bessel-mellin", params.str(), worst, 1e-6, watch);
}

// ---- scattering unitarity ----

VerificationReport verify_scattering_unitary(const EisensteinContext& E,
                                             const std::vector<double>& t_grid) {
  Stopwatch watch;
  double worst = 0.0;
  int h = E.h();
  for (double t : t_grid) {
    auto plus = scattering_matrix(E, Cd(1.0, t));
    auto minus = scattering_matrix(E, Cd(1.0, -t));
    double frob = 0.0;
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j) {
        Cd acc = i == j ? Cd(-1.0) : Cd(0.0);
        for (int k = 0; k < h; ++k) acc += plus[i][k] * minus[k][j];
        frob += std::norm(acc);
      }
    worst = std::max(worst, std::sqrt(frob));
  }
  std::ostringstream params;
  params << "d=" << E.field().d << " grid_size=" << t_grid.size();
  return finish("scattering-unitary", params.str(), worst, 1e-6, watch);
}

}  // namespace bqe
