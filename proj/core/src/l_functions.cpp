#include "bqe/l_functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bqe/mp.hpp"
#include "bqe/special_functions.hpp"

namespace bqe {

using Cd = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

long theta_prec(double im_s, long min_prec) {
  // recovering the finite part against the e^{-pi|t|/2} gamma decay costs
  // about 2.27 bits per unit height
  long p = 96 + static_cast<long>(std::ceil(2.27 * std::abs(im_s)));
  return std::max(p, min_prec);
}

mp::Complex root_mp(const RootOfUnity& r, long p) {
  mp::Real ang = mp::pi(p) * mp::Real(2 * r.num, p) / mp::Real(r.den, p);
  mp::Real s(p), c(p);
  mpfr_sin_cos(s.raw(), c.raw(), ang.raw(), MPFR_RNDN);
  return {std::move(c), std::move(s)};
}

// the incomplete-gamma representation of pi^{-s} Gamma(s) Z_Q(s) for every
// class form, minus the shared boundary part
struct ThetaBlock {
  std::vector<mp::Complex> sums;  // per class, lattice + dual-lattice parts
  mp::Complex boundary;           // identical for every class
  long prec;

  explicit ThetaBlock(long p) : boundary(p), prec(p) {}
};

ThetaBlock build_theta_block(const ClassGroup& G, Cd s, double c0, long p,
                             double tail_tol) {
  const QuadField& F = *G.F;
  double absd = std::abs(static_cast<double>(F.disc));
  mp::Real sqd = mp::sqrt(mp::Real(std::labs(F.disc), p));
  mp::Complex S(s, p);
  mp::Complex one(Cd(1, 0), p);
  mp::Complex one_minus_s = one - S;
  // gamma hints speed up the series branch of the incomplete gamma; skip
  // them at the gamma poles, where that branch is never taken anyway
  auto off_poles = [](Cd z) {
    double frac = std::abs(z.real() - std::round(z.real()));
    return z.real() > 0.5 || std::abs(z.imag()) >= 0.05 ||
           (frac >= 0.05 && frac <= 0.95);
  };
  mp::Complex gamma_s(p), gamma_1ms(p);
  const mp::Complex* gs = nullptr;
  const mp::Complex* g1ms = nullptr;
  if (off_poles(s)) { gamma_s = mp::gamma(S); gs = &gamma_s; }
  if (off_poles(Cd(1, 0) - s)) { gamma_1ms = mp::gamma(one_minus_s); g1ms = &gamma_1ms; }

  double amax = std::max(0.6932 * (p + 12), -std::log(std::max(tail_tol, 1e-300))) +
                kPi * std::abs(s.imag()) / 2 + 8.0;
  long primal_bound = static_cast<long>(amax * std::sqrt(absd) / (2 * kPi * c0)) + 1;
  long dual_bound = static_cast<long>(amax * c0 * std::sqrt(absd) / (2 * kPi)) + 1;

  mp::Real pi_p = mp::pi(p);
  mp::Real c0r(c0, p);
  // lattice argument scale: 2 pi c0 q / sqrt|d|; dual: 2 pi q / (c0 sqrt|d|)
  mp::Real primal_scale = mp::mul_2exp(pi_p, 1) * c0r / sqd;
  mp::Real dual_scale = mp::mul_2exp(pi_p, 1) / (c0r * sqd);
  mp::Real inv_sqd_2 = mp::Real(2.0, p) / sqd;

  ThetaBlock block(p);
  for (size_t ci = 0; ci < G.reps.size(); ci++) {
    ClassForm form = class_form(G, G.class_at(static_cast<int>(ci)));
    ClassForm adj{form.C, -form.B, form.A};
    mp::Complex s1(p), s2(p);
    std::vector<long> vals = form.values_up_to(primal_bound);
    for (size_t i = 0; i < vals.size();) {
      size_t j = i;
      while (j < vals.size() && vals[j] == vals[i]) j++;
      mp::Real q(vals[i], p);
      mp::Complex term = mp::upper_incomplete_gamma(S, primal_scale * q, gs) *
                         mp::pow(pi_p * q, -S);
      s1 += mp::Real(static_cast<long>(j - i), p) * term;
      i = j;
    }
    std::vector<long> dvals = adj.values_up_to(dual_bound);
    for (size_t i = 0; i < dvals.size();) {
      size_t j = i;
      while (j < dvals.size() && dvals[j] == dvals[i]) j++;
      mp::Real q(dvals[i], p);
      // dual form value is q * 4/|d|
      mp::Real base = mp::mul_2exp(pi_p * q, 2) / (sqd * sqd);
      mp::Complex term =
          mp::upper_incomplete_gamma(one_minus_s, dual_scale * q, g1ms) *
          mp::pow(base, S - one);
      s2 += mp::Real(static_cast<long>(j - i), p) * term;
      i = j;
    }
    block.sums.push_back(s1 + inv_sqd_2 * s2);
  }
  // boundary terms of the split integral: (t0^s / 2)(1/(c0 (s-1)) - 1/s)
  // with t0 = 2 c0 / sqrt|d|, the same for every class form
  mp::Real t0 = mp::mul_2exp(c0r, 1) / sqd;
  mp::Complex bdy =
      mp::pow(t0, S) *
      (mp::inv(mp::Complex{c0r * (S.re - mp::Real(1.0, p)), c0r * S.im}) -
       mp::inv(S));
  block.boundary = {mp::mul_2exp(bdy.re, -1), mp::mul_2exp(bdy.im, -1)};
  return block;
}

// pi^s / Gamma(s) in the block's precision
mp::Complex zeta_prefactor(Cd s, long p) {
  mp::Complex S(s, p);
  mp::Complex lg = mp::lgamma(S);
  mp::Real lpi = mp::log(mp::pi(p));
  mp::Complex expo{S.re * lpi - lg.re, S.im * lpi - lg.im};
  return mp::exp(expo);
}

void check_not_pole(Cd s) {
  if (std::abs(s - Cd(1, 0)) < 1e-12)
    throw std::domain_error("evaluation at the pole s = 1");
  if (std::abs(s) < 1e-12)
    throw std::domain_error("evaluation at s = 0");
}

}  // namespace

ClassForm class_form(const ClassGroup& G, const IdealClass& C) {
  const QuadField& F = *G.F;
  const Ideal& rep = G.reps[G.inverse(C).index];
  if (rep.scale != 1 || rep.c != 1)
    throw std::logic_error("class representative not primitive integral");
  long tr = F.one_mod_four ? 1 : 0;
  // N(b + omega) = b^2 + b tr + N(omega)
  FieldElement beta2(F, Rat(rep.b), Rat(1));
  Rat cq = beta2.norm() / Rat(rep.a);
  if (cq.get_den() != 1)
    throw std::logic_error("ideal norm does not divide the form value");
  ClassForm f{rep.a, 2 * rep.b + tr, cq.get_num()};
  if (f.B * f.B - 4 * f.A * f.C != F.disc)
    throw std::logic_error("class form has wrong discriminant");
  return f;
}

std::vector<long> ClassForm::values_up_to(long bound) const {
  long a = to_long(A), b = to_long(B), c = to_long(C);
  double absdisc = static_cast<double>(4 * a * c - b * b);
  std::vector<long> out;
  long ymax = static_cast<long>(std::sqrt(4.0 * a * bound / absdisc)) + 1;
  for (long y = 0; y <= ymax; y++) {
    double discx = 4.0 * a * bound - absdisc * y * y;
    if (discx < 0) continue;
    double root = std::sqrt(discx);
    long xlo = static_cast<long>(std::ceil((-static_cast<double>(b) * y - root) / (2 * a))) - 1;
    long xhi = static_cast<long>(std::floor((-static_cast<double>(b) * y + root) / (2 * a))) + 1;
    if (y == 0) xlo = std::max(xlo, 1L);
    for (long x = xlo; x <= xhi; x++) {
      if (y == 0 && x < 1) continue;
      long q = a * x * x + b * x * y + c * y * y;
      if (q <= bound && q > 0) out.push_back(q);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

LSeriesContext::LSeriesContext(const ClassGroup& G, long norm_cache_limit)
    : G_(&G), limit_(norm_cache_limit) {
  double kappa = kPi / std::sqrt(std::abs(static_cast<double>(G.F->disc)));
  for (size_t ci = 0; ci < G.reps.size(); ci++) {
    ClassForm form = class_form(G, G.class_at(static_cast<int>(ci)));
    std::vector<uint32_t> counts(static_cast<size_t>(limit_) + 1, 0);
    for (long q : form.values_up_to(limit_)) counts[static_cast<size_t>(q)]++;
    double running = 0, worst = 0;
    for (long n = 1; n <= limit_; n++) {
      running += counts[static_cast<size_t>(n)];
      if (n >= 32) {
        double dev = std::abs(running - kappa * n) / std::cbrt(static_cast<double>(n));
        worst = std::max(worst, dev);
      }
    }
    counts_.push_back(std::move(counts));
    fluct_.push_back(worst);
  }
}

long LSeriesContext::class_ideal_count(const IdealClass& C, long n) const {
  if (n < 1 || n > limit_) throw std::out_of_range("norm outside the cache");
  return counts_[static_cast<size_t>(C.index)][static_cast<size_t>(n)];
}

double LSeriesContext::fluct_constant(const IdealClass& C) const {
  return fluct_[static_cast<size_t>(C.index)];
}

LValue LSeriesContext::truncated_zeta(const IdealClass& C, Cd s,
                                      bool complete_tail) const {
  double sigma = s.real();
  if (!(sigma > 1.0))
    throw std::domain_error("truncated series needs Re(s) > 1");
  const auto& counts = counts_[static_cast<size_t>(C.index)];
  Cd sum = 0;
  for (long n = 1; n <= limit_; n++) {
    uint32_t r = counts[static_cast<size_t>(n)];
    if (r) sum += static_cast<double>(r) * std::exp(-s * std::log(static_cast<double>(n)));
  }
  double kappa = kPi / std::sqrt(std::abs(static_cast<double>(G_->F->disc)));
  double X = static_cast<double>(limit_);
  double est;
  if (complete_tail) {
    sum += kappa * std::exp((1.0 - s) * std::log(X)) / (s - 1.0);
    est = 3.0 * fluct_[static_cast<size_t>(C.index)] * std::abs(s) *
          std::pow(X, 1.0 / 3 - sigma) / (sigma - 1.0 / 3);
  } else {
    est = kappa * std::pow(X, 1.0 - sigma) / (sigma - 1.0);
  }
  est /= std::max(std::abs(sum), 1e-300);
  return LValue{s, sum, LValue::Method::truncated_series, est};
}

std::complex<double> divisor_sigma(const Character& chi, Cd s, const Ideal& m) {
  if (m.is_zero() || !m.is_integral())
    throw std::invalid_argument("divisor_sigma needs an integral nonzero ideal");
  const ClassGroup& G = *chi.G;
  Cd result = 1;
  for (const auto& [P, e] : factor_ideal(m)) {
    IdealClass cls = class_of(G, P.ideal);
    double logN = std::log(to_double(Rat(P.norm())));
    Cd factor = 0;
    RootOfUnity r{0, 1};
    for (int j = 0; j <= e; j++) {
      factor += r.value() * std::exp(s * (static_cast<double>(j) * logN));
      r = r * chi.eval(cls);
    }
    result *= factor;
  }
  return result;
}

LValue partial_zeta(const ClassGroup& G, const IdealClass& C, Cd s,
                    const ZetaOptions& opt) {
  check_not_pole(s);
  long p = theta_prec(s.imag(), opt.min_prec);
  mp::Complex pref = zeta_prefactor(s, p);
  Cd v[2];
  for (int k = 0; k < 2; k++) {
    double c0 = opt.split_scale * (k == 0 ? 1.0 : 1.35);
    ThetaBlock block = build_theta_block(G, s, c0, p, opt.tail_tol);
    mp::Complex z = pref * (block.sums[static_cast<size_t>(C.index)] + block.boundary);
    v[k] = z.to_double();
  }
  double est = std::abs(v[0] - v[1]) / std::max(std::abs(v[0]), 1e-300) + 1e-15;
  return LValue{s, v[0], LValue::Method::continued, est};
}

namespace {

// chi-weighted combination over a block; boundary enters only for the
// trivial character (it cancels exactly otherwise)
mp::Complex chi_combine(const ThetaBlock& block, const Character& chi) {
  const ClassGroup& G = *chi.G;
  mp::Complex acc(block.prec);
  for (size_t ci = 0; ci < block.sums.size(); ci++) {
    RootOfUnity r = chi.eval(G.class_at(static_cast<int>(ci)));
    if (r.is_one())
      acc += block.sums[ci];
    else
      acc += root_mp(r, block.prec) * block.sums[ci];
  }
  if (chi.is_trivial()) {
    mp::Complex b = block.boundary;
    acc += mp::Real(G.h, block.prec) * b;
  }
  return acc;
}

}  // namespace

LValue hecke_L(const Character& chi, Cd s, const LSeriesContext& ctx) {
  if (chi.G != &ctx.group())
    throw std::invalid_argument("character group mismatch");
  if (chi.is_trivial()) check_not_pole(s);
  else if (std::abs(s) < 1e-12) throw std::domain_error("evaluation at s = 0");
  const ZetaOptions& opt = ctx.options();
  long p = theta_prec(s.imag(), opt.min_prec);
  mp::Complex pref = zeta_prefactor(s, p);
  Cd v[2];
  for (int k = 0; k < 2; k++) {
    double c0 = opt.split_scale * (k == 0 ? 1.0 : 1.35);
    ThetaBlock block = build_theta_block(*chi.G, s, c0, p, opt.tail_tol);
    v[k] = (pref * chi_combine(block, chi)).to_double();
  }
  double est = std::abs(v[0] - v[1]) / std::max(std::abs(v[0]), 1e-300) + 1e-15;
  return LValue{s, v[0], LValue::Method::continued, est};
}

std::complex<double> completed_xi(const Character& chi, Cd s,
                                  const ZetaOptions& opt) {
  const ClassGroup& G = *chi.G;
  long p = theta_prec(s.imag(), opt.min_prec);
  ThetaBlock block = build_theta_block(G, s, opt.split_scale, p, opt.tail_tol);
  // 2^{-s} |d|^{s/2} * combination; gamma never divided out
  mp::Complex S(s, p);
  mp::Real logd = mp::log(mp::Real(std::labs(G.F->disc), p));
  mp::Real log2(p);
  mpfr_const_log2(log2.raw(), MPFR_RNDN);
  mp::Complex expo{mp::mul_2exp(S.re * logd, -1) + (mp::Real(1.0, p) - S.re) * log2,
                   mp::mul_2exp(S.im * logd, -1) - S.im * log2};
  return (mp::exp(expo) * chi_combine(block, chi)).to_double();
}

std::vector<std::complex<double>> completed_xi_all(const ClassGroup& G, Cd s,
                                                   const ZetaOptions& opt) {
  long p = theta_prec(s.imag(), opt.min_prec);
  ThetaBlock block = build_theta_block(G, s, opt.split_scale, p, opt.tail_tol);
  mp::Complex S(s, p);
  mp::Real logd = mp::log(mp::Real(std::labs(G.F->disc), p));
  mp::Real log2(p);
  mpfr_const_log2(log2.raw(), MPFR_RNDN);
  mp::Complex expo{mp::mul_2exp(S.re * logd, -1) + (mp::Real(1.0, p) - S.re) * log2,
                   mp::mul_2exp(S.im * logd, -1) - S.im * log2};
  mp::Complex pref = mp::exp(expo);
  std::vector<Cd> out;
  for (const Character& chi : characters(G))
    out.push_back((pref * chi_combine(block, chi)).to_double());
  return out;
}

std::complex<double> L_log_derivative(const Character& chi, Cd s,
                                      const LSeriesContext& ctx,
                                      double* est_error) {
  double h = std::cbrt(2.22e-16) * std::max(1.0, std::abs(s));
  LValue l0 = hecke_L(chi, s, ctx);
  LValue lp = hecke_L(chi, s + h, ctx);
  LValue lm = hecke_L(chi, s - h, ctx);
  Cd num = (lp.value - lm.value) / (2 * h);
  if (std::abs(l0.value) <
      1e-10 * std::max(std::abs(lp.value), std::abs(lm.value)))
    throw std::domain_error("log-derivative too close to a zero of L");
  Cd val = num / l0.value;
  if (est_error) {
    double abs_num_err =
        (lp.est_error * std::abs(lp.value) + lm.est_error * std::abs(lm.value)) /
        (2 * h);
    *est_error = abs_num_err / std::max(std::abs(num), 1e-300) + l0.est_error +
                 10.0 * h * h;
  }
  return val;
}

}  // namespace bqe
