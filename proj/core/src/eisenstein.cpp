#include "bqe/eisenstein.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "bqe/special_functions.hpp"

namespace bqe {

namespace {

using Cd = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

Cd cpow(double base, Cd e) {  // base > 0
  return std::exp(e * std::log(base));
}

double dot(Cd a, Cd b) { return a.real() * b.real() + a.imag() * b.imag(); }

// Shortest nonzero vector of the lattice dual to span_Z{e1, e2} under the
// real inner product.  The bases used here are HNF-reduced enough that a
// small coefficient box suffices.
double dual_min(Cd e1, Cd e2) {
  double g11 = std::norm(e1), g22 = std::norm(e2), g12 = dot(e1, e2);
  double det = g11 * g22 - g12 * g12;
  double best = 1e300;
  for (int p = -4; p <= 4; p++)
    for (int q = -4; q <= 4; q++) {
      if (p == 0 && q == 0) continue;
      double form = (g22 * p * p - 2.0 * g12 * p * q + g11 * q * q) / det;
      best = std::min(best, form);
    }
  return std::sqrt(best);
}

// Lattice element p * basis1 + q * basis2 of an ideal, exactly.
FieldElement lattice_element(const Ideal& m, long p, long q) {
  Int first = Int(p) * m.a + Int(q) * m.b;
  Rat x = m.scale * Rat(first);
  Rat y = m.scale * Rat(q);
  return FieldElement(*m.F, std::move(x), std::move(y));
}

// Membership test for the index-N(P) sublattice P*m of m in basis
// coordinates: (p, q) lies in P*m iff adj(T) (p,q)^T = 0 mod det T, where
// the columns of T express the basis of P*m in the basis of m.
struct SublatticeTest {
  long long a11, a12, a21, a22, det;
  bool contains(long p, long q) const {
    return (a11 * p + a12 * q) % det == 0 && (a21 * p + a22 * q) % det == 0;
  }
};

long coord_to_long(const Rat& v, const char* what) {
  if (v.get_den() != 1) throw std::logic_error(std::string("non-integer sublattice coordinate in ") + what);
  return to_long(Int(v.get_num()));
}

SublatticeTest make_sublattice_test(const Ideal& sub, const Ideal& m) {
  // coordinates of a vector with (1, omega)-components (x, y) in m's basis
  auto coords = [&](const Rat& x, const Rat& y) {
    Rat q = y / m.scale;
    Rat p = (x / m.scale - q * Rat(m.b)) / Rat(m.a);
    return std::pair<long, long>(coord_to_long(p, "sublattice test"),
                                 coord_to_long(q, "sublattice test"));
  };
  auto [p1, q1] = coords(sub.scale * Rat(sub.a), Rat(0));
  auto [p2, q2] = coords(sub.scale * Rat(sub.b), sub.scale);
  long long det = static_cast<long long>(p1) * q2 - static_cast<long long>(p2) * q1;
  if (det == 0) throw std::logic_error("degenerate sublattice");
  return SublatticeTest{q2, -p2, -q1, p1, det};
}

Cd eval_bessel(double re_order, double im_order, double x) {
  if (std::abs(re_order) < 1e-12)
    return Cd(bessel_k_imag(im_order, x, BesselScaling::raw), 0.0);
  return bessel_k(Cd(re_order, im_order), x);
}

struct CharacterData {
  std::vector<Cd> chi;     // chi(m_i m_j) for each character
  Cd npow;                 // N(m_i)^{2-s} / N(m_j)^s
};

CharacterData character_data(const EisensteinContext& E, int i, int j,
                             Cd s) {
  const CuspData& ci = E.cusps()[i - 1];
  const CuspData& cj = E.cusps()[j - 1];
  IdealClass kappa = class_of(E.group(), ideal_mul(ci.m, cj.m));
  CharacterData out;
  out.chi.reserve(E.chars().size());
  for (const auto& ch : E.chars()) out.chi.push_back(ch(kappa));
  out.npow = std::exp((2.0 - s) * std::log(ci.norm_m) - s * std::log(cj.norm_m));
  return out;
}

void check_cusp_index(const EisensteinContext& E, int idx, const char* what) {
  if (idx < 1 || idx > E.h())
    throw std::out_of_range(std::string(what) + ": cusp index out of range");
}

Cd tau_from_xi(const EisensteinContext& E, const CharacterData& cd,
               const std::vector<Cd>& xi_sm1, const std::vector<Cd>& xi_s) {
  Cd acc = 0.0;
  for (size_t k = 0; k < cd.chi.size(); k++)
    acc += cd.chi[k] * xi_sm1[k] / xi_s[k];
  return cd.npow * acc / static_cast<double>(E.h());
}

void check_tau_domain(Cd s) {
  if (std::abs(s - 1.0) < 1e-9 || std::abs(s - 2.0) < 1e-9)
    throw std::domain_error("constant term has poles at s = 1 and s = 2");
}

}  // namespace

HPoint apply_matrix(const Matrix2F& g, const HPoint& v) {
  Cd a = g.m[0][0].embed(), b = g.m[0][1].embed();
  Cd c = g.m[1][0].embed(), d = g.m[1][1].embed();
  Cd den = c * v.z + d;
  double D = std::norm(den) + std::norm(c) * v.r * v.r;
  if (!(D > 0.0)) throw std::invalid_argument("matrix action degenerate at the point");
  Cd z = ((a * v.z + b) * std::conj(den) + a * std::conj(c) * v.r * v.r) / D;
  double det = std::abs(g.det().embed());
  return HPoint{z, det * v.r / D};
}

std::complex<double> CuspData::point() const {
  if (at_infinity) throw std::logic_error("cusp at infinity has no affine embedding");
  return (num / den).embed();
}

std::vector<CuspData> cusp_data(const ClassGroup& G) {
  const QuadField& F = *G.F;
  std::vector<CuspData> out;
  out.reserve(G.reps.size());

  CuspData inf;
  inf.index = 1;
  inf.at_infinity = true;
  inf.num = FieldElement(F, 1);
  inf.den = FieldElement(F, 0);
  inf.A = matrix_identity(F);
  inf.m = ideal_one(F);
  inf.norm_m = 1.0;
  out.push_back(inf);

  for (size_t k = 1; k < G.reps.size(); k++) {
    const Ideal& rep = G.reps[k];
    CuspData cu;
    cu.index = static_cast<int>(k) + 1;
    cu.at_infinity = false;
    cu.num = FieldElement(F, Rat(rep.b), Rat(1));  // b + omega
    cu.den = FieldElement(F, Rat(rep.a), Rat(0));
    FieldElement eta = cu.num / cu.den;
    cu.m = ideal_hnf(F, {FieldElement(F, 1), eta});
    if (class_of(G, cu.m).index != static_cast<int>(k))
      throw std::logic_error("cusp module landed in the wrong ideal class");
    cu.norm_m = to_double(cu.m.norm());

    // complete the bottom row (1, -eta) to determinant 1 by a bounded search
    // over integral top-left entries; the top-right is forced
    const long B = 12;
    struct Cand { long nrm, x, y; };
    std::vector<Cand> cands;
    for (long x = -B; x <= B; x++)
      for (long y = -B; y <= B; y++)
        cands.push_back({x * x + std::labs(x * y) + y * y, x, y});
    std::sort(cands.begin(), cands.end(), [](const Cand& u, const Cand& v) {
      if (u.nrm != v.nrm) return u.nrm < v.nrm;
      if (u.x != v.x) return u.x < v.x;
      return u.y < v.y;
    });
    bool found = false;
    for (const auto& cand : cands) {
      FieldElement a_el(F, Rat(cand.x), Rat(cand.y));
      FieldElement b_el = FieldElement(F, 0) - a_el * eta - FieldElement(F, 1);
      Matrix2F A = matrix2(a_el, b_el, FieldElement(F, 1),
                           FieldElement(F, 0) - eta);
      if (!A.quasi_integral()) continue;
      if (A.det() != FieldElement(F, 1))
        throw std::logic_error("cusp completion lost determinant 1");
      cu.A = A;
      found = true;
      break;
    }
    if (!found)
      throw std::runtime_error("no admissible cusp completion within the search box");
    out.push_back(cu);
  }
  return out;
}

EisensteinContext::EisensteinContext(const ClassGroup& G, long norm_cache_limit)
    : G_(&G),
      cusps_(cusp_data(G)),
      chars_(characters(G)),
      ls_(G, norm_cache_limit) {}

std::complex<double> tau_entry(const EisensteinContext& E, int i, int j,
                               std::complex<double> s) {
  check_cusp_index(E, i, "tau_entry");
  check_cusp_index(E, j, "tau_entry");
  check_tau_domain(s);
  CharacterData cd = character_data(E, i, j, s);
  auto xi_s = completed_xi_all(E.group(), s);
  auto xi_sm1 = completed_xi_all(E.group(), s - 1.0);
  Cd via_xi = tau_from_xi(E, cd, xi_sm1, xi_s);

  double rootd = E.field().sqrt_disc().imag();
  Cd acc = 0.0;
  for (size_t k = 0; k < cd.chi.size(); k++) {
    Cd l1 = hecke_L(E.chars()[k], s - 1.0, E.lseries()).value;
    Cd l0 = hecke_L(E.chars()[k], s, E.lseries()).value;
    acc += cd.chi[k] * l1 / l0;
  }
  Cd via_L = 2.0 * kPi / (static_cast<double>(E.h()) * (s - 1.0) * rootd) *
             cd.npow * acc;
  double rel = std::abs(via_xi - via_L) / std::max(std::abs(via_xi), 1e-300);
  if (rel > 1e-5)
    throw std::runtime_error("constant-term routes disagree beyond tolerance");
  return via_xi;
}

std::vector<std::vector<std::complex<double>>> scattering_matrix(
    const EisensteinContext& E, std::complex<double> s) {
  check_tau_domain(s);
  auto xi_s = completed_xi_all(E.group(), s);
  auto xi_sm1 = completed_xi_all(E.group(), s - 1.0);
  int h = E.h();
  std::vector<std::vector<Cd>> M(h, std::vector<Cd>(h));
  for (int i = 1; i <= h; i++)
    for (int j = 1; j <= h; j++) {
      CharacterData cd = character_data(E, i, j, s);
      M[i - 1][j - 1] = tau_from_xi(E, cd, xi_sm1, xi_s);
      if (!std::isfinite(M[i - 1][j - 1].real()) ||
          !std::isfinite(M[i - 1][j - 1].imag()))
        throw std::runtime_error("scattering entry not finite");
    }
  return M;
}

namespace {

// omega(n, s) given the shared character data and xi values for this (i, j, s)
Cd omega_from_parts(const EisensteinContext& E, const CharacterData& cd,
                    const std::vector<Cd>& xi_s, const Ideal& n_ideal, Cd s) {
  Cd acc = 0.0;
  for (size_t k = 0; k < cd.chi.size(); k++)
    acc += cd.chi[k] * divisor_sigma(E.chars()[k], 1.0 - s, n_ideal) / xi_s[k];
  return 4.0 * cd.npow * acc / static_cast<double>(E.h());
}

}  // namespace

std::complex<double> omega_coeff(const EisensteinContext& E, int i, int j,
                                 const FieldElement& n,
                                 std::complex<double> s) {
  check_cusp_index(E, i, "omega_coeff");
  check_cusp_index(E, j, "omega_coeff");
  if (n.is_zero()) throw std::invalid_argument("omega_coeff: n must be nonzero");
  const Ideal& m = E.cusps()[i - 1].m;
  Ideal msq = ideal_mul(m, m);
  if (!msq.contains(n))
    throw std::invalid_argument("omega_coeff: n must lie in the square of the cusp module");
  Ideal n_ideal = ideal_mul(ideal_from_element(n), ideal_inverse(msq));
  if (!n_ideal.is_integral()) throw std::logic_error("mode ideal not integral");
  CharacterData cd = character_data(E, i, j, s);
  auto xi_s = completed_xi_all(E.group(), s);
  return omega_from_parts(E, cd, xi_s, n_ideal, s);
}

std::complex<double> FourierEval::eval(const HPoint& v) const {
  if (!(v.r > 0.0)) throw std::invalid_argument("point must have positive height");
  double r = v.r;
  Cd val = diag ? cpow(r, s) : Cd(0.0);
  val += tau * cpow(r, 2.0 - s);
  double a = s.real() - 1.0, t = s.imag();
  bool imag_order = std::abs(a) < 1e-12;
  for (const Shell& sh : shells) {
    double x = arg_scale * sh.absn * r;
    Cd K = imag_order ? Cd(kernel(x), 0.0) : eval_bessel(a, t, x);
    Cd amp = 0.0;
    for (size_t p = 0; p < sh.coeff.size(); p++)
      amp += sh.coeff[p] * (2.0 * std::cos(2.0 * kPi * dot(sh.w[p], v.z)));
    val += K * r * amp;
  }
  return val;
}

double FourierEval::kernel(double x) const {
  double t = std::abs(s.imag());
  if (!have_table_ || x < kxlo_ || x > kxhi_)
    return bessel_k_imag(t, x, BesselScaling::raw);
  double u = std::log(x);
  long n = static_cast<long>(ktab_.size());
  long j0 = static_cast<long>(std::floor((u - ku0_) / kdu_)) - 1;
  j0 = std::max(0L, std::min(n - 4, j0));
  double c[4];
  for (int k = 0; k < 4; k++) {
    c[k] = 1.0;
    double uk = ku0_ + (j0 + k) * kdu_;
    for (int l = 0; l < 4; l++) {
      if (l == k) continue;
      double ul = ku0_ + (j0 + l) * kdu_;
      c[k] *= (u - ul) / (uk - ul);
    }
  }
  double w = c[0] * ktab_[j0] + c[1] * ktab_[j0 + 1] + c[2] * ktab_[j0 + 2] +
             c[3] * ktab_[j0 + 3];
  return std::exp(-kPi * t / 2.0) * w;
}

void FourierEval::build_kernel_table(double r_lo, double r_hi) {
  if (std::abs(s.real() - 1.0) > 1e-12)
    throw std::invalid_argument("kernel table only supports Re s = 1");
  if (!(r_lo > 0.0) || !(r_hi >= r_lo))
    throw std::invalid_argument("kernel table needs 0 < r_lo <= r_hi");
  if (shells.empty()) return;
  double t = std::abs(s.imag());
  kxlo_ = std::max(1e-3, arg_scale * shells.front().absn * r_lo * 0.999);
  kxhi_ = arg_scale * shells.back().absn * r_hi * 1.001 + 1e-9;
  ku0_ = std::log(kxlo_);
  double u1 = std::log(kxhi_);
  // ~600 samples per oscillation of K_{it}(e^u); 4-point cubic interpolation
  // then sits near 1e-9 relative even close to the turning point
  kdu_ = std::min(0.0013, 2.0 * kPi / (600.0 * std::max(t, 2.0)));
  long n = static_cast<long>(std::ceil((u1 - ku0_) / kdu_)) + 4;
  ktab_.resize(n);
  for (long k = 0; k < n; k++) {
    double x = std::exp(ku0_ + k * kdu_);
    ktab_[k] = bessel_k_imag(t, x, BesselScaling::exp_weighted);
  }
  have_table_ = true;
  // probe at off-grid arguments; deviations are relative to the local scale
  double worst = 0.0;
  for (int k = 1; k <= 23; k++) {
    double u = ku0_ + (u1 - ku0_) * (k + 0.37) / 25.0;
    double x = std::exp(u);
    double direct = bessel_k_imag(t, x, BesselScaling::raw);
    double scale = std::max(std::abs(direct), std::exp(-kPi * t / 2.0) * 1e-8);
    worst = std::max(worst, std::abs(kernel(x) - direct) / scale);
  }
  kernel_est = worst;
}

FourierEval eisenstein_fourier_series(const EisensteinContext& E, int i, int j,
                                      std::complex<double> s, double tol,
                                      double r_min, double cutoff_factor) {
  check_cusp_index(E, i, "fourier series");
  check_cusp_index(E, j, "fourier series");
  if (!(r_min > 0.0)) throw std::invalid_argument("r_min must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(cutoff_factor >= 1.0)) throw std::invalid_argument("cutoff_factor must be >= 1");
  check_tau_domain(s);

  const QuadField& F = E.field();
  double rootd = F.sqrt_disc().imag();
  FourierEval fe;
  fe.s = s;
  fe.i = i;
  fe.j = j;
  fe.diag = (i == j);
  fe.arg_scale = 4.0 * kPi / rootd;
  double t = std::abs(s.imag());
  double xcut = (t + 12.0 * std::cbrt(t) + 40.0) * cutoff_factor;
  fe.R = xcut / (fe.arg_scale * r_min);
  double band = 2.0 / (fe.arg_scale * r_min);

  CharacterData cd = character_data(E, i, j, s);
  auto xi_s = completed_xi_all(E.group(), s);
  auto xi_sm1 = completed_xi_all(E.group(), s - 1.0);
  fe.tau = tau_from_xi(E, cd, xi_sm1, xi_s);

  const Ideal& m = E.cusps()[i - 1].m;
  Ideal msq = ideal_mul(m, m);
  Ideal msq_inv = ideal_inverse(msq);
  auto els = enumerate_elements(msq, fe.R + band);

  double a_ord = s.real() - 1.0, t_ord = s.imag();
  double band_sum = 0.0;
  Rat cur_norm(-1);
  for (const FieldElement& n : els) {
    if (!(n.y > 0 || (n.y == 0 && n.x > 0))) continue;  // one of each +-n
    Rat nn = n.norm();
    double absn = std::sqrt(to_double(nn));
    Ideal n_ideal = ideal_mul(ideal_from_element(n), msq_inv);
    Cd omega = omega_from_parts(E, cd, xi_s, n_ideal, s);
    Cd coeff = omega * cpow(absn, s - 1.0);
    Cd w = Cd(0.0, -2.0) * std::conj(n.embed()) / rootd;
    if (absn <= fe.R) {
      if (fe.shells.empty() || nn != cur_norm) {
        fe.shells.push_back(FourierEval::Shell{absn, {}, {}});
        cur_norm = nn;
      }
      fe.shells.back().coeff.push_back(coeff);
      fe.shells.back().w.push_back(w);
      fe.term_count++;
    } else {
      double K = std::abs(eval_bessel(a_ord, t_ord, fe.arg_scale * absn * r_min));
      band_sum += 2.0 * std::abs(coeff) * r_min * K;
    }
  }
  fe.est_tail = 1.25 * band_sum + 1e-16 * (1.0 + std::abs(fe.tau));
  if (fe.est_tail > tol)
    throw std::runtime_error("Fourier tail estimate exceeds the requested tolerance");
  return fe;
}

std::complex<double> eisenstein_fourier_eval(const EisensteinContext& E, int i,
                                             int j, const HPoint& v,
                                             std::complex<double> s,
                                             double tol) {
  if (!(v.r > 0.0)) throw std::invalid_argument("point must have positive height");
  FourierEval fe = eisenstein_fourier_series(E, i, j, s, tol, v.r);
  return fe.eval(v);
}

std::complex<double> eisenstein_direct_sum(const EisensteinContext& E, int j,
                                           const HPoint& v,
                                           std::complex<double> s,
                                           double trunc) {
  check_cusp_index(E, j, "direct sum");
  if (!(s.real() >= 3.0))
    throw std::domain_error("direct sum needs Re s >= 3 for certified truncation");
  if (!(v.r > 0.0)) throw std::invalid_argument("point must have positive height");
  if (!(trunc >= 100.0)) throw std::invalid_argument("truncation bound too small");

  const Ideal& m = E.cusps()[j - 1].m;
  Ideal m_inv = ideal_inverse(m);
  Cd e1 = m.basis1().embed(), e2 = m.basis2().embed();
  double covol = e1.real() * std::abs(e2.imag());
  // Explicit summation while |c| r <= b0.  The density model for the d-sum
  // needs more than the e^{-2 pi |c| r lambda_1(dual)} Poisson margin of the
  // full lattice: its inclusion-exclusion over sublattices e*m carries a
  // power-law defect ~ r^2 N(m)/(|c| r)^2 per c from the sparse e, so the
  // threshold constant is set well above the Poisson requirement and the
  // residual falls off like b0^{2(2 - Re s)}.
  double b0 = std::max(4.0, 11.0 / dual_min(e1, e2));
  double b0sq = b0 * b0;

  double r = v.r;
  Cd z = v.z;
  Cd total = 0.0;
  if (auto g = principal_generator(m))
    total += cpow(r / to_double(g->norm()), s);

  double W = std::max(100.0, trunc * r * r);
  Cd closed_pref = kPi / ((s - 1.0) * covol) * cpow(r, s);
  std::map<Ideal, SublatticeTest> subtests;

  long qmax = static_cast<long>(std::floor(std::sqrt(trunc) / std::abs(e2.imag()))) + 1;
  for (long qc = 0; qc <= qmax; qc++) {
    // pc window from |pc e1 + qc e2|^2 <= trunc
    double xc = -qc * e2.real() / e1.real();
    double room = trunc - qc * qc * e2.imag() * e2.imag();
    if (room < 0) continue;
    double halfw = std::sqrt(room) / e1.real();
    long plo = static_cast<long>(std::floor(xc - halfw)) - 1;
    long phi = static_cast<long>(std::ceil(xc + halfw)) + 1;
    for (long pc = plo; pc <= phi; pc++) {
      if (qc == 0 && pc <= 0) continue;  // one representative of each +-c
      Cd ce = static_cast<double>(pc) * e1 + static_cast<double>(qc) * e2;
      double csq = std::norm(ce);
      if (csq > trunc || csq == 0.0) continue;
      FieldElement c_el = lattice_element(m, pc, qc);
      Ideal a_c = ideal_mul(ideal_from_element(c_el), m_inv);
      auto primes = factor_ideal(a_c);
      double b2 = csq * r * r;
      if (b2 > b0sq) {
        // d-sum replaced by its density integral; the lattice correction is
        // below e^{-2 pi b lambda_1(dual)} ~ 1e-10 by the choice of b0
        double rho = 1.0;
        for (const auto& pe : primes) rho *= 1.0 - 1.0 / to_double(pe.first.norm());
        total += rho * closed_pref * cpow(b2, 1.0 - s);
        continue;
      }
      std::vector<const SublatticeTest*> tests;
      for (const auto& pe : primes) {
        auto it = subtests.find(pe.first.ideal);
        if (it == subtests.end())
          it = subtests.emplace(pe.first.ideal,
                                make_sublattice_test(ideal_mul(pe.first.ideal, m), m)).first;
        tests.push_back(&it->second);
      }
      Cd center = -ce * z;
      double rad2 = W - b2;
      double rad = std::sqrt(rad2);
      long qlo = static_cast<long>(std::floor((center.imag() - rad) / e2.imag()));
      long qhi = static_cast<long>(std::ceil((center.imag() + rad) / e2.imag()));
      if (e2.imag() < 0) std::swap(qlo, qhi);
      for (long qd = qlo - 1; qd <= qhi + 1; qd++) {
        double y = qd * e2.imag() - center.imag();
        double wid2 = rad2 - y * y;
        if (wid2 < 0) continue;
        double wid = std::sqrt(wid2);
        double xd = (center.real() - qd * e2.real()) / e1.real();
        long pdlo = static_cast<long>(std::floor(xd - wid / e1.real())) - 1;
        long pdhi = static_cast<long>(std::ceil(xd + wid / e1.real())) + 1;
        for (long pd = pdlo; pd <= pdhi; pd++) {
          bool drop = false;
          for (const SublatticeTest* st : tests)
            if (st->contains(pd, qd)) { drop = true; break; }
          if (drop) continue;
          Cd de = static_cast<double>(pd) * e1 + static_cast<double>(qd) * e2;
          double D = std::norm(ce * z + de) + b2;
          if (D <= W) total += cpow(r / D, s);
        }
      }
    }
  }
  return total;
}

double incomplete_eisenstein_eval(const EisensteinContext& E, int i,
                                  const HPoint& v,
                                  const std::function<double(double)>& psi,
                                  double r0) {
  check_cusp_index(E, i, "incomplete series");
  if (!(r0 > 0.0))
    throw std::invalid_argument("profile must vanish below some positive height");
  if (!(v.r > 0.0)) throw std::invalid_argument("point must have positive height");

  const QuadField& F = E.field();
  const Ideal& m = E.cusps()[i - 1].m;
  Cd e1 = m.basis1().embed(), e2 = m.basis2().embed();
  double r = v.r;
  Cd z = v.z;
  double Dmax = r / r0;
  double out = 0.0;
  if (auto g = principal_generator(m)) {
    double h0 = r / to_double(g->norm());
    if (h0 >= r0 * (1.0 - 1e-12)) out += psi(h0);
  }
  double cmax2 = Dmax / (r * r);
  long qmax = static_cast<long>(std::floor(std::sqrt(cmax2) / std::abs(e2.imag()))) + 1;
  for (long qc = 0; qc <= qmax; qc++) {
    double xc = -qc * e2.real() / e1.real();
    double room = cmax2 - qc * qc * e2.imag() * e2.imag();
    if (room < 0) continue;
    double halfw = std::sqrt(room) / e1.real();
    long plo = static_cast<long>(std::floor(xc - halfw)) - 1;
    long phi = static_cast<long>(std::ceil(xc + halfw)) + 1;
    for (long pc = plo; pc <= phi; pc++) {
      if (qc == 0 && pc <= 0) continue;
      Cd ce = static_cast<double>(pc) * e1 + static_cast<double>(qc) * e2;
      double b2 = std::norm(ce) * r * r;
      if (b2 == 0.0 || b2 > Dmax) continue;
      FieldElement c_el = lattice_element(m, pc, qc);
      Cd center = -ce * z;
      double rad2 = Dmax - b2;
      double rad = std::sqrt(rad2);
      long qlo = static_cast<long>(std::floor((center.imag() - rad) / e2.imag()));
      long qhi = static_cast<long>(std::ceil((center.imag() + rad) / e2.imag()));
      if (e2.imag() < 0) std::swap(qlo, qhi);
      for (long qd = qlo - 1; qd <= qhi + 1; qd++) {
        double y = qd * e2.imag() - center.imag();
        double wid2 = rad2 - y * y;
        if (wid2 < 0) continue;
        double wid = std::sqrt(wid2);
        double xd = (center.real() - qd * e2.real()) / e1.real();
        long pdlo = static_cast<long>(std::floor(xd - wid / e1.real())) - 1;
        long pdhi = static_cast<long>(std::ceil(xd + wid / e1.real())) + 1;
        for (long pd = pdlo; pd <= pdhi; pd++) {
          Cd de = static_cast<double>(pd) * e1 + static_cast<double>(qd) * e2;
          double D = std::norm(ce * z + de) + b2;
          if (D > Dmax) continue;
          FieldElement d_el = lattice_element(m, pd, qd);
          if (ideal_hnf(F, {c_el, d_el}) != m) continue;
          out += psi(r / D);
        }
      }
    }
  }
  return out;
}

ResidueResult residue_at_2(const EisensteinContext& E, int j, const HPoint& v) {
  check_cusp_index(E, j, "residue");
  if (!(v.r > 0.0)) throw std::invalid_argument("point must have positive height");
  const double eps[3] = {1e-3, 5e-4, 2.5e-4};
  double f[3];
  for (int k = 0; k < 3; k++) {
    Cd val = eisenstein_fourier_eval(E, 1, j, v, Cd(2.0 + eps[k], 0.0), 1e-7);
    f[k] = eps[k] * val.real();
  }
  double g1 = 2.0 * f[1] - f[0];
  double g2 = 2.0 * f[2] - f[1];
  ResidueResult out;
  out.numeric = (4.0 * g2 - g1) / 3.0;
  double zf2 = hecke_L(E.chars()[0], Cd(2.0, 0.0), E.lseries()).value.real();
  double nm = E.cusps()[j - 1].norm_m;
  double absd = std::abs(static_cast<double>(E.field().disc));
  out.formula = 2.0 * kPi * kPi / (nm * nm * absd * zf2);
  return out;
}

}  // namespace bqe
