#include "bqe/qe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bqe {

namespace {

using Cd = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Least-squares slope of y against x; NaN below two points.
double fit_slope(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct GLRule {
  std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

// Newton iteration from the Chebyshev estimate; roots come in +- pairs.
const GLRule& gl_rule(int n) {
  static std::mutex mu;
  static std::map<int, GLRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GLRule rule;
  rule.x.assign(n, 0.0);
  rule.w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; i++) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 64; iter++) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; k++) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

void validate_box(const BoxRegion& box) {
  if (!(box.r_lo > 0.0) || !(box.r_hi > box.r_lo) || !(box.x_hi > box.x_lo) ||
      !(box.y_hi > box.y_lo))
    throw std::invalid_argument("box '" + box.label +
                                "' is degenerate: need positive extent and "
                                "r_lo > 0");
}

// Completes the unimodular row (c, d), c != 0, to a determinant-one matrix
// by searching small a with (ad - 1)/c integral.
Matrix2F complete_row(const QuadField& F, const FieldElement& c,
                      const FieldElement& d) {
  FieldElement one(F, 1);
  for (double R = 4.0; R <= 64.0; R *= 2.0) {
    std::vector<FieldElement> pool = enumerate_elements(ideal_one(F), R);
    pool.insert(pool.begin(), FieldElement(F, 0));
    for (const FieldElement& a : pool) {
      FieldElement b = (a * d - one) / c;
      if (!b.is_integral()) continue;
      return matrix2(a, b, c, d);
    }
  }
  throw std::logic_error("injectivity_certificate: could not complete row");
}

// Could [a, b] * z + d, z over the base rectangle, produce image heights
// meeting [r_lo, r_hi]?  Interval arithmetic on |cz + d|^2 + |c|^2 r^2.
bool height_candidate(Cd c, Cd d, const BoxRegion& box) {
  auto scaled = [](double a, double lo, double hi) {
    return a >= 0.0 ? std::pair<double, double>{a * lo, a * hi}
                    : std::pair<double, double>{a * hi, a * lo};
  };
  auto [re1_lo, re1_hi] = scaled(c.real(), box.x_lo, box.x_hi);
  auto [re2_lo, re2_hi] = scaled(-c.imag(), box.y_lo, box.y_hi);
  auto [im1_lo, im1_hi] = scaled(c.imag(), box.x_lo, box.x_hi);
  auto [im2_lo, im2_hi] = scaled(c.real(), box.y_lo, box.y_hi);
  double wre_lo = re1_lo + re2_lo + d.real(), wre_hi = re1_hi + re2_hi + d.real();
  double wim_lo = im1_lo + im2_lo + d.imag(), wim_hi = im1_hi + im2_hi + d.imag();
  auto dist0 = [](double lo, double hi) {
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return std::min(std::fabs(lo), std::fabs(hi));
  };
  auto sq = [](double v) { return v * v; };
  double m2_min = sq(dist0(wre_lo, wre_hi)) + sq(dist0(wim_lo, wim_hi));
  double m2_max = std::max(sq(wre_lo), sq(wre_hi)) + std::max(sq(wim_lo), sq(wim_hi));
  double c2 = std::norm(c);
  double q_min = m2_min + c2 * box.r_lo * box.r_lo;
  double q_max = m2_max + c2 * box.r_hi * box.r_hi;
  return box.r_hi / q_min >= box.r_lo && box.r_lo / q_max <= box.r_hi;
}

// Tensor Gauss-Legendre sum of |fs|^2 dV over the box, radial direction in
// u = log r so the r^{it} oscillation has constant frequency.
double tensor_integral(const FourierEval& fs, const BoxRegion& box, int nx,
                       int ny, int nr, long* evals) {
  const GLRule& gx = gl_rule(nx);
  const GLRule& gy = gl_rule(ny);
  const GLRule& gu = gl_rule(nr);
  double hx = 0.5 * (box.x_hi - box.x_lo), mx = 0.5 * (box.x_hi + box.x_lo);
  double hy = 0.5 * (box.y_hi - box.y_lo), my = 0.5 * (box.y_hi + box.y_lo);
  double u_lo = std::log(box.r_lo), u_hi = std::log(box.r_hi);
  double hu = 0.5 * (u_hi - u_lo), mu = 0.5 * (u_hi + u_lo);
  double sum = 0.0;
  for (int ix = 0; ix < nx; ix++) {
    double x = mx + hx * gx.x[ix];
    for (int iy = 0; iy < ny; iy++) {
      HPoint v{Cd(x, my + hy * gy.x[iy]), 1.0};
      double wxy = gx.w[ix] * gy.w[iy];
      for (int iu = 0; iu < nr; iu++) {
        double u = mu + hu * gu.x[iu];
        v.r = std::exp(u);
        sum += wxy * gu.w[iu] * std::norm(fs.eval(v)) * std::exp(-2.0 * u);
      }
    }
  }
  *evals += static_cast<long>(nx) * ny * nr;
  return sum * hx * hy * hu;
}

}  // namespace

double box_volume(const BoxRegion& box) {
  validate_box(box);
  return (box.x_hi - box.x_lo) * (box.y_hi - box.y_lo) *
         (1.0 / (box.r_lo * box.r_lo) - 1.0 / (box.r_hi * box.r_hi)) / 2.0;
}

InjectivityCertificate injectivity_certificate(const QuadField& F,
                                               const BoxRegion& box) {
  validate_box(box);
  constexpr size_t kMaxWitnesses = 16;
  InjectivityCertificate out;
  out.certified = true;
  FieldElement one(F, 1), zero(F, 0);
  double dx = box.x_hi - box.x_lo, dy = box.y_hi - box.y_lo;

  // Translations act on the base rectangle alone: the open box meets its
  // shift by w exactly when |Re w| < dx and |Im w| < dy.
  for (const FieldElement& w : enumerate_elements(ideal_one(F), std::hypot(dx, dy) + 1e-9)) {
    Cd ww = w.embed();
    if (ww.imag() < 0.0 || (ww.imag() == 0.0 && ww.real() < 0.0)) continue;
    if (std::fabs(ww.real()) < dx && std::fabs(ww.imag()) < dy) {
      out.certified = false;
      if (out.witnesses.size() < kMaxWitnesses)
        out.witnesses.push_back(matrix2(one, w, zero, one));
    }
  }

  // Motions with c != 0 send height r to at most 1/(|c|^2 r), so only
  // |c| <= 1/r_lo can return to the box.
  double half_diag = 0.5 * std::hypot(dx, dy);
  Cd center(0.5 * (box.x_lo + box.x_hi), 0.5 * (box.y_lo + box.y_hi));
  double reach_base = std::sqrt(box.r_hi / box.r_lo);
  Ideal O = ideal_one(F);
  for (const FieldElement& c : enumerate_elements(O, 1.0 / box.r_lo + 1e-9)) {
    Cd cc = c.embed();
    if (cc.imag() < 0.0 || (cc.imag() == 0.0 && cc.real() < 0.0)) continue;
    double reach = reach_base + std::abs(cc) * half_diag + 1e-9;
    Cd w0 = -cc * center;  // d must land within reach of -c * center
    std::vector<FieldElement> ds = enumerate_elements(O, std::abs(w0) + reach);
    ds.insert(ds.begin(), zero);
    for (const FieldElement& d : ds) {
      if (std::abs(d.embed() - w0) > reach) continue;
      if (!(ideal_hnf(F, {c, d}) == O)) continue;
      if (!height_candidate(cc, d.embed(), box)) continue;
      out.certified = false;
      if (out.witnesses.size() < kMaxWitnesses)
        out.witnesses.push_back(complete_row(F, c, d));
    }
  }
  return out;
}

MuResult mu_measure(const FourierEval& fs, const BoxRegion& box,
                    int quad_order, double rel_tol) {
  validate_box(box);
  if (fs.i != 1 || std::fabs(fs.s.real() - 1.0) > 1e-12)
    throw std::invalid_argument("mu_measure: need a chart-1 expansion at Re s = 1");
  double t = fs.s.imag();
  if (!(t > 0.0)) throw std::invalid_argument("mu_measure: need t > 0");
  if (quad_order < 2 || !(rel_tol > 0.0))
    throw std::invalid_argument("mu_measure: bad quadrature request");

  // Node floor: six per oscillation, planar frequency from the largest
  // retained mode, radial frequency t/(2 pi) per unit log r.
  double fmax = 0.0;
  for (const auto& sh : fs.shells)
    fmax = std::max(fmax, fs.arg_scale * sh.absn / (2.0 * kPi));
  constexpr int kCap = 96;
  int nx = std::max<int>(quad_order, static_cast<int>(std::ceil(6.0 * (box.x_hi - box.x_lo) * fmax)));
  int ny = std::max<int>(quad_order, static_cast<int>(std::ceil(6.0 * (box.y_hi - box.y_lo) * fmax)));
  int nr = std::max<int>(quad_order, static_cast<int>(std::ceil(
                             6.0 * t * std::log(box.r_hi / box.r_lo) / (2.0 * kPi))));
  if (nx > kCap || ny > kCap || nr > kCap)
    throw std::runtime_error("mu_measure: base quadrature order above cap 96");

  long evals = 0;
  double prev = tensor_integral(fs, box, nx, ny, nr, &evals);
  for (;;) {
    nx += 8;
    ny += 8;
    nr += 8;
    if (nx > kCap || ny > kCap || nr > kCap)
      throw std::runtime_error("mu_measure: refinement cap 96 reached without convergence");
    double cur = tensor_integral(fs, box, nx, ny, nr, &evals);
    double diff = std::fabs(cur - prev);
    if (diff <= rel_tol * std::max(std::fabs(cur), 1e-300)) {
      MuResult out;
      out.value = cur;
      double vol = box_volume(box);
      out.est_err = diff + fs.est_tail * (2.0 * std::sqrt(std::max(cur, 0.0) * vol) +
                                          fs.est_tail * vol);
      out.order = std::max({nx, ny, nr});
      out.evaluations = evals;
      return out;
    }
    prev = cur;
  }
}

MuResult mu_measure(const EisensteinContext& E, const BoxRegion& box, double t,
                    int j, int quad_order, double rel_tol) {
  validate_box(box);
  FourierEval fs = eisenstein_fourier_series(E, 1, j, Cd(1.0, t), 1e-10, box.r_lo);
  fs.build_kernel_table(box.r_lo, box.r_hi);
  return mu_measure(fs, box, quad_order, rel_tol);
}

ScanResult qe_scan(const EisensteinContext& E, const ScanConfig& cfg) {
  const QuadField& F = E.field();
  if (F.d != cfg.d)
    throw std::invalid_argument("qe_scan: context field does not match config d");
  if (cfg.cusp_j < 1 || cfg.cusp_j > E.h())
    throw std::invalid_argument("qe_scan: cusp index out of range");
  const TGridSpec& g = cfg.t_grid;
  if (!(g.t_min > 0.0) || !(g.t_max >= g.t_min) || !(g.t_step > 0.0))
    throw std::invalid_argument("qe_scan: need 0 < t_min <= t_max and t_step > 0");
  if (g.t_max > 64.0)
    throw std::invalid_argument("qe_scan: t_max beyond the supported Bessel range");
  if (cfg.quad_order < 2 || !(cfg.tol > 0.0))
    throw std::invalid_argument("qe_scan: bad quadrature request");
  if (cfg.boxes.empty()) throw std::invalid_argument("qe_scan: no boxes");
  std::set<std::string> labels;
  for (const BoxRegion& b : cfg.boxes) {
    validate_box(b);
    if (b.label.empty() || b.label.find_first_of(",\"\r\n") != std::string::npos)
      throw std::invalid_argument("qe_scan: box label must be nonempty and CSV-safe");
    if (!labels.insert(b.label).second)
      throw std::invalid_argument("qe_scan: duplicate box label '" + b.label + "'");
    InjectivityCertificate cert = injectivity_certificate(F, b);
    if (!cert.certified)
      throw std::invalid_argument("qe_scan: box '" + b.label +
                                  "' failed the embedding certificate");
  }

  double r_lo_all = cfg.boxes[0].r_lo, r_hi_all = cfg.boxes[0].r_hi;
  for (const BoxRegion& b : cfg.boxes) {
    r_lo_all = std::min(r_lo_all, b.r_lo);
    r_hi_all = std::max(r_hi_all, b.r_hi);
  }

  ScanResult out;
  double zf2 = hecke_L(E.chars()[0], Cd(2.0, 0.0), E.lseries()).value.real();
  double nm = E.cusps()[cfg.cusp_j - 1].norm_m;
  double absd = std::abs(static_cast<double>(F.disc));
  out.theory_constant = 4.0 * kPi * kPi / (nm * nm * absd * zf2);

  std::ostringstream csv;
  csv << "t,box_label,mu,vol,ratio_to_first,vol_ratio_to_first,rel_dev,est_err\n";
  std::vector<std::pair<double, double>> fit_pts;
  double vol0 = box_volume(cfg.boxes[0]);
  double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t = g.t_min; t <= g.t_max + 1e-9 * std::max(1.0, g.t_max); t += g.t_step) {
    std::vector<std::optional<MuResult>> mus(cfg.boxes.size());
    try {
      FourierEval fs = eisenstein_fourier_series(E, 1, cfg.cusp_j, Cd(1.0, t),
                                                 1e-10, r_lo_all);
      fs.build_kernel_table(r_lo_all, r_hi_all);
      for (size_t b = 0; b < cfg.boxes.size(); b++) {
        try {
          mus[b] = mu_measure(fs, cfg.boxes[b], cfg.quad_order, cfg.tol);
        } catch (const std::exception& e) {
          out.log.push_back("t=" + g12(t) + " box=" + cfg.boxes[b].label + ": " + e.what());
        }
      }
    } catch (const std::exception& e) {
      out.log.push_back("t=" + g12(t) + ": expansion failed: " + e.what());
    }
    bool first_ok = mus[0] && mus[0]->value > 10.0 * mus[0]->est_err;
    for (size_t b = 0; b < cfg.boxes.size(); b++) {
      if (!mus[b]) continue;
      ScanRow row;
      row.t = t;
      row.box_label = cfg.boxes[b].label;
      row.mu = mus[b]->value;
      row.vol = box_volume(cfg.boxes[b]);
      row.est_err = mus[b]->est_err;
      row.vol_ratio_to_first = row.vol / vol0;
      row.ratio_valid = first_ok && row.mu > 10.0 * row.est_err;
      if (row.ratio_valid) {
        row.ratio_to_first = row.mu / mus[0]->value;
        row.rel_dev = std::fabs(row.ratio_to_first / row.vol_ratio_to_first - 1.0);
      } else {
        row.ratio_to_first = nan;
        row.rel_dev = nan;
      }
      if (b == 0) fit_pts.emplace_back(std::log(t), row.mu / row.vol);
      csv << g12(row.t) << ',' << row.box_label << ',' << g12(row.mu) << ','
          << g12(row.vol) << ',' << g12(row.ratio_to_first) << ','
          << g12(row.vol_ratio_to_first) << ',' << g12(row.rel_dev) << ','
          << g12(row.est_err) << '\n';
      out.rows.push_back(std::move(row));
    }
  }
  out.fitted_slope = fit_slope(fit_pts);
  out.csv = csv.str();
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out, std::ios::binary);
    f << out.csv;
    if (!f) throw std::runtime_error("qe_scan: cannot write " + cfg.out);
  }
  return out;
}

ScanResult qe_scan(const ScanConfig& cfg) {
  QuadField F = make_field(cfg.d);
  ClassGroup G = compute_class_group(F);
  EisensteinContext E(G);
  return qe_scan(E, cfg);
}

BoundsResult bounds_scan(const LSeriesContext& ctx, BoundKind kind,
                         double t_min, double t_max, double t_step) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || !(t_step > 0.0))
    throw std::invalid_argument("bounds_scan: need 0 < t_min <= t_max and t_step > 0");
  std::vector<Character> chs = characters(ctx.group());
  BoundsResult out;
  std::ostringstream csv;
  csv << "t,chi,value,reference\n";
  std::vector<std::pair<double, double>> fit_pts;
  for (double t = t_min; t <= t_max + 1e-9 * std::max(1.0, t_max); t += t_step) {
    double vmax = 0.0;
    bool any = false;
    for (size_t k = 0; k < chs.size(); k++) {
      try {
        double value, reference;
        if (kind == BoundKind::subconvexity) {
          value = std::abs(hecke_L(chs[k], Cd(0.5, t), ctx).value);
          reference = std::pow(t, 1.0 / 6.0);
        } else {
          Cd s(1.0, t);
          if (kind == BoundKind::inv_L) {
            double a = std::abs(hecke_L(chs[k], s, ctx).value);
            if (!(a > 0.0) || !std::isfinite(a))
              throw std::runtime_error("L-value vanished on Re s = 1");
            value = 1.0 / a;
          } else {
            value = std::abs(L_log_derivative(chs[k], s, ctx));
          }
          double lt = std::log(std::exp(1.0) + t);
          reference = std::pow(lt, 2.0 / 3.0) *
                      std::pow(std::log(std::exp(1.0) + lt), 1.0 / 3.0);
        }
        if (!std::isfinite(value)) throw std::runtime_error("nonfinite value");
        out.rows.push_back({t, static_cast<int>(k), value, reference});
        csv << g12(t) << ',' << k << ',' << g12(value) << ',' << g12(reference) << '\n';
        vmax = std::max(vmax, value);
        any = true;
      } catch (const std::exception& e) {
        out.log.push_back("t=" + g12(t) + " chi=" + std::to_string(k) + ": " + e.what());
      }
    }
    if (any && vmax > 0.0) fit_pts.emplace_back(std::log(t), std::log(vmax));
  }
  out.fitted_exponent = fit_slope(fit_pts);
  out.csv = csv.str();
  return out;
}

}  // namespace bqe
