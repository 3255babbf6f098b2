#include "bqe/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bqe {

namespace {

constexpr double kPi = 3.14159265358979323846;
using Cd = std::complex<double>;

// ---- Gauss-Legendre panels ----

// 16-point rule on [-1,1], symmetric halves
constexpr double kGLx[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGLw[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

template <class F>
auto gl_panel(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  auto acc = kGLw[0] * (f(mid - half * kGLx[0]) + f(mid + half * kGLx[0]));
  for (int i = 1; i < 8; i++)
    acc += kGLw[i] * (f(mid - half * kGLx[i]) + f(mid + half * kGLx[i]));
  return half * acc;
}

// March left to right with a state-dependent panel width; each panel is split
// into 2^halvings GL16 pieces (halvings is the self-validation knob).
template <class F, class W>
auto integrate_marched(F&& f, double a, double b, W&& width, int halvings) {
  using R = decltype(f(a));
  R total{};
  double u = a;
  long guard = 0;
  const double min_w = std::max((b - a) * 1e-9, 1e-12);
  while (u < b) {
    if (++guard > 4000000L) throw std::runtime_error("panel count blowup");
    double v = std::min(b, u + std::max(width(u), min_w));
    int pieces = 1 << halvings;
    double step = (v - u) / pieces;
    for (int k = 0; k < pieces; k++)
      total += gl_panel(f, u + k * step, u + (k + 1) * step);
    u = v;
  }
  return total;
}

// ---- log gamma ----

// B_{2k} / (2k (2k-1)), k = 1..10
constexpr double kStirling[10] = {
    1.0 / 12,           -1.0 / 360,          1.0 / 1260,
    -1.0 / 1680,        1.0 / 1188,          -691.0 / 360360,
    1.0 / 156,          -3617.0 / 122400,    43867.0 / 244188,
    -174611.0 / 125400};

Cd log_sin_pi(Cd z) {
  double y = z.imag();
  if (std::abs(y) < 1.0) return std::log(std::sin(kPi * z));
  if (y < 0.0) return std::conj(log_sin_pi(std::conj(z)));
  // sin(pi z) = e^{-i pi z} (i/2) (1 - e^{2 pi i z}), the last factor ~ 1
  Cd i(0.0, 1.0);
  Cd w = kPi * z;
  return -i * w + Cd(std::log(0.5), kPi / 2) + std::log(1.0 - std::exp(2.0 * i * w));
}

}  // namespace

std::complex<double> lgamma_complex(std::complex<double> z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw std::domain_error("log-gamma pole at nonpositive integer");
  if (z.real() < 0.5)
    return std::log(kPi) - log_sin_pi(z) - lgamma_complex(1.0 - z);
  int n = 0;
  if (z.real() < 12.0 && std::abs(z) < 40.0)
    n = static_cast<int>(std::ceil(12.0 - z.real()));
  Cd shift(0.0, 0.0);
  for (int k = 0; k < n; k++) shift += std::log(z + static_cast<double>(k));
  Cd w = z + static_cast<double>(n);
  Cd lg = (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * kPi);
  Cd w2 = 1.0 / (w * w), term = 1.0 / w;
  for (double coef : kStirling) {
    lg += coef * term;
    term *= w2;
  }
  return lg - shift;
}

std::complex<double> complex_gamma(std::complex<double> z) {
  return std::exp(lgamma_complex(z));
}

std::complex<double> upper_incomplete_gamma(std::complex<double> s, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("incomplete gamma needs x > 0");
  Cd prefactor = std::exp(-x + s * std::log(x));
  // series terms grow to ~e^x with slowly rotating phase before converging,
  // which costs digits once x is large; prefer the fraction early
  if (x >= std::abs(s) + 6.0) {
    // modified Lentz on the standard continued fraction
    const double tiny = 1e-290;
    Cd b = x + 1.0 - s;
    Cd c = 1.0 / tiny, d = 1.0 / b, f = d;
    for (int i = 1; i < 20000; i++) {
      Cd an = -static_cast<double>(i) * (static_cast<double>(i) - s);
      b += 2.0;
      d = an * d + b;
      if (std::abs(d) < tiny) d = tiny;
      c = b + an / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      Cd delta = d * c;
      f *= delta;
      if (std::abs(delta - 1.0) < 1e-16) return prefactor * f;
    }
    throw std::runtime_error("incomplete gamma continued fraction stalled");
  }
  // lower series, then subtract
  Cd sum = 1.0 / s, term = sum;
  for (int n = 1; n < 20000; n++) {
    term *= x / (s + static_cast<double>(n));
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17)
      return complex_gamma(s) - prefactor * sum;
  }
  throw std::runtime_error("incomplete gamma series stalled");
}

// ---- K-Bessel ----

namespace {

// Tilt angle for the cosh-integral contour: shifting to Im u = asin(t/x)
// passes through the saddle, so the integrand scale matches the true K scale
// and the transition region t ~ x costs no cancellation.  Capped below pi/2
// to keep exponential decay; the cap leaks at most e^{0.012 t}.
double tilt_angle(double t, double x) {
  return std::asin(std::min(t / x, 0.92));
}

// I with K_{it}(x) = e^{-t theta - x cos theta} * I, from the contour at
// height theta:  I = int_0^inf e^{-A(cosh w - 1)} cos(t w - B sinh w) dw,
// A = x cos theta, B = x sin theta.
double cosh_branch_real(double t, double x, int halvings) {
  double theta = tilt_angle(t, x);
  double A = x * std::cos(theta), B = x * std::sin(theta);
  double umax = std::acosh(1.0 + 50.0 / A);
  auto width = [&](double u) {
    double freq = std::abs(t - B * std::cosh(u));
    double curv = std::sqrt(6.28 * ((A + B) * std::cosh(u) + 1.0));
    return std::min(0.5, 8.17 / (1.0 + freq + 0.8 * A * std::sinh(u) + curv));
  };
  auto f = [&](double u) {
    double sh = std::sinh(u / 2);  // cosh u - 1 = 2 sinh^2(u/2)
    return std::exp(-2.0 * A * sh * sh) * std::cos(t * u - B * std::sinh(u));
  };
  return integrate_marched(f, 0.0, umax, width, halvings);
}

// J with K_nu(x) = (1/2) e^{i a theta} e^{-t theta - A} J for nu = a + it,
// a >= 0, t >= 0:  J = int_R e^{-A(cosh w - 1) - a w + i(B sinh w - t w)} dw.
Cd cosh_branch_complex(Cd nu, double x, int halvings) {
  double a = nu.real(), t = std::abs(nu.imag());
  double theta = tilt_angle(t, x);
  double A = x * std::cos(theta), B = x * std::sin(theta);
  // peak of -A(cosh w - 1) - a w, then 50 e-foldings each side
  double wpk = -std::asinh(a / A);
  auto g = [&](double w) {
    double sh = std::sinh(w / 2);
    return -2.0 * A * sh * sh - a * w;
  };
  double gpk = g(wpk);
  double wlo = wpk - 1.0, whi = wpk + 1.0;
  while (g(wlo) > gpk - 50.0) wlo -= 0.5;
  while (g(whi) > gpk - 50.0) whi += 0.5;
  auto width = [&](double w) {
    double freq = std::abs(t - B * std::cosh(w));
    double curv = std::sqrt(6.28 * ((A + B) * std::cosh(w) + 1.0));
    return std::min(0.5,
                    8.17 / (1.0 + freq + 0.8 * (A * std::cosh(w) + a) + curv));
  };
  auto f = [&](double w) {
    double sh = std::sinh(w / 2);
    return std::exp(Cd(-2.0 * A * sh * sh - a * w,
                       B * std::sinh(w) - t * w));
  };
  return integrate_marched(f, wlo, whi, width, halvings);
}

// e^{pi t/2} K_{it}(x) = int_0^inf cos(x sinh u - t u) du for t > 0, via
// panels to U1 = acosh((pi t/2 + c)/x) and a rotated segment U1 + iv,
// v in [0, pi/2]; the remaining horizontal piece is O(e^{-c}).
double contour_branch_imag(double t, double x, int halvings) {
  const double c = 46.0;
  double U1 = std::acosh((kPi * t / 2 + c) / x);
  double X = x * std::cosh(U1);  // = pi t/2 + c
  double S = x * std::sinh(U1);
  auto width_axis = [&](double u) {
    double d1 = std::abs(x * std::cosh(u) - t);
    double d2 = std::sqrt(6.28 * x * std::sinh(u) + 1.0);
    return std::min(0.5, 8.17 / (1.0 + d1 + d2));
  };
  double P = integrate_marched(
      [&](double u) { return std::cos(x * std::sinh(u) - t * u); }, 0.0, U1,
      width_axis, halvings);
  // on u = U1 + iv the exponent is (tv - X sin v) + i(S cos v - t U1)
  double vcut = kPi / 2;
  for (double v = 0.0; v <= kPi / 2; v += 0.01) {
    if (t * v - X * std::sin(v) < -50.0) {
      vcut = v;
      break;
    }
  }
  auto width_vert = [&](double v) {
    double osc = S * std::sin(v) + std::sqrt(6.28 * S * std::cos(v) + 1.0);
    double dec = std::abs(t - X * std::cos(v));
    return std::min(0.25, 8.17 / (1.0 + osc + dec));
  };
  auto fv = [&](double v) {
    double re = t * v - X * std::sin(v);
    double ph = S * std::cos(v) - t * U1;
    return -std::exp(re) * std::sin(ph);  // Re(i e^{re + i ph})
  };
  double V = integrate_marched(fv, 0.0, vcut, width_vert, halvings);
  return P + V;
}

// e^{pi t/2} K_{a+it}(x) for a >= 0, t > max(x, 8): both half-line integrals
// of (1/2) e^{i a pi/2} int_R e^{i x sinh w - a w - i t w} dw, each rotated at
// U1 toward its decaying quadrant.
Cd contour_branch_complex(double a, double t, double x, int halvings) {
  double U1e = std::acosh((kPi * t / 2 + 46.0 + 3.0 * a) / x);
  double c = 46.0 + a * U1e;
  double U1 = std::acosh((kPi * t / 2 + c) / x);
  double X = x * std::cosh(U1);
  double S = x * std::sinh(U1);
  auto width_axis = [&](double u) {
    double d1 = std::abs(x * std::cosh(u) - t) + a;
    double d2 = std::sqrt(6.28 * x * std::sinh(u) + 1.0);
    return std::min(0.5, 8.17 / (1.0 + d1 + d2));
  };
  Cd i(0.0, 1.0);
  Cd Hp_axis = integrate_marched(
      [&](double u) {
        return std::exp(Cd(-a * u, x * std::sinh(u) - t * u));
      },
      0.0, U1, width_axis, halvings);
  Cd Hm_axis = integrate_marched(
      [&](double u) {
        return std::exp(Cd(a * u, -(x * std::sinh(u) - t * u)));
      },
      0.0, U1, width_axis, halvings);
  auto width_vert = [&](double v) {
    double osc = S * std::sin(v) + std::sqrt(6.28 * S * std::cos(v) + 1.0);
    double dec = std::abs(t - X * std::cos(v)) + a;
    return std::min(0.25, 8.17 / (1.0 + osc + dec));
  };
  double vcut = kPi / 2;
  for (double v = 0.0; v <= kPi / 2; v += 0.01) {
    if (t * v - X * std::sin(v) < -50.0) {
      vcut = v;
      break;
    }
  }
  // u = U1 + iv: exponent (tv - X sin v - a U1) + i(S cos v - t U1 - a v)
  Cd Hp_vert = integrate_marched(
      [&](double v) {
        return i * std::exp(Cd(t * v - X * std::sin(v) - a * U1,
                               S * std::cos(v) - t * U1 - a * v));
      },
      0.0, vcut, width_vert, halvings);
  // u = U1 - iv: exponent (tv - X sin v + a U1) + i(-S cos v + t U1 - a v)
  Cd Hm_vert = integrate_marched(
      [&](double v) {
        return -i * std::exp(Cd(t * v - X * std::sin(v) + a * U1,
                                -S * std::cos(v) + t * U1 - a * v));
      },
      0.0, vcut, width_vert, halvings);
  return 0.5 * std::exp(i * (a * kPi / 2)) *
         (Hp_axis + Hp_vert + Hm_axis + Hm_vert);
}

bool bessel_envelope(double t, double x) {
  t = std::abs(t);
  return t <= 200.0 && (x >= std::max(1e-3, t / 8.0) || (t <= 10.0 && x > 0.0));
}

}  // namespace

namespace detail {
double bessel_k_imag_branch(double t, double x, int branch) {
  t = std::abs(t);
  if (branch == 0) {
    double theta = tilt_angle(t, x);
    return std::exp(-t * theta - x * std::cos(theta)) *
           cosh_branch_real(t, x, 0);
  }
  if (!(x < kPi * t / 2 + 46.0))
    throw std::invalid_argument("contour branch needs x < pi t/2 + 46");
  return std::exp(-kPi * t / 2) * contour_branch_imag(t, x, 0);
}
}  // namespace detail

BesselEval bessel_k_imag_eval(double t, double x, BesselScaling scaling,
                              int refine) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_k_imag needs x > 0");
  t = std::abs(t);
  double coarse, fine;
  bool contour = t > std::max(x, 8.0);
  if (contour) {
    coarse = contour_branch_imag(t, x, refine);
    fine = contour_branch_imag(t, x, refine + 1);
  } else {
    coarse = cosh_branch_real(t, x, refine);
    fine = cosh_branch_real(t, x, refine + 1);
  }
  double rel = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
  // contour branch computes e^{pi t/2} K, cosh branch K e^{t theta + A}
  double value;
  double theta = tilt_angle(t, x);
  double lg = -t * theta - x * std::cos(theta);  // cosh-branch log scale
  if (scaling == BesselScaling::exp_weighted)
    value = contour ? fine : std::exp(kPi * t / 2 + lg) * fine;
  else
    value = contour ? std::exp(-kPi * t / 2) * fine : std::exp(lg) * fine;
  return BesselEval{value, rel + 1e-15, bessel_envelope(t, x)};
}

double bessel_k_imag(double t, double x, BesselScaling scaling) {
  return bessel_k_imag_eval(t, x, scaling, 0).value;
}

std::complex<double> bessel_k(std::complex<double> nu, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_k needs x > 0");
  if (nu.real() < 0.0) nu = -nu;  // K is even in the order
  bool flip = nu.imag() < 0.0;    // and real-analytic: K_{conj} = conj K
  double a = nu.real(), t = std::abs(nu.imag());
  Cd val;
  if (t <= std::max(x, 8.0)) {
    double theta = tilt_angle(t, x);
    Cd J = cosh_branch_complex(Cd(a, t), x, 0);
    val = 0.5 * std::exp(-t * theta - x * std::cos(theta)) *
          std::exp(Cd(0.0, a * theta)) * J;
  } else {
    val = std::exp(-kPi * t / 2) * contour_branch_complex(a, t, x, 0);
  }
  return flip ? std::conj(val) : val;
}

BesselMellinResult bessel_mellin(double t, double nu, std::complex<double> s) {
  if (!(s.real() > 0.0)) throw std::invalid_argument("bessel_mellin needs Re s > 0");
  double sigma = s.real();
  double ulo = -38.0 / std::min(sigma, 2.0);
  double uhi = std::log(35.0 + 2.0 * std::abs(s));
  double freq = std::abs(t) + std::abs(nu) + std::abs(s.imag());
  auto width = [&](double u) {
    return std::min(0.5, 8.17 / (1.0 + freq + 2.0 * std::exp(u)));
  };
  auto f = [&](double u) {
    double r = std::exp(u);
    double kk = bessel_k_imag(t, r) * bessel_k_imag(nu, r);
    return kk * std::exp(s * u);
  };
  Cd numeric = integrate_marched(f, ulo, uhi, width, 0);
  Cd i(0.0, 1.0);
  Cd g = lgamma_complex((s + i * (t + nu)) / 2.0) +
         lgamma_complex((s + i * (t - nu)) / 2.0) +
         lgamma_complex((s - i * (t - nu)) / 2.0) +
         lgamma_complex((s - i * (t + nu)) / 2.0) - lgamma_complex(s);
  Cd gamma_formula = std::exp(g);
  double cal = std::abs(numeric) / std::abs(gamma_formula);
  return BesselMellinResult{numeric, gamma_formula, cal};
}

double gamma_factor_ratio(double t, double nu) {
  if (!(t >= 1.0)) throw std::invalid_argument("gamma_factor_ratio needs t >= 1");
  Cd i(0.0, 1.0);
  Cd s = 1.0 - i * t;
  double logT = (lgamma_complex((s + i * (t + nu)) / 2.0) +
                 lgamma_complex((s + i * (t - nu)) / 2.0) +
                 lgamma_complex((s - i * (t - nu)) / 2.0) +
                 lgamma_complex((s - i * (t + nu)) / 2.0) - lgamma_complex(s))
                    .real();
  double logG = lgamma_complex(1.0 + i * t).real();
  return std::exp(logT - logG);
}

}  // namespace bqe
