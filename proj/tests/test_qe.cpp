#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bqe/class_group.hpp"
#include "bqe/eisenstein.hpp"
#include "bqe/number_field.hpp"
#include "bqe/qe.hpp"

using namespace bqe;
using Cd = std::complex<double>;

namespace {

BoxRegion box(double x0, double x1, double y0, double y1, double r0, double r1,
              std::string label) {
  return BoxRegion{x0, x1, y0, y1, r0, r1, std::move(label)};
}

// The reference region used throughout: high enough that no c != 0 motion
// can return, base inside a fundamental cell of O_{-5}.
const BoxRegion kBoxA = box(0.0625, 0.9375, 0.125, 1.0, 3.0, 3.4, "A");

}  // namespace

TEST_SUITE("qe") {

TEST_CASE("box volume closed forms") {
  CHECK(box_volume(box(0, 1, 0, 1, 1, 2, "u")) == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  // deep ceiling: volume approaches (area)/(2 r_lo^2)
  CHECK(box_volume(box(0, 1, 0, 1, 1, 1e9, "v")) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(box_volume(box(0, 2, 0, 1, 1, 2, "w")) ==
        doctest::Approx(2.0 * box_volume(box(0, 1, 0, 1, 1, 2, "u"))).epsilon(1e-15));
  // stacking in r is exactly additive in the closed form
  double whole = box_volume(box(0, 1, 0, 1, 1, 3, "s"));
  double parts = box_volume(box(0, 1, 0, 1, 1, 2, "s1")) +
                 box_volume(box(0, 1, 0, 1, 2, 3, "s2"));
  CHECK(whole == doctest::Approx(parts).epsilon(1e-14));

  CHECK_THROWS_AS(box_volume(box(0, 0, 0, 1, 1, 2, "d")), std::invalid_argument);
  CHECK_THROWS_AS(box_volume(box(0, 1, 1, 0, 1, 2, "d")), std::invalid_argument);
  CHECK_THROWS_AS(box_volume(box(0, 1, 0, 1, 0, 2, "d")), std::invalid_argument);
  CHECK_THROWS_AS(box_volume(box(0, 1, 0, 1, 2, 2, "d")), std::invalid_argument);
  CHECK_THROWS_AS(box_volume(box(0, 1, 0, 1, -1, 2, "d")), std::invalid_argument);
}

TEST_CASE("injectivity certificates") {
  QuadField F = make_field(-5, true);
  FieldElement one(F, 1);

  SUBCASE("small high box is certified") {
    InjectivityCertificate cert = injectivity_certificate(F, kBoxA);
    CHECK(cert.certified);
    CHECK(cert.witnesses.empty());
  }

  SUBCASE("wide box is rejected with a unit translation") {
    InjectivityCertificate cert =
        injectivity_certificate(F, box(0, 3, 0.1, 1.0, 3.0, 3.5, "wide"));
    CHECK_FALSE(cert.certified);
    REQUIRE_FALSE(cert.witnesses.empty());
    bool unit_shift = false;
    for (const Matrix2F& g : cert.witnesses) {
      CHECK(g.det() == one);
      if (g.m[1][0].is_zero() && g.m[0][0] == one && g.m[0][1] == one)
        unit_shift = true;
    }
    CHECK(unit_shift);
  }

  SUBCASE("tall box is rejected by the imaginary period") {
    // Im sqrt(-5) = 2.236... fits inside height 3 of the base
    InjectivityCertificate cert =
        injectivity_certificate(F, box(0, 0.9, 0, 3.0, 3.0, 3.5, "tall"));
    CHECK_FALSE(cert.certified);
    bool found = false;
    for (const Matrix2F& g : cert.witnesses)
      if (g.m[1][0].is_zero() && g.m[0][1] == FieldElement(F, Rat(0), Rat(1)))
        found = true;
    CHECK(found);
  }

  SUBCASE("deep box cannot be separated from inversions") {
    InjectivityCertificate cert =
        injectivity_certificate(F, box(0.1, 0.6, 0.1, 0.6, 0.05, 0.1, "deep"));
    CHECK_FALSE(cert.certified);
    REQUIRE_FALSE(cert.witnesses.empty());
    bool inversion = false;
    for (const Matrix2F& g : cert.witnesses) {
      CHECK(g.det() == one);
      if (!g.m[1][0].is_zero()) inversion = true;
    }
    CHECK(inversion);
  }

  SUBCASE("half-integer lattice of d = -23") {
    QuadField F23 = make_field(-23, true);
    // omega = (1 + sqrt(-23))/2 shifts by (0.5, 2.397...): a base of height
    // 2.5 straddles it, one of height 2.3 does not.
    CHECK_FALSE(injectivity_certificate(F23, box(0, 0.9, 0, 2.5, 3, 3.5, "in")).certified);
    CHECK(injectivity_certificate(F23, box(0, 0.9, 0, 2.3, 3, 3.5, "out")).certified);
  }

  SUBCASE("degenerate box throws") {
    CHECK_THROWS_AS(injectivity_certificate(F, box(0, 1, 0, 1, 2, 1, "d")),
                    std::invalid_argument);
  }
}

TEST_CASE("mass of one box") {
  QuadField F = make_field(-5, true);
  ClassGroup G = compute_class_group(F);
  EisensteinContext E(G);
  const double t = 10.0;

  MuResult base = mu_measure(E, kBoxA, t, 1, 8, 1e-5);
  CHECK(std::isfinite(base.value));
  CHECK(base.value > 0.0);
  CHECK(base.est_err >= 0.0);
  CHECK(base.est_err < 0.01 * base.value);
  CHECK(base.order >= 8);
  CHECK(base.evaluations > 0);

  SUBCASE("stable under a stricter request") {
    MuResult fine = mu_measure(E, kBoxA, t, 1, 16, 1e-6);
    CHECK(std::fabs(fine.value / base.value - 1.0) < 2e-4);
  }

  SUBCASE("invariant under the unit translation") {
    BoxRegion shifted = kBoxA;
    shifted.x_lo += 1.0;
    shifted.x_hi += 1.0;
    shifted.label = "A+1";
    MuResult moved = mu_measure(E, shifted, t, 1, 8, 1e-5);
    CHECK(std::fabs(moved.value / base.value - 1.0) < 1e-4);
  }

  SUBCASE("additive over an interior wall") {
    BoxRegion left = kBoxA, right = kBoxA;
    left.x_hi = 0.5;
    right.x_lo = 0.5;
    double split = mu_measure(E, left, t, 1, 8, 1e-5).value +
                   mu_measure(E, right, t, 1, 8, 1e-5).value;
    CHECK(std::fabs(split / base.value - 1.0) < 2e-4);
  }

  SUBCASE("rejects the wrong expansion or request") {
    FourierEval off_line = eisenstein_fourier_series(E, 1, 1, Cd(4.0, 0.0), 1e-10, 3.0);
    CHECK_THROWS_AS(mu_measure(off_line, kBoxA, 8, 1e-5), std::invalid_argument);
    FourierEval chart2 = eisenstein_fourier_series(E, 2, 1, Cd(1.0, t), 1e-10, 3.0);
    CHECK_THROWS_AS(mu_measure(chart2, kBoxA, 8, 1e-5), std::invalid_argument);
    FourierEval ok = eisenstein_fourier_series(E, 1, 1, Cd(1.0, t), 1e-10, 3.0);
    CHECK_THROWS_AS(mu_measure(ok, kBoxA, 8, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(mu_measure(ok, kBoxA, 1, 1e-5), std::invalid_argument);
    // an impossible tolerance exhausts the refinement cap
    CHECK_THROWS_AS(mu_measure(E, kBoxA, t, 1, 8, 1e-300), std::runtime_error);
  }
}

TEST_CASE("mass scan output contract") {
  QuadField F = make_field(-5, true);
  ClassGroup G = compute_class_group(F);
  EisensteinContext E(G);

  BoxRegion b = kBoxA;
  b.y_lo = kBoxA.y_lo + 1.0;
  b.y_hi = kBoxA.y_hi + 1.0;
  b.label = "B";

  ScanConfig cfg;
  cfg.d = -5;
  cfg.cusp_j = 1;
  cfg.t_grid = {10.0, 12.0, 2.0};
  cfg.boxes = {kBoxA, b};
  cfg.quad_order = 10;
  cfg.tol = 1e-5;

  ScanResult res = qe_scan(E, cfg);
  REQUIRE(res.rows.size() == 4);
  CHECK(res.log.empty());
  CHECK(res.csv.rfind("t,box_label,mu,vol,ratio_to_first,vol_ratio_to_first,rel_dev,est_err\n", 0) == 0);
  CHECK(res.csv.back() == '\n');
  CHECK(res.csv.find('\r') == std::string::npos);
  CHECK(std::count(res.csv.begin(), res.csv.end(), '\n') == 5);

  for (const ScanRow& row : res.rows) {
    CHECK(row.mu > 0.0);
    CHECK(row.ratio_valid);
    CHECK(row.vol_ratio_to_first == 1.0);  // congruent boxes, identical arithmetic
    CHECK(row.rel_dev < 0.5);
  }
  CHECK(res.rows[0].ratio_to_first == 1.0);
  CHECK(res.rows[0].rel_dev == 0.0);
  CHECK(res.rows[2].box_label == "A");
  CHECK(res.rows[3].box_label == "B");

  CHECK(std::isfinite(res.fitted_slope));
  CHECK(res.theory_constant > 0.0);
  // same constant that drives the residue at s = 2, up to the factor two
  ResidueResult rr = residue_at_2(E, 1, HPoint{Cd(0.2, 0.3), 1.0});
  CHECK(res.theory_constant == doctest::Approx(2.0 * rr.formula).epsilon(1e-12));

  SUBCASE("deterministic bytes and faithful file copy") {
    ScanResult again = qe_scan(E, cfg);
    CHECK(again.csv == res.csv);

    ScanConfig with_file = cfg;
    with_file.out = "qe_scan_test_out.csv";
    ScanResult written = qe_scan(E, with_file);
    std::ifstream in(with_file.out, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream body;
    body << in.rdbuf();
    CHECK(body.str() == written.csv);
    std::remove(with_file.out.c_str());
  }

  SUBCASE("self-contained overload matches") {
    ScanConfig small = cfg;
    small.t_grid = {10.0, 10.0, 1.0};
    CHECK(qe_scan(small).csv == qe_scan(E, small).csv);
  }

  SUBCASE("configuration errors") {
    ScanConfig bad = cfg;
    bad.d = -6;
    CHECK_THROWS_AS(qe_scan(E, bad), std::invalid_argument);
    bad = cfg;
    bad.cusp_j = 3;
    CHECK_THROWS_AS(qe_scan(E, bad), std::invalid_argument);
    bad = cfg;
    bad.t_grid = {0.0, 10.0, 1.0};
    CHECK_THROWS_AS(qe_scan(E, bad), std::invalid_argument);
    bad = cfg;
    bad.t_grid = {10.0, 100.0, 5.0};
    CHECK_THROWS_AS(qe_scan(E, bad), std::invalid_argument);
    bad = cfg;
    bad.boxes.clear();
    CHECK_THROWS_AS(qe_scan(E, bad), std::invalid_argument);
    bad = cfg;
    bad.boxes[1].label = "A";
    CHECK_THROWS_AS(qe_scan(E, bad), std::invalid_argument);
    bad = cfg;
    bad.boxes[1].label = "B,C";
    CHECK_THROWS_AS(qe_scan(E, bad), std::invalid_argument);
    bad = cfg;
    bad.boxes[1].x_hi += 3.0;  // fails the embedding certificate
    CHECK_THROWS_AS(qe_scan(E, bad), std::invalid_argument);
    bad = cfg;
    bad.quad_order = 1;
    CHECK_THROWS_AS(qe_scan(E, bad), std::invalid_argument);
  }

  SUBCASE("a failing row is logged and skipped") {
    ScanConfig strict = cfg;
    strict.t_grid = {10.0, 10.0, 1.0};
    strict.tol = 1e-300;
    ScanResult dropped = qe_scan(E, strict);
    CHECK(dropped.rows.empty());
    CHECK(dropped.log.size() == 2);
    CHECK(std::count(dropped.csv.begin(), dropped.csv.end(), '\n') == 1);
  }
}

TEST_CASE("growth scans along the critical line and the edge") {
  QuadField F = make_field(-5, true);
  ClassGroup G = compute_class_group(F);
  LSeriesContext ctx(G);

  SUBCASE("subconvexity table") {
    BoundsResult res = bounds_scan(ctx, BoundKind::subconvexity, 5.0, 20.0, 5.0);
    REQUIRE(res.rows.size() == 8);  // 4 grid points, 2 characters
    CHECK(res.log.empty());
    CHECK(res.csv.rfind("t,chi,value,reference\n", 0) == 0);
    for (const BoundsRow& row : res.rows) {
      CHECK(std::isfinite(row.value));
      CHECK(row.value >= 0.0);
      CHECK(row.reference == doctest::Approx(std::pow(row.t, 1.0 / 6.0)).epsilon(1e-15));
    }
    CHECK(std::isfinite(res.fitted_exponent));
    CHECK(std::fabs(res.fitted_exponent) < 1.0);  // coarse grid, fluctuation-dominated
  }

  SUBCASE("no zeros on the edge") {
    BoundsResult res = bounds_scan(ctx, BoundKind::inv_L, 5.0, 15.0, 5.0);
    CHECK(res.rows.size() == 6);
    for (const BoundsRow& row : res.rows) {
      CHECK(std::isfinite(row.value));
      CHECK(row.value > 0.0);
      CHECK(row.reference > 1.0);
    }
  }

  SUBCASE("logarithmic derivative stays bounded") {
    BoundsResult res = bounds_scan(ctx, BoundKind::logderiv_L, 5.0, 15.0, 5.0);
    CHECK(res.rows.size() == 6);
    for (const BoundsRow& row : res.rows) CHECK(std::isfinite(row.value));
  }

  SUBCASE("grid validation") {
    CHECK_THROWS_AS(bounds_scan(ctx, BoundKind::inv_L, -1.0, 5.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(bounds_scan(ctx, BoundKind::inv_L, 5.0, 4.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(bounds_scan(ctx, BoundKind::inv_L, 1.0, 5.0, 0.0),
                    std::invalid_argument);
  }
}

}  // TEST_SUITE
