#pragma once

// Numerical experiments on the equidistribution of Eisenstein mass.  A box
// is an axis-aligned region of upper half-space; after certifying that it
// embeds into the quotient, the module integrates |E(v, 1 + it)|^2 against
// the hyperbolic volume with tensor Gauss-Legendre rules and compares the
// masses of competing boxes across a grid of spectral parameters t.  A
// companion scan tabulates critical-line and edge-of-strip L-values against
// the classical bound shapes.  Everything here reports measurements; no
// limit theorem is asserted.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bqe/class_group.hpp"
#include "bqe/eisenstein.hpp"
#include "bqe/l_functions.hpp"
#include "bqe/number_field.hpp"

namespace bqe {

// Closed box [x_lo, x_hi] x [y_lo, y_hi] x [r_lo, r_hi] in the coordinates
// of HPoint: z = x + iy, height r.  Requires positive extent in every
// direction and r_lo > 0.
struct BoxRegion {
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
  double r_lo = 0.0, r_hi = 0.0;
  std::string label;
};

// Hyperbolic volume (dx dy dr / r^3), in closed form:
// (x_hi - x_lo)(y_hi - y_lo)(r_lo^{-2} - r_hi^{-2})/2.  Throws
// std::invalid_argument for a degenerate or inverted box.
double box_volume(const BoxRegion& box);

// Outcome of the embedding check for a box.  When certified is false,
// witnesses holds group elements that were not excluded: translations that
// genuinely map the open box onto itself shifted, or determinant-one
// matrices with c != 0 whose height interval could not be separated from
// the box.  The test is conservative -- a certificate is always correct,
// a rejection may be.
struct InjectivityCertificate {
  bool certified = false;
  std::vector<Matrix2F> witnesses;
};

// Decides whether the open box meets any of its translates under the group
// of the field.  Translations by the full integer lattice are tested
// exactly.  For motions with lower-left entry c != 0 the height bound
// r(gv) <= 1/(|c|^2 r) limits candidates to |c| <= 1/r_lo; each unimodular
// bottom row (c, d) in range is screened by interval arithmetic on
// |cz + d|^2 + |c|^2 r^2 over the box, and any candidate whose image
// heights overlap [r_lo, r_hi] is reported as a witness (completed to a
// determinant-one matrix).  Boxes with r_lo >= 1 and base diameter below
// the lattice minimum are certified outright.
InjectivityCertificate injectivity_certificate(const QuadField& F,
                                               const BoxRegion& box);

// One box mass mu_t(box) = int_box |E(v, 1 + it)|^2 dV with its quadrature
// diagnostics.  est_err combines the last refinement difference with the
// series truncation bound; evaluations counts integrand calls.
struct MuResult {
  double value = 0.0;
  double est_err = 0.0;
  int order = 0;
  long evaluations = 0;
};

// Integrates |fs.eval|^2 / r^3 over the box with a tensor Gauss-Legendre
// rule, the radial direction in log r.  Base orders honour a density of at
// least six nodes per oscillation: planar frequency from the largest
// retained mode of fs, radial frequency t/(2 pi) per unit log r.  All
// three orders are then raised by eight until two successive values agree
// to rel_tol; the cap at order 96 per direction throws std::runtime_error.
// fs must be a chart-1 expansion at s = 1 + it with its kernel table
// covering [r_lo, r_hi]; the box is assumed certified.
MuResult mu_measure(const FourierEval& fs, const BoxRegion& box,
                    int quad_order, double rel_tol);

// Convenience wrapper: builds the expansion for cusp j at s = 1 + it,
// tabulates the kernel over the box heights, and integrates as above.
MuResult mu_measure(const EisensteinContext& E, const BoxRegion& box,
                    double t, int j, int quad_order, double rel_tol = 1e-5);

// Scan configuration.  Boxes are integrated in the order given; ratios in
// the output are against the first box.  seed is echoed for provenance
// only -- the scan itself is deterministic.  out, when nonempty, receives
// the CSV verbatim.
struct TGridSpec {
  double t_min = 0.0, t_max = 0.0, t_step = 0.0;
};

struct ScanConfig {
  long d = -5;
  int cusp_j = 1;
  TGridSpec t_grid;
  std::vector<BoxRegion> boxes;
  int quad_order = 12;
  double tol = 1e-5;
  std::uint64_t seed = 0;
  std::string out;
};

// One CSV row.  ratio_to_first and rel_dev are NaN unless both masses
// exceed ten times their error estimates (ratio_valid); vol ratios are
// exact and always present.  rel_dev = |ratio_to_first/vol_ratio - 1|.
struct ScanRow {
  double t = 0.0;
  std::string box_label;
  double mu = 0.0;
  double vol = 0.0;
  double ratio_to_first = 0.0;
  double vol_ratio_to_first = 0.0;
  double rel_dev = 0.0;
  double est_err = 0.0;
  bool ratio_valid = false;
};

// Full scan outcome.  csv is the exact emitted text: header
// t,box_label,mu,vol,ratio_to_first,vol_ratio_to_first,rel_dev,est_err
// then one line per row, twelve significant digits, LF endings.
// fitted_slope is the least-squares slope of mu/vol against log t for the
// first box; theory_constant is (2 pi)^2 N(m_j)^{-2} / (|d_F| zeta_F(2)),
// the predicted coefficient, printed for comparison and never enforced.
// log collects the rows dropped by quadrature failures.
struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<std::string> log;
  double fitted_slope = 0.0;
  double theory_constant = 0.0;
  std::string csv;
};

// Runs the scan: validates the grid and every box (volume and injectivity;
// violations throw std::invalid_argument), then for each t builds one
// expansion shared by all boxes and integrates them.  A quadrature failure
// drops that row, is recorded in log, and the scan continues.
ScanResult qe_scan(const EisensteinContext& E, const ScanConfig& cfg);

// Self-contained overload: constructs the field tower for cfg.d first.
ScanResult qe_scan(const ScanConfig& cfg);

// L-value growth scans.  subconvexity tabulates |L(1/2 + it, chi)| against
// t^{1/6}; inv_L tabulates 1/|L(1 + it, chi)| and logderiv_L the modulus of
// the logarithmic derivative at 1 + it, both against the bound shape
// (log t)^{2/3} (log log t)^{1/3}.  Values are finite on the grid or the
// point is dropped into log.
enum class BoundKind { subconvexity, inv_L, logderiv_L };

struct BoundsRow {
  double t = 0.0;
  int chi_index = 0;
  double value = 0.0;
  double reference = 0.0;
};

// csv: header t,chi,value,reference then one line per (t, character),
// twelve significant digits, LF endings.  fitted_exponent is the
// least-squares slope of log max_chi(value) against log t -- a measured
// growth rate, reported without any claim about the true order.
struct BoundsResult {
  std::vector<BoundsRow> rows;
  std::vector<std::string> log;
  double fitted_exponent = 0.0;
  std::string csv;
};

BoundsResult bounds_scan(const LSeriesContext& ctx, BoundKind kind,
                         double t_min, double t_max, double t_step);

}  // namespace bqe
