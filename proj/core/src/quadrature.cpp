#include "edm/quadrature.hpp"

#include <cmath>

namespace edm {

namespace {

struct Simpson {
  const std::function<double(double)>& f;

  double eval(double x) const {
    const double y = f(x);
    if (!std::isfinite(y)) throw QuadratureError("integrand is not finite");
    return y;
  }

  // Richardson-corrected recursion; tol is absolute for the subinterval.
  double recurse(double a, double fa, double b, double fb, double m, double fm, double whole,
                 double tol, int depth) const {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw QuadratureError("adaptive Simpson did not converge");
    return recurse(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           recurse(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, tol, max_depth);
  const Simpson s{f};
  // Split into a few panels first so smooth-but-symmetric integrands cannot
  // fool the first error estimate.
  constexpr int panels = 4;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    const double hi = k + 1 == panels ? b : lo + h;
    const double mid = 0.5 * (lo + hi);
    const double flo = s.eval(lo);
    const double fhi = s.eval(hi);
    const double fmid = s.eval(mid);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += s.recurse(lo, flo, hi, fhi, mid, fmid, whole, tol / panels, max_depth);
  }
  return total;
}

}  // namespace edm
