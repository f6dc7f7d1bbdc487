#pragma once

#include <algorithm>
#include <cmath>

namespace bdrelay::detail {

// Root of a nonincreasing f(x), where x is a log-price: bracket by doubling
// steps from x0, then Illinois regula falsi. Stops once |f| <= tol or the
// bracket collapses (f may jump across zero). Returns the best x seen; if
// the root is not bracketed inside [-700, 700] returns the end closest to it.
template <class F>
double solve_decreasing_log(F&& f, double x0, double tol) {
  constexpr double kXMin = -700.0;
  constexpr double kXMax = 700.0;
  double x = std::clamp(x0, kXMin, kXMax);
  const double fx = f(x);
  if (std::abs(fx) <= tol) return x;

  double lo = x, flo = fx, hi = x, fhi = fx;
  double step = 0.5;
  if (fx > 0.0) {
    while (fhi > 0.0 && hi < kXMax) {
      lo = hi;
      flo = fhi;
      hi = std::min(hi + step, kXMax);
      fhi = f(hi);
      step = std::min(2.0 * step, 4.0);
    }
  } else {
    while (flo < 0.0 && lo > kXMin) {
      hi = lo;
      fhi = flo;
      lo = std::max(lo - step, kXMin);
      flo = f(lo);
      step = std::min(2.0 * step, 4.0);
    }
  }
  if (flo < 0.0) return lo;
  if (fhi > 0.0) return hi;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;

  double best_x = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double best_f = std::min(std::abs(flo), std::abs(fhi));
  int side = 0;
  for (int it = 0; it < 200 && best_f > tol; ++it) {
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(lo))) break;
    double xm = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(xm > lo && xm < hi)) xm = 0.5 * (lo + hi);
    const double fm = f(xm);
    if (std::abs(fm) < best_f) {
      best_f = std::abs(fm);
      best_x = xm;
    }
    if (fm > 0.0) {
      lo = xm;
      flo = fm;
      if (side == 1) fhi *= 0.5;
      side = 1;
    } else {
      hi = xm;
      fhi = fm;
      if (side == -1) flo *= 0.5;
      side = -1;
    }
  }
  return best_x;
}

}  // namespace bdrelay::detail
