#pragma once

#include <cmath>
#include <utility>

namespace qmetro {

struct ScalarMinimum {
  double argument;
  double value;
};

/// Minimizes a smooth scalar function on [lo, hi] by a coarse grid scan
/// followed by golden-section refinement of the bracketing interval.
/// Deterministic. On grid ties the upper candidate wins when prefer_upper
/// is set (used to break ties toward the equatorial probe). Results within
/// tol of an endpoint snap to the endpoint exactly.
template <class F>
ScalarMinimum minimize_scalar(F&& f, double lo, double hi, int grid_points,
                              double tol, bool prefer_upper = false) {
  const int n = grid_points;
  int best = 0;
  double best_val = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double x = lo + (hi - lo) * double(i) / double(n);
    const double v = f(x);
    if (v < best_val || (prefer_upper && v <= best_val)) {
      best = i;
      best_val = v;
    }
  }
  double a = lo + (hi - lo) * double(best > 0 ? best - 1 : 0) / double(n);
  double b = lo + (hi - lo) * double(best < n ? best + 1 : n) / double(n);

  constexpr double inv_gr = 0.6180339887498949;  // 1/golden ratio
  double c = b - (b - a) * inv_gr;
  double d = a + (b - a) * inv_gr;
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_gr;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_gr;
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b);
  if (hi - x < tol) x = hi;
  if (x - lo < tol) x = lo;
  return {x, f(x)};
}

}  // namespace qmetro
