#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gplab {

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-10) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Composite Simpson over tabulated values on a uniform grid; an odd tail is
// closed with one Simpson 3/8 panel.
template <class T>
double simpson_table(const std::vector<T>& y, double h) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * double(y[0] + y[1]);
  std::size_t last = n - 1;
  double tail = 0.0;
  if (last % 2 != 0) {
    if (last >= 3) {
      tail = 3.0 * h / 8.0 *
             double(y[n - 4] + 3.0 * y[n - 3] + 3.0 * y[n - 2] + y[n - 1]);
      last = n - 4;
    } else {  // three points left after the tail is impossible; trapezoid
      tail = 0.5 * h * double(y[n - 2] + y[n - 1]);
      last = n - 2;
    }
  }
  double s = double(y[0]) + double(y[last]);
  for (std::size_t i = 1; i < last; i += 2) s += 4.0 * double(y[i]);
  for (std::size_t i = 2; i < last; i += 2) s += 2.0 * double(y[i]);
  return h / 3.0 * s + tail;
}

}  // namespace gplab
