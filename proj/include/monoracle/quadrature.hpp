#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

namespace monoracle::quad {

namespace detail {

template <typename F>
double simpson_step(F&& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth)
{
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace detail

//! Adaptive Simpson quadrature with absolute tolerance.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48)
{
  if (a == b)
    return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> kGl8Nodes = {
  -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
  0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363
};
inline constexpr std::array<double, 8> kGl8Weights = {
  0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
  0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763
};

template <typename F>
double gauss8(F&& f, double a, double b)
{
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t i = 0; i < kGl8Nodes.size(); ++i)
    acc += kGl8Weights[i] * f(mid + half * kGl8Nodes[i]);
  return acc * half;
}

//! Composite 8-point Gauss-Legendre with panels no longer than `max_panel`.
template <typename F>
double composite_gauss8(F&& f, double a, double b, double max_panel)
{
  if (a == b)
    return 0.0;
  const std::size_t panels =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((b - a) / max_panel)));
  const double step = (b - a) / static_cast<double>(panels);
  double acc = 0.0;
  for (std::size_t p = 0; p < panels; ++p)
    acc += gauss8(f, a + step * static_cast<double>(p), a + step * static_cast<double>(p + 1));
  return acc;
}

} // namespace monoracle::quad
