#pragma once

// Bracketed root refinement: bisection to shrink the bracket, then
// Illinois-modified regula falsi, which keeps the bracket while converging
// superlinearly on simple roots.

#include <algorithm>
#include <cmath>

namespace boundstate {

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

// Requires g(lo) and g(hi) of opposite sign (or one of them zero). `tol` is
// the absolute bracket width at which refinement stops.
template <typename G>
RootResult refine_root(G&& g, double lo, double hi, double g_lo, double g_hi, double tol,
                       int max_iter = 200) {
  RootResult res;
  if (g_lo == 0.0) {
    return {lo, 0.0, lo, lo, 0};
  }
  if (g_hi == 0.0) {
    return {hi, 0.0, hi, hi, 0};
  }
  const double width0 = hi - lo;
  int it = 0;
  // Bisection phase.
  while (hi - lo > std::max(tol, 1e-3 * width0) && it < max_iter) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    ++it;
    if (gm == 0.0) {
      return {mid, 0.0, mid, mid, it};
    }
    if ((gm < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = gm;
    } else {
      hi = mid;
      g_hi = gm;
    }
  }
  // Illinois phase.
  int side = 0;
  while (hi - lo > tol && it < max_iter) {
    double x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
    if (!(x > lo && x < hi)) {
      x = 0.5 * (lo + hi);
    }
    // Never let the secant iterate crawl: fall back to a midpoint when it
    // lands within tol of an end.
    if (x - lo < 0.5 * tol || hi - x < 0.5 * tol) {
      x = std::clamp(x, lo + 0.5 * tol, hi - 0.5 * tol);
    }
    const double gx = g(x);
    ++it;
    if (gx == 0.0) {
      return {x, 0.0, x, x, it};
    }
    if ((gx < 0.0) == (g_lo < 0.0)) {
      lo = x;
      g_lo = gx;
      if (side == -1) {
        g_hi *= 0.5;
      }
      side = -1;
    } else {
      hi = x;
      g_hi = gx;
      if (side == 1) {
        g_lo *= 0.5;
      }
      side = 1;
    }
  }
  res.lo = lo;
  res.hi = hi;
  res.iterations = it;
  res.root = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
  if (!(res.root >= lo && res.root <= hi)) {
    res.root = 0.5 * (lo + hi);
  }
  res.residual = std::fabs(g(res.root));
  return res;
}

}  // namespace boundstate
