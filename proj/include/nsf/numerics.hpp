#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "nsf/errors.hpp"

namespace nsf {

// Fixed binary-tree summation order.
double pairwise_sum(std::span<const double> v);

// Solves a tridiagonal system; lower[0] and upper[n-1] are ignored.
// Returns false on a vanishing pivot.
bool solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<const double> rhs,
                       std::span<double> x);

// Root of an increasing function on a positive bracket [lo, hi].
// fdf(x) returns {f(x), f'(x)}. Newton steps are taken when they stay inside the
// current bracket, otherwise the bracket is bisected geometrically.
template <class F>
double increasing_root(F&& fdf, double lo, double hi, double seed, const char* what,
                       double rtol = 4e-16, int max_iter = 300) {
  auto [flo, dlo] = fdf(lo);
  auto [fhi, dhi] = fdf(hi);
  (void)dlo;
  (void)dhi;
  if (!(flo <= 0.0) || !(fhi >= 0.0)) {
    throw BracketError(fmt::format("{}: root not bracketed in [{:.3g}, {:.3g}] (f = {:.3g}, {:.3g})",
                                   what, lo, hi, flo, fhi),
                       lo, hi);
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  double x = (seed > lo && seed < hi) ? seed : std::sqrt(lo * hi);
  for (int it = 0; it < max_iter; ++it) {
    auto [f, df] = fdf(x);
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    double xn = x - f / df;
    if (!(df > 0.0) || !(xn > lo && xn < hi)) xn = std::sqrt(lo * hi);
    if (std::abs(xn - x) <= rtol * x || hi - lo <= rtol * lo) return xn;
    x = xn;
  }
  return x;
}

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

}  // namespace nsf
