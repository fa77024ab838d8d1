#pragma once

#include <functional>
#include <span>
#include <vector>

namespace riskmech::num {

// Adaptive Simpson integration of f over [a, b]. `knots` are forced interval
// boundaries (breakpoints of piecewise definitions); knots outside (a, b) are
// ignored. The tolerance is absolute and distributed across pieces by length.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-8, std::span<const double> knots = {});

// Smallest x in [lo, hi] with pred(x) true. pred must be monotone
// (false ... false true ... true). Returns hi if pred is false everywhere.
double bisect_first_true(const std::function<bool(double)>& pred, double lo,
                         double hi, double xtol = 1e-13);

// Root of a continuous f with f(lo) and f(hi) of opposite sign.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double xtol = 1e-13);

struct Extremum {
    double x = 0.0;
    double value = 0.0;
};

// Grid scan of f over [lo, hi] followed by golden-section refinement of the
// best bracket. Ties on the grid go to the smallest x. Suitable for
// piecewise-smooth f; `grid` counts scan points (>= 3).
Extremum grid_golden_max(const std::function<double(double)>& f, double lo,
                         double hi, int grid, double xtol = 1e-12);

// Lower convex hull of a function graph sampled at strictly increasing x.
// Returns indices of hull vertices (always includes first and last point).
std::vector<std::size_t> lower_hull_indices(std::span<const double> x,
                                            std::span<const double> y);

// n equally spaced points from lo to hi inclusive (n >= 2).
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace riskmech::num
