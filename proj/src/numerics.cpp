#include "riskmech/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskmech::num {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa,
                double b, double fb, double m, double fm, double whole,
                double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * tol) {
        return left + right + err / 15.0;
    }
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double integrate_piece(const std::function<double(double)>& f, double a,
                       double b, double tol) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adaptive(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, std::span<const double> knots) {
    if (!(b > a)) return 0.0;
    std::vector<double> pts;
    pts.reserve(knots.size() + 2);
    pts.push_back(a);
    for (double k : knots) {
        if (k > a && k < b) pts.push_back(k);
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const double span = b - a;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double piece_tol = tol * (pts[i + 1] - pts[i]) / span;
        total += integrate_piece(f, pts[i], pts[i + 1], std::max(piece_tol, 1e-300));
    }
    return total;
}

double bisect_first_true(const std::function<bool(double)>& pred, double lo,
                         double hi, double xtol) {
    if (pred(lo)) return lo;
    if (!pred(hi)) return hi;
    while (hi - lo > xtol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // out of floating-point resolution
        if (pred(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double xtol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) {
        throw std::invalid_argument("bisect_root: no sign change on bracket");
    }
    while (hi - lo > xtol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Extremum grid_golden_max(const std::function<double(double)>& f, double lo,
                         double hi, int grid, double xtol) {
    if (grid < 3) grid = 3;
    if (!(hi > lo)) return {lo, f(lo)};
    std::vector<double> xs = linspace(lo, hi, grid);
    std::size_t best = 0;
    double best_val = f(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double v = f(xs[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = xs[best == 0 ? 0 : best - 1];
    double b = xs[best + 1 < xs.size() ? best + 1 : best];
    // Golden-section on the bracketing interval around the best grid point.
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        }
    }
    Extremum out{0.5 * (a + b), f(0.5 * (a + b))};
    if (best_val > out.value) {
        out = {xs[best], best_val};
    }
    return out;
}

std::vector<std::size_t> lower_hull_indices(std::span<const double> x,
                                            std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) throw std::invalid_argument("lower_hull: size mismatch");
    std::vector<std::size_t> hull;
    if (n == 0) return hull;
    for (std::size_t i = 0; i < n; ++i) {
        // Pop while the last two hull points and (x[i], y[i]) make a
        // non-convex (right-to-left) turn.
        while (hull.size() >= 2) {
            const std::size_t j = hull[hull.size() - 1];
            const std::size_t k = hull[hull.size() - 2];
            const double cross = (x[j] - x[k]) * (y[i] - y[k]) -
                                 (y[j] - y[k]) * (x[i] - x[k]);
            if (cross <= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(i);
    }
    return hull;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("linspace: n must be >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    out.back() = hi;
    return out;
}

}  // namespace riskmech::num
