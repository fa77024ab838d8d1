#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace riskmech {

enum class WeightKind {
    Identity,
    Power,                    // x^k, k >= 1
    PiecewiseLinearQuadratic, // x^2 below eps, (1+eps)x - eps above
    Extreme,                  // near-flat ramp up to 1-eps, then linear to 1
    Tabulated,                // monotone piecewise-linear interpolation
};

// A convex probability weighting function y: [0,1] -> [0,1] with y(0) = 0 and
// y(1) = 1. Instances are immutable; all member functions are const and safe
// to call concurrently.
class WeightingFunction {
public:
    static WeightingFunction identity();
    static WeightingFunction power(double k);
    static WeightingFunction piecewise_linear_quadratic(double eps);
    static WeightingFunction extreme(double eps, double H);
    static WeightingFunction tabulated(std::vector<double> x, std::vector<double> y);

    // Evaluation; throws std::domain_error for x outside [0,1].
    double operator()(double x) const;

    // Smallest x with y(x) = w (exact piecewise inverse, |y(x)-w| <= 1e-12).
    // Throws std::domain_error if w is outside [0,1].
    double inverse(double w) const;

    WeightKind kind() const { return kind_; }
    double param_eps() const { return eps_; }
    double param_k() const { return k_; }
    double param_H() const { return H_; }
    const std::vector<double>& grid_x() const { return xs_; }
    const std::vector<double>& grid_y() const { return ys_; }

    // Interior points of [0,1] where y changes definition (used as forced
    // quadrature knots after mapping through a CDF).
    std::vector<double> input_kinks() const;

    // Right derivative at 0. Decides integrability of y(1/z) tails.
    double slope_at_zero() const;
    // sup{x : y(x) = 0}; positive only for tabulated curves with a flat start.
    double flat_zero_until() const;

    struct Beta {
        double beta = 0.0;
        double x_star = 0.0;
    };
    // Largest rectangle area y(x)(1-x) under the curve and its location.
    Beta beta_boundedness() const;

    // Grid diagnostics for the shape invariants (monotone, midpoint-convex,
    // y(x) <= x). Returns the worst violation magnitude observed.
    struct ShapeReport {
        double monotone_violation = 0.0;
        double convexity_violation = 0.0;
        double above_diagonal = 0.0;
        double endpoint_error = 0.0;
    };
    ShapeReport validate_shape(int grid = 1 << 14) const;

    std::string describe() const;

    bool operator==(const WeightingFunction& other) const = default;

private:
    WeightingFunction() = default;

    WeightKind kind_ = WeightKind::Identity;
    double eps_ = 0.0;
    double k_ = 1.0;
    double H_ = 0.0;
    double extreme_w0_ = 0.0;  // y(1-eps) for the extreme kind
    std::vector<double> xs_, ys_;
};

// An ordered collection of weighting functions with optional parameterization
// metadata (e.g. the eps grid of the w_eps family).
struct WeightingFamily {
    std::vector<WeightingFunction> members;
    std::vector<double> parameters;  // optional, parallel to members
};

// Builds {w_eps : eps in eps_grid}.
WeightingFamily w_eps_family(const std::vector<double>& eps_grid);

struct FamilyCheck {
    bool ok = true;
    // Witness on failure: member indices and the probability where the
    // property fails.
    std::size_t i = 0;
    std::size_t j = 0;
    double x = 0.0;
};

// True iff every pair of members is pointwise ordered on the grid.
FamilyCheck family_is_non_crossing(const WeightingFamily& family, int grid = 1 << 14);

// True iff for every dominated pair y1 >= y2 the ratio y2(x)/y1(x) is
// nondecreasing on the grid (evaluated where y1(x) > 1e-14). Requires a
// non-crossing family.
FamilyCheck family_is_monotone(const WeightingFamily& family, int grid = 1 << 14);

}  // namespace riskmech
