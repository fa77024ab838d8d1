#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace riskmech {

enum class DistKind {
    Uniform,
    PointMass,
    Discrete,
    EqualRevenueBounded,    // F(v) = 1 - 1/v on [1,H), atom of mass 1/H at H
    EqualRevenueUnbounded,  // F(v) = 1 - 1/v on [1,inf)
    TabulatedCdf,           // piecewise-linear CDF between knots
};

struct Expectation {
    double value = 0.0;
    bool infinite = false;
};

// A one-dimensional value law on [0, inf). Immutable after construction; all
// operations are pure.
class ValueDistribution {
public:
    static ValueDistribution uniform(double a, double b);
    static ValueDistribution point_mass(double v);
    static ValueDistribution discrete(std::vector<double> values,
                                      std::vector<double> probabilities);
    static ValueDistribution equal_revenue_bounded(double H);
    static ValueDistribution equal_revenue_unbounded();
    static ValueDistribution tabulated_cdf(std::vector<double> v,
                                           std::vector<double> F);

    DistKind kind() const { return kind_; }

    // Right-continuous CDF, F(v) = P[V <= v].
    double cdf(double v) const;
    // Left limit, F(v-) = P[V < v].
    double cdf_left(double v) const;
    // P[V >= v], atoms at v included.
    double prob_geq(double v) const { return 1.0 - cdf_left(v); }

    // CDF of the absolutely continuous part: F(v) minus the atoms at or
    // below v. Pass +inf for the total continuous mass.
    double cdf_continuous(double v) const;

    Expectation expectation() const;

    // E[min(V, cap)] = integral of 1 - F over [0, cap]. Exact closed forms.
    double expected_min(double cap) const;

    struct Posted {
        double price = 0.0;
        double revenue = 0.0;
    };
    // Revenue-maximizing posted price max_p p * P[V >= p]; ties broken toward
    // the smallest maximizing price.
    Posted myerson() const;

    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }  // +inf for unbounded kinds
    bool bounded() const { return std::isfinite(hi_); }
    double quantile(double q) const;

    // Atoms of the law as (value, mass) pairs.
    const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }
    bool is_discrete() const {
        return kind_ == DistKind::PointMass || kind_ == DistKind::Discrete;
    }

    // Density of the absolutely continuous part (0 for purely atomic laws).
    double density(double v) const;

    // Breakpoints of the CDF definition, for quadrature knot forcing.
    std::vector<double> knots() const;

    double param_a() const { return a_; }
    double param_b() const { return b_; }
    double param_H() const { return b_; }
    const std::vector<double>& grid_v() const { return vs_; }
    const std::vector<double>& grid_F() const { return Fs_; }

    std::string describe() const;

private:
    ValueDistribution() = default;

    DistKind kind_ = DistKind::PointMass;
    double a_ = 0.0, b_ = 0.0;  // uniform bounds / point value / H
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> vs_, Fs_;  // tabulated CDF
    std::vector<std::pair<double, double>> atoms_;
};

}  // namespace riskmech
