#include "riskmech/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskmech/errors.hpp"
#include "riskmech/numerics.hpp"

namespace riskmech {

namespace {

void require_unit_interval(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error(std::string(what) + " must lie in [0,1]");
    }
}

// Max of y(x)(1-x) over a linear segment y = y0 + s*(x - x0), x in [a, b].
WeightingFunction::Beta segment_rectangle_max(double x0, double y0, double s,
                                              double a, double b) {
    // g(x) = (y0 + s(x-x0))(1-x) is concave quadratic in x.
    auto g = [&](double x) { return (y0 + s * (x - x0)) * (1.0 - x); };
    WeightingFunction::Beta best{g(a), a};
    if (g(b) > best.beta) best = {g(b), b};
    if (s > 0.0) {
        // Vertex of -(s)x^2 + ... : g'(x) = s(1-x) - (y0 + s(x-x0)).
        const double xv = (s * (1.0 + x0) - y0) / (2.0 * s);
        if (xv > a && xv < b && g(xv) > best.beta) best = {g(xv), xv};
    }
    return best;
}

}  // namespace

WeightingFunction WeightingFunction::identity() {
    WeightingFunction y;
    y.kind_ = WeightKind::Identity;
    return y;
}

WeightingFunction WeightingFunction::power(double k) {
    if (!(k >= 1.0) || !std::isfinite(k)) {
        throw std::invalid_argument("power weighting requires k >= 1 for convexity");
    }
    WeightingFunction y;
    y.kind_ = WeightKind::Power;
    y.k_ = k;
    return y;
}

WeightingFunction WeightingFunction::piecewise_linear_quadratic(double eps) {
    require_unit_interval(eps, "w_eps parameter");
    WeightingFunction y;
    y.kind_ = WeightKind::PiecewiseLinearQuadratic;
    y.eps_ = eps;
    return y;
}

WeightingFunction WeightingFunction::extreme(double eps, double H) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("extreme weighting requires eps in (0,1)");
    }
    if (!(H > 1.0)) {
        throw std::invalid_argument("extreme weighting requires H > 1");
    }
    const double w0 = std::exp2(-H / eps);  // y(1-eps)
    const double slope_low = w0 / (1.0 - eps);
    const double slope_high = (1.0 - w0) / eps;
    if (slope_low > slope_high + 1e-15) {
        throw std::invalid_argument("extreme weighting parameters give a non-convex curve");
    }
    WeightingFunction y;
    y.kind_ = WeightKind::Extreme;
    y.eps_ = eps;
    y.H_ = H;
    y.extreme_w0_ = w0;
    return y;
}

WeightingFunction WeightingFunction::tabulated(std::vector<double> x,
                                               std::vector<double> yv) {
    if (x.size() != yv.size() || x.size() < 2) {
        throw std::invalid_argument("tabulated weighting needs matching arrays of size >= 2");
    }
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (!(x[i + 1] > x[i])) {
            throw std::invalid_argument("tabulated weighting grid must be strictly increasing");
        }
    }
    if (std::abs(x.front()) > 1e-12 || std::abs(x.back() - 1.0) > 1e-12 ||
        std::abs(yv.front()) > 1e-12 || std::abs(yv.back() - 1.0) > 1e-12) {
        throw std::invalid_argument("tabulated weighting must run from (0,0) to (1,1)");
    }
    x.front() = 0.0;
    x.back() = 1.0;
    yv.front() = 0.0;
    yv.back() = 1.0;
    double prev_slope = -1.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (yv[i + 1] < yv[i] - 1e-14) {
            throw std::invalid_argument("tabulated weighting must be nondecreasing");
        }
        const double slope = (yv[i + 1] - yv[i]) / (x[i + 1] - x[i]);
        if (slope < prev_slope - 1e-10) {
            throw std::invalid_argument("tabulated weighting must be convex (nondecreasing slopes)");
        }
        prev_slope = std::max(prev_slope, slope);
    }
    WeightingFunction y;
    y.kind_ = WeightKind::Tabulated;
    y.xs_ = std::move(x);
    y.ys_ = std::move(yv);
    return y;
}

double WeightingFunction::operator()(double x) const {
    require_unit_interval(x, "weighting argument");
    switch (kind_) {
        case WeightKind::Identity:
            return x;
        case WeightKind::Power:
            return std::pow(x, k_);
        case WeightKind::PiecewiseLinearQuadratic:
            return x <= eps_ ? x * x : (1.0 + eps_) * x - eps_;
        case WeightKind::Extreme: {
            const double knee = 1.0 - eps_;
            if (x <= knee) return extreme_w0_ * (x / knee);
            return extreme_w0_ + (1.0 - extreme_w0_) * (x - knee) / eps_;
        }
        case WeightKind::Tabulated: {
            const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            if (it == xs_.begin()) return ys_.front();
            if (it == xs_.end()) return ys_.back();
            const std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
            const std::size_t lo = hi - 1;
            const double t = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
            return ys_[lo] + t * (ys_[hi] - ys_[lo]);
        }
    }
    return x;
}

double WeightingFunction::inverse(double w) const {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw std::domain_error("weight outside the range of a weighting function");
    }
    switch (kind_) {
        case WeightKind::Identity:
            return w;
        case WeightKind::Power:
            return std::pow(w, 1.0 / k_);
        case WeightKind::PiecewiseLinearQuadratic:
            if (eps_ == 0.0) return w;
            if (w <= eps_ * eps_) return std::sqrt(w);
            return (w + eps_) / (1.0 + eps_);
        case WeightKind::Extreme: {
            const double knee = 1.0 - eps_;
            if (w <= extreme_w0_) return knee * (w / extreme_w0_);
            return knee + eps_ * (w - extreme_w0_) / (1.0 - extreme_w0_);
        }
        case WeightKind::Tabulated: {
            // Smallest x with y(x) = w; flat segments resolve to their left end.
            const auto it = std::lower_bound(ys_.begin(), ys_.end(), w);
            if (it == ys_.begin()) return xs_.front();
            if (it == ys_.end()) return xs_.back();
            const std::size_t hi = static_cast<std::size_t>(it - ys_.begin());
            const std::size_t lo = hi - 1;
            if (ys_[hi] == ys_[lo]) return xs_[lo];
            const double t = (w - ys_[lo]) / (ys_[hi] - ys_[lo]);
            return xs_[lo] + t * (xs_[hi] - xs_[lo]);
        }
    }
    return w;
}

std::vector<double> WeightingFunction::input_kinks() const {
    switch (kind_) {
        case WeightKind::PiecewiseLinearQuadratic:
            return (eps_ > 0.0 && eps_ < 1.0) ? std::vector<double>{eps_}
                                              : std::vector<double>{};
        case WeightKind::Extreme:
            return {1.0 - eps_};
        case WeightKind::Tabulated: {
            std::vector<double> kinks(xs_.begin() + 1, xs_.end() - 1);
            return kinks;
        }
        default:
            return {};
    }
}

double WeightingFunction::slope_at_zero() const {
    switch (kind_) {
        case WeightKind::Identity:
            return 1.0;
        case WeightKind::Power:
            return k_ == 1.0 ? 1.0 : 0.0;
        case WeightKind::PiecewiseLinearQuadratic:
            return eps_ == 0.0 ? 1.0 : 0.0;
        case WeightKind::Extreme:
            return extreme_w0_ / (1.0 - eps_);
        case WeightKind::Tabulated:
            return (ys_[1] - ys_[0]) / (xs_[1] - xs_[0]);
    }
    return 1.0;
}

double WeightingFunction::flat_zero_until() const {
    if (kind_ != WeightKind::Tabulated) return 0.0;
    double out = 0.0;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        if (ys_[i] == 0.0) out = xs_[i];
        else break;
    }
    return out;
}

WeightingFunction::Beta WeightingFunction::beta_boundedness() const {
    switch (kind_) {
        case WeightKind::Identity: {
            return {0.25, 0.5};
        }
        case WeightKind::Power: {
            // Maximize x^k (1-x): x* = k/(k+1).
            const double x = k_ / (k_ + 1.0);
            return {std::pow(x, k_) * (1.0 - x), x};
        }
        case WeightKind::PiecewiseLinearQuadratic: {
            Beta best{0.0, 0.0};
            // Quadratic piece x^2(1-x) on [0, eps]: vertex at 2/3.
            auto gq = [](double x) { return x * x * (1.0 - x); };
            best = {gq(std::min(eps_, 2.0 / 3.0)), std::min(eps_, 2.0 / 3.0)};
            if (eps_ < 1.0) {
                const Beta lin = segment_rectangle_max(
                    eps_, eps_ * eps_, 1.0 + eps_, eps_, 1.0);
                if (lin.beta > best.beta) best = lin;
            }
            return best;
        }
        case WeightKind::Extreme: {
            const double knee = 1.0 - eps_;
            Beta best = segment_rectangle_max(0.0, 0.0, extreme_w0_ / knee, 0.0, knee);
            const Beta hi = segment_rectangle_max(
                knee, extreme_w0_, (1.0 - extreme_w0_) / eps_, knee, 1.0);
            if (hi.beta > best.beta) best = hi;
            return best;
        }
        case WeightKind::Tabulated: {
            Beta best{0.0, 0.0};
            for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
                const double s = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
                const Beta piece =
                    segment_rectangle_max(xs_[i], ys_[i], s, xs_[i], xs_[i + 1]);
                if (piece.beta > best.beta) best = piece;
            }
            return best;
        }
    }
    return {0.0, 0.0};
}

WeightingFunction::ShapeReport WeightingFunction::validate_shape(int grid) const {
    ShapeReport report;
    const auto xs = num::linspace(0.0, 1.0, grid);
    report.endpoint_error =
        std::max(std::abs((*this)(0.0)), std::abs((*this)(1.0) - 1.0));
    double prev = (*this)(0.0);
    std::vector<double> vals(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        vals[i] = (*this)(xs[i]);
        report.above_diagonal = std::max(report.above_diagonal, vals[i] - xs[i]);
        if (i > 0) {
            report.monotone_violation =
                std::max(report.monotone_violation, prev - vals[i]);
        }
        prev = vals[i];
    }
    // Midpoint convexity on all grid pairs symmetric about their midpoint.
    for (std::size_t gap = 2; gap < xs.size(); gap *= 2) {
        for (std::size_t i = 0; i + gap < xs.size(); ++i) {
            const std::size_t j = i + gap;
            const std::size_t m = i + gap / 2;
            report.convexity_violation = std::max(
                report.convexity_violation, vals[m] - 0.5 * (vals[i] + vals[j]));
        }
    }
    return report;
}

std::string WeightingFunction::describe() const {
    switch (kind_) {
        case WeightKind::Identity:
            return "identity";
        case WeightKind::Power:
            return "power(" + std::to_string(k_) + ")";
        case WeightKind::PiecewiseLinearQuadratic:
            return "w_eps(" + std::to_string(eps_) + ")";
        case WeightKind::Extreme:
            return "extreme(" + std::to_string(eps_) + "," + std::to_string(H_) + ")";
        case WeightKind::Tabulated:
            return "tabulated[" + std::to_string(xs_.size()) + "]";
    }
    return "?";
}

WeightingFamily w_eps_family(const std::vector<double>& eps_grid) {
    WeightingFamily family;
    family.parameters = eps_grid;
    family.members.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        family.members.push_back(WeightingFunction::piecewise_linear_quadratic(eps));
    }
    return family;
}

FamilyCheck family_is_non_crossing(const WeightingFamily& family, int grid) {
    const auto xs = num::linspace(0.0, 1.0, grid);
    const std::size_t n = family.members.size();
    if (n < 2) {
        throw PreconditionError("family checks need at least two members");
    }
    std::vector<std::vector<double>> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        vals[i].resize(xs.size());
        for (std::size_t g = 0; g < xs.size(); ++g) vals[i][g] = family.members[i](xs[g]);
    }
    constexpr double kTol = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            bool i_ge = true, j_ge = true;
            std::size_t witness = 0;
            for (std::size_t g = 0; g < xs.size(); ++g) {
                const double d = vals[i][g] - vals[j][g];
                if (d < -kTol) {
                    if (i_ge) witness = g;
                    i_ge = false;
                }
                if (d > kTol) {
                    if (j_ge) witness = g;
                    j_ge = false;
                }
                if (!i_ge && !j_ge) {
                    return {false, i, j, xs[witness]};
                }
            }
        }
    }
    return {};
}

FamilyCheck family_is_monotone(const WeightingFamily& family, int grid) {
    const FamilyCheck crossing = family_is_non_crossing(family, grid);
    if (!crossing.ok) {
        throw PreconditionError("family_is_monotone requires a non-crossing family");
    }
    const auto xs = num::linspace(0.0, 1.0, grid);
    const std::size_t n = family.members.size();
    constexpr double kDenFloor = 1e-14;
    constexpr double kTol = 1e-12;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            // Orient the pair by pointwise dominance over the whole grid
            // (non-crossing guarantees one direction holds).
            double max_b_minus_a = 0.0;
            for (std::size_t g = 0; g < xs.size(); ++g) {
                max_b_minus_a = std::max(
                    max_b_minus_a, family.members[b](xs[g]) - family.members[a](xs[g]));
            }
            const std::size_t upper_ix = max_b_minus_a > kTol ? b : a;
            const std::size_t lower_ix = upper_ix == b ? a : b;
            const WeightingFunction& upper_fn = family.members[upper_ix];
            const WeightingFunction& lower_fn = family.members[lower_ix];
            double prev_ratio = -1.0;
            for (std::size_t g = 0; g < xs.size(); ++g) {
                const double upper = upper_fn(xs[g]);
                if (upper <= kDenFloor) continue;
                const double ratio = lower_fn(xs[g]) / upper;
                if (ratio < prev_ratio - kTol) {
                    return {false, upper_ix, lower_ix, xs[g]};
                }
                prev_ratio = std::max(prev_ratio, ratio);
            }
        }
    }
    return {};
}

}  // namespace riskmech
