#include "riskmech/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace riskmech {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ValueDistribution ValueDistribution::uniform(double a, double b) {
    if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) {
        throw std::invalid_argument("uniform distribution requires 0 <= a < b < inf");
    }
    ValueDistribution F;
    F.kind_ = DistKind::Uniform;
    F.a_ = a;
    F.b_ = b;
    F.lo_ = a;
    F.hi_ = b;
    return F;
}

ValueDistribution ValueDistribution::point_mass(double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("point mass requires a finite nonnegative value");
    }
    ValueDistribution F;
    F.kind_ = DistKind::PointMass;
    F.a_ = v;
    F.lo_ = v;
    F.hi_ = v;
    F.atoms_ = {{v, 1.0}};
    return F;
}

ValueDistribution ValueDistribution::discrete(std::vector<double> values,
                                              std::vector<double> probabilities) {
    if (values.size() != probabilities.size() || values.empty()) {
        throw std::invalid_argument("discrete distribution needs matching nonempty arrays");
    }
    std::map<double, double> merged;
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw std::invalid_argument("discrete values must be finite and nonnegative");
        }
        if (probabilities[i] < 0.0) {
            throw std::invalid_argument("discrete probabilities must be nonnegative");
        }
        merged[values[i]] += probabilities[i];
        total += probabilities[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("discrete probabilities must sum to 1 within 1e-12");
    }
    ValueDistribution F;
    F.kind_ = DistKind::Discrete;
    F.atoms_.assign(merged.begin(), merged.end());
    F.lo_ = F.atoms_.front().first;
    F.hi_ = F.atoms_.back().first;
    return F;
}

ValueDistribution ValueDistribution::equal_revenue_bounded(double H) {
    if (!(H > 1.0) || !std::isfinite(H)) {
        throw std::invalid_argument("equal-revenue-bounded requires 1 < H < inf");
    }
    ValueDistribution F;
    F.kind_ = DistKind::EqualRevenueBounded;
    F.b_ = H;
    F.lo_ = 1.0;
    F.hi_ = H;
    F.atoms_ = {{H, 1.0 / H}};
    return F;
}

ValueDistribution ValueDistribution::equal_revenue_unbounded() {
    ValueDistribution F;
    F.kind_ = DistKind::EqualRevenueUnbounded;
    F.lo_ = 1.0;
    F.hi_ = kInf;
    return F;
}

ValueDistribution ValueDistribution::tabulated_cdf(std::vector<double> v,
                                                   std::vector<double> F) {
    if (v.size() != F.size() || v.size() < 2) {
        throw std::invalid_argument("tabulated CDF needs matching arrays of size >= 2");
    }
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (!(v[i + 1] >= v[i])) {
            throw std::invalid_argument("tabulated CDF grid must be nondecreasing");
        }
        if (F[i + 1] < F[i] - 1e-14) {
            throw std::invalid_argument("tabulated CDF must be nondecreasing");
        }
    }
    if (!(v.front() >= 0.0)) {
        throw std::invalid_argument("tabulated CDF support must be nonnegative");
    }
    if (std::abs(F.back() - 1.0) > 1e-12 || F.front() < -1e-15) {
        throw std::invalid_argument("tabulated CDF must end at 1");
    }
    F.back() = 1.0;
    ValueDistribution d;
    d.kind_ = DistKind::TabulatedCdf;
    d.vs_ = std::move(v);
    d.Fs_ = std::move(F);
    d.lo_ = d.vs_.front();
    d.hi_ = d.vs_.back();
    // Repeated grid values encode atoms; so does positive mass at the left end.
    if (d.Fs_.front() > 0.0) d.atoms_.emplace_back(d.vs_.front(), d.Fs_.front());
    for (std::size_t i = 0; i + 1 < d.vs_.size(); ++i) {
        if (d.vs_[i + 1] == d.vs_[i] && d.Fs_[i + 1] > d.Fs_[i]) {
            d.atoms_.emplace_back(d.vs_[i], d.Fs_[i + 1] - d.Fs_[i]);
        }
    }
    return d;
}

double ValueDistribution::cdf(double v) const {
    switch (kind_) {
        case DistKind::Uniform:
            if (v < a_) return 0.0;
            if (v >= b_) return 1.0;
            return (v - a_) / (b_ - a_);
        case DistKind::PointMass:
            return v >= a_ ? 1.0 : 0.0;
        case DistKind::Discrete: {
            double acc = 0.0;
            for (const auto& [val, mass] : atoms_) {
                if (val <= v) acc += mass;
            }
            return std::min(acc, 1.0);
        }
        case DistKind::EqualRevenueBounded:
            if (v < 1.0) return 0.0;
            if (v >= b_) return 1.0;
            return 1.0 - 1.0 / v;
        case DistKind::EqualRevenueUnbounded:
            return v < 1.0 ? 0.0 : 1.0 - 1.0 / v;
        case DistKind::TabulatedCdf: {
            if (v < vs_.front()) return 0.0;
            if (v >= vs_.back()) return 1.0;
            auto it = std::upper_bound(vs_.begin(), vs_.end(), v);
            const std::size_t hi = static_cast<std::size_t>(it - vs_.begin());
            const std::size_t lo = hi - 1;
            if (vs_[hi] == vs_[lo]) return Fs_[hi];
            const double t = (v - vs_[lo]) / (vs_[hi] - vs_[lo]);
            return Fs_[lo] + t * (Fs_[hi] - Fs_[lo]);
        }
    }
    return 0.0;
}

double ValueDistribution::cdf_left(double v) const {
    double mass_at_v = 0.0;
    for (const auto& [val, mass] : atoms_) {
        if (val == v) mass_at_v += mass;
    }
    return cdf(v) - mass_at_v;
}

double ValueDistribution::cdf_continuous(double v) const {
    double out = std::isfinite(v) ? cdf(v) : 1.0;
    for (const auto& [val, mass] : atoms_) {
        if (val <= v) out -= mass;
    }
    return out;
}

Expectation ValueDistribution::expectation() const {
    switch (kind_) {
        case DistKind::Uniform:
            return {0.5 * (a_ + b_), false};
        case DistKind::PointMass:
            return {a_, false};
        case DistKind::Discrete: {
            double acc = 0.0;
            for (const auto& [val, mass] : atoms_) acc += val * mass;
            return {acc, false};
        }
        case DistKind::EqualRevenueBounded:
            return {1.0 + std::log(b_), false};
        case DistKind::EqualRevenueUnbounded:
            return {kInf, true};
        case DistKind::TabulatedCdf:
            return {expected_min(hi_), false};
    }
    return {0.0, false};
}

double ValueDistribution::expected_min(double cap) const {
    if (!(cap >= 0.0)) {
        throw std::invalid_argument("expected_min requires cap >= 0");
    }
    switch (kind_) {
        case DistKind::Uniform: {
            if (cap <= a_) return cap;
            const double c = std::min(cap, b_);
            const double w = b_ - a_;
            return a_ + (w * w - (b_ - c) * (b_ - c)) / (2.0 * w);
        }
        case DistKind::PointMass:
            return std::min(cap, a_);
        case DistKind::Discrete: {
            double acc = 0.0;
            for (const auto& [val, mass] : atoms_) acc += std::min(val, cap) * mass;
            return acc;
        }
        case DistKind::EqualRevenueBounded: {
            if (cap <= 1.0) return cap;
            return 1.0 + std::log(std::min(cap, b_));
        }
        case DistKind::EqualRevenueUnbounded:
            return cap <= 1.0 ? cap : 1.0 + std::log(cap);
        case DistKind::TabulatedCdf: {
            // Exact integral of the piecewise-linear survival function.
            double acc = std::min(cap, vs_.front());
            for (std::size_t i = 0; i + 1 < vs_.size() && vs_[i] < cap; ++i) {
                const double seg_hi = std::min(vs_[i + 1], cap);
                if (seg_hi <= vs_[i]) continue;
                const double s_lo = 1.0 - cdf(vs_[i]);
                double s_hi;
                if (seg_hi < vs_[i + 1]) {
                    s_hi = 1.0 - cdf(seg_hi);
                } else {
                    s_hi = 1.0 - Fs_[i + 1];  // survival just below the next knot
                }
                acc += 0.5 * (s_lo + s_hi) * (seg_hi - vs_[i]);
            }
            return acc;
        }
    }
    return 0.0;
}

ValueDistribution::Posted ValueDistribution::myerson() const {
    switch (kind_) {
        case DistKind::Uniform: {
            // Maximize p(b-p)/(b-a) over [a, b]; vertex at b/2.
            const double p = std::max(a_, 0.5 * b_);
            return {p, p * (b_ - p) / (b_ - a_)};
        }
        case DistKind::PointMass:
            return {a_, a_};
        case DistKind::Discrete: {
            Posted best{0.0, 0.0};
            for (const auto& [val, mass] : atoms_) {
                (void)mass;
                const double rev = val * prob_geq(val);
                if (rev > best.revenue + 1e-15) best = {val, rev};
            }
            return best;
        }
        case DistKind::EqualRevenueBounded:
        case DistKind::EqualRevenueUnbounded:
            // p * P[V >= p] = 1 for every p in [1, H]; smallest maximizer.
            return {1.0, 1.0};
        case DistKind::TabulatedCdf: {
            // On each linear CDF piece the revenue p(1 - F(p)) is quadratic;
            // candidates are the knots (atoms included via prob_geq) and the
            // interior vertex of each piece. Ties go to the smallest price.
            std::vector<double> candidates = vs_;
            for (std::size_t i = 0; i + 1 < vs_.size(); ++i) {
                if (vs_[i + 1] <= vs_[i]) continue;
                const double slope = (Fs_[i + 1] - Fs_[i]) / (vs_[i + 1] - vs_[i]);
                if (slope <= 0.0) continue;
                // d/dp [p(1 - F(vs_i) - slope(p - vs_i))] = 0
                const double p = 0.5 * (vs_[i] + (1.0 - Fs_[i]) / slope);
                if (p > vs_[i] && p < vs_[i + 1]) candidates.push_back(p);
            }
            std::sort(candidates.begin(), candidates.end());
            double max_rev = 0.0;
            for (double p : candidates) max_rev = std::max(max_rev, p * prob_geq(p));
            for (double p : candidates) {
                if (p * prob_geq(p) >= max_rev - 1e-15) return {p, p * prob_geq(p)};
            }
            return {0.0, 0.0};
        }
    }
    return {0.0, 0.0};
}

double ValueDistribution::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("quantile requires q in [0,1]");
    }
    switch (kind_) {
        case DistKind::Uniform:
            return a_ + q * (b_ - a_);
        case DistKind::PointMass:
            return a_;
        case DistKind::Discrete: {
            double acc = 0.0;
            for (const auto& [val, mass] : atoms_) {
                acc += mass;
                if (acc >= q) return val;
            }
            return atoms_.back().first;
        }
        case DistKind::EqualRevenueBounded: {
            if (q >= 1.0 - 1.0 / b_) return b_;
            return 1.0 / (1.0 - q);
        }
        case DistKind::EqualRevenueUnbounded:
            if (q >= 1.0) return kInf;
            return std::max(1.0, 1.0 / (1.0 - q));
        case DistKind::TabulatedCdf: {
            auto it = std::lower_bound(Fs_.begin(), Fs_.end(), q);
            if (it == Fs_.begin()) return vs_.front();
            if (it == Fs_.end()) return vs_.back();
            const std::size_t hi = static_cast<std::size_t>(it - Fs_.begin());
            const std::size_t lo = hi - 1;
            if (Fs_[hi] == Fs_[lo]) return vs_[lo];
            const double t = (q - Fs_[lo]) / (Fs_[hi] - Fs_[lo]);
            return vs_[lo] + t * (vs_[hi] - vs_[lo]);
        }
    }
    return 0.0;
}

double ValueDistribution::density(double v) const {
    switch (kind_) {
        case DistKind::Uniform:
            return (v >= a_ && v <= b_) ? 1.0 / (b_ - a_) : 0.0;
        case DistKind::PointMass:
        case DistKind::Discrete:
            return 0.0;
        case DistKind::EqualRevenueBounded:
            return (v >= 1.0 && v < b_) ? 1.0 / (v * v) : 0.0;
        case DistKind::EqualRevenueUnbounded:
            return v >= 1.0 ? 1.0 / (v * v) : 0.0;
        case DistKind::TabulatedCdf: {
            if (v < vs_.front() || v >= vs_.back()) return 0.0;
            auto it = std::upper_bound(vs_.begin(), vs_.end(), v);
            const std::size_t hi = static_cast<std::size_t>(it - vs_.begin());
            const std::size_t lo = hi - 1;
            if (vs_[hi] == vs_[lo]) return 0.0;  // atom, not density
            return (Fs_[hi] - Fs_[lo]) / (vs_[hi] - vs_[lo]);
        }
    }
    return 0.0;
}

std::vector<double> ValueDistribution::knots() const {
    switch (kind_) {
        case DistKind::Uniform:
            return {a_, b_};
        case DistKind::PointMass:
            return {a_};
        case DistKind::Discrete: {
            std::vector<double> out;
            out.reserve(atoms_.size());
            for (const auto& [val, mass] : atoms_) {
                (void)mass;
                out.push_back(val);
            }
            return out;
        }
        case DistKind::EqualRevenueBounded:
            return {1.0, b_};
        case DistKind::EqualRevenueUnbounded:
            return {1.0};
        case DistKind::TabulatedCdf: {
            std::vector<double> out = vs_;
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        }
    }
    return {};
}

std::string ValueDistribution::describe() const {
    switch (kind_) {
        case DistKind::Uniform:
            return "uniform(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
        case DistKind::PointMass:
            return "point-mass(" + std::to_string(a_) + ")";
        case DistKind::Discrete:
            return "discrete[" + std::to_string(atoms_.size()) + "]";
        case DistKind::EqualRevenueBounded:
            return "equal-revenue-bounded(" + std::to_string(b_) + ")";
        case DistKind::EqualRevenueUnbounded:
            return "equal-revenue-unbounded";
        case DistKind::TabulatedCdf:
            return "tabulated-cdf[" + std::to_string(vs_.size()) + "]";
    }
    return "?";
}

}  // namespace riskmech
