#include "riskmech/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "riskmech/distribution.hpp"
#include "riskmech/errors.hpp"

namespace riskmech {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double w_eps(double x, double eps) {
    if (!(x >= 0.0 && x <= 1.0) || !(eps >= 0.0 && eps <= 1.0)) {
        throw std::domain_error("w_eps requires x, eps in [0,1]");
    }
    return x <= eps ? x * x : (1.0 + eps) * x - eps;
}

double u_eps(double ell, double eps, double n) {
    if (!(ell >= 0.0)) throw std::domain_error("u_eps requires ell >= 0");
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::domain_error("u_eps requires eps in [0,1]");
    if (ell < 1.0) {
        return (1.0 - ell) + u_eps(1.0, eps, n);
    }
    if (ell >= std::exp(std::min(n, 700.0)) && n <= 700.0) return 0.0;
    const double en_inv = n < 745.0 ? std::exp(-n) : 0.0;
    if (eps == 0.0) {
        // Identity weighting: integral of 1/v from ell to e^n.
        return std::max(0.0, n - std::log(ell));
    }
    const double inv = 1.0 / eps;
    if (inv <= ell) {
        // Quadratic branch of w_eps throughout [ell, e^n].
        return std::max(0.0, 1.0 / ell - en_inv);
    }
    if (eps < en_inv || -std::log(eps) >= n) {
        // Linear branch throughout (1/eps beyond the support).
        const double eps_en = std::exp(std::log(eps) + n);  // eps * e^n, stable
        return (1.0 + eps) * (n - std::log(ell)) - (eps_en - eps * ell);
    }
    // Linear branch on [ell, 1/eps], quadratic on [1/eps, e^n].
    return (1.0 + eps) * std::log(inv / ell) - 1.0 + eps * ell + eps - en_inv;
}

double u_eps_zero_log(double t, double n) {
    if (t > 0.0) throw std::domain_error("u_eps_zero_log requires t <= 0");
    const double eps = std::exp(t);
    if (t >= -n) {
        const double en_inv = n < 745.0 ? std::exp(-n) : 0.0;
        return 2.0 * eps - en_inv + (1.0 + eps) * (-t);
    }
    // eps below e^{-n}: linear branch across the whole support.
    return 1.0 + (1.0 + eps) * n - (std::exp(t + n) - eps);
}

double alpha_coefficient(double c) {
    if (!(c > 1.0)) throw std::invalid_argument("approximation factor c must exceed 1");
    return std::exp(1.0 / c - 2.0);
}

namespace {

// The equation's formal solution, which may fall below 1 (infeasible region).
double p_eps_raw_log(double t, double c, double n) {
    const double u0 = u_eps_zero_log(t, n);
    // 1 + E[min(v,p)] = (1/c) E[min(v, U)] with E[min(v,t)] = 1 + ln t (t >= 1).
    const double rhs = (u0 <= 1.0 ? u0 : 1.0 + std::log(u0)) / c;
    return std::exp(rhs - 2.0);
}

}  // namespace

double p_eps_log(double t, double c, double n) {
    if (!(c > 1.0)) throw std::invalid_argument("approximation factor c must exceed 1");
    const double p = p_eps_raw_log(t, c, n);
    if (p < 1.0) {
        throw InfeasibleError("p_eps: the defining equation has no solution with p >= 1");
    }
    return p;
}

double p_eps(double eps, double c, double n) {
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw std::domain_error("p_eps requires eps in (0,1]");
    }
    return p_eps_log(std::log(eps), c, n);
}

double p_eps_bisect(double eps, double c, double n, double tol) {
    const ValueDistribution F1 = ValueDistribution::equal_revenue_unbounded();
    const double u0 = u_eps(0.0, eps, n);
    const double rhs = F1.expected_min(u0) / c;
    // residual(p) = 1 + E[min(v,p)] - rhs, increasing in p.
    auto residual = [&](double p) { return 1.0 + F1.expected_min(p) - rhs; };
    if (residual(1.0) > 0.0) {
        throw InfeasibleError("p_eps: the defining equation has no solution with p >= 1");
    }
    double lo = 1.0, hi = 2.0;
    while (residual(hi) < 0.0) hi *= 2.0;
    while (hi - lo > tol * std::max(1.0, lo)) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double eps_of_p(double p, double c, double n) {
    if (!(c > 1.0)) throw std::invalid_argument("approximation factor c must exceed 1");
    const double t_floor = -(n + 80.0);
    const double p_min = p_eps_raw_log(0.0, c, n);
    const double p_max = p_eps_raw_log(t_floor, c, n);
    if (p < p_min - 1e-12 || p > p_max + 1e-12) {
        throw std::domain_error("eps_of_p: price outside the attained range of p_eps");
    }
    // p_eps is decreasing in eps, so increasing towards small t.
    double lo = t_floor, hi = 0.0;
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (p_eps_raw_log(mid, c, n) >= p) lo = mid;
        else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

namespace {

// Interpolating cache of ln(eps_p) over ln(p); eps is clamped to the attained
// range of p_eps so the ODE right-hand side is defined on the whole horizon.
class EpsOfPCache {
public:
    EpsOfPCache(double c, double n, bool forced) : c_(c), n_(n), forced_(forced) {
        if (forced_) return;
        t_floor_ = -(n + 80.0);
        p_min_ = p_eps_raw_log(0.0, c_, n_);
        p_max_ = p_eps_raw_log(t_floor_, c_, n_);
    }

    double operator()(double p) const {
        if (forced_) return 1.0;
        if (p <= p_min_) return 1.0;
        if (p >= p_max_) return std::exp(t_floor_);
        const double lp = std::log(p);
        const long i = static_cast<long>(std::floor(lp / kStep));
        const double t0 = node(i);
        const double t1 = node(i + 1);
        const double frac = (lp - static_cast<double>(i) * kStep) / kStep;
        return std::exp(t0 + frac * (t1 - t0));
    }

private:
    static constexpr double kStep = 1.0 / 4096.0;

    double node(long i) const {
        auto it = nodes_.find(i);
        if (it != nodes_.end()) return it->second;
        const double p = std::exp(static_cast<double>(i) * kStep);
        double t;
        if (p <= p_min_) {
            t = 0.0;
        } else if (p >= p_max_) {
            t = t_floor_;
        } else {
            // Bisection in t-space (p_eps decreasing in t means increasing
            // towards t_floor).
            double lo = t_floor_, hi = 0.0;
            while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo))) {
                const double mid = 0.5 * (lo + hi);
                if (p_eps_raw_log(mid, c_, n_) >= p) lo = mid;
                else hi = mid;
            }
            t = 0.5 * (lo + hi);
        }
        nodes_.emplace(i, t);
        return t;
    }

    double c_ = 0.0, n_ = 0.0;
    bool forced_ = false;
    double t_floor_ = 0.0, p_min_ = 0.0, p_max_ = 0.0;
    mutable std::map<long, double> nodes_;
};

struct RkStep {
    double y = 0.0;
    bool accepted = false;
    double next_h = 0.0;
};

double rk4(const std::function<double(double, double)>& f, double p, double y,
           double h) {
    const double k1 = f(p, y);
    const double k2 = f(p + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = f(p + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = f(p + h, y + h * k3);
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One adaptive step with step-doubling error control.
RkStep rk4_adaptive(const std::function<double(double, double)>& f, double p,
                    double y, double h, double rtol, double atol) {
    const double full = rk4(f, p, y, h);
    const double half = rk4(f, p + 0.5 * h, rk4(f, p, y, 0.5 * h), 0.5 * h);
    const double err = std::abs(half - full) / 15.0;
    const double tol = rtol * std::abs(half) + atol;
    RkStep out;
    out.y = half + (half - full) / 15.0;
    out.accepted = err <= tol || h <= 1e-14 * std::max(1.0, std::abs(p));
    const double scale = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
    out.next_h = h * std::clamp(scale, 0.2, 4.0);
    return out;
}

}  // namespace

double OdeTrajectory::l_bar_at(double price) const {
    if (p.empty() || price < p.front() || price > p.back()) return kNaN;
    const auto it = std::lower_bound(p.begin(), p.end(), price);
    const std::size_t hi = static_cast<std::size_t>(it - p.begin());
    if (hi == 0) return l_bar.front();
    const std::size_t lo = hi - 1;
    if (p[hi] == p[lo]) return l_bar[hi];
    const double t = (price - p[lo]) / (p[hi] - p[lo]);
    return l_bar[lo] + t * (l_bar[hi] - l_bar[lo]);
}

OdeTrajectory integrate_ode(const LowerBoundConfig& cfg) {
    if (!(cfg.c > 1.0) || !(cfg.n >= 1.0) || !(cfg.max_step > 0.0)) {
        throw std::invalid_argument("integrate_ode: invalid configuration");
    }
    const EpsOfPCache eps_p(cfg.c, cfg.n, cfg.force_quadratic);

    OdeTrajectory traj;
    // p0 evaluates p_eps at eps = e^{-n}, the least risk-averse member that
    // still distinguishes the bounded support.
    traj.p0 = p_eps_raw_log(-cfg.n, cfg.c, cfg.n);
    traj.p_limit = traj.p0 + 1.0;
    if (cfg.force_quadratic) traj.p_limit = std::max(traj.p_limit, 2.5);

    const double N = std::pow(2.0 / alpha_coefficient(cfg.c), cfg.c);
    // Threshold in m-space for the informational 1/eps* crossing flag.
    const double m_star = N < 700.0 ? std::exp(-N) : 0.0;

    // Phase M: integrate m = 1/l from m(1) = e^{-n} while l > 10.
    // dm/dp = m^2 / w_eps(m); in the quadratic branch this is exactly 1.
    auto fm = [&](double p, double m) {
        const double eps = eps_p(p);
        const double mm = std::clamp(m, 0.0, 1.0);
        return mm <= eps ? 1.0 : mm * mm / ((1.0 + eps) * mm - eps);
    };
    // Phase L: direct integration of l for l in [1, 10].
    auto fl = [&](double p, double l) {
        const double eps = eps_p(p);
        const double x = std::clamp(1.0 / std::max(l, 1.0), 0.0, 1.0);
        return -1.0 / w_eps(x, eps);
    };

    double p = 1.0;
    double m = cfg.n < 745.0 ? std::exp(-cfg.n) : 0.0;
    bool phase_m = true;
    double l = m > 0.0 ? 1.0 / m : std::numeric_limits<double>::infinity();

    auto record = [&](double pp, double ll) {
        traj.p.push_back(pp);
        traj.l_bar.push_back(ll);
        traj.eps_p.push_back(eps_p(pp));
        if (!traj.crossed_inv_eps_star && m_star > 0.0 && ll * m_star <= 1.0) {
            traj.crossed_inv_eps_star = pp;
        }
    };
    record(p, l);

    double h = std::min(cfg.max_step, 1e-6);
    const double rtol = 1e-10, atol = 1e-16;
    std::size_t iterations = 0;
    while (p < traj.p_limit) {
        if (++iterations > 50'000'000) {
            throw std::runtime_error("integrate_ode: step control stalled (stiffness)");
        }
        const double h_try = std::min(h, traj.p_limit - p);
        if (phase_m) {
            const RkStep step = rk4_adaptive(fm, p, m, h_try, rtol, atol);
            h = std::min(step.next_h, cfg.max_step);
            if (!step.accepted) continue;
            p += h_try;
            m = step.y;
            l = m > 0.0 ? 1.0 / m : std::numeric_limits<double>::infinity();
            record(p, l);
            if (m >= 0.1) phase_m = false;
        } else {
            const RkStep step = rk4_adaptive(fl, p, l, h_try, rtol, atol);
            h = std::min(step.next_h, cfg.max_step);
            if (!step.accepted) continue;
            if (step.y <= 1.0) {
                // Linear interpolation of the crossing price within the step.
                const double frac = (l - 1.0) / (l - step.y);
                const double p_cross = p + frac * h_try;
                p = p_cross;
                l = 1.0;
                record(p, l);
                traj.crossed_one = p_cross;
                break;
            }
            p += h_try;
            l = step.y;
            record(p, l);
        }
    }
    return traj;
}

ContradictionReport check_contradiction(const LowerBoundConfig& cfg) {
    ContradictionReport report;
    report.c = cfg.c;
    report.n = cfg.n;
    report.alpha_c = alpha_coefficient(cfg.c);
    report.N = std::pow(2.0 / report.alpha_c, cfg.c);
    report.eps_star = std::exp(-report.N);  // may underflow to 0 for large N
    report.p_eps_star = p_eps_raw_log(-report.N, cfg.c, cfg.n);

    const OdeTrajectory traj = integrate_ode(cfg);
    report.p0 = traj.p0;
    report.l_bar_at_2 = traj.l_bar_at(2.0);
    report.p_cross_1 = traj.crossed_one;
    report.contradiction =
        traj.crossed_one.has_value() && *traj.crossed_one < traj.p0;
    report.verdict = report.contradiction ? "CONTRADICTION" : "NO-CONTRADICTION";
    return report;
}

}  // namespace riskmech
