#pragma once

#include <optional>
#include <string>
#include <vector>

namespace riskmech {

// The w_eps weighting family: x^2 up to eps, then linear to (1,1).
double w_eps(double x, double eps);

// Second-stage utility U_eps(ell) of a posted price ell for a buyer with
// weighting w_eps facing the equal-revenue distribution bounded at e^n.
// Piecewise closed form; stable for large n.
double u_eps(double ell, double eps, double n);

// U_eps(0) with eps = exp(t); stable for t far below -700.
double u_eps_zero_log(double t, double n);

double alpha_coefficient(double c);  // alpha_c = e^{1/c - 2}

// The price p_eps defined by 1 + E[min(v, p)] = (1/c) E[min(v, U_eps(0))]
// over the unbounded equal-revenue first-stage distribution. Closed form
// p = alpha_c U_eps(0)^{1/c}. Throws InfeasibleError when no solution with
// p >= 1 exists.
double p_eps(double eps, double c, double n);

// Same, parameterized by t = ln(eps).
double p_eps_log(double t, double c, double n);

// Solves the defining equation of p_eps by bisection (consistency check for
// the closed form).
double p_eps_bisect(double eps, double c, double n, double tol = 1e-12);

// Inverse map: the eps with p_eps(eps) = p. Bisection on ln(eps), relative
// tolerance 1e-12 (stronger than absolute 1e-12 for the minuscule eps this
// construction produces). Throws std::domain_error outside the attained range.
double eps_of_p(double p, double c, double n);

struct LowerBoundConfig {
    double c = 2.0;               // claimed approximation factor, > 1
    double n = 20.0;              // second stage bounded at e^n
    double max_step = 1e-2;       // ODE step cap
    double eps_root_tol = 1e-12;  // eps_of_p tolerance (in ln eps)
    bool force_quadratic = false; // verification mode: eps_p == 1 throughout
};

struct OdeTrajectory {
    std::vector<double> p;
    std::vector<double> l_bar;
    std::vector<double> eps_p;
    std::optional<double> crossed_inv_eps_star;  // first p with l_bar <= 1/eps*
    std::optional<double> crossed_one;           // first p with l_bar <= 1
    double p0 = 0.0;       // menu extent required as eps -> e^{-n}
    double p_limit = 0.0;  // integration horizon

    // Linear interpolation of l_bar at price p (NaN outside the sampled range).
    double l_bar_at(double p) const;
};

// Integrates the equality version of the lower-bound differential equation
// -l' = 1 / w_{eps_p}(1/l) (l >= 1) forward from l(1) = e^n, using the
// substitution m = 1/l while l is large. Halts at l <= 1 or at the horizon.
OdeTrajectory integrate_ode(const LowerBoundConfig& cfg);

struct ContradictionReport {
    double c = 0.0;
    double n = 0.0;
    double alpha_c = 0.0;
    double eps_star = 0.0;  // e^{-N}; underflows to 0 for large N
    double N = 0.0;
    double p_eps_star = 0.0;
    double l_bar_at_2 = 0.0;
    std::optional<double> p_cross_1;
    double p0 = 0.0;
    bool contradiction = false;
    std::string verdict;  // "CONTRADICTION" or "NO-CONTRADICTION"
};

// Runs the construction end to end and reports whether the solution violates
// the high boundary condition (l(p) > 1 for p < p0).
ContradictionReport check_contradiction(const LowerBoundConfig& cfg);

}  // namespace riskmech
