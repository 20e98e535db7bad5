#ifndef LOWTHRUST_SES_HPP
#define LOWTHRUST_SES_HPP

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>
#include <vector>

#include "lowthrust/core_model.hpp"
#include "lowthrust/edelbaum.hpp"
#include "lowthrust/errors.hpp"
#include "lowthrust/numerics.hpp"
#include "lowthrust/problem.hpp"
#include "lowthrust/units.hpp"

namespace lowthrust {

// Split Edelbaum strategy: an Edelbaum burn to a drift orbit (V_d, I_d), a
// coast on that orbit, and an Edelbaum burn to the target. The RAAN target
// is met by natural precession only.

struct SesOptions {
    int quadrature_nodes = 64;                  ///< Simpson intervals per burn leg
    double vd_altitude_min = units::km_to_m(150.0);
    double vd_altitude_max = units::km_to_m(2000.0);
    int grid_points = 60;                       ///< outer coarse scan over V_d
    double inclination_tol = 1e-14;             ///< rad, inner root bracket width
    bool polish = true;                         ///< refine V_d on the projected gradient
};

/// Both Edelbaum legs and the coast for one candidate drift orbit.
struct DriftOrbitEvaluation {
    EdelbaumTransfer leg1;
    EdelbaumTransfer leg2;
    double raan_leg1 = 0.0;      ///< RAAN change during the first burn, rad
    double raan_leg2 = 0.0;      ///< RAAN change during the last burn, rad
    double coast_rate = 0.0;     ///< rad/s
    double coast_duration = 0.0; ///< s
    double raan_tf = 0.0;        ///< unwrapped RAAN at the final date

    double delta_v() const { return leg1.delta_v + leg2.delta_v; }
};

struct SesGuess {
    double v_d = 0.0;
    double i_d = 0.0;
    bool bracketed = false; ///< false when the coarse-grid fallback was used
};

struct SesSolution {
    double v_d = 0.0;
    double i_d = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    double delta_v = 0.0;
    double raan_residual = 0.0;
    DriftOrbitEvaluation legs;
    SesGuess guess;
    int raan_branch = 0;

    double coast_rate() const { return legs.coast_rate; }
};

namespace detail {

/// RAAN change accumulated along an Edelbaum leg by Simpson quadrature.
inline double leg_raan_change(const EdelbaumTransfer& leg, const GravityModel& g, int nodes)
{
    if (leg.is_null()) {
        return 0.0;
    }
    auto rate = [&](double t) {
        const EdelbaumPoint p = edelbaum_state_at(leg, t);
        return precession_rate(p.v, p.inc, g);
    };
    return numerics::simpson(rate, 0.0, leg.duration, nodes);
}

} // namespace detail

inline DriftOrbitEvaluation evaluate_drift_orbit(double v_d, double i_d,
                                                 const TransferProblem& problem,
                                                 const SesOptions& opt = {})
{
    const OrbitState& a = problem.start;
    const OrbitState& b = problem.target;
    DriftOrbitEvaluation e;
    e.leg1 = make_edelbaum_transfer(a.v, a.inc, v_d, i_d, problem.f_max);
    e.leg2 = make_edelbaum_transfer(v_d, i_d, b.v, b.inc, problem.f_max);
    e.coast_duration = problem.duration() - e.leg1.duration - e.leg2.duration;
    if (e.coast_duration < 0.0) {
        throw InfeasibleWindow("SES: Edelbaum legs do not fit in the transfer window");
    }
    e.raan_leg1 = detail::leg_raan_change(e.leg1, problem.g, opt.quadrature_nodes);
    e.raan_leg2 = detail::leg_raan_change(e.leg2, problem.g, opt.quadrature_nodes);
    e.coast_rate = precession_rate(v_d, i_d, problem.g);
    e.raan_tf = a.raan + e.raan_leg1 + e.coast_rate * e.coast_duration + e.raan_leg2;
    return e;
}

/// Final RAAN reached through the drift orbit (V_d, I_d).
inline double raan_at_tf(double v_d, double i_d, const TransferProblem& problem,
                         const SesOptions& opt = {})
{
    return evaluate_drift_orbit(v_d, i_d, problem, opt).raan_tf;
}

namespace detail {

/// Drift inclination for which the coast alone supplies the mean rate.
inline double analytic_drift_inclination(double v_d, double mean_rate, const GravityModel& g)
{
    const double c = -mean_rate / (g.k * std::pow(v_d, 7));
    if (std::abs(c) > 1.0) {
        throw InfeasibleWindow("SES: drift rate exceeds the precession bound at this velocity");
    }
    return std::acos(c);
}

/// Slowest drift velocity able to provide |rate|.
inline double min_velocity_for_rate(double rate, const GravityModel& g)
{
    return std::pow(std::abs(rate) / g.k, 1.0 / 7.0);
}

inline double ses_vd_min(const TransferProblem& problem, const SesOptions& opt)
{
    const double v_floor = velocity_from_altitude(opt.vd_altitude_max, problem.g);
    return std::max(v_floor, min_velocity_for_rate(problem.required_mean_rate(), problem.g)
                                 * (1.0 + 1e-9));
}

inline double ses_vd_max(const TransferProblem& problem, const SesOptions& opt)
{
    return velocity_from_altitude(opt.vd_altitude_min, problem.g);
}

/// Gradient of the two-leg cost along the analytic RAAN constraint.
inline double analytic_cost_gradient(double v_d, const TransferProblem& problem)
{
    const double rate = problem.required_mean_rate();
    const double i_d = analytic_drift_inclination(v_d, rate, problem.g);
    const OrbitState& a = problem.start;
    const OrbitState& b = problem.target;
    const EdelbaumCostates c1 = edelbaum_costates(a.v, v_d, a.inc, i_d);
    const EdelbaumCostates c2 = edelbaum_costates(v_d, b.v, i_d, b.inc);
    const double di_dv = 7.0 * std::cos(i_d) / (v_d * std::sin(i_d));
    return (c1.dv_dvf + c2.dv_dv0) + (c1.dv_dif + c2.dv_di0) * di_dv;
}

inline double analytic_cost(double v_d, const TransferProblem& problem)
{
    const double i_d = analytic_drift_inclination(v_d, problem.required_mean_rate(), problem.g);
    return edelbaum_cost(problem.start.v, v_d, problem.start.inc, i_d)
         + edelbaum_cost(v_d, problem.target.v, i_d, problem.target.inc);
}

} // namespace detail

/// Cost gradient along the analytic RAAN constraint (coast supplies the whole
/// RAAN change), evaluated from Edelbaum endpoint costates.
inline double ses_guess_gradient(double v_d, const TransferProblem& problem)
{
    return detail::analytic_cost_gradient(v_d, problem);
}

/// Initial drift orbit: stationary point of the cost along the analytic
/// RAAN constraint, by 1-D root bracketing. Falls back to the coarse-grid
/// minimum when no sign change of the gradient is found.
inline SesGuess ses_initial_guess(const TransferProblem& problem, const SesOptions& opt = {})
{
    problem.validate();
    const double lo = detail::ses_vd_min(problem, opt);
    const double hi = detail::ses_vd_max(problem, opt);
    if (!(hi > lo)) {
        throw InfeasibleWindow("SES guess: required drift rate not attainable in the V_d range");
    }
    const int n = std::max(opt.grid_points, 8) * 4;
    std::vector<double> vs(static_cast<std::size_t>(n) + 1);
    std::vector<double> gs(vs.size());
    for (int i = 0; i <= n; ++i) {
        vs[i] = lo + (hi - lo) * i / n;
        gs[i] = detail::analytic_cost_gradient(vs[i], problem);
    }
    double best_v = std::numeric_limits<double>::quiet_NaN();
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (gs[i] < 0.0 && gs[i + 1] >= 0.0) {
            const double root = numerics::find_root(
                [&](double v) { return detail::analytic_cost_gradient(v, problem); }, vs[i],
                vs[i + 1], 1e-10, "SES guess");
            const double c = detail::analytic_cost(root, problem);
            if (c < best_cost) {
                best_cost = c;
                best_v = root;
            }
        }
    }
    SesGuess guess;
    if (std::isfinite(best_v)) {
        guess.v_d = best_v;
        guess.bracketed = true;
    } else {
        for (double v : vs) {
            const double c = detail::analytic_cost(v, problem);
            if (c < best_cost) {
                best_cost = c;
                best_v = v;
            }
        }
        guess.v_d = best_v;
    }
    guess.i_d = detail::analytic_drift_inclination(guess.v_d, problem.required_mean_rate(),
                                                   problem.g);
    return guess;
}

/// Drift inclination meeting the exact RAAN constraint at fixed V_d.
inline double solve_drift_inclination(double v_d, const TransferProblem& problem,
                                      const SesOptions& opt = {})
{
    const double target = problem.target_raan();
    const double rate = problem.required_mean_rate();
    const double eps = 1e-9;
    double lo_bound = eps;
    double hi_bound = units::pi - eps;
    if (rate > 0.0) {
        lo_bound = 0.5 * units::pi;
    } else if (rate < 0.0) {
        hi_bound = 0.5 * units::pi;
    }
    auto residual = [&](double i) { return raan_at_tf(v_d, i, problem, opt) - target; };

    const double c = std::clamp(-rate / (problem.g.k * std::pow(v_d, 7)), -1.0, 1.0);
    double a = std::clamp(std::acos(c), lo_bound, hi_bound);
    double fa = 0.0;
    try {
        fa = residual(a);
    } catch (const InfeasibleWindow&) {
        throw NoBracket("SES: drift inclination start point infeasible");
    }
    if (fa == 0.0) {
        return a;
    }
    // Final RAAN increases with I_d; walk toward the sign change.
    const double dir = fa < 0.0 ? 1.0 : -1.0;
    double step = units::deg_to_rad(0.2);
    for (int iter = 0; iter < 60; ++iter) {
        const double b = std::clamp(a + dir * step, lo_bound, hi_bound);
        double fb = 0.0;
        try {
            fb = residual(b);
        } catch (const InfeasibleWindow&) {
            break;
        }
        if ((fa < 0.0) != (fb < 0.0) || fb == 0.0) {
            return numerics::find_root(residual, std::min(a, b), std::max(a, b),
                                       opt.inclination_tol, "SES inclination");
        }
        if (b == lo_bound || b == hi_bound) {
            break;
        }
        a = b;
        fa = fb;
        step *= 1.6;
    }
    throw NoBracket("SES: RAAN constraint root in I_d not bracketed");
}

namespace detail {

inline double ses_cost_or_inf(double v_d, const TransferProblem& problem, const SesOptions& opt)
{
    try {
        const double i_d = solve_drift_inclination(v_d, problem, opt);
        return evaluate_drift_orbit(v_d, i_d, problem, opt).delta_v();
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

inline SesSolution make_ses_solution(double v_d, const TransferProblem& problem,
                                     const SesOptions& opt)
{
    SesSolution s;
    s.v_d = v_d;
    s.i_d = solve_drift_inclination(v_d, problem, opt);
    s.legs = evaluate_drift_orbit(v_d, s.i_d, problem, opt);
    s.delta_v = s.legs.delta_v();
    s.t1 = problem.t0() + s.legs.leg1.duration;
    s.t2 = problem.tf() - s.legs.leg2.duration;
    s.raan_residual = s.legs.raan_tf - problem.target_raan();
    s.raan_branch = problem.raan_branch;
    return s;
}

} // namespace detail

/// Cost of the optimal drift inclination at a given V_d (infinite when
/// infeasible).
inline double ses_cost_at(double v_d, const TransferProblem& problem, const SesOptions& opt = {})
{
    return detail::ses_cost_or_inf(v_d, problem, opt);
}

/// Minimum-cost drift orbit meeting the exact RAAN constraint.
inline SesSolution solve_ses(const TransferProblem& problem, const SesOptions& opt = {})
{
    problem.validate();
    SesGuess guess;
    try {
        guess = ses_initial_guess(problem, opt);
    } catch (const InfeasibleWindow&) {
        throw InfeasibleWindow("SES: required drift rate not attainable (branch "
                               + std::to_string(problem.raan_branch) + ")");
    }
    const double lo = detail::ses_vd_min(problem, opt);
    const double hi = detail::ses_vd_max(problem, opt);

    // Coarse scan plus the analytic guess, then Brent on the best cell.
    const int n = std::max(opt.grid_points, 4);
    std::vector<double> vs;
    for (int i = 0; i <= n; ++i) {
        vs.push_back(lo + (hi - lo) * i / n);
    }
    vs.push_back(guess.v_d);
    std::sort(vs.begin(), vs.end());
    std::vector<double> cs;
    cs.reserve(vs.size());
    for (double v : vs) {
        cs.push_back(detail::ses_cost_or_inf(v, problem, opt));
    }
    const auto best = std::min_element(cs.begin(), cs.end());
    if (!std::isfinite(*best)) {
        throw InfeasibleWindow("SES: no feasible drift orbit in the velocity range");
    }
    const auto idx = static_cast<std::size_t>(best - cs.begin());
    const double a = vs[idx == 0 ? 0 : idx - 1];
    const double b = vs[std::min(idx + 1, vs.size() - 1)];
    auto cost = [&](double v) {
        const double c = detail::ses_cost_or_inf(v, problem, opt);
        return std::isfinite(c) ? c : 1e30;
    };
    double v_best = numerics::minimize_bounded(cost, a, b).first;

    if (opt.polish) {
        // Refine on the stationarity condition; the Brent result is only
        // accurate to sqrt(eps) in V_d.
        const double h = 1e-2;
        auto grad = [&](double v) { return (cost(v + h) - cost(v - h)) / (2.0 * h); };
        const double delta = std::max(0.5, 1e-4 * v_best);
        const double ga = grad(v_best - delta);
        const double gb = grad(v_best + delta);
        if (ga < 0.0 && gb > 0.0 && std::abs(ga) < 1e3 && std::abs(gb) < 1e3) {
            const double root
                = numerics::find_root(grad, v_best - delta, v_best + delta, 1e-9, "SES polish");
            if (cost(root) <= cost(v_best) + 1e-9) {
                v_best = root;
            }
        }
    }
    SesSolution sol = detail::make_ses_solution(v_best, problem, opt);
    sol.guess = guess;
    return sol;
}

/// SES solutions on RAAN branches n_lo..n_hi (feasible ones only), sorted by
/// increasing cost. Branches are solved concurrently.
inline std::vector<SesSolution> scan_raan_branches(const TransferProblem& problem, int n_lo,
                                                   int n_hi, const SesOptions& opt = {})
{
    if (n_hi < n_lo) {
        throw std::invalid_argument("scan_raan_branches: empty branch range");
    }
    std::vector<std::future<SesSolution>> jobs;
    for (int n = n_lo; n <= n_hi; ++n) {
        jobs.push_back(std::async(std::launch::async,
                                  [&problem, &opt, n] { return solve_ses(problem.with_branch(n), opt); }));
    }
    std::vector<SesSolution> out;
    for (auto& j : jobs) {
        try {
            out.push_back(j.get());
        } catch (const Error&) {
            // infeasible branch
        }
    }
    if (out.empty()) {
        throw InfeasibleWindow("scan_raan_branches: all branches infeasible");
    }
    std::stable_sort(out.begin(), out.end(), [](const SesSolution& x, const SesSolution& y) {
        return x.delta_v < y.delta_v;
    });
    return out;
}

/// t0/t1/t2/tf rows of the SES transfer.
inline SequenceTable ses_sequence_table(const SesSolution& s, const TransferProblem& problem)
{
    const GravityModel& g = problem.g;
    const OrbitState& a = problem.start;
    const OrbitState& b = problem.target;
    const double raan1 = a.raan + s.legs.raan_leg1;
    const double raan2 = raan1 + s.legs.coast_rate * s.legs.coast_duration;
    const double dv1 = s.legs.leg1.delta_v;
    return {
        {"t0", a.t, a.v, a.inc, a.raan, precession_rate(a, g), 0.0},
        {"t1", s.t1, s.v_d, s.i_d, raan1, s.legs.coast_rate, dv1},
        {"t2", s.t2, s.v_d, s.i_d, raan2, s.legs.coast_rate, dv1},
        {"tf", b.t, b.v, b.inc, s.legs.raan_tf, precession_rate(b, g), s.delta_v},
    };
}

} // namespace lowthrust

#endif // LOWTHRUST_SES_HPP
