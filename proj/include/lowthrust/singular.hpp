#ifndef LOWTHRUST_SINGULAR_HPP
#define LOWTHRUST_SINGULAR_HPP

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "lowthrust/core_model.hpp"
#include "lowthrust/edelbaum.hpp"
#include "lowthrust/errors.hpp"
#include "lowthrust/numerics.hpp"
#include "lowthrust/problem.hpp"
#include "lowthrust/units.hpp"

namespace lowthrust {

// Singular arcs (S = 0 on an interval). The steering satisfies
// tan(I) tan(beta) = alpha with alpha = -7 pi / 2, which keeps the
// precession rate constant whatever the acceleration level.

inline constexpr double singular_alpha = -3.5 * units::pi;

/// Parameters of a singular arc.
struct SingularParams {
    double p_raan = 0.0;
    double raan_rate_d = 0.0; ///< rad/s
    double p0 = -1.0;
    double f_max = 0.0;       ///< m/s^2
    static constexpr double alpha = singular_alpha;

    double product() const { return p_raan * raan_rate_d; }

    /// An arc around I_m1 / I_m2 can stay below f_max.
    bool exists() const { return product() > 0.0 && product() < 1.0; }
};

/// p0 normalisation giving a minimum level f_m = p_raan * raan_rate_d * f_max.
inline double singular_p0_polar(double f_max)
{
    const double a2 = singular_alpha * singular_alpha;
    return -(7.0 / 9.0) * (a2 - 1.0) / a2 / f_max;
}

/// p0 normalisation giving f(0) = -p_raan * raan_rate_d * f_max.
inline double singular_p0_equatorial(double f_max)
{
    const double a2 = singular_alpha * singular_alpha;
    return -a2 / (a2 - 7.0) / f_max;
}

/// Principal singular steering angle, beta in (-pi/2, pi/2).
///
/// At exactly 90 deg the arc degenerates to a planar transfer and 0 is
/// returned. Equatorial orbits (sin I = 0) have no singular steering.
inline double singular_beta(double inc)
{
    const double c = std::cos(inc);
    const double s = std::sin(inc);
    if (std::abs(s) < 1e-15) {
        throw DomainError("singular_beta: equatorial orbit, cos(beta) = 0");
    }
    if (std::abs(c) < 1e-15) {
        return 0.0;
    }
    return std::atan(singular_alpha / std::tan(inc));
}

/// Singular steering on the branch that moves the inclination in the sign of
/// `direction` when f > 0.
inline double singular_beta(double inc, double direction)
{
    double b = singular_beta(inc);
    if (std::sin(b) * direction < 0.0) {
        b += b > 0.0 ? -units::pi : units::pi;
    }
    return b;
}

/// Residual of the steering identity 7 cos I cos beta + (2/pi) sin I sin beta.
inline double singular_identity_residual(double inc, double beta)
{
    return 7.0 * std::cos(inc) * std::cos(beta) + 2.0 / units::pi * std::sin(inc) * std::sin(beta);
}

/// Acceleration level along the singular arc as a function of tan(I).
inline double singular_accel_tau(double tau, const SingularParams& p)
{
    const double a2 = singular_alpha * singular_alpha;
    const double den = 6.0 * tau * tau - (a2 - 7.0);
    if (std::abs(den) < 1e-12 * a2) {
        throw DomainError("singular_accel: pole at tan(I) = tau_s");
    }
    const double num = (tau * tau + a2) * (tau * tau + a2);
    return -p.product() / (p.p0 * a2) * num / den;
}

inline double singular_accel(double inc, const SingularParams& p)
{
    if (std::abs(std::cos(inc)) < 1e-15) {
        throw DomainError("singular_accel: undefined at 90 deg");
    }
    return singular_accel_tau(std::tan(inc), p);
}

/// df/dtau.
inline double singular_accel_derivative(double tau, const SingularParams& p)
{
    const double a2 = singular_alpha * singular_alpha;
    const double den = 6.0 * tau * tau - (a2 - 7.0);
    if (std::abs(den) < 1e-12 * a2) {
        throw DomainError("singular_accel_derivative: pole at tan(I) = tau_s");
    }
    const double t2 = tau * tau;
    return -p.product() / (p.p0 * a2) * 4.0 * tau * (t2 + a2) * (3.0 * t2 - 4.0 * a2 + 7.0)
         / (den * den);
}

/// Same level written in (I, beta) before eliminating beta.
inline double singular_accel_general(double inc, double beta, const SingularParams& p)
{
    const double sb = std::sin(beta);
    const double cb = std::cos(beta);
    const double d = 1.0 + 2.0 * sb * cb / (units::pi * std::sin(inc) * std::cos(inc));
    return -7.0 * p.product() / (p.p0 * sb * sb * d);
}

struct CriticalInclinations {
    double i_s1; ///< pole
    double i_s2;
    double i_m1; ///< extremum
    double i_m2;
    double tau_s;
    double tau_m;
};

inline CriticalInclinations critical_inclinations()
{
    const double a2 = singular_alpha * singular_alpha;
    CriticalInclinations c{};
    c.tau_s = std::sqrt((a2 - 7.0) / 6.0);
    c.tau_m = std::sqrt((4.0 * a2 - 7.0) / 3.0);
    c.i_s1 = std::atan(c.tau_s);
    c.i_s2 = units::pi - c.i_s1;
    c.i_m1 = std::atan(c.tau_m);
    c.i_m2 = units::pi - c.i_m1;
    return c;
}

namespace detail {

inline constexpr double singular_pole_guard = units::deg_to_rad(0.1);

inline void check_singular_path(double i0, double if_)
{
    const double lo = std::min(i0, if_);
    const double hi = std::max(i0, if_);
    if (lo <= 0.5 * units::pi && hi >= 0.5 * units::pi) {
        throw DomainError("singular path crosses 90 deg");
    }
    const CriticalInclinations c = critical_inclinations();
    for (double pole : {c.i_s1, c.i_s2}) {
        if (hi >= pole - singular_pole_guard && lo <= pole + singular_pole_guard) {
            throw DomainError("singular path crosses or touches the acceleration pole");
        }
    }
}

/// Velocity on the constant-rate curve.
inline double singular_velocity(double inc, double raan_rate_d, const GravityModel& g)
{
    const double r = -raan_rate_d / (g.k * std::cos(inc));
    if (!(r > 0.0)) {
        throw DomainError("singular arc: precession rate incompatible with inclination");
    }
    return std::pow(r, 1.0 / 7.0);
}

} // namespace detail

/// Cost of a singular arc at constant precession rate between two
/// inclinations. Independent of the acceleration profile.
inline double singular_cost_quadrature(double i0, double if_, double raan_rate_d,
                                       const GravityModel& g, double rel_tol = 1e-12)
{
    if (i0 == if_) {
        return 0.0;
    }
    detail::check_singular_path(i0, if_);
    const double a2 = singular_alpha * singular_alpha;
    auto integrand = [&](double inc) {
        const double t = std::tan(inc);
        return detail::singular_velocity(inc, raan_rate_d, g) / 7.0 * std::sqrt(t * t + a2);
    };
    // Scale the absolute tolerance by a cheap estimate of the result.
    const double rough = std::abs(numerics::simpson(integrand, i0, if_, 8));
    const double j = numerics::adaptive_simpson(integrand, i0, if_, rel_tol * std::max(rough, 1.0));
    return std::abs(j);
}

/// Single singular arc spanning the whole window.
struct SingleSingularArc {
    double p_raan = 0.0;
    double cost = 0.0;          ///< m/s
    double final_velocity = 0.0;
    double max_accel = 0.0;     ///< m/s^2
    bool feasible = false;      ///< max_accel <= f_max
};

/// p_raan such that the singular laws take the inclination from i0 to if_ in
/// `duration`. The level scales linearly with p_raan, so the transfer time
/// scales as 1/p_raan and the root follows from one quadrature.
inline SingleSingularArc solve_single_singular_arc(double i0, double if_, double raan_rate_d,
                                                   double duration, double p0, double f_max,
                                                   const GravityModel& g)
{
    if (!(duration > 0.0)) {
        throw std::invalid_argument("solve_single_singular_arc: duration must be positive");
    }
    if (i0 == if_) {
        throw DomainError("solve_single_singular_arc: no inclination change");
    }
    detail::check_singular_path(i0, if_);
    const SingularParams unit{1.0, raan_rate_d, p0, f_max};
    const double f_mid = singular_accel(0.5 * (i0 + if_), unit);
    const double sign = f_mid > 0.0 ? 1.0 : -1.0;
    const double dir = if_ > i0 ? 1.0 : -1.0;

    // Time per unit inclination at p_raan = sign.
    auto dt_di = [&](double inc) {
        const double f = sign * singular_accel(inc, unit);
        if (!(f > 0.0)) {
            throw DomainError("solve_single_singular_arc: acceleration changes sign on the path");
        }
        const double v = detail::singular_velocity(inc, raan_rate_d, g);
        const double beta = singular_beta(inc, dir);
        return units::pi * v / (2.0 * f * std::abs(std::sin(beta)));
    };
    const double rough = std::abs(numerics::simpson(dt_di, i0, if_, 8));
    const double t_unit = std::abs(numerics::adaptive_simpson(dt_di, i0, if_, 1e-12 * rough));

    SingleSingularArc arc;
    arc.p_raan = sign * t_unit / duration;
    arc.cost = singular_cost_quadrature(i0, if_, raan_rate_d, g);
    arc.final_velocity = detail::singular_velocity(if_, raan_rate_d, g);
    const SingularParams p{arc.p_raan, raan_rate_d, p0, f_max};
    for (int i = 0; i <= 200; ++i) {
        const double inc = i0 + (if_ - i0) * i / 200.0;
        arc.max_accel = std::max(arc.max_accel, singular_accel(inc, p));
    }
    arc.feasible = arc.max_accel <= f_max;
    return arc;
}

/// Sample of a constant-f trajectory with an inserted coast.
struct ArcSample {
    OrbitState state;
    double beta = 0.0;
    double f = 0.0;
};

/// Constant-acceleration Edelbaum arc split by one coast (p_raan = 0 case).
struct PomegaZeroTransfer {
    EdelbaumTransfer arc;     ///< burn portion, without the coast
    double f = 0.0;
    double delta_v = 0.0;
    double coast_start = 0.0; ///< absolute date, s
    double coast_end = 0.0;
    double coast_rate = 0.0;
    std::vector<ArcSample> samples;
};

namespace detail {

inline double arc_raan_change(const EdelbaumTransfer& arc, double a, double b,
                              const GravityModel& g, int nodes)
{
    if (a == b || arc.is_null()) {
        return 0.0;
    }
    auto rate = [&](double t) {
        const EdelbaumPoint p = edelbaum_state_at(arc, t);
        return precession_rate(p.v, p.inc, g);
    };
    return numerics::simpson(rate, a, b, nodes);
}

} // namespace detail

/// Builds the p_raan = 0 extremal at acceleration f: the Edelbaum arc with a
/// coast inserted at the burn time where the RAAN target is met.
inline PomegaZeroTransfer singular_pomega_zero_transfer(const TransferProblem& problem, double f,
                                                        int samples_per_burn = 50)
{
    problem.validate();
    if (!(f > 0.0) || f > problem.f_max * (1.0 + 1e-12)) {
        throw std::invalid_argument("singular_pomega_zero_transfer: f must lie in (0, f_max]");
    }
    const OrbitState& a = problem.start;
    const OrbitState& b = problem.target;
    const GravityModel& g = problem.g;
    const int nodes = 64;
    PomegaZeroTransfer out;
    out.f = f;
    out.arc = make_edelbaum_transfer(a.v, a.inc, b.v, b.inc, f);
    out.delta_v = out.arc.delta_v;
    const double burn = out.arc.duration;
    const double coast = problem.duration() - burn;
    if (coast < 0.0) {
        throw InfeasibleWindow("p_raan = 0 transfer: burn does not fit in the window");
    }
    const double total_burn_raan = detail::arc_raan_change(out.arc, 0.0, burn, g, nodes);
    auto residual = [&](double tau) {
        const EdelbaumPoint p = edelbaum_state_at(out.arc, tau);
        return a.raan + total_burn_raan + precession_rate(p.v, p.inc, g) * coast
             - problem.target_raan();
    };

    double tau = 0.0;
    const double r0 = residual(0.0);
    if (coast == 0.0 || burn == 0.0) {
        if (std::abs(r0) > 1e-9) {
            throw InfeasibleWindow("p_raan = 0 transfer: no coast available to meet the RAAN");
        }
    } else if (r0 != 0.0) {
        const int cells = 64;
        double lo = 0.0;
        double r_lo = r0;
        bool found = false;
        for (int i = 1; i <= cells && !found; ++i) {
            const double hi = burn * i / cells;
            const double r_hi = residual(hi);
            if (r_hi == 0.0) {
                tau = hi;
                found = true;
            } else if ((r_lo < 0.0) != (r_hi < 0.0)) {
                tau = numerics::find_root(residual, lo, hi, 1e-12 * burn,
                                          "p_raan = 0 coast placement");
                found = true;
            }
            lo = hi;
            r_lo = r_hi;
        }
        if (!found) {
            throw InfeasibleWindow("p_raan = 0 transfer: coast insertion cannot meet the RAAN");
        }
    }

    out.coast_start = a.t + tau;
    out.coast_end = out.coast_start + coast;
    const EdelbaumPoint pc = edelbaum_state_at(out.arc, tau);
    out.coast_rate = precession_rate(pc.v, pc.inc, g);

    const double raan_c = a.raan + detail::arc_raan_change(out.arc, 0.0, tau, g, nodes);
    auto push_burn = [&](double s0, double s1, double t_offset, double raan0) {
        for (int i = 0; i <= samples_per_burn; ++i) {
            const double s = s0 + (s1 - s0) * i / samples_per_burn;
            const EdelbaumPoint p = edelbaum_state_at(out.arc, s);
            const double raan = raan0 + detail::arc_raan_change(out.arc, s0, s, g, nodes);
            out.samples.push_back({{p.v, p.inc, raan, a.t + s + t_offset}, p.beta, f});
        }
    };
    push_burn(0.0, tau, 0.0, a.raan);
    out.samples.push_back({{pc.v, pc.inc, raan_c, out.coast_start}, pc.beta, 0.0});
    out.samples.push_back(
        {{pc.v, pc.inc, raan_c + out.coast_rate * coast, out.coast_end}, pc.beta, 0.0});
    push_burn(tau, burn, coast, raan_c + out.coast_rate * coast);
    return out;
}

inline PomegaZeroTransfer singular_pomega_zero_transfer(const TransferProblem& problem)
{
    return singular_pomega_zero_transfer(problem, problem.f_max);
}

/// Writes the singular acceleration level over inclination (deg) as CSV,
/// skipping the guard bands around the poles and 90 deg.
inline void write_singular_profile_csv(std::ostream& os, const SingularParams& p, int points = 721)
{
    const CriticalInclinations c = critical_inclinations();
    os << "# lowthrust singular profile v1\n";
    os << "inclination_deg,tan_inclination,beta_deg,accel_mps2,accel_over_fmax\n";
    for (int i = 1; i < points - 1; ++i) {
        const double inc = units::pi * i / (points - 1);
        const bool near_pole = std::abs(inc - c.i_s1) < detail::singular_pole_guard
                            || std::abs(inc - c.i_s2) < detail::singular_pole_guard;
        if (near_pole || std::abs(std::cos(inc)) < 1e-9) {
            continue;
        }
        const double f = singular_accel(inc, p);
        os << units::rad_to_deg(inc) << ',' << std::tan(inc) << ','
           << units::rad_to_deg(singular_beta(inc)) << ',' << f << ','
           << (p.f_max > 0.0 ? f / p.f_max : 0.0) << '\n';
    }
}

} // namespace lowthrust

#endif // LOWTHRUST_SINGULAR_HPP
