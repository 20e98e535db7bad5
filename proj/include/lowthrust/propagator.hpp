#ifndef LOWTHRUST_PROPAGATOR_HPP
#define LOWTHRUST_PROPAGATOR_HPP

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "lowthrust/core_model.hpp"
#include "lowthrust/errors.hpp"
#include "lowthrust/numerics.hpp"
#include "lowthrust/problem.hpp"
#include "lowthrust/units.hpp"

namespace lowthrust {

/// PMP adjoint of (V, I, RAAN) plus the cost multiplier.
///
/// These are the maximum-principle multipliers (H is maximised, p0 <= 0).
/// With p0 = -1 they equal minus the cost gradient dJ*/dX.
struct Costate {
    double p_v = 0.0;    ///< per (m/s) of V, dimensionless
    double p_i = 0.0;    ///< m/s per rad
    double p_raan = 0.0; ///< m/s per rad
    double p0 = -1.0;
};

/// One sample of a state/costate extremal.
struct ExtremalPoint {
    OrbitState state;
    Costate costate;
    double f = 0.0;    ///< acceleration level, m/s^2
    double beta = 0.0; ///< out-of-plane thrust angle, rad
    double s = 0.0;    ///< switching function
    double h = 0.0;    ///< Hamiltonian, m/s^2
};

using Trajectory = std::vector<ExtremalPoint>;

/// Burn on [t0,t1], coast on [t1,t2], burn on [t2,tf].
struct ThrustSchedule {
    double t0 = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    double tf = 0.0;

    bool ordered() const { return t0 <= t1 && t1 <= t2 && t2 <= tf; }
    double burn_time() const { return (t1 - t0) + (tf - t2); }
};

struct PropagationOptions {
    double step = units::days_to_s(0.005); ///< RK4 step during burns, s
    int max_retries = 4;                   ///< step halvings on non-finite output
    double coast_sample = units::days_to_s(1.0); ///< sample spacing on coasts, s
};

/// Thrust direction maximising the Hamiltonian.
inline double optimal_beta(const Costate& c, double v)
{
    const double sine = 2.0 / (units::pi * v) * c.p_i;
    const double cosine = -c.p_v;
    if (sine == 0.0 && cosine == 0.0) {
        throw DegenerateControl("optimal_beta: p_v and p_i both vanish");
    }
    return std::atan2(sine, cosine);
}

inline double switching_function(const Costate& c, double v, double beta)
{
    return c.p0 - c.p_v * std::cos(beta) + c.p_i * 2.0 / (units::pi * v) * std::sin(beta);
}

/// Switching function at the optimal thrust direction, p0 + |(p_v, 2 p_i/(pi V))|.
inline double optimal_switching_function(const Costate& c, double v)
{
    return c.p0 + std::hypot(c.p_v, 2.0 / (units::pi * v) * c.p_i);
}

inline double hamiltonian(const Costate& c, const OrbitState& x, double f, double beta,
                          const GravityModel& g)
{
    return f * switching_function(c, x.v, beta) + c.p_raan * precession_rate(x, g);
}

/// Builds a sample with the optimal thrust direction. When both control
/// costates vanish on a coast, beta is reported as 0.
inline ExtremalPoint make_extremal_point(const OrbitState& x, const Costate& c, double f,
                                         const GravityModel& g)
{
    ExtremalPoint p;
    p.state = x;
    p.costate = c;
    p.f = f;
    if (c.p_v == 0.0 && c.p_i == 0.0) {
        if (f != 0.0) {
            throw DegenerateControl("make_extremal_point: thrusting with null control costates");
        }
        p.beta = 0.0;
    } else {
        p.beta = optimal_beta(c, x.v);
    }
    p.s = switching_function(c, x.v, p.beta);
    p.h = f * p.s + c.p_raan * precession_rate(x, g);
    return p;
}

namespace detail {

using Vec6 = numerics::Vec<6>;

inline Vec6 pack(const ExtremalPoint& p)
{
    return {p.state.v, p.state.inc, p.state.raan, p.costate.p_v, p.costate.p_i,
            p.costate.p_raan};
}

/// State/costate derivatives with beta re-evaluated from the costate.
inline Vec6 extremal_rhs(const Vec6& y, double f, double p0, const GravityModel& g)
{
    const double v = y[0];
    const double inc = y[1];
    const Costate c{y[3], y[4], y[5], p0};
    const double beta = f == 0.0 && c.p_v == 0.0 && c.p_i == 0.0 ? 0.0 : optimal_beta(c, v);
    const double sb = std::sin(beta);
    const double cb = std::cos(beta);
    const double ci = std::cos(inc);
    const double si = std::sin(inc);
    const double v6 = std::pow(v, 6);
    return {
        -f * cb,
        2.0 / (units::pi * v) * f * sb,
        -g.k * v6 * v * ci,
        7.0 * c.p_raan * g.k * v6 * ci + 2.0 / (units::pi * v * v) * c.p_i * f * sb,
        -c.p_raan * g.k * v6 * v * si,
        0.0,
    };
}

inline ExtremalPoint unpack(const Vec6& y, double t, double f, double p0, const GravityModel& g)
{
    return make_extremal_point(OrbitState{y[0], y[1], y[2], t}, Costate{y[3], y[4], y[5], p0},
                               f, g);
}

/// Integrates a burn; fills `samples` when non-null. Returns the end point.
inline ExtremalPoint integrate_burn(const ExtremalPoint& start, double f, double t_end,
                                    const GravityModel& g, double step, int max_retries,
                                    Trajectory* samples)
{
    const double t_begin = start.state.t;
    if (t_end < t_begin) {
        throw std::invalid_argument("propagate_burn: end date precedes start date");
    }
    if (f < 0.0) {
        throw std::invalid_argument("propagate_burn: negative acceleration");
    }
    if (!(step > 0.0)) {
        throw std::invalid_argument("propagate_burn: step must be positive");
    }
    const double p0 = start.costate.p0;
    const double span = t_end - t_begin;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        const double trial = step / std::ldexp(1.0, attempt);
        const auto n = static_cast<long>(std::max(1.0, std::ceil(span / trial - 1e-9)));
        const double h = span / static_cast<double>(n);
        Vec6 y = pack(start);
        Trajectory local;
        if (samples != nullptr) {
            local.reserve(static_cast<std::size_t>(n) + 1);
            local.push_back(unpack(y, t_begin, f, p0, g));
        }
        auto rhs = [&](const Vec6& z) { return extremal_rhs(z, f, p0, g); };
        bool ok = true;
        for (long i = 0; i < n && span > 0.0; ++i) {
            y = numerics::rk4_step<6>(rhs, y, h);
            if (!numerics::all_finite(y) || !(y[0] > 0.0)) {
                ok = false;
                break;
            }
            if (samples != nullptr) {
                const double t = i + 1 == n ? t_end : t_begin + (i + 1) * h;
                local.push_back(unpack(y, t, f, p0, g));
            }
        }
        if (!ok) {
            continue;
        }
        ExtremalPoint end = unpack(y, t_end, f, p0, g);
        if (samples != nullptr) {
            samples->insert(samples->end(), local.begin(), local.end());
        }
        return end;
    }
    throw PropagationError("propagate_burn: non-finite state after step retries");
}

} // namespace detail

/// RK4 propagation of the state/costate system at constant acceleration f.
/// Returns every step, first and last samples included.
inline Trajectory propagate_burn(const ExtremalPoint& start, double f, double t_end,
                                 const GravityModel& g,
                                 double step = PropagationOptions{}.step,
                                 int max_retries = PropagationOptions{}.max_retries)
{
    Trajectory out;
    detail::integrate_burn(start, f, t_end, g, step, max_retries, &out);
    return out;
}

/// Exact coast (f = 0): V, I and p_raan frozen, RAAN and (p_v, p_i) linear.
inline ExtremalPoint propagate_coast(const ExtremalPoint& start, double t_end,
                                     const GravityModel& g)
{
    const double dt = t_end - start.state.t;
    if (dt < 0.0) {
        throw std::invalid_argument("propagate_coast: end date precedes start date");
    }
    const OrbitState& x = start.state;
    const Costate& c = start.costate;
    const double v6 = std::pow(x.v, 6);
    OrbitState y = x;
    y.raan += precession_rate(x, g) * dt;
    y.t = t_end;
    Costate q = c;
    q.p_v += 7.0 * c.p_raan * g.k * v6 * std::cos(x.inc) * dt;
    q.p_i -= c.p_raan * g.k * v6 * x.v * std::sin(x.inc) * dt;
    return make_extremal_point(y, q, 0.0, g);
}

/// Propagation of the burn/coast/burn sequence.
struct ScheduledTrajectory {
    Trajectory samples;     ///< empty unless recording was requested
    ExtremalPoint at_t1;    ///< end of first burn (f = 0 convention)
    ExtremalPoint at_t2;    ///< end of coast
    ExtremalPoint final;
};

namespace detail {

inline ExtremalPoint as_coast_point(const ExtremalPoint& p, const GravityModel& g)
{
    return make_extremal_point(p.state, p.costate, 0.0, g);
}

} // namespace detail

inline ScheduledTrajectory propagate_schedule(const TransferProblem& problem,
                                              const Costate& costate0,
                                              const ThrustSchedule& sched,
                                              const PropagationOptions& opt = {},
                                              bool record = true)
{
    if (!sched.ordered()) {
        throw std::invalid_argument("propagate_schedule: schedule dates not ordered");
    }
    const GravityModel& g = problem.g;
    const double f = problem.f_max;
    OrbitState x0 = problem.start;
    x0.t = sched.t0;

    ScheduledTrajectory out;
    Trajectory* rec = record ? &out.samples : nullptr;

    ExtremalPoint p = make_extremal_point(x0, costate0, sched.t1 > sched.t0 ? f : 0.0, g);
    if (sched.t1 > sched.t0) {
        p = detail::integrate_burn(p, f, sched.t1, g, opt.step, opt.max_retries, rec);
    } else if (rec != nullptr) {
        rec->push_back(detail::as_coast_point(p, g));
    }
    out.at_t1 = detail::as_coast_point(p, g);

    ExtremalPoint q = out.at_t1;
    if (rec != nullptr) {
        // A zero-length coast is not a switch; keep the record a single burn.
        if (sched.t1 > sched.t0 && sched.t2 > sched.t1) {
            rec->push_back(q);
        }
        const double span = sched.t2 - sched.t1;
        if (span > 0.0 && opt.coast_sample > 0.0) {
            const auto n = static_cast<long>(std::ceil(span / opt.coast_sample));
            for (long i = 1; i < n; ++i) {
                rec->push_back(propagate_coast(q, sched.t1 + span * i / n, g));
            }
        }
    }
    q = propagate_coast(q, sched.t2, g);
    out.at_t2 = q;
    if (rec != nullptr && sched.t2 > sched.t1) {
        rec->push_back(q);
    }

    if (sched.tf > sched.t2) {
        ExtremalPoint b = make_extremal_point(q.state, q.costate, f, g);
        out.final = detail::integrate_burn(b, f, sched.tf, g, opt.step, opt.max_retries, rec);
    } else {
        out.final = q;
    }
    return out;
}

/// Propagates (V, I, RAAN) under an arbitrary control law
/// beta = law(elapsed, V, I) at constant f. Used to build open-loop legs.
template <class BetaLaw>
OrbitState propagate_state(const OrbitState& start, double f, BetaLaw&& law, double duration,
                           const GravityModel& g, double step = PropagationOptions{}.step)
{
    if (duration < 0.0) {
        throw std::invalid_argument("propagate_state: negative duration");
    }
    using Vec4 = numerics::Vec<4>;
    const auto n = static_cast<long>(std::max(1.0, std::ceil(duration / step - 1e-9)));
    const double h = duration / static_cast<double>(n);
    // Elapsed time is carried as a fourth component so the law sees it at
    // every stage.
    auto rhs = [&](const Vec4& y) -> Vec4 {
        const double beta = law(y[3], y[0], y[1]);
        return {-f * std::cos(beta), 2.0 / (units::pi * y[0]) * f * std::sin(beta),
                precession_rate(y[0], y[1], g), 1.0};
    };
    Vec4 y{start.v, start.inc, start.raan, 0.0};
    for (long i = 0; i < n && duration > 0.0; ++i) {
        y = numerics::rk4_step<4>(rhs, y, h);
    }
    if (!numerics::all_finite(y)) {
        throw PropagationError("propagate_state: non-finite state");
    }
    return OrbitState{y[0], y[1], y[2], start.t + duration};
}

/// Column layout of trajectory CSV files.
enum class CsvUnits { si, display };

/// Trajectory as CSV with a versioned header. `si` keeps internal units;
/// `display` uses days, degrees and m/s per day for the Hamiltonian.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                                 CsvUnits units_kind = CsvUnits::si)
{
    using namespace units;
    os << "# lowthrust trajectory v1\n";
    if (units_kind == CsvUnits::si) {
        os << "t[s],V[m/s],I[rad],RAAN[rad],f[m/s^2],beta[rad],p_v[-],p_i[m/s/rad],"
              "p_raan[m/s/rad],S[-],H[m/s^2]\n";
    } else {
        os << "t[day],V[m/s],I[deg],RAAN[deg],f[m/s^2],beta[deg],p_v[-],p_i[m/s/rad],"
              "p_raan[m/s/rad],S[-],H[m/s/day]\n";
    }
    os << std::setprecision(17);
    for (const ExtremalPoint& p : traj) {
        if (units_kind == CsvUnits::si) {
            os << p.state.t << ',' << p.state.v << ',' << p.state.inc << ',' << p.state.raan
               << ',' << p.f << ',' << p.beta << ',';
        } else {
            os << s_to_days(p.state.t) << ',' << p.state.v << ',' << rad_to_deg(p.state.inc)
               << ',' << rad_to_deg(p.state.raan) << ',' << p.f << ',' << rad_to_deg(p.beta)
               << ',';
        }
        os << p.costate.p_v << ',' << p.costate.p_i << ',' << p.costate.p_raan << ',' << p.s
           << ',' << (units_kind == CsvUnits::si ? p.h : p.h * seconds_per_day) << '\n';
    }
}

} // namespace lowthrust

#endif // LOWTHRUST_PROPAGATOR_HPP
