#ifndef LOWTHRUST_EDELBAUM_HPP
#define LOWTHRUST_EDELBAUM_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lowthrust/units.hpp"

namespace lowthrust {

// Closed-form minimum-time transfer between circular orbits at constant
// acceleration. Along the arc, V cos(beta) decreases linearly at rate f,
// V sin(beta) is conserved and I - I0 = (2/pi)(beta - beta0).

/// Constant-acceleration Edelbaum arc between two circular orbits.
struct EdelbaumTransfer {
    double v0 = 0.0;
    double vf = 0.0;
    double i0 = 0.0;
    double if_ = 0.0;
    double f = 0.0;        ///< m/s^2
    double beta0 = 0.0;    ///< initial out-of-plane angle, rad
    double delta_v = 0.0;  ///< m/s
    double duration = 0.0; ///< s

    bool is_null() const { return delta_v == 0.0; }
};

/// Instantaneous state along an Edelbaum arc.
struct EdelbaumPoint {
    double v;
    double inc;
    double beta;
};

/// Endpoint cost sensitivities of an Edelbaum arc.
struct EdelbaumCostates {
    double dv_dv0; ///< dDV/dV at the initial orbit
    double dv_di0; ///< dDV/dI at the initial orbit, per rad
    double dv_dvf; ///< dDV/dV at the final orbit
    double dv_dif; ///< dDV/dI at the final orbit, per rad
};

namespace detail {

inline double edelbaum_half_angle(double i0, double if_)
{
    return 0.5 * units::pi * (if_ - i0);
}

} // namespace detail

inline double edelbaum_cost(double v0, double vf, double i0, double if_)
{
    const double x = detail::edelbaum_half_angle(i0, if_);
    // v0^2 + vf^2 - 2 v0 vf cos x written to avoid cancellation for small x.
    const double s = std::sin(0.5 * x);
    const double sq = (v0 - vf) * (v0 - vf) + 4.0 * v0 * vf * s * s;
    return std::sqrt(std::max(sq, 0.0));
}

/// Initial out-of-plane angle. Returns 0 for coincident endpoints (null
/// transfer).
inline double edelbaum_beta0(double v0, double vf, double i0, double if_)
{
    const double x = detail::edelbaum_half_angle(i0, if_);
    const double s = vf * std::sin(x);
    const double c = v0 - vf * std::cos(x);
    if (s == 0.0 && c == 0.0) {
        return 0.0;
    }
    return std::atan2(s, c);
}

inline EdelbaumTransfer make_edelbaum_transfer(double v0, double i0, double vf, double if_,
                                               double f)
{
    if (!(v0 > 0.0) || !(vf > 0.0)) {
        throw std::invalid_argument("edelbaum: velocities must be positive");
    }
    if (!(f > 0.0)) {
        throw std::invalid_argument("edelbaum: acceleration must be positive");
    }
    EdelbaumTransfer x;
    x.v0 = v0;
    x.vf = vf;
    x.i0 = i0;
    x.if_ = if_;
    x.f = f;
    x.delta_v = edelbaum_cost(v0, vf, i0, if_);
    x.beta0 = x.delta_v == 0.0 ? 0.0 : edelbaum_beta0(v0, vf, i0, if_);
    x.duration = x.delta_v / f;
    return x;
}

/// State at elapsed time t in [0, duration].
inline EdelbaumPoint edelbaum_state_at(const EdelbaumTransfer& xfer, double t)
{
    const double slack = 1e-12 * std::max(1.0, xfer.duration);
    if (t < -slack || t > xfer.duration + slack) {
        throw std::out_of_range("edelbaum_state_at: time outside the transfer window");
    }
    if (xfer.is_null()) {
        return {xfer.v0, xfer.i0, xfer.beta0};
    }
    t = std::clamp(t, 0.0, xfer.duration);
    const double c = xfer.v0 * std::cos(xfer.beta0) - xfer.f * t;
    const double s = xfer.v0 * std::sin(xfer.beta0);
    const double beta = std::atan2(s, c);
    return {std::hypot(c, s), xfer.i0 + (2.0 / units::pi) * (beta - xfer.beta0), beta};
}

/// Analytic partials of the closed-form cost at both endpoints.
inline EdelbaumCostates edelbaum_costates(double v0, double vf, double i0, double if_)
{
    const double dv = edelbaum_cost(v0, vf, i0, if_);
    if (dv == 0.0) {
        return {0.0, 0.0, 0.0, 0.0};
    }
    const double x = detail::edelbaum_half_angle(i0, if_);
    const double di = 0.5 * units::pi * v0 * vf * std::sin(x) / dv;
    return {(v0 - vf * std::cos(x)) / dv, -di, (vf - v0 * std::cos(x)) / dv, di};
}

inline EdelbaumCostates edelbaum_costates(const EdelbaumTransfer& xfer)
{
    return edelbaum_costates(xfer.v0, xfer.vf, xfer.i0, xfer.if_);
}

} // namespace lowthrust

#endif // LOWTHRUST_EDELBAUM_HPP
