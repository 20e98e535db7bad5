#ifndef LOWTHRUST_CORE_MODEL_HPP
#define LOWTHRUST_CORE_MODEL_HPP

#include <cmath>
#include <stdexcept>

#include "lowthrust/units.hpp"

namespace lowthrust {

/// Point-mass plus J2 gravity model. `k` is the precession constant of the
/// averaged circular-orbit nodal drift, dRAAN/dt = -k V^7 cos I.
struct GravityModel {
    double mu;  ///< m^3/s^2
    double re;  ///< equatorial radius, m
    double j2;  ///< dimensionless
    double k;   ///< s^6/m^7

    static GravityModel make(double mu, double re, double j2)
    {
        if (!(mu > 0.0) || !(re > 0.0) || !(j2 > 0.0)) {
            throw std::invalid_argument("GravityModel: mu, re and j2 must be positive");
        }
        return GravityModel{mu, re, j2, 3.0 * j2 * re * re / (2.0 * mu * mu * mu)};
    }

    /// Earth constants used throughout the application case.
    static GravityModel earth() { return make(3.986005e14, 6378137.0, 1.08266e-3); }
};

/// Averaged circular orbit at an epoch. RAAN is kept unwrapped.
struct OrbitState {
    double v = 0.0;    ///< circular velocity, m/s
    double inc = 0.0;  ///< inclination, rad
    double raan = 0.0; ///< right ascension of the ascending node, rad
    double t = 0.0;    ///< epoch, s

    double radius(const GravityModel& g) const { return g.mu / (v * v); }
    double altitude(const GravityModel& g) const { return radius(g) - g.re; }

    bool valid() const
    {
        return std::isfinite(v) && v > 0.0 && inc >= 0.0 && inc <= units::pi
            && std::isfinite(raan) && std::isfinite(t);
    }
};

/// Nodal precession rate (rad/s) of a circular orbit.
inline double precession_rate(double v, double inc, const GravityModel& g)
{
    const double v2 = v * v;
    const double v7 = v2 * v2 * v2 * v;
    // sin(pi/2 - I) is exactly zero for a polar orbit, unlike cos(I).
    return -g.k * v7 * std::sin(0.5 * units::pi - inc);
}

inline double precession_rate(const OrbitState& state, const GravityModel& g)
{
    return precession_rate(state.v, state.inc, g);
}

inline double velocity_from_altitude(double altitude, const GravityModel& g)
{
    const double r = g.re + altitude;
    if (!(r > 0.0)) {
        throw std::invalid_argument("velocity_from_altitude: nonpositive orbit radius");
    }
    return std::sqrt(g.mu / r);
}

inline double altitude_from_velocity(double v, const GravityModel& g)
{
    if (!(v > 0.0)) {
        throw std::invalid_argument("altitude_from_velocity: velocity must be positive");
    }
    return g.mu / (v * v) - g.re;
}

/// RAAN wrapped to [0, 2pi) for display.
inline double wrap_two_pi(double angle)
{
    const double two_pi = 2.0 * units::pi;
    double w = std::fmod(angle, two_pi);
    if (w < 0.0) {
        w += two_pi;
    }
    return w;
}

struct PropellantBudget {
    double delta_v = 0.0; ///< m/s
    double m0 = 0.0;      ///< initial gross mass, kg
    double ve = 0.0;      ///< exhaust velocity, m/s
    double mc = 0.0;      ///< propellant consumed, kg
};

/// Rocket equation: propellant consumed for a velocity impulse.
inline double propellant_mass(double delta_v, double m0, double ve)
{
    if (delta_v < 0.0 || std::isnan(delta_v)) {
        throw std::invalid_argument("propellant_mass: negative velocity impulse");
    }
    if (!(m0 > 0.0) || !(ve > 0.0)) {
        throw std::invalid_argument("propellant_mass: mass and exhaust velocity must be positive");
    }
    return -m0 * std::expm1(-delta_v / ve);
}

inline PropellantBudget propellant_budget(double delta_v, double m0, double ve)
{
    return PropellantBudget{delta_v, m0, ve, propellant_mass(delta_v, m0, ve)};
}

} // namespace lowthrust

#endif // LOWTHRUST_CORE_MODEL_HPP
