#ifndef LOWTHRUST_TEST_SUPPORT_HPP
#define LOWTHRUST_TEST_SUPPORT_HPP

#include <cmath>
#include <random>

#include "lowthrust/lowthrust.hpp"

namespace lowthrust::testing {

/// 800 km / 98 deg / RAAN 0 to 900 km / 99 deg, target RAAN 30 deg at day 0
/// carried to day 100, f_max = 3.5e-3.
inline TransferProblem application_problem(double tf_day = 100.0)
{
    const GravityModel g = GravityModel::earth();
    TransferProblem p;
    p.start = {velocity_from_altitude(800e3, g), units::deg_to_rad(98.0), 0.0, 0.0};
    p.target = {velocity_from_altitude(900e3, g), units::deg_to_rad(99.0), units::deg_to_rad(30.0),
                units::days_to_s(tf_day)};
    p.target.raan += precession_rate(p.target, g) * p.target.t;
    p.f_max = 3.5e-3;
    p.g = g;
    return p;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& r, double a, double b)
{
    return std::uniform_real_distribution<double>(a, b)(r);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace lowthrust::testing

#endif
