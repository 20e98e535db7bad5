#ifndef LOWTHRUST_UNITS_HPP
#define LOWTHRUST_UNITS_HPP

#include <numbers>

// Internal computations are SI (m, s, rad). These helpers are used at I/O
// boundaries only.
namespace lowthrust::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double seconds_per_day = 86400.0;

constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }
constexpr double days_to_s(double days) { return days * seconds_per_day; }
constexpr double s_to_days(double s) { return s / seconds_per_day; }
constexpr double km_to_m(double km) { return km * 1000.0; }
constexpr double m_to_km(double m) { return m / 1000.0; }

/// rad/s -> deg/day
constexpr double rate_to_deg_per_day(double rad_per_s)
{
    return rad_to_deg(rad_per_s) * seconds_per_day;
}

/// deg/day -> rad/s
constexpr double deg_per_day_to_rate(double deg_per_day)
{
    return deg_to_rad(deg_per_day) / seconds_per_day;
}

} // namespace lowthrust::units

#endif // LOWTHRUST_UNITS_HPP
