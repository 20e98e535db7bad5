#ifndef LOWTHRUST_CONFIG_HPP
#define LOWTHRUST_CONFIG_HPP

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <utility>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lowthrust/core_model.hpp"
#include "lowthrust/errors.hpp"
#include "lowthrust/problem.hpp"
#include "lowthrust/units.hpp"

namespace lowthrust {

/// Circular orbit as written in a mission file. The RAAN is given at its
/// own epoch and extrapolated by natural precession.
struct OrbitSpec {
    std::optional<double> altitude_km;
    std::optional<double> velocity_mps;
    double inclination_deg = 0.0;
    double raan_deg = 0.0;
    double epoch_day = 0.0;

    double velocity(const GravityModel& g) const
    {
        return velocity_mps ? *velocity_mps : velocity_from_altitude(units::km_to_m(*altitude_km), g);
    }

    /// Orbit at date t (days), RAAN carried by precession from the epoch.
    OrbitState at(double t_day, const GravityModel& g) const
    {
        OrbitState s{velocity(g), units::deg_to_rad(inclination_deg), units::deg_to_rad(raan_deg),
                     units::days_to_s(t_day)};
        s.raan += precession_rate(s, g) * units::days_to_s(t_day - epoch_day);
        return s;
    }
};

struct SolverSettings {
    double step_day = 0.005;
    double tolerance = 1e-8;
    int max_iterations = 30;
    int raan_branch = 0;
    std::optional<std::pair<int, int>> scan_branches;
    int quadrature_nodes = 64;
    double vd_altitude_min_km = 150.0;
    double vd_altitude_max_km = 2000.0;
};

struct MissionConfig {
    OrbitSpec initial;
    OrbitSpec target;
    double t0_day = 0.0;
    double tf_day = 0.0;
    double f_max = 0.0; ///< m/s^2
    std::optional<double> mass_kg;
    std::optional<double> exhaust_velocity_mps;
    SolverSettings solver;
    double singular_pomega_rate = 0.5; ///< p_raan * drift rate for the singular report
    GravityModel g = GravityModel::earth();

    void validate() const;
};

/// Parses "A..B" into an inclusive branch range.
inline std::pair<int, int> parse_branch_range(const std::string& text)
{
    static const std::regex re(R"(\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) {
        throw ConfigError("branch range must look like A..B, got '" + text + "'");
    }
    const int a = std::stoi(m[1].str());
    const int b = std::stoi(m[2].str());
    if (b < a) {
        throw ConfigError("branch range is empty: " + text);
    }
    return {a, b};
}

namespace detail {

using Tree = boost::property_tree::ptree;

template <class T>
T required(const Tree& t, const std::string& key)
{
    const auto v = t.get_optional<T>(key);
    if (!v) {
        if (t.get_optional<std::string>(key)) {
            throw ConfigError("bad value for " + key);
        }
        throw ConfigError("missing key " + key);
    }
    return *v;
}

template <class T>
std::optional<T> optional_key(const Tree& t, const std::string& key)
{
    if (!t.get_optional<std::string>(key)) {
        return std::nullopt;
    }
    const auto v = t.get_optional<T>(key);
    if (!v) {
        throw ConfigError("bad value for " + key);
    }
    return *v;
}

inline OrbitSpec read_orbit(const Tree& t, const std::string& section)
{
    OrbitSpec o;
    o.altitude_km = optional_key<double>(t, section + ".altitude_km");
    o.velocity_mps = optional_key<double>(t, section + ".velocity_mps");
    if (o.altitude_km.has_value() == o.velocity_mps.has_value()) {
        throw ConfigError("[" + section + "] needs exactly one of altitude_km / velocity_mps");
    }
    o.inclination_deg = required<double>(t, section + ".inclination_deg");
    o.raan_deg = optional_key<double>(t, section + ".raan_deg").value_or(0.0);
    o.epoch_day = optional_key<double>(t, section + ".epoch_day").value_or(0.0);
    return o;
}

} // namespace detail

inline void MissionConfig::validate() const
{
    for (const OrbitSpec* o : {&initial, &target}) {
        if (o->altitude_km.has_value() == o->velocity_mps.has_value()) {
            throw ConfigError("orbit needs exactly one of altitude / velocity");
        }
        if (o->velocity_mps && !(*o->velocity_mps > 0.0)) {
            throw ConfigError("orbit velocity must be positive");
        }
        if (o->altitude_km && !(units::km_to_m(*o->altitude_km) + g.re > 0.0)) {
            throw ConfigError("orbit radius must be positive");
        }
    }
    if (!(tf_day > t0_day)) {
        throw ConfigError("window: tf_day must exceed t0_day");
    }
    if (!(f_max > 0.0)) {
        throw ConfigError("vehicle: f_max must be positive");
    }
    if (!(solver.step_day > 0.0) || !(solver.tolerance > 0.0) || solver.max_iterations < 1) {
        throw ConfigError("solver: step, tolerance and max_iterations must be positive");
    }
    if (mass_kg && !(*mass_kg > 0.0)) {
        throw ConfigError("vehicle: mass_kg must be positive");
    }
    if (exhaust_velocity_mps && !(*exhaust_velocity_mps > 0.0)) {
        throw ConfigError("vehicle: exhaust_velocity_mps must be positive");
    }
}

inline MissionConfig parse_config(std::istream& in)
{
    detail::Tree t;
    try {
        boost::property_tree::read_ini(in, t);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    using detail::optional_key;
    using detail::required;
    MissionConfig c;
    c.initial = detail::read_orbit(t, "initial");
    c.target = detail::read_orbit(t, "target");
    c.t0_day = optional_key<double>(t, "window.t0_day").value_or(0.0);
    c.tf_day = required<double>(t, "window.tf_day");
    c.f_max = required<double>(t, "vehicle.f_max");
    c.mass_kg = optional_key<double>(t, "vehicle.mass_kg");
    c.exhaust_velocity_mps = optional_key<double>(t, "vehicle.exhaust_velocity_mps");

    SolverSettings& s = c.solver;
    s.step_day = optional_key<double>(t, "solver.step_day").value_or(s.step_day);
    s.tolerance = optional_key<double>(t, "solver.tolerance").value_or(s.tolerance);
    s.max_iterations = optional_key<int>(t, "solver.max_iterations").value_or(s.max_iterations);
    s.raan_branch = optional_key<int>(t, "solver.raan_branch").value_or(s.raan_branch);
    if (auto r = optional_key<std::string>(t, "solver.scan_branches")) {
        s.scan_branches = parse_branch_range(*r);
    }
    s.quadrature_nodes = optional_key<int>(t, "solver.quadrature_nodes").value_or(s.quadrature_nodes);
    s.vd_altitude_min_km
        = optional_key<double>(t, "solver.vd_altitude_min_km").value_or(s.vd_altitude_min_km);
    s.vd_altitude_max_km
        = optional_key<double>(t, "solver.vd_altitude_max_km").value_or(s.vd_altitude_max_km);
    c.singular_pomega_rate
        = optional_key<double>(t, "singular.pomega_rate").value_or(c.singular_pomega_rate);

    if (t.get_child_optional("gravity")) {
        const GravityModel e = GravityModel::earth();
        c.g = GravityModel::make(optional_key<double>(t, "gravity.mu").value_or(e.mu),
                                 optional_key<double>(t, "gravity.re").value_or(e.re),
                                 optional_key<double>(t, "gravity.j2").value_or(e.j2));
    }
    c.validate();
    return c;
}

inline MissionConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    return parse_config(in);
}

/// RAAN to reach at the final date on the selected branch, rad.
inline double resolve_target_raan(const MissionConfig& c)
{
    return c.target.at(c.tf_day, c.g).raan + 2.0 * units::pi * c.solver.raan_branch;
}

inline TransferProblem to_problem(const MissionConfig& c)
{
    TransferProblem p;
    p.start = c.initial.at(c.t0_day, c.g);
    p.target = c.target.at(c.tf_day, c.g);
    p.f_max = c.f_max;
    p.g = c.g;
    p.raan_branch = c.solver.raan_branch;
    return p;
}

} // namespace lowthrust

#endif // LOWTHRUST_CONFIG_HPP
