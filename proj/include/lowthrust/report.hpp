#ifndef LOWTHRUST_REPORT_HPP
#define LOWTHRUST_REPORT_HPP

#include <array>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lowthrust/core_model.hpp"
#include "lowthrust/problem.hpp"
#include "lowthrust/propagator.hpp"
#include "lowthrust/sensitivity.hpp"
#include "lowthrust/shooting.hpp"
#include "lowthrust/units.hpp"

namespace lowthrust {

// Text reports. Values are unit conversions of the SI results only: days,
// degrees, km, m/s.

namespace detail {

class TextTable {
public:
    explicit TextTable(std::vector<std::string> header) : rows_{std::move(header)} {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string str() const
    {
        std::vector<std::size_t> w;
        for (const auto& r : rows_) {
            w.resize(std::max(w.size(), r.size()), 0);
            for (std::size_t i = 0; i < r.size(); ++i) {
                w[i] = std::max(w[i], r[i].size());
            }
        }
        std::ostringstream os;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            for (std::size_t i = 0; i < rows_[k].size(); ++i) {
                os << (i == 0 ? "" : "  ") << std::setw(static_cast<int>(w[i])) << rows_[k][i];
            }
            os << '\n';
            if (k == 0) {
                std::size_t total = 0;
                for (std::size_t x : w) {
                    total += x + 2;
                }
                os << std::string(total > 2 ? total - 2 : 0, '-') << '\n';
            }
        }
        return os.str();
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

inline std::string fixed(double v, int prec)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

inline std::string sci(double v, int prec)
{
    std::ostringstream os;
    os << std::scientific << std::setprecision(prec) << v;
    return os.str();
}

} // namespace detail

/// t0/t1/t2/tf mission sequence.
inline std::string format_sequence_table(const SequenceTable& rows, const GravityModel& g)
{
    using namespace units;
    using detail::fixed;
    detail::TextTable t({"Event", "Date (day)", "Altitude (km)", "Velocity (m/s)",
                         "Inclination (deg)", "RAAN (deg)", "Precession (deg/day)",
                         "Impulse (m/s)"});
    for (const SequenceRow& r : rows) {
        t.add({r.label, fixed(s_to_days(r.t), 4), fixed(m_to_km(altitude_from_velocity(r.v, g)), 2),
               fixed(r.v, 2), fixed(rad_to_deg(r.inc), 4), fixed(rad_to_deg(r.raan), 3),
               fixed(rate_to_deg_per_day(r.rate), 4), fixed(r.impulse, 2)});
    }
    return t.str();
}

/// Perturbed SES costs and the derived sensitivities.
inline std::string format_sensitivity_table(const CostateGuess& g)
{
    using namespace units;
    using detail::fixed;
    detail::TextTable t({"Variation", "Delta -", "Delta +", "Cost - (m/s)", "Cost + (m/s)",
                         "Derivative", "Unit", "One-sided"});
    auto cost = [](const std::optional<double>& c) { return c ? fixed(*c, 3) : std::string("n/a"); };
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
        const SensitivityRow& r = g.rows[i];
        std::string dm;
        std::string dp;
        std::string unit;
        if (i == 0) {
            dm = fixed(r.delta_minus, 3) + " m/s";
            dp = fixed(r.delta_plus, 3) + " m/s";
            unit = "m/s per m/s";
        } else if (i == 3) {
            dm = fixed(s_to_days(r.delta_minus), 3) + " day";
            dp = fixed(s_to_days(r.delta_plus), 3) + " day";
            unit = "m/s per day";
        } else {
            dm = fixed(rad_to_deg(r.delta_minus), 3) + " deg";
            dp = fixed(rad_to_deg(r.delta_plus), 3) + " deg";
            unit = "m/s per rad";
        }
        const double d = i == 3 ? r.derivative * seconds_per_day : r.derivative;
        t.add({r.name, dm, dp, cost(r.cost_minus), cost(r.cost_plus), fixed(d, 4), unit,
               r.one_sided ? "yes" : "no"});
    }
    std::ostringstream os;
    os << t.str();
    os << "reference cost " << fixed(g.reference_cost, 4) << " m/s\n";
    os << "costate guess  p_v = " << fixed(g.p_v0, 5) << ", p_i = " << fixed(g.p_i0, 2)
       << " m/s/rad, p_raan = " << fixed(g.p_raan0, 2) << " m/s/rad\n";
    os << "Hamiltonian    H = " << fixed(g.h0 * seconds_per_day, 4) << " m/s/day\n";
    return os.str();
}

/// Shooting unknowns and constraint values, initial and converged.
inline std::string format_shooting_table(const TransferSolution& s)
{
    using namespace units;
    using detail::fixed;
    using detail::sci;
    const ShootingUnknowns& a = s.initial;
    const ShootingUnknowns& b = s.unknowns;
    detail::TextTable t({"Unknown", "Initial", "Final", "Constraint", "Initial", "Final"});
    const Residual& r0 = s.initial_residual;
    const Residual& r1 = s.residual_native;
    t.add({"p_v0 (-)", fixed(a.p_v0, 6), fixed(b.p_v0, 6), "V(tf)-Vf (m/s)", sci(r0[0], 3),
           sci(r1[0], 3)});
    t.add({"p_i0 (m/s/rad)", fixed(a.p_i0, 3), fixed(b.p_i0, 3), "I(tf)-If (deg)",
           sci(rad_to_deg(r0[1]), 3), sci(rad_to_deg(r1[1]), 3)});
    t.add({"p_raan0 (m/s/rad)", fixed(a.p_raan0, 3), fixed(b.p_raan0, 3), "RAAN(tf)-RAANf (deg)",
           sci(rad_to_deg(r0[2]), 3), sci(rad_to_deg(r1[2]), 3)});
    t.add({"t1 (day)", fixed(s_to_days(a.t1), 6), fixed(s_to_days(b.t1), 6), "S(t1)", sci(r0[3], 3),
           sci(r1[3], 3)});
    t.add({"t2 (day)", fixed(s_to_days(a.t2), 6), fixed(s_to_days(b.t2), 6), "S(t2)", sci(r0[4], 3),
           sci(r1[4], 3)});
    std::ostringstream os;
    os << t.str();
    os << "iterations " << s.iterations << ", scaled residual norm " << sci(s.residual_norm, 3)
       << ", delta-V " << fixed(s.delta_v, 4) << " m/s";
    if (s.boundary) {
        os << " (coast-only boundary solution)";
    }
    os << '\n';
    return os.str();
}

// JSON solution record: problem, unknowns and propagation step, enough to
// re-propagate, plus the reported results.

inline nlohmann::json to_json(const OrbitState& x)
{
    return {{"v", x.v}, {"inc", x.inc}, {"raan", x.raan}, {"t", x.t}};
}

inline OrbitState orbit_from_json(const nlohmann::json& j)
{
    return {j.at("v").get<double>(), j.at("inc").get<double>(), j.at("raan").get<double>(),
            j.at("t").get<double>()};
}

inline nlohmann::json solution_to_json(const TransferSolution& s, const PropagationOptions& prop)
{
    nlohmann::json j;
    j["format"] = "lowthrust-solution-v1";
    j["units"] = "SI (m, s, rad)";
    const TransferProblem& p = s.problem;
    j["problem"] = {{"start", to_json(p.start)},
                    {"target", to_json(p.target)},
                    {"f_max", p.f_max},
                    {"raan_branch", p.raan_branch},
                    {"gravity", {{"mu", p.g.mu}, {"re", p.g.re}, {"j2", p.g.j2}}}};
    j["unknowns"] = {{"p_v0", s.unknowns.p_v0}, {"p_i0", s.unknowns.p_i0},
                     {"p_raan0", s.unknowns.p_raan0}, {"t1", s.unknowns.t1}, {"t2", s.unknowns.t2}};
    j["propagation"] = {{"step", prop.step}, {"max_retries", prop.max_retries}};
    j["delta_v"] = s.delta_v;
    j["iterations"] = s.iterations;
    j["boundary"] = s.boundary;
    j["residual_native"] = s.residual_native;
    j["residual_norm"] = s.residual_norm;
    j["final_state"] = s.trajectory.empty() ? nlohmann::json() : to_json(s.trajectory.back().state);
    return j;
}

struct SolutionRecord {
    TransferProblem problem;
    ShootingUnknowns unknowns;
    PropagationOptions propagation;
    double delta_v = 0.0;
    OrbitState final_state;
};

inline SolutionRecord solution_from_json(const nlohmann::json& j)
{
    if (j.value("format", "") != "lowthrust-solution-v1") {
        throw std::invalid_argument("solution record: unknown format");
    }
    SolutionRecord r;
    const auto& p = j.at("problem");
    r.problem.start = orbit_from_json(p.at("start"));
    r.problem.target = orbit_from_json(p.at("target"));
    r.problem.f_max = p.at("f_max").get<double>();
    r.problem.raan_branch = p.at("raan_branch").get<int>();
    const auto& g = p.at("gravity");
    r.problem.g = GravityModel::make(g.at("mu").get<double>(), g.at("re").get<double>(),
                                     g.at("j2").get<double>());
    const auto& u = j.at("unknowns");
    r.unknowns = {u.at("p_v0").get<double>(), u.at("p_i0").get<double>(),
                  u.at("p_raan0").get<double>(), u.at("t1").get<double>(), u.at("t2").get<double>()};
    r.propagation.step = j.at("propagation").at("step").get<double>();
    r.propagation.max_retries = j.at("propagation").at("max_retries").get<int>();
    r.delta_v = j.at("delta_v").get<double>();
    r.final_state = orbit_from_json(j.at("final_state"));
    return r;
}

} // namespace lowthrust

#endif // LOWTHRUST_REPORT_HPP
