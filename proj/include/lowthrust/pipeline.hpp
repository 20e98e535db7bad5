#ifndef LOWTHRUST_PIPELINE_HPP
#define LOWTHRUST_PIPELINE_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lowthrust/config.hpp"
#include "lowthrust/core_model.hpp"
#include "lowthrust/edelbaum.hpp"
#include "lowthrust/errors.hpp"
#include "lowthrust/report.hpp"
#include "lowthrust/sensitivity.hpp"
#include "lowthrust/ses.hpp"
#include "lowthrust/shooting.hpp"
#include "lowthrust/singular.hpp"

namespace lowthrust {

enum class Mode { edelbaum, ses, ocp, singular_analysis };

inline Mode parse_mode(const std::string& s)
{
    if (s == "edelbaum") {
        return Mode::edelbaum;
    }
    if (s == "ses") {
        return Mode::ses;
    }
    if (s == "ocp") {
        return Mode::ocp;
    }
    if (s == "singular-analysis") {
        return Mode::singular_analysis;
    }
    throw ConfigError("unknown mode '" + s + "'");
}

struct StageError {
    std::string stage;
    std::string message;
};

struct PipelineResult {
    Mode mode = Mode::ocp;
    TransferProblem problem;
    std::optional<EdelbaumTransfer> edelbaum;
    std::optional<SesSolution> ses;
    std::vector<SesSolution> branches; ///< filled by a branch scan
    std::optional<CostateGuess> guess;
    std::optional<TransferSolution> solution;
    std::optional<ExtremalCertificate> certificate;
    std::string singular_report;
    std::string singular_profile_csv;
    std::vector<StageError> errors;

    bool ok() const { return errors.empty(); }

    /// 0 when the requested depth completed, 2 when only the SES stage
    /// survived an OCP run, 1 otherwise.
    int exit_code() const
    {
        if (ok()) {
            return 0;
        }
        if (mode == Mode::ocp && ses) {
            return 2;
        }
        return 1;
    }
};

inline PropagationOptions propagation_options(const MissionConfig& c)
{
    PropagationOptions p;
    p.step = units::days_to_s(c.solver.step_day);
    return p;
}

inline SesOptions ses_options(const MissionConfig& c)
{
    SesOptions o;
    o.quadrature_nodes = c.solver.quadrature_nodes;
    o.vd_altitude_min = units::km_to_m(c.solver.vd_altitude_min_km);
    o.vd_altitude_max = units::km_to_m(c.solver.vd_altitude_max_km);
    return o;
}

inline ShootingOptions shooting_options(const MissionConfig& c)
{
    ShootingOptions o;
    o.propagation = propagation_options(c);
    o.tolerance = c.solver.tolerance;
    o.max_iterations = c.solver.max_iterations;
    return o;
}

namespace detail {

inline std::string singular_analysis_text(const MissionConfig& cfg, const TransferProblem& problem,
                                          std::string* profile_csv)
{
    using namespace units;
    std::ostringstream os;
    const CriticalInclinations c = critical_inclinations();
    os << "Critical inclinations (deg)\n";
    os << "  pole      I_s1 = " << detail::fixed(rad_to_deg(c.i_s1), 4)
       << ", I_s2 = " << detail::fixed(rad_to_deg(c.i_s2), 4) << '\n';
    os << "  extremum  I_m1 = " << detail::fixed(rad_to_deg(c.i_m1), 4)
       << ", I_m2 = " << detail::fixed(rad_to_deg(c.i_m2), 4) << '\n';
    os << "Existence window: 0 < p_raan * drift rate < 1\n";

    const double rate0 = precession_rate(problem.start, problem.g);
    SingularParams sp;
    sp.raan_rate_d = rate0;
    sp.p_raan = cfg.singular_pomega_rate / rate0;
    sp.p0 = singular_p0_polar(problem.f_max);
    sp.f_max = problem.f_max;
    os << "Profile parameters: p_raan * drift rate = " << cfg.singular_pomega_rate
       << " (" << (sp.exists() ? "inside" : "outside") << " the window), drift rate "
       << detail::fixed(rate_to_deg_per_day(rate0), 4) << " deg/day, p0 = "
       << detail::sci(sp.p0, 6) << " s^2/m\n";
    if (profile_csv != nullptr) {
        std::ostringstream csv;
        write_singular_profile_csv(csv, sp);
        *profile_csv = csv.str();
    }

    os << "Constant-rate singular arc from I0 to If: ";
    try {
        const double j = singular_cost_quadrature(problem.start.inc, problem.target.inc, rate0,
                                                  problem.g);
        os << detail::fixed(j, 4) << " m/s, final velocity "
           << detail::fixed(detail::singular_velocity(problem.target.inc, rate0, problem.g), 2)
           << " m/s\n";
    } catch (const Error& e) {
        os << "not available (" << e.what() << ")\n";
    }

    os << "p_raan = 0 extremal at f_max: ";
    try {
        const PomegaZeroTransfer z = singular_pomega_zero_transfer(problem);
        os << "delta-V " << detail::fixed(z.delta_v, 4) << " m/s, coast "
           << detail::fixed(s_to_days(z.coast_start), 4) << " to "
           << detail::fixed(s_to_days(z.coast_end), 4) << " day at "
           << detail::fixed(rate_to_deg_per_day(z.coast_rate), 4) << " deg/day\n";
    } catch (const Error& e) {
        os << "not available (" << e.what() << ")\n";
    }
    return os.str();
}

} // namespace detail

/// Runs the solver stack to the depth selected by `mode`. Stage failures are
/// recorded, not thrown; earlier results are kept.
inline PipelineResult run_pipeline(const MissionConfig& cfg, Mode mode)
{
    PipelineResult r;
    r.mode = mode;
    r.problem = to_problem(cfg);
    const SesOptions sopt = ses_options(cfg);

    if (mode == Mode::edelbaum) {
        try {
            const TransferProblem& p = r.problem;
            r.edelbaum = make_edelbaum_transfer(p.start.v, p.start.inc, p.target.v, p.target.inc,
                                                p.f_max);
        } catch (const std::exception& e) {
            r.errors.push_back({"edelbaum", e.what()});
        }
        return r;
    }
    if (mode == Mode::singular_analysis) {
        try {
            r.singular_report = detail::singular_analysis_text(cfg, r.problem, &r.singular_profile_csv);
        } catch (const std::exception& e) {
            r.errors.push_back({"singular-analysis", e.what()});
        }
        return r;
    }

    try {
        if (cfg.solver.scan_branches) {
            const auto [lo, hi] = *cfg.solver.scan_branches;
            r.branches = scan_raan_branches(r.problem, lo, hi, sopt);
            r.problem = r.problem.with_branch(r.branches.front().raan_branch);
            r.ses = r.branches.front();
        } else {
            r.ses = solve_ses(r.problem, sopt);
        }
    } catch (const std::exception& e) {
        r.errors.push_back({"ses", e.what()});
        return r;
    }
    if (mode == Mode::ses) {
        return r;
    }

    try {
        SensitivityOptions so;
        so.ses = sopt;
        r.guess = estimate_sensitivities(r.problem, so);
    } catch (const std::exception& e) {
        r.errors.push_back({"sensitivity", e.what()});
        return r;
    }
    const ShootingOptions shopt = shooting_options(cfg);
    const ShootingUnknowns u0 = shooting_guess(*r.guess, *r.ses);
    try {
        r.solution = solve_shooting(r.problem, u0, shopt);
    } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << e.what();
        try {
            const Residual res = shooting_residual(u0, r.problem, shopt.propagation);
            msg << "; residuals at the guess (m/s, rad, rad, -, -):";
            for (double v : res) {
                msg << ' ' << v;
            }
        } catch (const std::exception&) {
        }
        r.errors.push_back({"shooting", msg.str()});
        return r;
    }
    try {
        r.certificate = verify_extremal(*r.solution, shopt.propagation);
        if (!r.certificate->ok()) {
            std::string v;
            for (const auto& s : r.certificate->violations) {
                v += (v.empty() ? "" : "; ") + s;
            }
            r.errors.push_back({"certificate", v});
        }
    } catch (const std::exception& e) {
        r.errors.push_back({"certificate", e.what()});
    }
    return r;
}

/// Human-readable summary of every stage that ran.
inline std::string format_report(const PipelineResult& r, const MissionConfig& cfg)
{
    using namespace units;
    std::ostringstream os;
    const TransferProblem& p = r.problem;
    os << "lowthrust report\n\n";
    os << "Initial orbit: V = " << detail::fixed(p.start.v, 2) << " m/s, I = "
       << detail::fixed(rad_to_deg(p.start.inc), 4) << " deg, RAAN = "
       << detail::fixed(rad_to_deg(p.start.raan), 3) << " deg, precession "
       << detail::fixed(rate_to_deg_per_day(precession_rate(p.start, p.g)), 4) << " deg/day\n";
    os << "Target orbit:  V = " << detail::fixed(p.target.v, 2) << " m/s, I = "
       << detail::fixed(rad_to_deg(p.target.inc), 4) << " deg, RAAN at tf = "
       << detail::fixed(rad_to_deg(p.target_raan()), 3) << " deg, precession "
       << detail::fixed(rate_to_deg_per_day(precession_rate(p.target, p.g)), 4) << " deg/day\n";
    os << "Window: " << detail::fixed(s_to_days(p.t0()), 4) << " to "
       << detail::fixed(s_to_days(p.tf()), 4) << " day, f_max = " << p.f_max << " m/s^2\n\n";

    if (r.edelbaum) {
        const EdelbaumTransfer& e = *r.edelbaum;
        os << "Edelbaum minimum-time transfer (RAAN free)\n";
        os << "  delta-V " << detail::fixed(e.delta_v, 4) << " m/s, duration "
           << detail::fixed(s_to_days(e.duration), 4) << " day, initial beta "
           << detail::fixed(rad_to_deg(e.beta0), 4) << " deg\n";
        os << "  partials dDV/dV0 " << detail::fixed(edelbaum_costates(e).dv_dv0, 6)
           << ", dDV/dI0 " << detail::fixed(edelbaum_costates(e).dv_di0, 3) << " m/s/rad\n\n";
    }
    if (!r.branches.empty()) {
        os << "RAAN branch scan (sorted by cost)\n";
        for (const SesSolution& s : r.branches) {
            os << "  branch " << s.raan_branch << ": delta-V " << detail::fixed(s.delta_v, 4)
               << " m/s\n";
        }
        os << '\n';
    }
    if (r.ses) {
        const SesSolution& s = *r.ses;
        os << "Split Edelbaum strategy\n";
        os << "  initialization V_d = " << detail::fixed(s.guess.v_d, 2) << " m/s, I_d = "
           << detail::fixed(rad_to_deg(s.guess.i_d), 4) << " deg\n";
        os << "  drift orbit    V_d = " << detail::fixed(s.v_d, 3) << " m/s ("
           << detail::fixed(m_to_km(altitude_from_velocity(s.v_d, p.g)), 2) << " km), I_d = "
           << detail::fixed(rad_to_deg(s.i_d), 4) << " deg, precession "
           << detail::fixed(rate_to_deg_per_day(s.coast_rate()), 4) << " deg/day\n";
        os << "  delta-V " << detail::fixed(s.delta_v, 4) << " m/s (legs "
           << detail::fixed(s.legs.leg1.delta_v, 3) << " + " << detail::fixed(s.legs.leg2.delta_v, 3)
           << ")\n";
        os << format_sequence_table(ses_sequence_table(s, p), p.g) << '\n';
    }
    if (r.guess) {
        os << "SES sensitivities\n" << format_sensitivity_table(*r.guess) << '\n';
    }
    if (r.solution) {
        os << "Shooting\n" << format_shooting_table(*r.solution) << '\n';
        os << "Optimal sequence\n" << format_sequence_table(r.solution->sequences, p.g) << '\n';
        if (cfg.mass_kg && cfg.exhaust_velocity_mps) {
            const PropellantBudget b
                = propellant_budget(r.solution->delta_v, *cfg.mass_kg, *cfg.exhaust_velocity_mps);
            os << "Propellant " << detail::fixed(b.mc, 3) << " kg for m0 = " << b.m0
               << " kg, ve = " << b.ve << " m/s\n\n";
        }
    }
    if (r.certificate) {
        const ExtremalCertificate& c = *r.certificate;
        os << "Extremal checks\n";
        os << "  H = " << detail::sci(c.hamiltonian * seconds_per_day, 6)
           << " m/s/day, relative drift " << detail::sci(c.hamiltonian_drift, 2) << '\n';
        os << "  p_raan drift " << detail::sci(c.p_raan_drift, 2) << ", min f*S "
           << detail::sci(c.min_fs, 2) << ", switching pattern "
           << (c.switching_pattern_ok ? "ok" : "BAD") << '\n';
        os << "  coast precession " << detail::fixed(rate_to_deg_per_day(c.coast_rate), 5)
           << " deg/day, H/p_raan " << detail::fixed(rate_to_deg_per_day(c.drift_rate_from_h), 5)
           << " deg/day\n";
        os << "  step-halving change " << detail::sci(c.step_halving_error, 2) << '\n';
        os << "  status " << (c.ok() ? "ok" : "FAILED") << "\n\n";
    }
    if (!r.singular_report.empty()) {
        os << r.singular_report << '\n';
    }
    for (const StageError& e : r.errors) {
        os << "stage " << e.stage << " failed: " << e.message << '\n';
    }
    return os.str();
}

/// Writes report.txt and, when available, trajectory.csv, solution.json and
/// singular_profile.csv into `dir`.
inline void write_outputs(const PipelineResult& r, const MissionConfig& cfg,
                          const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) {
            throw std::runtime_error("cannot write " + (dir / name).string());
        }
        return f;
    };
    {
        auto f = open("report.txt");
        f << format_report(r, cfg);
    }
    if (r.solution) {
        auto f = open("trajectory.csv");
        write_trajectory_csv(f, r.solution->trajectory, CsvUnits::display);
        auto j = open("solution.json");
        j << solution_to_json(*r.solution, propagation_options(cfg)).dump(2) << '\n';
    }
    if (!r.singular_profile_csv.empty()) {
        auto f = open("singular_profile.csv");
        f << r.singular_profile_csv;
    }
}

} // namespace lowthrust

#endif // LOWTHRUST_PIPELINE_HPP
