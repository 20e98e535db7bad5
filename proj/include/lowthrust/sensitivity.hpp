#ifndef LOWTHRUST_SENSITIVITY_HPP
#define LOWTHRUST_SENSITIVITY_HPP

#include <array>
#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "lowthrust/core_model.hpp"
#include "lowthrust/errors.hpp"
#include "lowthrust/problem.hpp"
#include "lowthrust/ses.hpp"
#include "lowthrust/units.hpp"

namespace lowthrust {

/// Perturbation sizes for the finite-difference cost sensitivities.
struct SensitivityOptions {
    double altitude_step = units::km_to_m(50.0);
    double inclination_step = units::deg_to_rad(0.1);
    double raan_step = units::deg_to_rad(5.0);
    double date_step = units::days_to_s(5.0);
    SesOptions ses;
};

/// One perturbed quantity: SES costs on both sides and the resulting
/// derivative in SI units (per m/s, per rad or per s).
struct SensitivityRow {
    std::string name;
    double delta_minus = 0.0; ///< signed perturbation applied on the "minus" side
    double delta_plus = 0.0;  ///< signed perturbation applied on the "plus" side
    std::optional<double> cost_minus;
    std::optional<double> cost_plus;
    double derivative = 0.0;
    bool one_sided = false;
};

/// Shooting seed built from SES cost sensitivities.
///
/// Components are cost gradients dJ*/dX(t0) (m/s per unit state); the PMP
/// adjoint with p0 = -1 is their negation.
struct CostateGuess {
    double p_v0 = 0.0;
    double p_i0 = 0.0;
    double p_raan0 = 0.0;
    double h0 = 0.0;        ///< Hamiltonian estimate, m/s per s
    double p0 = -1.0;
    double reference_cost = 0.0;
    double dj_dtf = 0.0;    ///< total derivative wrt the final date, m/s per s
    bool one_sided = false; ///< at least one fallback difference was used
    SensitivityOptions provenance;
    std::vector<SensitivityRow> rows; ///< velocity, inclination, RAAN, final date
};

namespace detail {

enum class Perturb { velocity, inclination, raan, final_date, initial_date };

inline TransferProblem perturbed(const TransferProblem& base, Perturb what, double sign,
                                 const SensitivityOptions& opt)
{
    TransferProblem p = base;
    switch (what) {
    case Perturb::velocity:
        p.start.v = velocity_from_altitude(base.start.altitude(base.g) + sign * opt.altitude_step,
                                           base.g);
        break;
    case Perturb::inclination:
        p.start.inc += sign * opt.inclination_step;
        break;
    case Perturb::raan:
        p.start.raan += sign * opt.raan_step;
        break;
    case Perturb::final_date:
        p.target.t += sign * opt.date_step;
        p.target.raan += precession_rate(base.target, base.g) * sign * opt.date_step;
        break;
    case Perturb::initial_date:
        // Natural precession carries the initial RAAN to the shifted date.
        p.start.t += sign * opt.date_step;
        p.start.raan += precession_rate(base.start, base.g) * sign * opt.date_step;
        break;
    }
    return p;
}

inline double state_delta(const TransferProblem& base, const TransferProblem& p, Perturb what)
{
    switch (what) {
    case Perturb::velocity:
        return p.start.v - base.start.v;
    case Perturb::inclination:
        return p.start.inc - base.start.inc;
    case Perturb::raan:
        return p.start.raan - base.start.raan;
    case Perturb::final_date:
        return p.target.t - base.target.t;
    case Perturb::initial_date:
        return p.start.t - base.start.t;
    }
    return 0.0;
}

inline std::optional<double> try_ses_cost(const TransferProblem& p, const SesOptions& opt)
{
    try {
        return solve_ses(p, opt).delta_v;
    } catch (const Error&) {
        return std::nullopt;
    }
}

/// Central difference with one-sided fallback. Throws when neither side
/// can be solved.
inline SensitivityRow difference_row(const std::string& name, const TransferProblem& base,
                                     double reference_cost, Perturb what,
                                     std::optional<double> cost_minus,
                                     std::optional<double> cost_plus,
                                     const SensitivityOptions& opt)
{
    SensitivityRow row;
    row.name = name;
    row.delta_minus = state_delta(base, perturbed(base, what, -1.0, opt), what);
    row.delta_plus = state_delta(base, perturbed(base, what, +1.0, opt), what);
    row.cost_minus = cost_minus;
    row.cost_plus = cost_plus;
    if (cost_minus && cost_plus) {
        row.derivative = (*cost_plus - *cost_minus) / (row.delta_plus - row.delta_minus);
    } else if (cost_plus) {
        row.derivative = (*cost_plus - reference_cost) / row.delta_plus;
        row.one_sided = true;
    } else if (cost_minus) {
        row.derivative = (reference_cost - *cost_minus) / row.delta_minus;
        row.one_sided = true;
    } else {
        throw ConvergenceError("sensitivity: SES failed on both sides of " + name);
    }
    return row;
}

struct PerturbedCosts {
    std::optional<double> minus;
    std::optional<double> plus;
};

/// Solves the SES on both sides of each perturbation concurrently.
inline std::vector<PerturbedCosts> perturbed_costs(const TransferProblem& base,
                                                   const std::vector<Perturb>& which,
                                                   const SensitivityOptions& opt)
{
    std::vector<std::future<std::optional<double>>> jobs;
    for (Perturb w : which) {
        for (double sign : {-1.0, 1.0}) {
            TransferProblem p = perturbed(base, w, sign, opt);
            jobs.push_back(std::async(std::launch::async, [p, &opt] {
                return try_ses_cost(p, opt.ses);
            }));
        }
    }
    std::vector<PerturbedCosts> out(which.size());
    for (std::size_t i = 0; i < which.size(); ++i) {
        out[i].minus = jobs[2 * i].get();
        out[i].plus = jobs[2 * i + 1].get();
    }
    return out;
}

} // namespace detail

/// Cost sensitivities wrt the initial state (costate guess) and the final
/// date (Hamiltonian estimate), from SES re-solves.
inline CostateGuess estimate_sensitivities(const TransferProblem& problem,
                                           const SensitivityOptions& opt = {})
{
    using detail::Perturb;
    const double reference = solve_ses(problem, opt.ses).delta_v;
    const std::vector<Perturb> which{Perturb::velocity, Perturb::inclination, Perturb::raan,
                                     Perturb::final_date};
    const auto costs = detail::perturbed_costs(problem, which, opt);
    const std::array<const char*, 4> names{"initial velocity", "initial inclination",
                                           "initial RAAN", "final date"};
    CostateGuess g;
    g.reference_cost = reference;
    g.provenance = opt;
    for (std::size_t i = 0; i < which.size(); ++i) {
        g.rows.push_back(detail::difference_row(names[i], problem, reference, which[i],
                                                costs[i].minus, costs[i].plus, opt));
        g.one_sided = g.one_sided || g.rows.back().one_sided;
    }
    g.p_v0 = g.rows[0].derivative;
    g.p_i0 = g.rows[1].derivative;
    g.p_raan0 = g.rows[2].derivative;
    g.dj_dtf = g.rows[3].derivative;
    g.h0 = -g.dj_dtf + g.p_raan0 * precession_rate(problem.target, problem.g);
    return g;
}

/// Initial costate estimate (cost gradients wrt V, I, RAAN at t0).
inline CostateGuess estimate_costates(const TransferProblem& problem,
                                      const SensitivityOptions& opt = {})
{
    return estimate_sensitivities(problem, opt);
}

/// Hamiltonian estimate -dJ*/dtf + p_raan * dRAAN_f/dt, m/s per s.
inline double estimate_hamiltonian(const TransferProblem& problem,
                                   const SensitivityOptions& opt = {})
{
    return estimate_sensitivities(problem, opt).h0;
}

/// Total derivatives of the SES cost wrt the initial and final dates, the
/// shifted endpoint RAAN following natural precession.
struct DateDerivatives {
    double dj_dt0 = 0.0;
    double dj_dtf = 0.0;
};

inline DateDerivatives date_derivatives(const TransferProblem& problem,
                                        const SensitivityOptions& opt = {})
{
    using detail::Perturb;
    const double reference = solve_ses(problem, opt.ses).delta_v;
    const std::vector<Perturb> which{Perturb::initial_date, Perturb::final_date};
    const auto costs = detail::perturbed_costs(problem, which, opt);
    DateDerivatives d;
    d.dj_dt0 = detail::difference_row("initial date", problem, reference, which[0],
                                      costs[0].minus, costs[0].plus, opt)
                   .derivative;
    d.dj_dtf = detail::difference_row("final date", problem, reference, which[1],
                                      costs[1].minus, costs[1].plus, opt)
                   .derivative;
    return d;
}

} // namespace lowthrust

#endif // LOWTHRUST_SENSITIVITY_HPP
