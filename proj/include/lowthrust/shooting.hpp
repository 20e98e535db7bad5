#ifndef LOWTHRUST_SHOOTING_HPP
#define LOWTHRUST_SHOOTING_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lowthrust/core_model.hpp"
#include "lowthrust/edelbaum.hpp"
#include "lowthrust/errors.hpp"
#include "lowthrust/problem.hpp"
#include "lowthrust/propagator.hpp"
#include "lowthrust/sensitivity.hpp"
#include "lowthrust/ses.hpp"

namespace lowthrust {

/// Unknowns of the burn/coast/burn shooting problem. Costates are cost
/// gradients dJ*/dX(t0); `adjoint()` gives the PMP multipliers.
struct ShootingUnknowns {
    double p_v0 = 0.0;
    double p_i0 = 0.0;
    double p_raan0 = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;

    Costate adjoint() const { return Costate{-p_v0, -p_i0, -p_raan0, -1.0}; }

    static ShootingUnknowns from_adjoint(const Costate& c, double t1, double t2)
    {
        return {-c.p_v, -c.p_i, -c.p_raan, t1, t2};
    }

    std::array<double, 5> as_array() const { return {p_v0, p_i0, p_raan0, t1, t2}; }

    static ShootingUnknowns from_array(const std::array<double, 5>& a)
    {
        return {a[0], a[1], a[2], a[3], a[4]};
    }
};

using Residual = std::array<double, 5>;

struct ShootingOptions {
    PropagationOptions propagation;
    double tolerance = 1e-8;  ///< on the scaled residual norm
    int max_iterations = 30;
    double fd_step = 1e-7;    ///< relative, on scaled unknowns
    int max_halvings = 20;
};

struct TransferSolution {
    TransferProblem problem;
    ShootingUnknowns unknowns;
    ShootingUnknowns initial;       ///< Newton starting point
    Residual initial_residual{};    ///< native units at the starting point
    Residual residual{};            ///< scaled
    Residual residual_native{};     ///< m/s, rad, rad, -, -
    double residual_norm = 0.0;     ///< scaled, Euclidean
    double delta_v = 0.0;
    int iterations = 0;
    bool boundary = false;          ///< coast-only (t1 = t0, t2 = tf) solution
    Trajectory trajectory;
    SequenceTable sequences;

    ThrustSchedule schedule() const
    {
        return {problem.t0(), unknowns.t1, unknowns.t2, problem.tf()};
    }
};

namespace detail {

inline Residual residual_scale(const TransferProblem& problem)
{
    return {problem.start.v, 1.0, 1.0, 1.0, 1.0};
}

inline Residual native_residual(const ScheduledTrajectory& tr, const TransferProblem& problem)
{
    const OrbitState& x = tr.final.state;
    return {x.v - problem.target.v, x.inc - problem.target.inc,
            x.raan - problem.target_raan(),
            optimal_switching_function(tr.at_t1.costate, tr.at_t1.state.v),
            optimal_switching_function(tr.at_t2.costate, tr.at_t2.state.v)};
}

inline double norm(const Residual& r)
{
    double s = 0.0;
    for (double v : r) {
        s += v * v;
    }
    return std::sqrt(s);
}

inline Residual scaled(const Residual& r, const TransferProblem& problem)
{
    const Residual sc = residual_scale(problem);
    Residual out{};
    for (std::size_t i = 0; i < 5; ++i) {
        out[i] = r[i] / sc[i];
    }
    return out;
}

inline bool pure_drift(const TransferProblem& p)
{
    const double drift = p.start.raan + precession_rate(p.start, p.g) * p.duration();
    return std::abs(p.target.v - p.start.v) <= 1e-12 * p.start.v
        && std::abs(p.target.inc - p.start.inc) <= 1e-12
        && std::abs(drift - p.target_raan()) <= 1e-10;
}

} // namespace detail

/// Shooting function in native units: final V, I, RAAN errors and the
/// switching function at both switching dates.
inline Residual shooting_residual(const ShootingUnknowns& u, const TransferProblem& problem,
                                  const PropagationOptions& opt = {})
{
    const ThrustSchedule sched{problem.t0(), u.t1, u.t2, problem.tf()};
    if (!sched.ordered()) {
        throw std::invalid_argument("shooting_residual: switching dates out of order");
    }
    ScheduledTrajectory tr;
    try {
        tr = propagate_schedule(problem, u.adjoint(), sched, opt, false);
    } catch (const Error& e) {
        throw PropagationError(std::string("shooting_residual: ") + e.what());
    }
    return detail::native_residual(tr, problem);
}

/// Scaled shooting function (velocity by V0, angles in rad, S as is).
inline Residual scaled_shooting_residual(const ShootingUnknowns& u,
                                         const TransferProblem& problem,
                                         const PropagationOptions& opt = {})
{
    return detail::scaled(shooting_residual(u, problem, opt), problem);
}

/// Propagates given unknowns and fills a solution record (no iteration).
inline TransferSolution evaluate_transfer(const TransferProblem& problem,
                                          const ShootingUnknowns& u,
                                          const PropagationOptions& opt = {})
{
    TransferSolution sol;
    sol.problem = problem;
    sol.unknowns = u;
    sol.initial = u;
    const ThrustSchedule sched = sol.schedule();
    const ScheduledTrajectory tr = propagate_schedule(problem, u.adjoint(), sched, opt, true);
    sol.residual_native = detail::native_residual(tr, problem);
    sol.initial_residual = sol.residual_native;
    sol.residual = detail::scaled(sol.residual_native, problem);
    sol.residual_norm = detail::norm(sol.residual);
    sol.delta_v = problem.f_max * sched.burn_time();
    sol.trajectory = tr.samples;

    const GravityModel& g = problem.g;
    const double f = problem.f_max;
    const double dv1 = f * (u.t1 - problem.t0());
    const OrbitState x0 = problem.start;
    sol.sequences = {
        {"t0", x0.t, x0.v, x0.inc, x0.raan, precession_rate(x0, g), 0.0},
        {"t1", u.t1, tr.at_t1.state.v, tr.at_t1.state.inc, tr.at_t1.state.raan,
         precession_rate(tr.at_t1.state, g), dv1},
        {"t2", u.t2, tr.at_t2.state.v, tr.at_t2.state.inc, tr.at_t2.state.raan,
         precession_rate(tr.at_t2.state, g), dv1},
        {"tf", problem.tf(), tr.final.state.v, tr.final.state.inc, tr.final.state.raan,
         precession_rate(tr.final.state, g), sol.delta_v},
    };
    return sol;
}

/// Damped Newton on the scaled shooting function with a forward-difference
/// Jacobian. Steps that break t0 <= t1 <= t2 <= tf or fail to reduce the
/// residual norm are halved.
inline TransferSolution solve_shooting(const TransferProblem& problem,
                                       const ShootingUnknowns& guess,
                                       const ShootingOptions& opt = {})
{
    problem.validate();
    if (detail::pure_drift(problem)) {
        TransferSolution sol = evaluate_transfer(
            problem, ShootingUnknowns{0.0, 0.0, 0.0, problem.t0(), problem.tf()},
            opt.propagation);
        sol.boundary = true;
        return sol;
    }
    for (double v : guess.as_array()) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("solve_shooting: non-finite guess");
        }
    }
    const double span = problem.duration();
    auto scale_of = [span](double x) { return std::abs(x) > 0.0 ? std::abs(x) : 1.0; };
    const std::array<double, 5> uscale{scale_of(guess.p_v0), scale_of(guess.p_i0),
                                       scale_of(guess.p_raan0), span, span};

    auto to_unknowns = [&](const Eigen::Matrix<double, 5, 1>& z) {
        std::array<double, 5> a{};
        for (int i = 0; i < 5; ++i) {
            a[i] = z(i) * uscale[i];
        }
        return ShootingUnknowns::from_array(a);
    };
    auto ordered = [&](const ShootingUnknowns& u) {
        return problem.t0() <= u.t1 && u.t1 <= u.t2 && u.t2 <= problem.tf();
    };
    auto eval = [&](const ShootingUnknowns& u) {
        const Residual r = scaled_shooting_residual(u, problem, opt.propagation);
        Eigen::Matrix<double, 5, 1> v;
        for (int i = 0; i < 5; ++i) {
            v(i) = r[i];
        }
        return v;
    };

    Eigen::Matrix<double, 5, 1> z;
    {
        const auto a = guess.as_array();
        for (int i = 0; i < 5; ++i) {
            z(i) = a[i] / uscale[i];
        }
    }
    if (!ordered(guess)) {
        throw std::invalid_argument("solve_shooting: guess switching dates out of order");
    }
    Eigen::Matrix<double, 5, 1> F = eval(guess);
    const Residual initial_native = shooting_residual(guess, problem, opt.propagation);

    int iter = 0;
    for (; iter < opt.max_iterations && F.norm() >= opt.tolerance; ++iter) {
        Eigen::Matrix<double, 5, 5> J;
        for (int j = 0; j < 5; ++j) {
            Eigen::Matrix<double, 5, 1> zp = z;
            double dz = opt.fd_step * std::max(1.0, std::abs(z(j)));
            // Keep the perturbed dates inside the window.
            zp(j) += dz;
            if (j >= 3 && !ordered(to_unknowns(zp))) {
                dz = -dz;
                zp(j) = z(j) + dz;
            }
            J.col(j) = (eval(to_unknowns(zp)) - F) / dz;
        }
        Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(J);
        if (lu.rank() < 5) {
            throw ConvergenceError("solve_shooting: singular Jacobian");
        }
        const Eigen::Matrix<double, 5, 1> step = lu.solve(-F);

        double lambda = 1.0;
        bool accepted = false;
        bool order_ok_seen = false;
        for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
            const Eigen::Matrix<double, 5, 1> trial = z + lambda * step;
            const ShootingUnknowns ut = to_unknowns(trial);
            if (!ordered(ut)) {
                continue;
            }
            order_ok_seen = true;
            Eigen::Matrix<double, 5, 1> Ft;
            try {
                Ft = eval(ut);
            } catch (const Error&) {
                continue;
            }
            if (Ft.allFinite() && Ft.norm() < F.norm()) {
                z = trial;
                F = Ft;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!order_ok_seen) {
                throw ConvergenceError("solve_shooting: schedule-order violation unrecoverable");
            }
            throw ConvergenceError("solve_shooting: line search failed, residual norm "
                                   + std::to_string(F.norm()));
        }
    }
    if (!(F.norm() < opt.tolerance)) {
        throw ConvergenceError("solve_shooting: max iterations exceeded, residual norm "
                               + std::to_string(F.norm()));
    }
    TransferSolution sol = evaluate_transfer(problem, to_unknowns(z), opt.propagation);
    sol.initial = guess;
    sol.initial_residual = initial_native;
    sol.iterations = iter;
    return sol;
}

/// Seed from SES sensitivities and the SES switching dates.
inline ShootingUnknowns shooting_guess(const CostateGuess& guess, const SesSolution& ses)
{
    return {guess.p_v0, guess.p_i0, guess.p_raan0, ses.t1, ses.t2};
}

inline TransferSolution solve_shooting(const TransferProblem& problem, const CostateGuess& guess,
                                       const SesSolution& ses, const ShootingOptions& opt = {})
{
    return solve_shooting(problem, shooting_guess(guess, ses), opt);
}

/// Necessary-condition checks on a propagated extremal.
struct ExtremalCertificate {
    double hamiltonian = 0.0;        ///< H at t0 (PMP convention), m/s^2
    double hamiltonian_drift = 0.0;  ///< max |H - H0| / (1 + |H0|)
    double hamiltonian_jump = 0.0;   ///< max |H - H0| / |H0| (0 when H0 = 0)
    double p_raan_drift = 0.0;       ///< max |p - p(t0)| / (1 + |p(t0)|)
    double min_fs = 0.0;             ///< min f*S over samples
    bool switching_pattern_ok = true;
    double coast_rate = 0.0;         ///< rad/s on the coast
    double drift_rate_from_h = 0.0;  ///< H / p_raan, rad/s (0 if p_raan = 0)
    double coast_rate_mismatch = 0.0; ///< relative
    double step_halving_error = 0.0; ///< final-state relative change at half step
    bool edelbaum_equivalent = false;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

struct CertificateTolerances {
    double hamiltonian = 1e-6;
    double p_raan = 1e-6;
    double fs = 1e-9;
    double coast_rate = 1e-3;
    double step_halving = 1e-6;
};

inline ExtremalCertificate verify_extremal(const TransferSolution& sol,
                                           const PropagationOptions& prop = {},
                                           const CertificateTolerances& tol = {})
{
    ExtremalCertificate c;
    const Trajectory& tr = sol.trajectory;
    if (tr.empty()) {
        c.violations.push_back("empty trajectory");
        return c;
    }
    const double h0 = tr.front().h;
    const double pr0 = tr.front().costate.p_raan;
    c.hamiltonian = h0;
    c.min_fs = std::numeric_limits<double>::infinity();
    const double t1 = sol.unknowns.t1;
    const double t2 = sol.unknowns.t2;
    const double eps_t = 1e-6;
    for (const ExtremalPoint& p : tr) {
        c.hamiltonian_drift = std::max(c.hamiltonian_drift, std::abs(p.h - h0) / (1.0 + std::abs(h0)));
        if (h0 != 0.0) {
            c.hamiltonian_jump = std::max(c.hamiltonian_jump, std::abs(p.h - h0) / std::abs(h0));
        }
        c.p_raan_drift = std::max(c.p_raan_drift,
                                  std::abs(p.costate.p_raan - pr0) / (1.0 + std::abs(pr0)));
        c.min_fs = std::min(c.min_fs, p.f * p.s);
        const double t = p.state.t;
        const bool in_burn = (t < t1 - eps_t) || (t > t2 + eps_t);
        const bool in_coast = t > t1 + eps_t && t < t2 - eps_t;
        if (!sol.boundary) {
            if (in_burn && p.f > 0.0 && !(p.s > 0.0)) {
                c.switching_pattern_ok = false;
            }
            if (in_coast && !(p.s < 0.0)) {
                c.switching_pattern_ok = false;
            }
        }
    }
    if (c.hamiltonian_drift > tol.hamiltonian) {
        c.violations.push_back("Hamiltonian drift " + std::to_string(c.hamiltonian_drift));
    }
    if (c.p_raan_drift > tol.p_raan) {
        c.violations.push_back("p_raan drift " + std::to_string(c.p_raan_drift));
    }
    if (c.min_fs < -tol.fs) {
        c.violations.push_back("f*S negative " + std::to_string(c.min_fs));
    }
    if (!c.switching_pattern_ok) {
        c.violations.push_back("switching function sign pattern is not burn/coast/burn");
    }

    const bool has_coast = t2 > t1;
    if (has_coast) {
        const auto coast = std::find_if(tr.begin(), tr.end(), [&](const ExtremalPoint& p) {
            return p.f == 0.0 && p.state.t >= t1;
        });
        if (coast != tr.end()) {
            c.coast_rate = precession_rate(coast->state, sol.problem.g);
        }
    }
    if (pr0 != 0.0) {
        c.drift_rate_from_h = h0 / pr0;
        if (has_coast && c.coast_rate != 0.0) {
            c.coast_rate_mismatch = std::abs(c.drift_rate_from_h - c.coast_rate) / std::abs(c.coast_rate);
            if (c.coast_rate_mismatch > tol.coast_rate) {
                c.violations.push_back("coast rate differs from H/p_raan");
            }
        }
    } else if (!has_coast && sol.delta_v > 0.0) {
        // Single burn with p_raan = 0: must coincide with the Edelbaum arc.
        const OrbitState& x0 = sol.problem.start;
        const ExtremalPoint& first = tr.front();
        EdelbaumTransfer e;
        e.v0 = x0.v;
        e.i0 = x0.inc;
        e.f = sol.problem.f_max;
        e.beta0 = first.beta;
        e.duration = sol.problem.duration();
        e.delta_v = e.f * e.duration;
        const double c0 = x0.v * std::cos(e.beta0) - e.f * e.duration;
        const double s0 = x0.v * std::sin(e.beta0);
        const double v_end = std::hypot(c0, s0);
        const double i_end = x0.inc + 2.0 / units::pi * (std::atan2(s0, c0) - e.beta0);
        const OrbitState& xf = tr.back().state;
        c.edelbaum_equivalent = std::abs(xf.v - v_end) <= 1e-6 * v_end
                             && std::abs(xf.inc - i_end) <= 1e-6;
        if (!c.edelbaum_equivalent) {
            c.violations.push_back("p_raan = 0 burn is not the Edelbaum arc");
        }
    }

    if (!sol.boundary) {
        PropagationOptions half = prop;
        half.step *= 0.5;
        const ScheduledTrajectory a
            = propagate_schedule(sol.problem, sol.unknowns.adjoint(), sol.schedule(), prop, false);
        const ScheduledTrajectory b
            = propagate_schedule(sol.problem, sol.unknowns.adjoint(), sol.schedule(), half, false);
        const OrbitState& xa = a.final.state;
        const OrbitState& xb = b.final.state;
        c.step_halving_error = std::max({std::abs(xa.v - xb.v) / xb.v, std::abs(xa.inc - xb.inc),
                                         std::abs(xa.raan - xb.raan)});
        if (c.step_halving_error > tol.step_halving) {
            c.violations.push_back("step-halving check failed");
        }
    }
    return c;
}

} // namespace lowthrust

#endif // LOWTHRUST_SHOOTING_HPP
