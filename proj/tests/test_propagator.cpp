#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "lowthrust/edelbaum.hpp"
#include "lowthrust/propagator.hpp"
#include "lowthrust/singular.hpp"
#include "test_support.hpp"

using namespace lowthrust;
using lowthrust::testing::application_problem;
using lowthrust::testing::rel;
using lowthrust::testing::uniform;

namespace {

const GravityModel g = GravityModel::earth();

// Converged application-case unknowns, as PMP adjoints.
const Costate kConverged{0.644335, 9215.915, 816.947, -1.0};
const double kT1 = units::days_to_s(1.091998);
const double kT2 = units::days_to_s(99.113984);

double hamiltonian_of_beta(const Costate& c, double v, double beta)
{
    return c.p0 - c.p_v * std::cos(beta) + c.p_i * 2.0 / (units::pi * v) * std::sin(beta);
}

Costate random_costate(std::mt19937_64& r)
{
    return {uniform(r, -2.0, 2.0), uniform(r, -2e4, 2e4), uniform(r, -2e3, 2e3), -1.0};
}

} // namespace

TEST(OptimalBeta, PureVelocityAndInclination)
{
    EXPECT_EQ(optimal_beta(Costate{-1.0, 0.0, 0.0, -1.0}, 7450.0), 0.0);
    EXPECT_DOUBLE_EQ(optimal_beta(Costate{0.0, 5.0, 0.0, -1.0}, 7450.0), units::pi / 2.0);
}

TEST(OptimalBeta, DegenerateCostateRejected)
{
    EXPECT_THROW(optimal_beta(Costate{0.0, 0.0, 3.0, -1.0}, 7450.0), DegenerateControl);
}

TEST(OptimalBeta, MaximisesHamiltonianOnDenseGrid)
{
    auto r = lowthrust::testing::rng(17);
    for (int i = 0; i < 200; ++i) {
        const Costate c = random_costate(r);
        const double v = uniform(r, 6500.0, 8000.0);
        const double b = optimal_beta(c, v);
        const double hb = hamiltonian_of_beta(c, v, b);
        double best = -1e300;
        for (int k = 0; k < 20000; ++k) {
            best = std::max(best, hamiltonian_of_beta(c, v, -units::pi + 2.0 * units::pi * k / 20000));
        }
        EXPECT_GE(hb, best - 1e-12 * std::abs(best) - 1e-12);
        const double d1 = c.p_v * std::sin(b) + c.p_i * 2.0 / (units::pi * v) * std::cos(b);
        const double d2 = c.p_v * std::cos(b) - c.p_i * 2.0 / (units::pi * v) * std::sin(b);
        EXPECT_NEAR(d1, 0.0, 1e-10 * (std::abs(c.p_v) + std::abs(c.p_i) / v));
        EXPECT_LE(d2, 0.0);
    }
}

TEST(SwitchingFunction, DirectSubstitution)
{
    EXPECT_DOUBLE_EQ(switching_function(Costate{-1.0, 0.0, 0.0, -1.0}, 7450.0, 0.0), 0.0);
}

TEST(SwitchingFunction, BoundedBelowByCostMultiplier)
{
    auto r = lowthrust::testing::rng(29);
    for (int i = 0; i < 500; ++i) {
        const Costate c = random_costate(r);
        const double v = uniform(r, 6500.0, 8000.0);
        const double s = switching_function(c, v, optimal_beta(c, v));
        EXPECT_GE(s, c.p0);
        EXPECT_NEAR(s, optimal_switching_function(c, v), 1e-12 * (1.0 + std::abs(s)));
    }
}

TEST(SwitchingFunction, VanishesAtConvergedSwitchingDates)
{
    const TransferProblem p = application_problem();
    const ScheduledTrajectory tr = propagate_schedule(p, kConverged, {p.t0(), kT1, kT2, p.tf()});
    EXPECT_NEAR(tr.at_t1.s, 0.0, 1e-5);
    EXPECT_NEAR(tr.at_t2.s, 0.0, 1e-5);
}

TEST(ExtremalPoint, HamiltonianIdentity)
{
    auto r = lowthrust::testing::rng(31);
    for (int i = 0; i < 100; ++i) {
        const Costate c = random_costate(r);
        const OrbitState x{uniform(r, 6500.0, 8000.0), uniform(r, 0.1, 3.0), 0.0, 0.0};
        const double f = uniform(r, 0.0, 5e-3);
        const ExtremalPoint p = make_extremal_point(x, c, f, g);
        EXPECT_NEAR(p.h, hamiltonian(c, x, f, p.beta, g), 1e-12 * (1.0 + std::abs(p.h)));
    }
}

TEST(PropagateBurn, ZeroThrustMatchesClosedFormCoast)
{
    auto r = lowthrust::testing::rng(37);
    for (int i = 0; i < 20; ++i) {
        const Costate c = random_costate(r);
        const OrbitState x{uniform(r, 6500.0, 8000.0), uniform(r, 0.1, 3.0), uniform(r, -1.0, 1.0), 1000.0};
        const ExtremalPoint start = make_extremal_point(x, c, 0.0, g);
        const double t_end = x.t + units::days_to_s(uniform(r, 0.5, 30.0));
        const ExtremalPoint a = propagate_burn(start, 0.0, t_end, g).back();
        const ExtremalPoint b = propagate_coast(start, t_end, g);
        EXPECT_DOUBLE_EQ(a.state.v, x.v);
        EXPECT_DOUBLE_EQ(a.state.inc, x.inc);
        EXPECT_LT(std::abs(a.state.raan - b.state.raan), 1e-10 * (1.0 + std::abs(b.state.raan)));
        EXPECT_LT(std::abs(a.costate.p_v - b.costate.p_v), 1e-10 * (1.0 + std::abs(b.costate.p_v)));
        EXPECT_LT(std::abs(a.costate.p_i - b.costate.p_i), 1e-10 * (1.0 + std::abs(b.costate.p_i)));
        EXPECT_EQ(a.costate.p_raan, b.costate.p_raan);
    }
}

TEST(PropagateCoast, IdentityAndFrozenCostates)
{
    const OrbitState x{7400.0, 1.7, 0.2, 50.0};
    const ExtremalPoint s = make_extremal_point(x, Costate{0.5, 100.0, 0.0, -1.0}, 0.0, g);
    const ExtremalPoint same = propagate_coast(s, x.t, g);
    EXPECT_EQ(same.state.raan, x.raan);
    EXPECT_EQ(same.costate.p_v, 0.5);
    const ExtremalPoint later = propagate_coast(s, x.t + 1e6, g);
    EXPECT_EQ(later.costate.p_v, 0.5);
    EXPECT_EQ(later.costate.p_i, 100.0);
    EXPECT_NEAR(later.state.raan, x.raan + precession_rate(x, g) * 1e6, 1e-12);
    EXPECT_THROW(propagate_coast(s, x.t - 1.0, g), std::invalid_argument);
}

TEST(PropagateBurn, RejectsBadArguments)
{
    const ExtremalPoint s = make_extremal_point({7400.0, 1.7, 0.0, 10.0}, kConverged, 1e-3, g);
    EXPECT_THROW(propagate_burn(s, 1e-3, 0.0, g), std::invalid_argument);
    EXPECT_THROW(propagate_burn(s, -1e-3, 100.0, g), std::invalid_argument);
    EXPECT_THROW(propagate_burn(s, 1e-3, 100.0, g, 0.0), std::invalid_argument);
}

TEST(PropagateBurn, FirstApplicationBurn)
{
    const TransferProblem p = application_problem();
    const ExtremalPoint s = make_extremal_point(p.start, kConverged, p.f_max, g);
    const ExtremalPoint e = propagate_burn(s, p.f_max, kT1, g).back();
    EXPECT_NEAR(units::m_to_km(e.state.altitude(g)), 407.1, 0.1);
    EXPECT_NEAR(units::rad_to_deg(e.state.inc), 99.22, 0.005);
    EXPECT_NEAR(units::rad_to_deg(e.state.raan), 1.19, 0.01);
}

TEST(PropagateBurn, HamiltonianDriftBelowTolerance)
{
    // 100 days of continuous thrust would leave the domain; 100 days of
    // mixed burn/coast with the converged costate covers the same span.
    const TransferProblem p = application_problem();
    const ScheduledTrajectory tr = propagate_schedule(p, kConverged, {p.t0(), kT1, kT2, p.tf()});
    const double h0 = tr.samples.front().h;
    for (const ExtremalPoint& q : tr.samples) {
        EXPECT_LT(std::abs(q.h - h0) / (1.0 + std::abs(h0)), 1e-6);
    }
    // Halving the step leaves the end point unchanged to RK4 accuracy.
    PropagationOptions half;
    half.step *= 0.5;
    const ScheduledTrajectory tr2 = propagate_schedule(p, kConverged, {p.t0(), kT1, kT2, p.tf()}, half);
    EXPECT_LT(rel(tr.final.state.v, tr2.final.state.v), 1e-10);
    EXPECT_LT(std::abs(tr.final.state.raan - tr2.final.state.raan), 1e-10);
}

TEST(PropagateSchedule, ZeroLengthCoastEqualsSingleBurn)
{
    TransferProblem p = application_problem();
    p.target.t = units::days_to_s(0.5);
    const Costate c{0.6, 9000.0, 800.0, -1.0};
    const double tm = units::days_to_s(0.2);
    const ScheduledTrajectory a = propagate_schedule(p, c, {0.0, tm, tm, p.tf()});
    const ExtremalPoint b = propagate_burn(make_extremal_point(p.start, c, p.f_max, g), p.f_max, p.tf(), g).back();
    EXPECT_LT(rel(a.final.state.v, b.state.v), 1e-12);
    EXPECT_NEAR(a.final.state.inc, b.state.inc, 1e-12);
    EXPECT_NEAR(a.final.state.raan, b.state.raan, 1e-12);
}

TEST(PropagateSchedule, ConvergedScheduleReachesTarget)
{
    const TransferProblem p = application_problem();
    const ScheduledTrajectory tr = propagate_schedule(p, kConverged, {p.t0(), kT1, kT2, p.tf()});
    EXPECT_NEAR(units::m_to_km(tr.final.state.altitude(g)), 900.0, 0.01);
    EXPECT_NEAR(units::rad_to_deg(tr.final.state.inc), 99.0, 1e-4);
    EXPECT_NEAR(units::rad_to_deg(tr.final.state.raan), 128.20, 0.01);
    // Continuity at the switching dates.
    EXPECT_EQ(tr.at_t1.state.t, kT1);
    EXPECT_EQ(tr.at_t2.state.v, tr.at_t1.state.v);
    EXPECT_EQ(tr.at_t2.state.inc, tr.at_t1.state.inc);
}

TEST(PropagateSchedule, UnorderedScheduleRejected)
{
    const TransferProblem p = application_problem();
    EXPECT_THROW(propagate_schedule(p, kConverged, {0.0, kT2, kT1, p.tf()}), std::invalid_argument);
}

TEST(PropagateBurn, HamiltonianAndRaanCostateConstantOnRandomExtremals)
{
    auto r = lowthrust::testing::rng(4242);
    for (int i = 0; i < 100; ++i) {
        const OrbitState x{uniform(r, 7000.0, 7800.0), uniform(r, 0.2, 2.9), uniform(r, -1.0, 1.0), 0.0};
        const double f = uniform(r, 5e-4, 5e-3);
        const Costate c{uniform(r, -1.5, 1.5), uniform(r, -1.5e4, 1.5e4), uniform(r, -1.5e3, 1.5e3), -1.0};
        const double t_end = units::days_to_s(uniform(r, 0.1, 2.0));
        const Trajectory tr = propagate_burn(make_extremal_point(x, c, f, g), f, t_end, g);
        const double h0 = tr.front().h;
        const double pr0 = tr.front().costate.p_raan;
        double dh = 0.0;
        double dp = 0.0;
        for (const ExtremalPoint& q : tr) {
            dh = std::max(dh, std::abs(q.h - h0) / (1.0 + std::abs(h0)));
            dp = std::max(dp, std::abs(q.costate.p_raan - pr0) / (1.0 + std::abs(pr0)));
        }
        EXPECT_LT(dh, 1e-6) << i;
        EXPECT_LT(dp, 1e-6) << i;
        // The coast that follows keeps p_raan * rate fixed.
        const ExtremalPoint q = propagate_coast(detail::as_coast_point(tr.back(), g),
                                                t_end + units::days_to_s(5.0), g);
        EXPECT_NEAR(q.h, tr.back().costate.p_raan * precession_rate(tr.back().state, g),
                    1e-12 * (1.0 + std::abs(q.h)));
    }
}

TEST(PropagateSchedule, CoastPermutationReachesSameFinalState)
{
    // Burn A, coast 1, rate-preserving burn B, coast 2, burn C versus the
    // same legs with both coasts merged before burn B.
    auto r = lowthrust::testing::rng(99);
    const double step = units::days_to_s(0.002);
    for (int i = 0; i < 50; ++i) {
        const OrbitState x0{uniform(r, 7100.0, 7700.0), units::deg_to_rad(uniform(r, 95.0, 101.0)),
                            uniform(r, -1.0, 1.0), 0.0};
        const double f = uniform(r, 1e-3, 4e-3);
        const double ba = uniform(r, 0.5, 0.5 + 0.5 * units::pi);
        const double bc = uniform(r, -units::pi, units::pi);
        const double da = units::days_to_s(uniform(r, 0.05, 0.5));
        const double db = units::days_to_s(uniform(r, 0.05, 0.5));
        const double dc = units::days_to_s(uniform(r, 0.05, 0.5));
        const double c1 = units::days_to_s(uniform(r, 0.0, 10.0));
        const double c2 = units::days_to_s(uniform(r, 0.0, 10.0));
        const double dir = uniform(r, -1.0, 1.0) > 0.0 ? 1.0 : -1.0;
        auto law_a = [ba](double t, double, double) { return ba + 1e-6 * t; };
        auto law_b = [dir](double, double, double inc) { return singular_beta(inc, dir); };
        auto law_c = [bc](double t, double, double) { return bc - 2e-6 * t; };
        auto coast = [](OrbitState s, double dt) {
            s.raan += precession_rate(s, g) * dt;
            s.t += dt;
            return s;
        };

        OrbitState s1 = propagate_state(x0, f, law_a, da, g, step);
        s1 = coast(s1, c1);
        s1 = propagate_state(s1, f, law_b, db, g, step);
        s1 = coast(s1, c2);
        s1 = propagate_state(s1, f, law_c, dc, g, step);

        OrbitState s2 = propagate_state(x0, f, law_a, da, g, step);
        s2 = coast(s2, c1 + c2);
        s2 = propagate_state(s2, f, law_b, db, g, step);
        s2 = propagate_state(s2, f, law_c, dc, g, step);

        EXPECT_LT(rel(s1.v, s2.v), 1e-8) << i;
        EXPECT_LT(std::abs(s1.inc - s2.inc) / s2.inc, 1e-8) << i;
        EXPECT_LT(std::abs(s1.raan - s2.raan) / std::max(1.0, std::abs(s2.raan)), 1e-8) << i;
        EXPECT_NEAR(s1.t, s2.t, 1e-6);
    }
}

TEST(TrajectoryCsv, VersionedHeaderAndRows)
{
    const TransferProblem p = application_problem();
    const ScheduledTrajectory tr = propagate_schedule(p, kConverged, {p.t0(), kT1, kT2, p.tf()});
    std::ostringstream si;
    write_trajectory_csv(si, tr.samples);
    std::ostringstream disp;
    write_trajectory_csv(disp, tr.samples, CsvUnits::display);
    std::istringstream in(disp.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "# lowthrust trajectory v1");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("t[day],V[m/s],I[deg]", 0), 0u);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10);
    }
    EXPECT_EQ(rows, tr.samples.size());
    EXPECT_NE(si.str().find("t[s],V[m/s],I[rad]"), std::string::npos);
}
