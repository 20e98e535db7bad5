#include <gtest/gtest.h>

#include <cmath>

#include "lowthrust/sensitivity.hpp"
#include "test_support.hpp"

using namespace lowthrust;
using lowthrust::testing::application_problem;

namespace {

const GravityModel g = GravityModel::earth();

const CostateGuess& application_guess()
{
    static const CostateGuess guess = estimate_sensitivities(application_problem());
    return guess;
}

TransferProblem shifted_window(double dt0_day, double dtf_day)
{
    TransferProblem p = application_problem();
    const double d0 = units::days_to_s(dt0_day);
    const double df = units::days_to_s(dtf_day);
    p.start.raan += precession_rate(p.start, g) * d0;
    p.start.t += d0;
    p.target.raan += precession_rate(p.target, g) * df;
    p.target.t += df;
    return p;
}

} // namespace

TEST(EstimateCostates, AltitudeStepMapsToVelocity)
{
    const CostateGuess& c = application_guess();
    const SensitivityRow& v = c.rows[0];
    EXPECT_NEAR(v.delta_minus, 25.9, 0.3);
    EXPECT_NEAR(v.delta_plus, -26.0, 0.3);
    ASSERT_TRUE(v.cost_minus && v.cost_plus);
    // Lower initial orbit (higher velocity) is cheaper.
    EXPECT_LT(*v.cost_minus, *v.cost_plus);
    EXPECT_FALSE(c.one_sided);
}

TEST(EstimateCostates, SignsAndMagnitudes)
{
    const CostateGuess& c = application_guess();
    EXPECT_LT(c.p_v0, 0.0);
    EXPECT_LT(c.p_i0, 0.0);
    EXPECT_LT(c.p_raan0, 0.0);
    EXPECT_NEAR(c.p_v0, -0.64, 0.03);
    EXPECT_NEAR(c.p_i0, -9200.0, 500.0);
    EXPECT_NEAR(c.p_raan0, -800.0, 60.0);
    EXPECT_EQ(c.p0, -1.0);
    EXPECT_DOUBLE_EQ(c.reference_cost, solve_ses(application_problem()).delta_v);
}

TEST(EstimateCostates, MatchedDriftHasZeroSensitivity)
{
    TransferProblem p;
    p.start = {7450.0, units::deg_to_rad(98.0), 0.0, 0.0};
    p.target = p.start;
    p.target.t = units::days_to_s(60.0);
    p.target.raan = precession_rate(p.start, g) * p.target.t;
    p.f_max = 3.5e-3;
    const CostateGuess c = estimate_sensitivities(p);
    EXPECT_NEAR(c.reference_cost, 0.0, 1e-6);
    // The cost is a kink minimum there: central differences cancel for velocity,
    // inclination and date, while the one-sided slopes are large.
    for (int i : {0, 1}) {
        const SensitivityRow& r = c.rows[static_cast<std::size_t>(i)];
        const double one_sided = *r.cost_plus / std::abs(r.delta_plus);
        EXPECT_LT(std::abs(r.derivative), 1e-2 * one_sided) << r.name;
    }
    EXPECT_NEAR(c.dj_dtf, 0.0, 1e-12);
    // A RAAN offset is not symmetric: speeding up or slowing the drift costs differently.
    EXPECT_NE(*c.rows[2].cost_minus, *c.rows[2].cost_plus);
}

TEST(EstimateCostates, HalvingStepsChangesEstimatesLittle)
{
    SensitivityOptions half;
    half.altitude_step *= 0.5;
    half.inclination_step *= 0.5;
    half.raan_step *= 0.5;
    half.date_step *= 0.5;
    const CostateGuess a = application_guess();
    const CostateGuess b = estimate_sensitivities(application_problem(), half);
    EXPECT_LT(std::abs(a.p_v0 - b.p_v0) / std::abs(a.p_v0), 0.05);
    EXPECT_LT(std::abs(a.p_i0 - b.p_i0) / std::abs(a.p_i0), 0.05);
    EXPECT_LT(std::abs(a.p_raan0 - b.p_raan0) / std::abs(a.p_raan0), 0.05);
    EXPECT_LT(std::abs(a.h0 - b.h0) / std::abs(a.h0), 0.05);
}

TEST(EstimateHamiltonian, CombinesDateAndRaanDerivatives)
{
    const CostateGuess& c = application_guess();
    EXPECT_LE(c.dj_dtf, 0.0);
    EXPECT_DOUBLE_EQ(c.h0, -c.dj_dtf + c.p_raan0 * precession_rate(application_problem().target, g));
    EXPECT_NEAR(c.h0 * units::seconds_per_day, -9.5, 0.5);
}

TEST(DateDerivatives, SignsOfWindowDerivatives)
{
    const DateDerivatives d = date_derivatives(application_problem());
    EXPECT_GE(d.dj_dt0, 0.0);
    EXPECT_LE(d.dj_dtf, 0.0);
    EXPECT_NEAR(d.dj_dtf, application_guess().dj_dtf, 1e-12);
}

TEST(DateDerivatives, InitialShiftFollowsNaturalPrecession)
{
    const SensitivityOptions opt;
    const TransferProblem base = application_problem();
    const TransferProblem p = detail::perturbed(base, detail::Perturb::initial_date, 1.0, opt);
    EXPECT_NEAR(p.start.raan - base.start.raan, precession_rate(base.start, g) * opt.date_step, 1e-15);
    EXPECT_EQ(p.start.t - base.start.t, opt.date_step);
}

TEST(WindowMonotonicity, WiderWindowNeverCostsMore)
{
    double prev = 1e300;
    for (double dtf : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
        const double c = solve_ses(shifted_window(0.0, dtf)).delta_v;
        EXPECT_LE(c, prev + 1e-9) << dtf;
        prev = c;
    }
    prev = -1.0;
    for (double dt0 : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
        const double c = solve_ses(shifted_window(dt0, 0.0)).delta_v;
        EXPECT_GE(c, prev - 1e-9) << dt0;
        prev = c;
    }
}

TEST(EstimateCostates, OneSidedFallbackFlagged)
{
    const TransferProblem p = application_problem();
    detail::PerturbedCosts pc;
    pc.plus = 610.0;
    const SensitivityRow row = detail::difference_row("initial velocity", p, 600.0,
                                                      detail::Perturb::velocity, pc.minus, pc.plus,
                                                      SensitivityOptions{});
    EXPECT_TRUE(row.one_sided);
    EXPECT_NEAR(row.derivative, 10.0 / row.delta_plus, 1e-12);
    EXPECT_THROW(detail::difference_row("x", p, 600.0, detail::Perturb::velocity, std::nullopt,
                                        std::nullopt, SensitivityOptions{}),
                 ConvergenceError);
}
