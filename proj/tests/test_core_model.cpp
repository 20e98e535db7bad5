#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "lowthrust/core_model.hpp"
#include "test_support.hpp"

using namespace lowthrust;
using lowthrust::testing::rel;

namespace {

const GravityModel g = GravityModel::earth();

double deg_per_day(double v, double inc_deg)
{
    return units::rate_to_deg_per_day(precession_rate(v, units::deg_to_rad(inc_deg), g));
}

} // namespace

TEST(GravityModel, PrecessionConstantFromDefinition)
{
    const double k = 3.0 * g.j2 * g.re * g.re / (2.0 * g.mu * g.mu * g.mu);
    EXPECT_LT(rel(g.k, k), 1e-12);
    // Printed value 1.0425e-33 within 0.2 %.
    EXPECT_LT(rel(g.k, 1.0425e-33), 2e-3);
}

TEST(GravityModel, RejectsNonPositiveConstants)
{
    EXPECT_THROW(GravityModel::make(0.0, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(GravityModel::make(1.0, -1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(GravityModel::make(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(PrecessionRate, SunSynchronousEndpoints)
{
    EXPECT_NEAR(deg_per_day(7450.0, 98.0), 0.917, 0.002);
    EXPECT_NEAR(deg_per_day(7398.6, 99.0), 0.982, 0.002);
    EXPECT_NEAR(deg_per_day(velocity_from_altitude(800e3, g), 98.0), 0.917, 0.001);
    EXPECT_NEAR(deg_per_day(velocity_from_altitude(900e3, g), 99.0), 0.982, 0.001);
}

TEST(PrecessionRate, PolarOrbitIsZero)
{
    for (double v : {6000.0, 7450.0, 7900.0}) {
        EXPECT_EQ(precession_rate(v, units::pi / 2.0, g), 0.0);
    }
    EXPECT_EQ(precession_rate(7450.0, units::deg_to_rad(90.0), g), 0.0);
}

TEST(PrecessionRate, SignFollowsInclination)
{
    auto r = lowthrust::testing::rng(11);
    for (int i = 0; i < 200; ++i) {
        const double v = lowthrust::testing::uniform(r, 3000.0, 11000.0);
        const double inc = lowthrust::testing::uniform(r, 0.0, units::pi);
        const double w = precession_rate(v, inc, g);
        if (inc < units::pi / 2.0 - 1e-9) {
            EXPECT_LT(w, 0.0);
        } else if (inc > units::pi / 2.0 + 1e-9) {
            EXPECT_GT(w, 0.0);
        }
    }
}

TEST(VelocityFromAltitude, TableValues)
{
    EXPECT_LT(rel(velocity_from_altitude(800e3, g), 7450.0), 5e-4);
    EXPECT_LT(rel(velocity_from_altitude(900e3, g), 7398.6), 5e-4);
    EXPECT_DOUBLE_EQ(velocity_from_altitude(0.0, g), std::sqrt(g.mu / g.re));
}

TEST(VelocityFromAltitude, NonPositiveRadiusRejected)
{
    EXPECT_THROW(velocity_from_altitude(-g.re, g), std::invalid_argument);
    EXPECT_THROW(velocity_from_altitude(-2.0 * g.re, g), std::invalid_argument);
    EXPECT_THROW(altitude_from_velocity(0.0, g), std::invalid_argument);
}

TEST(VelocityFromAltitude, RoundTrip)
{
    auto r = lowthrust::testing::rng(3);
    for (int i = 0; i < 100; ++i) {
        const double h = lowthrust::testing::uniform(r, 0.0, 40000e3);
        const double v = velocity_from_altitude(h, g);
        EXPECT_LT(std::abs(altitude_from_velocity(v, g) - h) / (g.re + h), 1e-9);
        OrbitState s{v, 1.0, 0.0, 0.0};
        EXPECT_LT(std::abs(s.radius(g) - (g.re + h)) / (g.re + h), 1e-12);
    }
}

TEST(Units, RoundTrips)
{
    for (double x : {-720.0, -1.5, 0.0, 1e-6, 98.0, 359.9, 1e5}) {
        EXPECT_LE(rel(units::rad_to_deg(units::deg_to_rad(x)), x), 1e-12) << x;
        EXPECT_LE(rel(units::s_to_days(units::days_to_s(x)), x), 1e-12) << x;
        EXPECT_LE(rel(units::m_to_km(units::km_to_m(x)), x), 1e-12) << x;
        EXPECT_LE(rel(units::rate_to_deg_per_day(units::deg_per_day_to_rate(x)), x), 1e-12) << x;
    }
}

TEST(OrbitState, Validity)
{
    EXPECT_TRUE((OrbitState{7000.0, 0.0, -50.0, 0.0}.valid()));
    EXPECT_TRUE((OrbitState{7000.0, units::pi, 50.0, 0.0}.valid()));
    EXPECT_FALSE((OrbitState{0.0, 1.0, 0.0, 0.0}.valid()));
    EXPECT_FALSE((OrbitState{7000.0, -0.1, 0.0, 0.0}.valid()));
    EXPECT_FALSE((OrbitState{7000.0, 4.0, 0.0, 0.0}.valid()));
    EXPECT_FALSE((OrbitState{7000.0, 1.0, std::nan(""), 0.0}.valid()));
}

TEST(WrapTwoPi, DisplayRange)
{
    EXPECT_NEAR(wrap_two_pi(-0.5), 2.0 * units::pi - 0.5, 1e-15);
    EXPECT_NEAR(wrap_two_pi(7.0 * units::pi), units::pi, 1e-12);
    EXPECT_EQ(wrap_two_pi(0.0), 0.0);
}

TEST(PropellantMass, ZeroImpulse)
{
    EXPECT_EQ(propellant_mass(0.0, 1000.0, 20000.0), 0.0);
    EXPECT_EQ(propellant_budget(0.0, 1000.0, 20000.0).mc, 0.0);
}

TEST(PropellantMass, TendsToInitialMass)
{
    const double mc = propellant_mass(1e7, 1000.0, 20000.0);
    EXPECT_LT(mc, 1000.0 + 1e-9);
    EXPECT_GT(mc, 1000.0 - 1e-9);
}

TEST(PropellantMass, InvertsLogarithmically)
{
    const double m0 = 1000.0;
    const double ve = 20000.0;
    const double mc = propellant_mass(598.1, m0, ve);
    EXPECT_NEAR(ve * std::log(m0 / (m0 - mc)), 598.1, 1e-9);
    EXPECT_NEAR(mc, 29.46, 0.01);
}

TEST(PropellantMass, StrictlyIncreasingAndBounded)
{
    double prev = -1.0;
    for (double dv = 0.0; dv < 30000.0; dv += 250.0) {
        const PropellantBudget b = propellant_budget(dv, 500.0, 3000.0);
        EXPECT_GT(b.mc, prev);
        EXPECT_GE(b.mc, 0.0);
        EXPECT_LT(b.mc, b.m0);
        prev = b.mc;
    }
}

TEST(PropellantMass, RejectsBadInputs)
{
    EXPECT_THROW(propellant_mass(-1.0, 1000.0, 20000.0), std::invalid_argument);
    EXPECT_THROW(propellant_mass(1.0, 0.0, 20000.0), std::invalid_argument);
    EXPECT_THROW(propellant_mass(1.0, 1000.0, 0.0), std::invalid_argument);
}
