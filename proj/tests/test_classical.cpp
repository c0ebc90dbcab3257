//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tests/test_classical.cpp
//---------------------------------------------------------------------------//
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "beamguide/classical.hpp"

using namespace beamguide;

namespace
{
FieldProfile general_profile()
{
    FieldProfile p = periodic_with_H(0.3, 0.7, 2.0, 0.5);
    p.g = XiFunction(0.1, {{0.2, 1.3, 0.4}});
    p.F1 = XiFunction(0, {{0.3, 0.7, 0.1}});
    p.F2 = XiFunction(0, {}, {{0.05, 2}});
    p.H = XiFunction(0.5, {{0.2, 0.9, 0.0}});
    return p;
}
} // namespace

TEST(Derivatives, FreeParticle)
{
    FieldProfile prof;
    prof.m = 1;
    auto const s = make_initial_state(prof, 2.0, 0, {0.3, 0.1}, {0, 0});
    auto const d = derivatives(prof, 2.0, s);
    EXPECT_EQ(d.v_second, Vec2::Zero());
    EXPECT_DOUBLE_EQ(d.z_prime, 0.5 * (1.0 / 4 - 1));

    prof.m = 2;
    auto const rest = make_initial_state(prof, 2.0, 0, {0, 0}, {0, 0});
    EXPECT_DOUBLE_EQ(derivatives(prof, 2.0, rest).z_prime, 0);
}

TEST(Derivatives, StaticVortex)
{
    auto const prof = vortex(1, 0);
    TrajectoryState const s{0, {1, 0}, {0, 0}, 0, 0};
    auto const d = derivatives(prof, 1.0, s);
    EXPECT_DOUBLE_EQ(d.v_second[0], 1);
    EXPECT_NEAR(d.v_second[1], 0, 1e-15);
    EXPECT_DOUBLE_EQ(d.z_prime, 0);
}

TEST(Derivatives, TurningPointIsAnError)
{
    FieldProfile prof;
    prof.g = XiFunction::constant(1);
    TrajectoryState const s{0, {0, 0}, {0, 0}, 0, 0};
    EXPECT_THROW(derivatives(prof, 1.0, s), TurningPoint);
}

TEST(Integrate, StraightLineInZeroField)
{
    FieldProfile const prof;
    Vec2 const v0{0.2, -0.4}, vp0{0.3, 0.05};
    auto const traj = integrate(prof, 1.5, make_initial_state(prof, 1.5, 0, v0, vp0), 7);
    for (auto const& s : traj.states)
    {
        EXPECT_LT((s.v - (v0 + vp0 * s.xi)).norm(), 1e-11);
    }
    EXPECT_LT(traj.max_lambda_residual(), 1e-13);
    EXPECT_LT(traj.max_mass_shell_residual(), 1e-13);
}

TEST(Integrate, DecoupledOscillatorPeriod)
{
    double const c1 = -0.8, lam = 1.3;
    auto const prof = periodic_with_H(c1, 0, 1, 0);
    double const period = 2 * std::numbers::pi * std::sqrt(lam / -c1);
    auto const traj = integrate(prof, lam, make_initial_state(prof, lam, 0, {1, 0.5}, {0, 0}), period);
    auto const end = traj.back();
    EXPECT_NEAR(end.v[0], 1, 1e-8);
    EXPECT_NEAR(end.v[1], 0.5, 1e-8);
    EXPECT_NEAR(end.v_prime.norm(), 0, 1e-8);
    auto const mid = traj.at(period / 2);
    EXPECT_NEAR(mid.v[0], -1, 1e-8);
}

TEST(Integrate, ConvergesWithTolerance)
{
    double const c1 = -0.8, lam = 1.3;
    auto const prof = periodic_with_H(c1, 0, 1, 0);
    double const w = std::sqrt(-c1 / lam);
    double const xi1 = 10;
    auto const init = make_initial_state(prof, lam, 0, {1, 0}, {0, 0});
    double prev = 0;
    for (double rtol : {1e-6, 1e-8, 1e-10})
    {
        IntegrateOptions o;
        o.rtol = rtol;
        o.atol = rtol * 1e-2;
        auto const traj = integrate(prof, lam, init, xi1, o);
        double const err = std::abs(traj.back().v[0] - std::cos(w * xi1));
        if (prev > 0)
            EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-8);
}

TEST(Integrate, ConservationOnGeneralProfile)
{
    auto const prof = general_profile();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 5; ++i)
    {
        double const lam = 1.5 + u(rng);
        auto const traj = integrate(
            prof, lam, make_initial_state(prof, lam, 0, {u(rng), u(rng)}, {u(rng), u(rng)}), 8);
        EXPECT_LT(traj.max_lambda_residual(), 1e-8 * lam);
        EXPECT_LT(traj.max_mass_shell_residual(), 1e-8);
        for (std::size_t j = 1; j < traj.states.size(); ++j)
            EXPECT_GT(traj.states[j].xi, traj.states[j - 1].xi);
    }
}

TEST(Integrate, StopsOnTurningPoint)
{
    FieldProfile prof;
    prof.g = XiFunction(0, {}, {{1, 1}});
    EXPECT_THROW(integrate(prof, 1.0, make_initial_state(prof, 1.0, 0, {0, 0}, {0, 0}), 2),
                 TurningPoint);
}

TEST(Integrate, KeepGoingStopsEarly)
{
    FieldProfile const prof;
    IntegrateOptions o;
    o.keep_going = [](TrajectoryState const& s) { return s.xi < 1; };
    auto const traj = integrate(prof, 1, make_initial_state(prof, 1, 0, {0, 0}, {0.1, 0}), 10, o);
    EXPECT_TRUE(traj.stopped_early);
    EXPECT_LT(traj.back().xi, 10);
}

TEST(LambdaResidual, DetectsCorruptedZPrime)
{
    auto const prof = general_profile();
    auto s = make_initial_state(prof, 1.7, 0.2, {0.1, 0.2}, {0.3, -0.1});
    EXPECT_LT(lambda_residual(prof, 1.7, s), 1e-14);
    s.z_prime += 1e-3;
    EXPECT_GT(lambda_residual(prof, 1.7, s), 1e-5);
    EXPECT_GT(mass_shell_residual(prof, 1.7, s), 1e-5);
}

TEST(ProperTime, AnalyticCases)
{
    FieldProfile prof;
    EXPECT_DOUBLE_EQ(proper_time(prof, 2, 0, 3), 1.5);
    EXPECT_EQ(proper_time(prof, 2, 1, 1), 0);
    prof.g = XiFunction::constant(0.5);
    EXPECT_NEAR(proper_time(prof, 1.5, 0, 1), 1, 1e-12);

    // 1 / (lambda - a cos xi) has a closed-form antiderivative
    prof.g = XiFunction::cosine(0.5, 1);
    double const lam = 2, a = 0.5;
    double const k = std::sqrt(lam * lam - a * a);
    auto F = [&](double x) {
        return 2 / k * std::atan(std::sqrt((lam + a) / (lam - a)) * std::tan(x / 2));
    };
    EXPECT_NEAR(proper_time(prof, lam, 0, 2), F(2) - F(0), 1e-10 * F(2));

    prof.g = XiFunction(0, {}, {{1, 1}});
    EXPECT_THROW(proper_time(prof, 1, 0, 2), TurningPoint);
}

TEST(LabFrame, RoundTrip)
{
    FieldProfile const prof;
    double const lam = 0.8;
    auto const traj = integrate(prof, lam, make_initial_state(prof, lam, 0, {0, 0}, {0.2, 0}, 0.3), 5);
    double const k = mass_shell_z_prime(prof.m, lam, {0.2, 0});
    auto const lab = lab_frame(traj);
    for (std::size_t i = 0; i < lab.size(); ++i)
    {
        EXPECT_NEAR(xi_from_lab(lab[i]), traj.states[i].xi, 1e-12);
        EXPECT_NEAR(lab[i].t, traj.states[i].xi * (1 + k) + 0.3, 1e-9);
        if (i > 0)
            EXPECT_GT(lab[i].t, lab[i - 1].t);
    }
}

TEST(FirstIntegral, FreeParticle)
{
    FieldProfile const prof;
    double const lam = 1.2;
    Vec2 const vp0{0.1, -0.2};
    auto const traj = integrate(prof, lam, make_initial_state(prof, lam, 0, {0.3, 0.3}, vp0), 3);
    auto const flow = solve_Z_numeric(prof, lam, Mat2::Identity(), Mat2::Zero(), {0, 3});
    RiccatiSolution const rs(prof, lam, flow, 0);
    // f = 0 and chi = -lambda v0' for Z = I
    EXPECT_LT(rs.at(1.0, false).f.norm(), 1e-14);
    Vec2 const k = -lam * vp0;
    EXPECT_LT(first_integral_residual(traj, rs, k), 1e-12);
    EXPECT_GT(first_integral_residual(traj, rs, k + Vec2{1, 0}), 0.5);
}

TEST(FirstIntegral, GeneralProfile)
{
    auto const prof = general_profile();
    double const lam = 1.7;
    auto const traj = integrate(prof, lam, make_initial_state(prof, lam, 0, {0.2, -0.1}, {0.05, 0.1}), 1.4);
    ASSERT_GT(traj.states.size(), 5u);
    auto const flow = solve_Z_numeric(prof, lam, Mat2::Identity(), Mat2::Zero(), {0, 1.5});
    RiccatiSolution const rs(prof, lam, flow, 0);
    EXPECT_LT(first_integral_residual(traj, rs), 1e-8);
}
