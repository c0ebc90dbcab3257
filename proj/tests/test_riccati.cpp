//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tests/test_riccati.cpp
//---------------------------------------------------------------------------//
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "beamguide/classical.hpp"
#include "beamguide/riccati_solution.hpp"

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

std::shared_ptr<RiccatiSolution const> general_solution(double lam = 1.7)
{
    auto const prof = general_profile();
    auto flow = solve_Z_numeric(prof, lam, Mat2::Identity(), Mat2::Zero(), {-0.5, 1.5});
    return std::make_shared<RiccatiSolution const>(prof, lam, flow, 0.0);
}

template<class F>
auto central(F const& fn, double xi, double h = 1e-4)
{
    using R = decltype(fn(xi));
    return R((fn(xi + h) - fn(xi - h)) / (2 * h));
}
} // namespace

//---------------------------------------------------------------------------//
// Rotation angle
//---------------------------------------------------------------------------//
TEST(RotationAngle, AnalyticCases)
{
    FieldProfile prof;
    EXPECT_EQ(T_of_xi(prof, 1.3, 2.0), 0);
    prof.H = XiFunction::constant(0.4);
    EXPECT_NEAR(T_of_xi(prof, 2.0, 1.5), 0.4 * 1.5 / 2.0, 1e-14);
    EXPECT_NEAR(T_of_xi(prof, 2.0, 1.5, 0.5), 0.2, 1e-14);
    prof.H = XiFunction(0, {}, {{1, 1}});
    EXPECT_NEAR(T_of_xi(prof, 1.0, 1.2), 0.72, 1e-13);
    prof.g = XiFunction(0, {}, {{1, 1}});
    EXPECT_THROW(T_of_xi(prof, 1.0, 2.0), TurningPoint);
}

TEST(RotationAngle, RbarMatchesRotation)
{
    Mat2 const r = symmetric(0.3, -0.8, 1.1);
    for (double T : {0.0, 0.4, -1.3, 2.9})
    {
        Mat2 const direct = rot(-T) * r * rot(T);
        EXPECT_LT((rbar_from_T(r, T) - direct).norm(), 1e-14);
    }
}

//---------------------------------------------------------------------------//
// Z flows
//---------------------------------------------------------------------------//
TEST(ZFlow, FreeMotionIsLinear)
{
    FieldProfile const prof;
    Mat2 const Z0 = symmetric(1.2, 0.3, 0.9);
    Mat2 const Z0p = symmetric(0.1, -0.2, 0.05);
    auto const flow = solve_Z_numeric(prof, 1.5, Z0, Z0p, {0, 4});
    for (double xi : {0.5, 2.0, 3.7})
    {
        auto const s = (*flow)(xi);
        EXPECT_LT((s.Z - (Z0 + Z0p * xi)).norm(), 1e-11);
        EXPECT_LT((s.Zp - Z0p).norm(), 1e-12);
    }
}

TEST(ZFlow, ClosedFormSolvesTheEquation)
{
    for (auto const& cp : {ClosedFormParams{0.3, 0.7, 2.0, 0.5, 1.0},
                           ClosedFormParams{-0.4, 0.2, 1.3, 0.0, 1.6},
                           ClosedFormParams{0.1, 1.5, 0.7, -0.3, 0.8}})
    {
        double worst = 0;
        for (double xi = -3; xi < 3; xi += 0.0731)
        {
            auto const z = closed_form_Z(cp, xi);
            worst = std::max(worst, max_abs(closed_form_residual(cp, z.first, xi)));
            if (z.second)
                worst = std::max(worst, max_abs(closed_form_residual(cp, *z.second, xi)));
        }
        EXPECT_LT(worst, 1e-9) << "c1=" << cp.c1 << " c2=" << cp.c2;
    }
}

TEST(ZFlow, NumericMatchesClosedForm)
{
    ClosedFormParams const cp{0.3, 0.7, 2.0, 0.5, 1.0};
    auto const prof = cp.profile();
    double const xi0 = 0.3;
    auto const z0 = closed_form_Z(cp, xi0).first;
    ZSolveOptions o;
    o.T0 = cp.H * xi0 / cp.lambda;
    auto const flow = solve_Z_numeric(prof, cp.lambda, z0.Z, z0.Zp,
                                      {xi0, xi0 + std::numbers::pi}, o);
    double worst = 0;
    for (double xi = xi0; xi < xi0 + 3; xi += 0.05)
    {
        auto const a = (*flow)(xi);
        auto const b = closed_form_Z(cp, xi).first;
        worst = std::max(worst, max_abs(a.Z - b.Z));
        EXPECT_NEAR(a.T, cp.H * xi / cp.lambda, 1e-10);
    }
    EXPECT_LT(worst, 1e-8);
    EXPECT_LT(flow->max_symmetry_residual(), 1e-9);
}

TEST(ZFlow, SymmetryAndWronskianConserved)
{
    auto const prof = general_profile();
    auto const flow = solve_Z_numeric(prof, 1.7, Mat2::Identity(), Mat2::Zero(), {0, 6});
    EXPECT_LT(flow->max_symmetry_residual(), 1e-8);
    EXPECT_LT(flow->max_wronskian(), 1e-8);
}

TEST(ZFlow, IsotropicFocusIsACaustic)
{
    // Isotropic lens: Z = cos(xi) I, so det Z touches zero without a sign change
    double const c = -1.0, lam = 1.0;
    auto const prof = periodic_with_H(c, 0, 1, 0);
    auto const flow = solve_Z_numeric(prof, lam, Mat2::Identity(), Mat2::Zero(), {0, 4});
    ASSERT_EQ(flow->caustics().size(), 1u);
    EXPECT_NEAR(flow->caustics().front(), std::numbers::pi / 2, 1e-8);
    EXPECT_THROW(f_from_Z(Mat2::Zero(), Mat2::Identity(), 0, 1), SingularZ);
}

TEST(ZFlow, ClosePairOfCaustics)
{
    // Free motion: Z = I + xi Z'0 is exact, so one step spans both zeros
    FieldProfile prof;
    Mat2 const zp0 = symmetric(-1.0, 0, -1 / 1.01);
    auto const flow = solve_Z_numeric(prof, 1.0, Mat2::Identity(), zp0, {0, 3});
    ASSERT_EQ(flow->caustics().size(), 2u);
    EXPECT_NEAR(flow->caustics()[0], 1.0, 1e-10);
    EXPECT_NEAR(flow->caustics()[1], 1.01, 1e-10);
}

//---------------------------------------------------------------------------//
// Riccati data
//---------------------------------------------------------------------------//
TEST(Riccati, FFromZ)
{
    Mat2 const Z = symmetric(1, 0.2, 1.5);
    Mat2 const Zp = symmetric(0.3, 0.1, -0.4) * Z;
    auto const r = f_from_Z(Z, Zp, 0.4, 2.0);
    EXPECT_LT(r.asymmetry, 1e-14);
    Mat2 const expected = -2.0 * rot(0.4) * symmetric(0.3, 0.1, -0.4) * rot(-0.4);
    EXPECT_LT((r.f - expected).norm(), 1e-14);
    EXPECT_THROW(f_from_Z(Mat2::Identity(), Mat2{{0, 1}, {0, 0}}, 0, 1),
                 SymmetryViolation);
}

TEST(Riccati, InitialDataAtBase)
{
    auto const prof = general_profile();
    auto flow = solve_Z_numeric(prof, 1.7, Mat2::Identity(), Mat2::Zero(), {0.0, 1.5});
    RiccatiSolution const rs(prof, 1.7, flow, 0.0);
    auto const pt = rs.at(0.0);
    EXPECT_LT(pt.f.norm(), 1e-14);
    EXPECT_LT((pt.B - rot(pt.T)).norm(), 1e-14);
    EXPECT_LT(pt.chibar.norm(), 1e-14);
    EXPECT_NEAR(pt.delta, 1, 1e-14);
    EXPECT_LT(pt.phase.M.norm() + pt.phase.b.norm() + std::abs(pt.phase.c), 1e-14);
}

TEST(Riccati, ScalarResidualsVanish)
{
    auto const rs = general_solution();
    auto const& prof = rs->profile();
    double const lam = rs->lambda();
    Vec2 const k{0.4, -0.3};
    for (double xi : {-0.3, 0.2, 0.6, 1.2})
    {
        auto const pt = rs->at(xi);
        Mat2 const fp = central([&](double s) { return Mat2(rs->at(s).f); }, xi);
        Vec2 const chi = pt.B * k + pt.chibar;
        Vec2 const chip = central([&](double s) { return solve_chi(*rs, k, s); }, xi);
        double const ap = central([&](double s) { return rs->at(s).phase(k); }, xi);
        for (double r : scalar_residuals(prof, lam, xi, pt.f, fp, chi, chip, ap))
            EXPECT_LT(std::abs(r), 1e-6) << "xi=" << xi;
        EXPECT_LT(max_abs(riccati_f_residual(prof, lam, xi, pt.f, fp)), 1e-6);
        EXPECT_LT(riccati_chi_residual(prof, lam, xi, pt.f, chi, chip).norm(), 1e-6);

        // p Delta' = tr(f) Delta
        double const dd = central([&](double s) { return rs->delta(s); }, xi);
        EXPECT_NEAR(pt.p * dd, pt.f.trace() * pt.delta, 1e-6);
        EXPECT_LT(asymmetry(pt.f), 1e-12);
    }
}

TEST(Riccati, CoefficientsLinearInChi)
{
    auto const rs = general_solution();
    Vec2 const k1{0.2, 0.5}, k2{-0.7, 0.1};
    double const xi = 0.8;
    Vec2 const sum = solve_chi(*rs, k1 + k2, xi);
    Vec2 const parts = solve_chi(*rs, k1, xi) + solve_chi(*rs, k2, xi) - solve_chi(*rs, Vec2::Zero(), xi);
    EXPECT_LT((sum - parts).norm(), 1e-13);
}

TEST(Riccati, OutsideDomainThrows)
{
    auto const rs = general_solution();
    EXPECT_THROW(rs->at(2.0), DomainError);
}

//---------------------------------------------------------------------------//
// Trajectories and action
//---------------------------------------------------------------------------//
TEST(Riccati, TrajectoryMatchesLorentzIntegration)
{
    auto const prof = general_profile();
    double const lam = 1.7;
    Vec2 const v0{0.2, -0.1}, vp0{0.05, 0.1};
    auto const traj = integrate(prof, lam, make_initial_state(prof, lam, 0.0, v0, vp0), 1.4);
    auto const pts = riccati_trajectory(prof, lam, 0.0, v0, vp0, {0.0, 0.5, 1.0, 1.4});
    ASSERT_EQ(pts.size(), 4u);
    for (auto const& q : pts)
    {
        auto const s = traj.at(q.xi);
        EXPECT_LT((q.v - s.v).norm(), 1e-8);
        EXPECT_LT((q.vp - s.v_prime).norm(), 1e-8);
        EXPECT_LT(q.first_integral, 1e-10);
    }

    auto const rs = general_solution();
    auto const c = match_initial_conditions(*rs, v0, vp0);
    EXPECT_LT((solve_v(*rs, c.k, c.w0, 1.0) - traj.at(1.0).v).norm(), 1e-8);
}

TEST(Riccati, TrajectoryCrossesCaustics)
{
    // The focusing lens has caustics every pi / 2; the segmented solution
    // must still follow the trajectory
    auto const prof = periodic_with_H(-1.0, 0, 1, 0);
    Vec2 const v0{0.3, -0.2}, vp0{0.1, 0.4};
    auto const pts = riccati_trajectory(prof, 1.0, 0.0, v0, vp0, {1.0, 2.0, 3.0, 5.0});
    for (auto const& q : pts)
    {
        Vec2 const exact = v0 * std::cos(q.xi) + vp0 * std::sin(q.xi);
        EXPECT_LT((q.v - exact).norm(), 1e-8) << "xi=" << q.xi;
    }
}

TEST(Action, FreeParticle)
{
    FieldProfile const prof;
    double const lam = 2.0;
    auto flow = solve_Z_numeric(prof, lam, Mat2::Identity(), Mat2::Zero(), {0, 3});
    RiccatiSolution const rs(prof, lam, flow, 0.0);
    Vec2 const k{0.3, -0.5};
    Event const ev{1.5, 0.7, 0.4, -0.9};
    // S = -(lambda eta + 2 k.v + (k^2 + m^2) xi / lambda) / 2
    double const expected = -0.5 * (lam * ev.eta + 2 * k.dot(Vec2{ev.x, ev.y})
                                    + (k.squaredNorm() + 1) * ev.xi / lam);
    EXPECT_NEAR(action_S(rs, k, ev), expected, 1e-12);
}

TEST(Action, SolvesHamiltonJacobi)
{
    auto const rs = general_solution();
    auto const& prof = rs->profile();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1), uxi(-0.2, 1.2);
    for (int i = 0; i < 20; ++i)
    {
        Vec2 const k{u(rng), u(rng)};
        Event const ev{uxi(rng), u(rng), u(rng), u(rng)};
        auto S = [&](Event const& e) { return action_S(*rs, k, e); };
        EXPECT_LT(std::abs(hj_residual(prof, S, ev)), 1e-7);
        // dS/deta = -lambda/2
        Event e1 = ev, e2 = ev;
        e1.eta += 0.1;
        e2.eta -= 0.1;
        EXPECT_NEAR((S(e1) - S(e2)) / 0.2, -rs->lambda() / 2, 1e-12);
    }
}

TEST(Action, DetectsWrongCoefficients)
{
    auto const rs = general_solution();
    auto const& prof = rs->profile();
    Vec2 const k{0.3, 0.2};
    Event const ev{0.7, 0.1, 0.4, -0.3};
    auto bad = [&](Event const& e) { return action_S(*rs, k, e) + 0.05 * e.x * e.x; };
    EXPECT_GT(std::abs(hj_residual(prof, bad, ev)), 1e-3);
}
