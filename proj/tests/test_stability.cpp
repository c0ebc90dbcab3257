//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tests/test_stability.cpp
//---------------------------------------------------------------------------//
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "beamguide/stability.hpp"

using namespace beamguide;

namespace
{
//! Every root has its negative within tol
bool closed_under_negation(Roots const& r, double tol)
{
    for (auto const& a : r)
    {
        bool found = false;
        for (auto const& b : r)
            found = found || std::abs(a + b) < tol;
        if (!found)
            return false;
    }
    return true;
}

double nearest(Roots const& r, complex z)
{
    double best = 1e300;
    for (auto const& x : r)
        best = std::min(best, std::abs(x - z));
    return best;
}
} // namespace

TEST(EffectivePotential, SpecRejectsLongitudinalFields)
{
    auto prof = periodic_with_H(0, 1, 2, 0.5);
    EXPECT_THROW(EffectivePotentialSpec(prof, 1), ConfigError);
    prof.H = XiFunction{};
    prof.g = XiFunction::cosine(0.1, 1);
    EXPECT_THROW(EffectivePotentialSpec(prof, 1), ConfigError);
    prof.g = XiFunction::constant(1);
    EXPECT_THROW(EffectivePotentialSpec(prof, 1), ConfigError);
}

TEST(EffectivePotential, PlaneWaveHasUniformForce)
{
    FieldProfile prof;
    prof.F1 = XiFunction::cosine(1, 2);
    prof.F2 = XiFunction(0, {}, {{0.5, 1}});
    EffectivePotentialSpec const spec(prof, 1);
    double const xi = 0.4, h = 1e-5;
    auto grad = [&](double x, double y) {
        return Vec2{(effective_potential(spec, xi, x + h, y)
                     - effective_potential(spec, xi, x - h, y)) / (2 * h),
                    (effective_potential(spec, xi, x, y + h)
                     - effective_potential(spec, xi, x, y - h)) / (2 * h)};
    };
    EXPECT_LT((grad(0, 0) - grad(3, -2)).norm(), 1e-8);
    EXPECT_EQ(effective_potential(spec, xi, 0, 0), 0);
}

TEST(EffectivePotential, ForceDrivesTransverseMotion)
{
    // p v'' = -grad U must equal r v + F' when H = g' = 0
    FieldProfile prof = periodic_with_H(0.3, 0.7, 2.0, 0);
    prof.F1 = XiFunction::cosine(0.4, 1.1);
    EffectivePotentialSpec const spec(prof, 1.5);
    double const xi = 0.9, x = 0.3, y = -0.6, h = 1e-5;
    Vec2 const grad{(effective_potential(spec, xi, x + h, y)
                     - effective_potential(spec, xi, x - h, y)) / (2 * h),
                    (effective_potential(spec, xi, x, y + h)
                     - effective_potential(spec, xi, x, y - h)) / (2 * h)};
    Vec2 const force = prof.r(xi) * Vec2{x, y} + prof.F_prime(xi);
    EXPECT_LT((-grad - force).norm(), 1e-8);
}

TEST(EffectivePotential, RotatingFrameIdentity)
{
    double const c1 = 0.3, c2 = 0.7, w = 2.0;
    EffectivePotentialSpec const spec(periodic_with_H(c1, c2, w, 0), 1);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 50; ++i)
    {
        double const xi = u(rng), x = u(rng), y = u(rng);
        Vec2 const vt = rotating_frame(w, xi) * Vec2{x, y};
        EXPECT_NEAR(effective_potential(spec, xi, x, y),
                    rotated_potential(c1, c2, vt[0], vt[1]), 1e-12);
    }
}

TEST(RotatingFrame, Properties)
{
    EXPECT_EQ(rotating_frame(1.3, 0), Mat2::Identity());
    double const w = 1.7;
    Mat2 const R = rotating_frame(w, 2 * std::numbers::pi / w);
    EXPECT_LT((R + Mat2::Identity()).norm(), 1e-14);
    Mat2 const Q = rotating_frame(0.37, 5.1);
    EXPECT_NEAR(Q.determinant(), 1, 1e-15);
    EXPECT_LT((Q.transpose() * Q - Mat2::Identity()).norm(), 1e-15);
}

TEST(RotatedPotential, SaddleAndParaboloid)
{
    EXPECT_DOUBLE_EQ(rotated_potential(0, 2, 1, 0), -1);
    EXPECT_DOUBLE_EQ(rotated_potential(0, 2, 0, 1), 1);
    EXPECT_DOUBLE_EQ(rotated_potential(2, 0, 1, 0), rotated_potential(2, 0, 0, 1));
}

TEST(StaticMinimum, Examples)
{
    auto const m = static_minimum(-1, 0, -1, 1, 2);
    ASSERT_TRUE(m);
    EXPECT_DOUBLE_EQ((*m)[0], -1);
    EXPECT_DOUBLE_EQ((*m)[1], -2);
    EXPECT_FALSE(static_minimum(1, 0, -1, 1, 2));
    EXPECT_FALSE(static_minimum(-1, 2, -1, 1, 2));
    auto const z = static_minimum(-2, 0.5, -1, 0, 0);
    ASSERT_TRUE(z);
    EXPECT_EQ(*z, Vec2::Zero());
}

TEST(StaticMinimum, IsStationaryPointOfPotential)
{
    double const R11 = -1.3, R12 = 0.4, R22 = -0.9, C1 = 0.7, C2 = -0.2;
    auto const m = static_minimum(R11, R12, R22, C1, C2);
    ASSERT_TRUE(m);
    double const h = 1e-5;
    double const x = (*m)[0], y = (*m)[1];
    double const gx = (static_potential(R11, R12, R22, C1, C2, x + h, y)
                       - static_potential(R11, R12, R22, C1, C2, x - h, y)) / (2 * h);
    double const gy = (static_potential(R11, R12, R22, C1, C2, x, y + h)
                       - static_potential(R11, R12, R22, C1, C2, x, y - h)) / (2 * h);
    EXPECT_NEAR(gx, 0, 1e-9);
    EXPECT_NEAR(gy, 0, 1e-9);
}

TEST(CharacteristicRoots, Examples)
{
    auto const stable = characteristic_roots(0, 1, 3);
    EXPECT_LT(nearest(stable, {0, std::sqrt(5.0) / 2}), 1e-14);
    EXPECT_LT(nearest(stable, {0, std::sqrt(13.0) / 2}), 1e-14);
    EXPECT_EQ(lyapunov_verdict(stable), Verdict::stable);

    auto const unstable = characteristic_roots(0, 1, 1);
    EXPECT_LT(nearest(unstable, {std::sqrt(3.0) / 2, 0}), 1e-14);
    EXPECT_EQ(lyapunov_verdict(unstable), Verdict::unstable);

    auto const free = characteristic_roots(0, 0, 2);
    EXPECT_LT(nearest(free, {0, 1}), 1e-14);
    EXPECT_EQ(lyapunov_verdict(free), Verdict::marginal_degenerate);
}

TEST(CharacteristicRoots, MatchMatrixEigenvaluesAndPairing)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 200; ++i)
    {
        double const c1 = u(rng), c2 = u(rng), w = u(rng);
        auto const r = characteristic_roots(c1, c2, w);
        auto const e = xi_tilde_eigenvalues(c1, c2, w);
        EXPECT_TRUE(closed_under_negation(r, 1e-12));
        for (auto const& z : e)
            EXPECT_LT(nearest(r, z), 1e-6 * (1 + std::abs(z)));
    }
}

TEST(LyapunovVerdict, Rules)
{
    Roots const real{complex(0.5, 0), complex(-0.5, 0), complex(0, 1), complex(0, -1)};
    EXPECT_EQ(lyapunov_verdict(real), Verdict::unstable);
    Roots const dbl{complex(0, 1), complex(0, -1), complex(0, 1), complex(0, -1)};
    EXPECT_EQ(lyapunov_verdict(dbl), Verdict::marginal_degenerate);
}

TEST(Vortex, ThresholdFlip)
{
    double const B0 = 0.25, lam = 1;
    double const wmin = vortex_threshold(B0, lam);
    EXPECT_DOUBLE_EQ(wmin, 1.0);
    EXPECT_EQ(analyze_vortex(B0, 1.01 * wmin, lam).verdict, Verdict::stable);
    EXPECT_EQ(analyze_vortex(B0, 0.99 * wmin, lam).verdict, Verdict::unstable);
    // On the threshold the roots are purely imaginary
    auto const at = characteristic_roots(0, B0 * wmin / lam, wmin);
    EXPECT_LT(max_real_part(at), 1e-7);
    EXPECT_EQ(vortex_threshold(0, 1), 0);
    EXPECT_THROW(vortex_threshold(1, 0), ConfigError);
}

TEST(Vortex, GridAgreesWithThreshold)
{
    int disagreements = 0;
    for (int i = 1; i <= 100; ++i)
    {
        for (int j = 0; j < 100; ++j)
        {
            double const w = 0.05 * i;
            double const B0 = -1 + 0.0201 * j;
            double const wmin = vortex_threshold(B0, 1);
            if (std::abs(w - wmin) < 1e-6)
                continue;
            bool const stable = analyze_vortex(B0, w, 1).verdict == Verdict::stable;
            disagreements += stable != (w > wmin);
        }
    }
    EXPECT_EQ(disagreements, 0);
}

TEST(Floquet, ConstantMatrix)
{
    // x'' = -4 x: multipliers exp(+-2i T)
    double const period = 1.3;
    auto const res = floquet_verdict([](double) { return Mat2(-4 * Mat2::Identity()); }, period);
    for (auto const& mu : res.multipliers)
        EXPECT_NEAR(std::abs(mu), 1, 1e-10);
    EXPECT_LT(nearest(Roots{res.multipliers}, std::exp(complex(0, 2 * period))), 1e-9);

    auto const hyper = floquet_verdict([](double) { return Mat2(Mat2::Identity()); }, 1.0);
    EXPECT_EQ(hyper.verdict, Verdict::unstable);
    EXPECT_LT(nearest(Roots{hyper.multipliers}, std::exp(1.0)), 1e-9);

    auto const zero = floquet_verdict([](double) { return Mat2(Mat2::Zero()); }, 1.0);
    EXPECT_EQ(zero.verdict, Verdict::marginal_degenerate);
}

TEST(Floquet, AgreesWithLyapunovOnRotatingSaddle)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> uc(-1.5, 1.5), uw(0.3, 4);
    int compared = 0;
    while (compared < 12)
    {
        double const c2 = uc(rng), w = uw(rng);
        double const wmin = 2 * std::sqrt(std::abs(c2));  // c1 = 0 boundary
        if (std::abs(c2) < 0.05 || std::abs(w - wmin) < 0.05 * wmin)
            continue;
        auto const lv = analyze(0, c2, w).verdict;
        auto const fv = floquet_verdict(rotating_quadrupole_matrix(0, c2, w),
                                        2 * std::numbers::pi / w).verdict;
        EXPECT_EQ(lv, fv) << "c2=" << c2 << " w=" << w;
        ++compared;
    }
}

TEST(StabilityMap, VortexSliceAndSymmetry)
{
    StabilityGrid grid;
    for (int i = 0; i < 41; ++i)
        grid.omega.push_back(-2 + 0.1 * i);
    grid.c2 = {0.25};
    grid.vortex = true;
    auto const rows = stability_map(grid, 2);
    ASSERT_EQ(rows.size(), 41u);
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        auto const& mirror = rows[rows.size() - 1 - i];
        EXPECT_EQ(rows[i].verdict, mirror.verdict);
        EXPECT_NEAR(rows[i].max_re_lambda, mirror.max_re_lambda, 1e-12);
        double const w = std::abs(rows[i].omega);
        if (w > 1.05)
            EXPECT_EQ(rows[i].verdict, Verdict::stable);
        if (w < 0.95)
            EXPECT_NE(rows[i].verdict, Verdict::stable);
    }
    EXPECT_TRUE(stability_map(StabilityGrid{}).empty());
}

TEST(StabilityMap, ThreadedMatchesSerial)
{
    StabilityGrid grid;
    for (int i = 0; i < 40; ++i)
        grid.omega.push_back(0.1 * i);
    for (int i = 0; i < 10; ++i)
        grid.c1.push_back(-0.5 + 0.1 * i);
    for (int i = 0; i < 10; ++i)
        grid.c2.push_back(-1 + 0.2 * i);
    auto const a = stability_map(grid, 1);
    auto const b = stability_map(grid, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_EQ(a[i].verdict, b[i].verdict);
        EXPECT_EQ(a[i].max_re_lambda, b[i].max_re_lambda);
    }
}
