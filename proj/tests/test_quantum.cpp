//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tests/test_quantum.cpp
//---------------------------------------------------------------------------//
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "beamguide/quantum.hpp"

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

WaveData make_wave(FieldProfile const& prof, double lam, double lo = -0.5, double hi = 1.5)
{
    auto flow = solve_Z_numeric(prof, lam, Mat2::Identity(), Mat2::Zero(), {lo, hi});
    return WaveData(std::make_shared<RiccatiSolution const>(prof, lam, flow, 0.0));
}

struct Fixture : ::testing::Test
{
    FieldProfile prof = general_profile();
    double lam = 1.7;
    WaveData wave = make_wave(prof, lam);
    std::mt19937_64 rng{29};

    Event random_event()
    {
        std::uniform_real_distribution<double> u(-1, 1), uxi(-0.3, 1.3);
        return {uxi(rng), u(rng), u(rng), u(rng)};
    }
    Vec2 random_k()
    {
        std::uniform_real_distribution<double> u(-1, 1);
        return {u(rng), u(rng)};
    }
};

using KleinGordon = Fixture;
using Dirac = Fixture;
} // namespace

TEST(Normalization, Constant)
{
    EXPECT_NEAR(wave_normalization(), 1 / std::sqrt(32 * std::pow(std::numbers::pi, 3)), 1e-16);
    EXPECT_EQ(principal_sqrt(4), complex(2, 0));
    EXPECT_EQ(principal_sqrt(-9), complex(0, 3));
}

TEST(QuantumNumbersTest, ZetaValidated)
{
    QuantumNumbers qn;
    qn.zeta = 0;
    EXPECT_THROW(qn.validate(), ConfigError);
    qn.zeta = -1;
    EXPECT_NO_THROW(qn.validate());
}

TEST(KleinGordonFree, PlaneWave)
{
    FieldProfile const prof;
    auto const wave = make_wave(prof, 2.0, 0, 3);
    QuantumNumbers const qn{2.0, {0.3, -0.2}, 1};
    Event const ev{1.1, 0.4, -0.5, 0.8};
    complex const phi = kg_wavefunction(wave, qn, ev);
    double const S = -0.5 * (2.0 * ev.eta + 2 * qn.k.dot(Vec2{ev.x, ev.y})
                             + (qn.k.squaredNorm() + 1) * ev.xi / 2.0);
    complex const expected = wave_normalization() / std::sqrt(2.0) * std::exp(complex(0, S));
    EXPECT_LT(std::abs(phi - expected), 1e-14);
}

TEST_F(KleinGordon, ResidualVanishes)
{
    for (int i = 0; i < 20; ++i)
    {
        QuantumNumbers const qn{lam, random_k(), 1};
        Event const ev = random_event();
        auto phi = [&](Event const& e) { return kg_wavefunction(wave, qn, e); };
        double const scale = std::abs(phi(ev));
        EXPECT_LT(std::abs(klein_gordon_residual(prof, phi, ev)) / scale, 1e-6);
    }
}

TEST_F(KleinGordon, ResidualDetectsWrongAmplitude)
{
    QuantumNumbers const qn{lam, {0.2, 0.1}, 1};
    Event const ev{0.6, 0.2, 0.3, -0.1};
    // Dropping sqrt(Delta) breaks the continuity equation
    auto bad = [&](Event const& e) {
        auto const pt = wave.riccati().at(e.xi, true);
        return kg_wavefunction(wave, qn, e) / principal_sqrt(pt.delta);
    };
    double const scale = std::abs(bad(ev));
    EXPECT_GT(std::abs(klein_gordon_residual(prof, bad, ev)) / scale, 1e-3);
}

TEST_F(KleinGordon, QFactorIsP)
{
    QuantumNumbers const qn{lam, {0.2, 0.1}, 1};
    Event const ev{0.6, 0.2, 0.3, -0.1};
    auto phi = [&](Event const& e) { return kg_wavefunction(wave, qn, e); };
    complex const q = complex(0, 2) * detail::fd1(phi, ev, detail::shift_eta, 1e-3)
                      - prof.g(ev.xi) * phi(ev);
    EXPECT_LT(std::abs(q - kg_q_wavefunction(wave, qn, ev)) / std::abs(q), 1e-9);
}

TEST_F(KleinGordon, LambdaMismatchRejected)
{
    QuantumNumbers const qn{lam + 0.1, {0, 0}, 1};
    EXPECT_THROW(kg_wavefunction(wave, qn, Event{}), ConfigError);
}

TEST_F(Dirac, ResidualVanishes)
{
    for (int zeta : {1, -1})
    {
        for (int i = 0; i < 10; ++i)
        {
            QuantumNumbers const qn{lam, random_k(), zeta};
            Event const ev = random_event();
            auto psi = [&](Event const& e) { return dirac_wavefunction(wave, qn, e); };
            double const scale = psi(ev).norm();
            EXPECT_LT(dirac_residual(prof, psi, ev).norm() / scale, 1e-6);
        }
    }
}

TEST_F(Dirac, ResidualDetectsWrongSpinRotation)
{
    QuantumNumbers const qn{lam, {0.2, 0.1}, 1};
    Event const ev{0.9, 0.2, 0.3, -0.1};
    auto bad = [&](Event const& e) {
        auto const pt = wave.riccati().at(e.xi, true);
        return dirac_wavefunction(pt, prof, lam, qn.k,
                                  spinor_V(-pt.T, spinor_V0(1)), e);
    };
    EXPECT_GT(dirac_residual(prof, bad, ev).norm() / bad(ev).norm(), 1e-3);
}

TEST_F(Dirac, ProjectedSpinorStructure)
{
    // P(-) Psi = N sqrt(Delta) e^{iS} (V, -sigma3 V)
    for (int zeta : {1, -1})
    {
        QuantumNumbers const qn{lam, random_k(), zeta};
        Event const ev = random_event();
        auto const pt = wave.riccati().at(ev.xi, true);
        CVec4 const proj = projector_minus(dirac_wavefunction(wave, qn, ev));
        CVec2 const V = spinor_V(pt.T, spinor_V0(zeta));
        complex const amp = wave_normalization() * principal_sqrt(pt.delta)
                            * std::exp(complex(0, action_S(pt, lam, qn.k, ev)));
        CVec4 expected;
        expected.head<2>() = amp * V;
        expected.tail<2>() = -amp * (sigma3() * V);
        EXPECT_LT((proj - expected).norm() / expected.norm(), 1e-12);
    }
}

TEST(Projector, Properties)
{
    CMat4 const P = projector_minus_matrix();
    EXPECT_LT((P * P - P).norm(), 1e-15);
    EXPECT_LT((P.adjoint() - P).norm(), 1e-15);
    EXPECT_NEAR(P.trace().real(), 2, 1e-15);
}

TEST(SpinRotation, UnitaryAndPeriodic)
{
    CVec2 const V0(complex(0.6, 0.1), complex(-0.3, 0.7));
    for (double T : {0.0, 0.4, -2.2})
    {
        CVec2 const V = spinor_V(T, V0);
        EXPECT_NEAR(V.norm(), V0.norm(), 1e-15);
    }
    EXPECT_LT((spinor_V(std::numbers::pi, V0) + V0).norm(), 1e-15);
    EXPECT_EQ(spinor_V0(1), CVec2(1, 0));
    EXPECT_EQ(spinor_V0(-1), CVec2(0, 1));
}

TEST_F(Dirac, DigammaIsMinusPVelocity)
{
    // On the classical trajectory with constants (k, w0) the vector equals -p v'
    Vec2 const k{0.3, -0.4}, w0{0.2, 0.1};
    auto const& rs = wave.riccati();
    auto v_of = [&](double xi) { return solve_v(rs, k, w0, xi); };
    for (double xi : {0.2, 0.7, 1.1})
    {
        Vec2 const v = v_of(xi);
        Vec2 const vp = (v_of(xi + 1e-4) - v_of(xi - 1e-4)) / 2e-4;
        Vec2 const dg = digamma_vector(wave, k, xi, v[0], v[1]);
        EXPECT_LT((dg + eval_p(prof, lam, xi) * vp).norm(), 1e-7);
    }
}

TEST_F(Dirac, DeltaMatchesSolution)
{
    for (double xi : {0.0, 0.5, 1.2})
        EXPECT_DOUBLE_EQ(delta_fn(wave, xi), wave.riccati().at(xi, false).delta);
    EXPECT_FALSE(wave.branch(0.5).p_negative);
    EXPECT_FALSE(wave.branch(0.5).delta_negative);
}
