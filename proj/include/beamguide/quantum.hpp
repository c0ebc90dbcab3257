//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/quantum.hpp
//! Exact Klein-Gordon and Dirac solutions built on a RiccatiSolution.
//---------------------------------------------------------------------------//
#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <utility>

#include "errors.hpp"
#include "fields.hpp"
#include "linalg.hpp"
#include "riccati_solution.hpp"

namespace beamguide
{
//---------------------------------------------------------------------------//
//! (32 pi^3)^{-1/2}, shared by the scalar and spinor solutions
inline double wave_normalization()
{
    return 1 / std::sqrt(32 * std::numbers::pi * std::numbers::pi
                          * std::numbers::pi);
}

struct QuantumNumbers
{
    double lambda = 1;
    Vec2 k = Vec2::Zero();
    int zeta = 1;

    void validate() const
    {
        if (zeta != 1 && zeta != -1)
        {
            throw ConfigError("spin label zeta must be +1 or -1");
        }
    }
};

//! Constant spinor: (1, 0) for zeta = +1, (0, 1) for zeta = -1
inline CVec2 spinor_V0(int zeta)
{
    return zeta > 0 ? CVec2(1, 0) : CVec2(0, 1);
}

//! Principal square root of a real number
inline complex principal_sqrt(double x)
{
    return x >= 0 ? complex(std::sqrt(x), 0) : complex(0, std::sqrt(-x));
}

/*!
 * Branch of the square roots used at one xi.
 *
 * Inside a caustic-free segment neither p nor Delta changes sign, so the
 * principal branch is continuous and this record is constant along xi.
 */
struct BranchInfo
{
    bool p_negative = false;
    bool delta_negative = false;
};

//---------------------------------------------------------------------------//
/*!
 * A RiccatiSolution viewed as the source of wavefunctions for its lambda.
 */
class WaveData
{
  public:
    explicit WaveData(std::shared_ptr<RiccatiSolution const> rs)
        : rs_(std::move(rs))
    {
    }

    RiccatiSolution const& riccati() const { return *rs_; }
    std::shared_ptr<RiccatiSolution const> const& shared() const
    {
        return rs_;
    }
    FieldProfile const& profile() const { return rs_->profile(); }
    double lambda() const { return rs_->lambda(); }

    void check(QuantumNumbers const& qn) const
    {
        qn.validate();
        if (std::abs(qn.lambda - this->lambda())
            > 1e-12 * std::max(1.0, std::abs(qn.lambda)))
        {
            throw ConfigError("quantum number lambda does not match the "
                              "Riccati solution");
        }
    }

    BranchInfo branch(double xi) const
    {
        auto const pt = rs_->at(xi, false);
        return {pt.p < 0, pt.delta < 0};
    }

  private:
    std::shared_ptr<RiccatiSolution const> rs_;
};

inline double delta_fn(WaveData const& wave, double xi)
{
    return wave.riccati().delta(xi);
}

//---------------------------------------------------------------------------//
// SCALAR
//---------------------------------------------------------------------------//
//! N0 p^{-1/2} sqrt(Delta) exp(i S) from a precomputed point
inline complex kg_wavefunction(RiccatiPoint const& pt,
                               double lambda,
                               Vec2 const& k,
                               Event const& ev)
{
    double const S = action_S(pt, lambda, k, ev);
    return wave_normalization() * principal_sqrt(pt.delta)
           / principal_sqrt(pt.p) * std::exp(complex(0, S));
}

inline complex
kg_wavefunction(WaveData const& wave, QuantumNumbers const& qn, Event const& ev)
{
    wave.check(qn);
    return kg_wavefunction(wave.riccati().at(ev.xi, true), qn.lambda, qn.k, ev);
}

//! (2i d_eta - g) applied analytically: p Phi
inline complex
kg_q_wavefunction(WaveData const& wave, QuantumNumbers const& qn, Event const& ev)
{
    return eval_p(wave.profile(), qn.lambda, ev.xi)
           * kg_wavefunction(wave, qn, ev);
}

//---------------------------------------------------------------------------//
// SPINOR
//---------------------------------------------------------------------------//
//! [cos T + i sigma3 sin T] V0
inline CVec2 spinor_V(double T, CVec2 const& V0)
{
    return {std::exp(complex(0, T)) * V0[0], std::exp(complex(0, -T)) * V0[1]};
}

inline CVec2 spinor_V(WaveData const& wave, int zeta, double xi)
{
    return spinor_V(wave.riccati().T(xi), spinor_V0(zeta));
}

//! (f - H E) v + chi, equal to -p v' on the classical trajectory
inline Vec2 digamma_vector(RiccatiPoint const& pt,
                           FieldProfile const& prof,
                           Vec2 const& k,
                           double x,
                           double y)
{
    Mat2 const he = prof.H(pt.xi) * isigma2();
    return (pt.f - he) * Vec2{x, y} + pt.B * k + pt.chibar;
}

inline Vec2 digamma_vector(WaveData const& wave, Vec2 const& k, double xi, double x, double y)
{
    return digamma_vector(wave.riccati().at(xi, false), wave.profile(), k, x, y);
}

/*!
 * N p^{-1} sqrt(Delta) e^{iS} [(m + p - s3 (s.F)) V; ((m - p) s3 - s.F) V]
 * in the Dirac representation.
 */
inline CVec4 dirac_wavefunction(RiccatiPoint const& pt,
                                FieldProfile const& prof,
                                double lambda,
                                Vec2 const& k,
                                CVec2 const& V0,
                                Event const& ev)
{
    Vec2 const dg = digamma_vector(pt, prof, k, ev.x, ev.y);
    CMat2 const sf = sigma1() * dg[0] + sigma2() * dg[1];
    CMat2 const id = CMat2::Identity();
    CVec2 const V = spinor_V(pt.T, V0);
    double const m = prof.m;
    CVec4 psi;
    psi.head<2>() = ((m + pt.p) * id - sigma3() * sf) * V;
    psi.tail<2>() = ((m - pt.p) * sigma3() - sf) * V;
    double const S = action_S(pt, lambda, k, ev);
    complex const amp = wave_normalization() * principal_sqrt(pt.delta)
                        / pt.p * std::exp(complex(0, S));
    return amp * psi;
}

inline CVec4
dirac_wavefunction(WaveData const& wave, QuantumNumbers const& qn, Event const& ev)
{
    wave.check(qn);
    return dirac_wavefunction(wave.riccati().at(ev.xi, true), wave.profile(),
                              qn.lambda, qn.k, spinor_V0(qn.zeta), ev);
}

//! (1 - alpha_3)/2 = [[I, -s3], [-s3, I]]/2
inline CMat4 projector_minus_matrix()
{
    CMat4 P = CMat4::Zero();
    P.topLeftCorner<2, 2>() = 0.5 * CMat2::Identity();
    P.bottomRightCorner<2, 2>() = 0.5 * CMat2::Identity();
    P.topRightCorner<2, 2>() = -0.5 * sigma3();
    P.bottomLeftCorner<2, 2>() = -0.5 * sigma3();
    return P;
}

inline CVec4 projector_minus(CVec4 const& psi)
{
    return projector_minus_matrix() * psi;
}

//---------------------------------------------------------------------------//
// EQUATION RESIDUALS (finite differences)
//---------------------------------------------------------------------------//
namespace detail
{
//! Fourth-order central first derivative along one event coordinate
template<class Fn, class Shift>
auto fd1(Fn const& fn, Event const& ev, Shift shift, double h)
{
    return (-fn(shift(ev, 2 * h)) + 8.0 * fn(shift(ev, h))
            - 8.0 * fn(shift(ev, -h)) + fn(shift(ev, -2 * h)))
           / (12 * h);
}

//! Fourth-order central second derivative
template<class Fn, class Shift>
auto fd2(Fn const& fn, Event const& ev, Shift shift, double h)
{
    return (-fn(shift(ev, 2 * h)) + 16.0 * fn(shift(ev, h)) - 30.0 * fn(ev)
            + 16.0 * fn(shift(ev, -h)) - fn(shift(ev, -2 * h)))
           / (12 * h * h);
}

inline Event shift_xi(Event e, double s)
{
    e.xi += s;
    return e;
}
inline Event shift_eta(Event e, double s)
{
    e.eta += s;
    return e;
}
inline Event shift_x(Event e, double s)
{
    e.x += s;
    return e;
}
inline Event shift_y(Event e, double s)
{
    e.y += s;
    return e;
}

//! d_xi of the potentials at an event
inline std::array<double, 4> potentials_dxi(FieldProfile const& prof, Event const& ev, double h)
{
    auto at = [&](double s) { return eval_potentials(prof, ev.xi + s, ev.x, ev.y); };
    auto a2p = at(2 * h), a1p = at(h), a1m = at(-h), a2m = at(-2 * h);
    std::array<double, 4> d;
    for (int i = 0; i < 4; ++i)
        d[i] = (-a2p[i] + 8 * a1p[i] - 8 * a1m[i] + a2m[i]) / (12 * h);
    return d;
}
} // namespace detail

/*!
 * [(i d0 - a0)^2 - sum_j (-i dj - aj)^2 - m^2] Phi by finite differences,
 * with x0 = (xi + eta)/2, z = (eta - xi)/2.
 */
template<class Wave>
complex klein_gordon_residual(FieldProfile const& prof,
                              Wave const& phi,
                              Event const& ev,
                              double h = 1e-3)
{
    using namespace detail;
    complex const f = phi(ev);
    complex const f_xi = fd1(phi, ev, shift_xi, h);
    complex const f_eta = fd1(phi, ev, shift_eta, h);
    complex const f_x = fd1(phi, ev, shift_x, h);
    complex const f_y = fd1(phi, ev, shift_y, h);
    complex const f_xx = fd2(phi, ev, shift_x, h);
    complex const f_yy = fd2(phi, ev, shift_y, h);
    // d_xi d_eta by a fourth-order cross stencil of first derivatives
    auto phi_eta = [&](Event const& e) { return fd1(phi, e, shift_eta, h); };
    complex const f_xieta = fd1(phi_eta, ev, shift_xi, h);

    auto const a = eval_potentials(prof, ev.xi, ev.x, ev.y);
    auto const da = potentials_dxi(prof, ev, h);
    complex const I(0, 1);
    complex const d0 = f_xi + f_eta;
    complex const dz = f_eta - f_xi;
    // d0^2 - dz^2 = 4 d_xi d_eta
    complex const time_part = -4.0 * f_xieta - 2.0 * I * a[0] * d0
                              - I * da[0] * f + a[0] * a[0] * f;
    auto space = [&](complex dj, complex djj, double aj, double daj) {
        return -djj + 2.0 * I * aj * dj + I * daj * f + aj * aj * f;
    };
    // -d_z^2 is folded into time_part via the light-cone identity
    complex const z_part = 2.0 * I * a[3] * dz + I * (-da[3]) * f
                           + a[3] * a[3] * f;
    return time_part - space(f_x, f_xx, a[1], 0.0)
           - space(f_y, f_yy, a[2], 0.0) - z_part - prof.m * prof.m * f;
}

/*!
 * [g0 (i d0 - a0) + g^j (i dj + aj) - m] Psi, Dirac representation.
 */
template<class Wave>
CVec4 dirac_residual(FieldProfile const& prof,
                     Wave const& psi,
                     Event const& ev,
                     double h = 1e-3)
{
    using namespace detail;
    CVec4 const f = psi(ev);
    CVec4 const f_xi = fd1(psi, ev, shift_xi, h);
    CVec4 const f_eta = fd1(psi, ev, shift_eta, h);
    CVec4 const f_x = fd1(psi, ev, shift_x, h);
    CVec4 const f_y = fd1(psi, ev, shift_y, h);
    auto const a = eval_potentials(prof, ev.xi, ev.x, ev.y);
    complex const I(0, 1);

    CMat4 g0 = CMat4::Zero();
    g0.topLeftCorner<2, 2>() = CMat2::Identity();
    g0.bottomRightCorner<2, 2>() = -CMat2::Identity();
    auto gj = [](CMat2 const& s) {
        CMat4 g = CMat4::Zero();
        g.topRightCorner<2, 2>() = s;
        g.bottomLeftCorner<2, 2>() = -s;
        return g;
    };
    CVec4 const d0 = f_xi + f_eta;
    CVec4 const dz = f_eta - f_xi;
    return g0 * (I * d0 - a[0] * f) + gj(sigma1()) * (I * f_x + a[1] * f)
           + gj(sigma2()) * (I * f_y + a[2] * f)
           + gj(sigma3()) * (I * dz + a[3] * f) - prof.m * f;
}

//---------------------------------------------------------------------------//
} // namespace beamguide
