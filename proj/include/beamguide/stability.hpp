//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/stability.hpp
//! Transverse confinement analysis for purely crossed fields.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "fields.hpp"
#include "linalg.hpp"
#include "ode.hpp"

namespace beamguide
{
//---------------------------------------------------------------------------//
// EFFECTIVE POTENTIAL
//---------------------------------------------------------------------------//
/*!
 * Crossed-field profile (g constant, H = 0) with the longitudinal
 * integral lambda acting as effective mass.
 */
struct EffectivePotentialSpec
{
    FieldProfile profile;
    double lambda = 1;

    EffectivePotentialSpec(FieldProfile prof, double lam)
        : profile(std::move(prof)), lambda(lam)
    {
        profile.validate();
        if (!profile.g.is_constant() || !profile.H.is_zero())
        {
            throw ConfigError("effective potential requires g' = 0 and H = 0");
        }
        if (lambda == profile.g(0))
        {
            throw ConfigError("effective mass p = lambda - g vanishes");
        }
    }
};

/*!
 * U = -x F1' - y F2' - (r11 x^2 + 2 r12 x y + r22 y^2)/2.
 *
 * The transverse motion is p v'' = -grad U.
 */
inline double effective_potential(EffectivePotentialSpec const& spec,
                                  double xi,
                                  double x,
                                  double y)
{
    auto const& prof = spec.profile;
    Vec2 const v{x, y};
    return -prof.F_prime(xi).dot(v) - 0.5 * v.dot(prof.r(xi) * v);
}

//! U = C . v - v^T R v / 2 for constant coefficients
inline double static_potential(
    double R11, double R12, double R22, double C1, double C2, double x, double y)
{
    return x * C1 + y * C2 - 0.5 * (x * x * R11 + 2 * x * y * R12 + y * y * R22);
}

/*!
 * Global minimum of the constant-coefficient potential: exists iff
 * R11 < 0 and R11 R22 > R12^2, and then equals R^{-1} C.
 */
inline std::optional<Vec2>
static_minimum(double R11, double R12, double R22, double C1, double C2)
{
    double const det = R11 * R22 - R12 * R12;
    if (!(R11 < 0 && det > 0))
    {
        return std::nullopt;
    }
    return Vec2{(R22 * C1 - R12 * C2) / det, (R11 * C2 - R12 * C1) / det};
}

//! Frame rotating by omega xi / 2
inline Mat2 rotating_frame(double omega, double xi)
{
    return rot(omega * xi / 2);
}

//! -[(x^2 + y^2) C1 + (x^2 - y^2) C2] / 2
inline double rotated_potential(double C1, double C2, double xt, double yt)
{
    return -0.5 * ((xt * xt + yt * yt) * C1 + (xt * xt - yt * yt) * C2);
}

//---------------------------------------------------------------------------//
// LYAPUNOV ANALYSIS
//---------------------------------------------------------------------------//
enum class Verdict
{
    stable,
    unstable,
    marginal_degenerate
};

inline char const* to_string(Verdict v)
{
    switch (v)
    {
        case Verdict::stable:
            return "stable";
        case Verdict::unstable:
            return "unstable";
        default:
            return "marginal-degenerate";
    }
}

using Roots = std::array<complex, 4>;

/*!
 * Characteristic roots of the rotating-frame system:
 *   +-1/2 sqrt(4 c1 - w^2 +- 4 sqrt(c2^2 - w^2 c1))
 * ordered (l1, -l1, l3, -l3), principal complex roots.
 */
inline Roots characteristic_roots(double c1, double c2, double omega)
{
    complex const inner = std::sqrt(complex(c2 * c2 - omega * omega * c1));
    complex const base = 4 * c1 - omega * omega;
    complex const l1 = 0.5 * std::sqrt(base + 4.0 * inner);
    complex const l3 = 0.5 * std::sqrt(base - 4.0 * inner);
    return {l1, -l1, l3, -l3};
}

/*!
 * Constant rotating-frame system matrix
 *   [[0, I], [c1 + c2 sigma3 + w^2/4, w E]].
 */
inline Mat4 xi_tilde(double c1, double c2, double omega)
{
    Mat4 m = Mat4::Zero();
    m.topRightCorner<2, 2>() = Mat2::Identity();
    m.bottomLeftCorner<2, 2>() = symmetric(c1 + c2 + omega * omega / 4, 0,
                                           c1 - c2 + omega * omega / 4);
    m.bottomRightCorner<2, 2>() = omega * isigma2();
    return m;
}

//! Eigenvalues of xi_tilde, computed numerically
inline Roots xi_tilde_eigenvalues(double c1, double c2, double omega)
{
    Eigen::EigenSolver<Mat4> es(xi_tilde(c1, c2, omega), false);
    Roots r;
    for (int i = 0; i < 4; ++i)
        r[i] = es.eigenvalues()[i];
    return r;
}

struct StabilityReport
{
    Roots roots{};
    Verdict verdict = Verdict::stable;
    double margin = 0;  //!< max Re of the roots
    std::optional<double> threshold;  //!< omega_min for the vortex case
};

/*!
 * Stable iff every Re <= tol and every root with |Re| <= tol is simple
 * (no other root within tol); repeated imaginary roots are marginal.
 */
inline Verdict lyapunov_verdict(Roots const& roots, double tol = 1e-9)
{
    for (auto const& r : roots)
    {
        if (r.real() > tol)
            return Verdict::unstable;
    }
    for (std::size_t i = 0; i < roots.size(); ++i)
    {
        if (std::abs(roots[i].real()) > tol)
            continue;
        for (std::size_t j = i + 1; j < roots.size(); ++j)
        {
            if (std::abs(roots[i] - roots[j]) <= tol)
                return Verdict::marginal_degenerate;
        }
    }
    return Verdict::stable;
}

inline double max_real_part(Roots const& roots)
{
    double m = roots[0].real();
    for (auto const& r : roots)
        m = std::max(m, r.real());
    return m;
}

inline StabilityReport analyze(double c1, double c2, double omega, double tol = 1e-9)
{
    StabilityReport rep;
    rep.roots = characteristic_roots(c1, c2, omega);
    rep.verdict = lyapunov_verdict(rep.roots, tol);
    rep.margin = max_real_part(rep.roots);
    return rep;
}

//! Smallest |omega| confining the vortex field of strength B0
inline double vortex_threshold(double B0, double lambda)
{
    if (lambda == 0)
    {
        throw ConfigError("vortex threshold needs lambda != 0");
    }
    return 4 * std::abs(B0) / std::abs(lambda);
}

//! Vortex field in the rotating frame: c1 = 0, c2 = B0 omega / lambda
inline StabilityReport
analyze_vortex(double B0, double omega, double lambda, double tol = 1e-9)
{
    auto rep = analyze(0, B0 * omega / lambda, omega, tol);
    rep.threshold = vortex_threshold(B0, lambda);
    return rep;
}

//---------------------------------------------------------------------------//
// FLOQUET CROSS-CHECK
//---------------------------------------------------------------------------//
struct FloquetResult
{
    Verdict verdict = Verdict::stable;
    std::array<complex, 4> multipliers{};
    Mat4 monodromy = Mat4::Identity();
};

/*!
 * Monodromy of x'' = M(xi) x over one period, from identity data.
 *
 * Stable iff all |mu| <= 1 + tol and unit-modulus multipliers are simple
 * (pairwise separated by more than tol).
 */
inline FloquetResult floquet_verdict(std::function<Mat2(double)> M,
                                     double period,
                                     double tol = 1e-6,
                                     ode::Options opts = {1e-12, 1e-14})
{
    if (!(period > 0))
    {
        throw ConfigError("Floquet period must be positive");
    }
    auto sys = [M](ode::State<16> const& s, ode::State<16>& ds, double xi) {
        Eigen::Map<Mat4 const> Y(s.data());
        Mat4 A = Mat4::Zero();
        A.topRightCorner<2, 2>() = Mat2::Identity();
        A.bottomLeftCorner<2, 2>() = M(xi);
        Eigen::Map<Mat4>(ds.data()) = A * Y;
    };
    ode::State<16> y0;
    Eigen::Map<Mat4>(y0.data()) = Mat4::Identity();
    opts.max_step = std::min(opts.max_step, period / 16);
    auto dense = ode::integrate<16>(sys, y0, 0.0, period, opts);

    FloquetResult res;
    res.monodromy = Eigen::Map<Mat4 const>(dense.states().back().data());
    Eigen::EigenSolver<Mat4> es(res.monodromy, false);
    for (int i = 0; i < 4; ++i)
        res.multipliers[i] = es.eigenvalues()[i];

    for (auto const& mu : res.multipliers)
    {
        if (std::abs(mu) > 1 + tol)
        {
            res.verdict = Verdict::unstable;
            return res;
        }
    }
    for (std::size_t i = 0; i < 4; ++i)
    {
        if (std::abs(std::abs(res.multipliers[i]) - 1) > tol)
            continue;
        for (std::size_t j = i + 1; j < 4; ++j)
        {
            if (std::abs(res.multipliers[i] - res.multipliers[j]) <= tol)
            {
                res.verdict = Verdict::marginal_degenerate;
                return res;
            }
        }
    }
    res.verdict = Verdict::stable;
    return res;
}

//! M(xi) = c1 + c2 [[cos w xi, sin w xi], [sin w xi, -cos w xi]]
inline std::function<Mat2(double)>
rotating_quadrupole_matrix(double c1, double c2, double omega)
{
    return [=](double xi) {
        double const c = std::cos(omega * xi);
        double const s = std::sin(omega * xi);
        return symmetric(c1 + c2 * c, c2 * s, c1 - c2 * c);
    };
}

//---------------------------------------------------------------------------//
// PARAMETER SWEEP
//---------------------------------------------------------------------------//
struct StabilityGrid
{
    std::vector<double> omega;
    std::vector<double> c1;
    std::vector<double> c2;  //!< B0 values when vortex is set
    bool vortex = false;
    double lambda = 1;
    double tol = 1e-9;
};

struct StabilityRow
{
    double omega = 0;
    double c1 = 0;
    double c2 = 0;
    double max_re_lambda = 0;
    Verdict verdict = Verdict::stable;
};

/*!
 * Verdicts over the tensor grid (omega fastest). For the vortex slice c1
 * is forced to zero and the c2 axis holds B0, reported as B0 omega/lambda.
 */
inline std::vector<StabilityRow>
stability_map(StabilityGrid const& grid, unsigned threads = 1)
{
    std::vector<double> c1s = grid.vortex ? std::vector<double>{0.0} : grid.c1;
    std::size_t const nw = grid.omega.size();
    std::size_t const n1 = c1s.size();
    std::size_t const n = nw * n1 * grid.c2.size();
    std::vector<StabilityRow> rows(n);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx)
        {
            std::size_t const iw = idx % nw;
            std::size_t const i1 = (idx / nw) % n1;
            std::size_t const i2 = idx / (nw * n1);
            double const w = grid.omega[iw];
            double const c1 = c1s[i1];
            double const c2 = grid.vortex ? grid.c2[i2] * w / grid.lambda
                                          : grid.c2[i2];
            auto const rep = analyze(c1, c2, w, grid.tol);
            rows[idx] = {w, c1, c2, rep.margin, rep.verdict};
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1 || n < 1024)
    {
        work(0, n);
        return rows;
    }
    {
        std::vector<std::jthread> pool;
        std::size_t const chunk = (n + threads - 1) / threads;
        for (std::size_t b = 0; b < n; b += chunk)
        {
            pool.emplace_back(work, b, std::min(n, b + chunk));
        }
    }
    return rows;
}

//---------------------------------------------------------------------------//
} // namespace beamguide
