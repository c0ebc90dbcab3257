//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/quadrature.hpp
//! Adaptive Gauss-Kronrod 7/15 for scalar and fixed-size Eigen integrands.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Core>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"

namespace beamguide
{
//---------------------------------------------------------------------------//
struct QuadOptions
{
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
    int max_depth = 40;
};

template<class V>
struct QuadResult
{
    V value;
    double error = 0;
};

namespace detail
{
template<class V>
V zero_like()
{
    if constexpr (std::is_arithmetic_v<V>)
    {
        return V{0};
    }
    else
    {
        return V::Zero();
    }
}

template<class V>
double norm_inf(V const& v)
{
    if constexpr (std::is_arithmetic_v<V>)
    {
        return std::abs(v);
    }
    else
    {
        return v.cwiseAbs().maxCoeff();
    }
}

//! One G7/K15 panel on [a, b]: returns (kronrod, |kronrod - gauss|)
template<class F>
auto gk15_panel(F const& f, double a, double b)
{
    using V = std::decay_t<decltype(f(a))>;
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    static auto const& x = gauss_kronrod<double, 15>::abscissa();
    static auto const& wk = gauss_kronrod<double, 15>::weights();
    static auto const& wg = gauss<double, 7>::weights();

    double const c = 0.5 * (a + b);
    double const h = 0.5 * (b - a);
    V const fc = f(c);
    V k = wk[0] * fc;
    V g = wg[0] * fc;
    for (std::size_t i = 1; i < x.size(); ++i)
    {
        V const fs = f(c - h * x[i]) + f(c + h * x[i]);
        k += wk[i] * fs;
        if (i % 2 == 0)
        {
            g += wg[i / 2] * fs;
        }
    }
    k *= h;
    g *= h;
    return QuadResult<V>{k, norm_inf<V>(k - g)};
}
} // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Integrate f over [a, b] (a > b allowed) by adaptive bisection.
 *
 * Each panel is accepted when its Kronrod/Gauss difference is below
 * max(abs_tol * width share, rel_tol * |panel value|). Interior breakpoints
 * (any order, out-of-range values ignored) split the range before
 * adaptation. Throws QuadratureFailure when a panel cannot be refined
 * further.
 */
template<class F>
auto integrate_gk(F const& f,
                  double a,
                  double b,
                  QuadOptions const& opts = {},
                  std::span<double const> breakpoints = {})
{
    using V = std::decay_t<decltype(f(a))>;
    if (a == b)
    {
        return QuadResult<V>{detail::zero_like<V>(), 0.0};
    }
    if (a > b)
    {
        auto r = integrate_gk(f, b, a, opts, breakpoints);
        r.value = -r.value;
        return r;
    }

    std::vector<double> cuts{a};
    for (double x : breakpoints)
    {
        if (x > a && x < b)
        {
            cuts.push_back(x);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    double const total_width = b - a;
    QuadResult<V> result{detail::zero_like<V>(), 0.0};

    struct Panel
    {
        double a, b;
        int depth;
    };
    std::vector<Panel> stack;
    for (std::size_t i = cuts.size() - 1; i > 0; --i)
    {
        if (cuts[i] > cuts[i - 1])
        {
            stack.push_back({cuts[i - 1], cuts[i], 0});
        }
    }
    while (!stack.empty())
    {
        Panel const pan = stack.back();
        stack.pop_back();
        auto const est = detail::gk15_panel(f, pan.a, pan.b);
        double const tol = std::max(
            opts.abs_tol * (pan.b - pan.a) / total_width,
            opts.rel_tol * detail::norm_inf<V>(est.value));
        if (est.error <= tol)
        {
            result.value += est.value;
            result.error += est.error;
            continue;
        }
        double const mid = 0.5 * (pan.a + pan.b);
        if (pan.depth >= opts.max_depth || mid <= pan.a || mid >= pan.b)
        {
            throw QuadratureFailure("Gauss-Kronrod failed to converge on ["
                                    + std::to_string(pan.a) + ", "
                                    + std::to_string(pan.b) + "]");
        }
        stack.push_back({mid, pan.b, pan.depth + 1});
        stack.push_back({pan.a, mid, pan.depth + 1});
    }
    return result;
}

//---------------------------------------------------------------------------//
/*!
 * Breakpoints at every half period of angular frequency omega in [a, b].
 */
inline std::vector<double>
half_period_breakpoints(double a, double b, double omega)
{
    std::vector<double> pts;
    omega = std::abs(omega);
    if (omega == 0 || a == b)
    {
        return pts;
    }
    double const lo = std::min(a, b);
    double const hi = std::max(a, b);
    double const step = std::numbers::pi / omega;
    // Cap the count: extremely fine splitting only wastes evaluations
    if ((hi - lo) / step > 1e5)
    {
        return pts;
    }
    for (double x = std::ceil(lo / step) * step; x < hi; x += step)
    {
        pts.push_back(x);
    }
    return pts;
}

//---------------------------------------------------------------------------//
} // namespace beamguide
