//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/fields.hpp
//! Crossed plus longitudinal field class in scaled units.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include <Eigen/Core>

#include "errors.hpp"
#include "linalg.hpp"
#include "xi_function.hpp"

namespace beamguide
{
//---------------------------------------------------------------------------//
/*!
 * Field configuration: every coupling constant e/(c hbar) is already
 * absorbed into the functions.
 *
 * The potentials are
 *   a0 = (g - A)/2, a1 = -F1 - H y, a2 = -F2 + H x, a3 = -(g + A)/2
 * with A = r11 x^2 + 2 r12 x y + r22 y^2 and everything a function of
 * xi = x0 - z.
 */
struct FieldProfile
{
    XiFunction g;
    XiFunction H;
    XiFunction F1;
    XiFunction F2;
    XiFunction r11;
    XiFunction r12;
    XiFunction r22;
    double m = 1.0;

    Mat2 r(double xi) const { return symmetric(r11(xi), r12(xi), r22(xi)); }
    Mat2 r_prime(double xi, int order = 1) const
    {
        return symmetric(r11.derivative(xi, order),
                         r12.derivative(xi, order),
                         r22.derivative(xi, order));
    }
    Vec2 F(double xi) const { return {F1(xi), F2(xi)}; }
    Vec2 F_prime(double xi) const
    {
        return {F1.derivative(xi), F2.derivative(xi)};
    }

    //! Largest Fourier angular frequency among all components
    double max_frequency() const
    {
        double w = 0;
        for (auto const* f : this->components())
        {
            w = std::max(w, f->max_frequency());
        }
        return w;
    }

    //! Intersection of table domains, if any component is tabulated
    std::optional<std::pair<double, double>> domain() const
    {
        std::optional<std::pair<double, double>> d;
        for (auto const* f : this->components())
        {
            if (auto fd = f->domain())
            {
                if (!d)
                {
                    d = fd;
                }
                else
                {
                    d->first = std::max(d->first, fd->first);
                    d->second = std::min(d->second, fd->second);
                }
            }
        }
        return d;
    }

    std::array<XiFunction const*, 7> components() const
    {
        return {&g, &H, &F1, &F2, &r11, &r12, &r22};
    }

    void validate() const
    {
        if (!(m > 0) || !std::isfinite(m))
        {
            throw ConfigError("mass m must be positive and finite");
        }
        if (auto d = this->domain(); d && !(d->first < d->second))
        {
            throw ConfigError("table domains of the profile do not overlap");
        }
    }

    //! Copy with the charge coupling applied to every field function
    FieldProfile scaled(double factor) const
    {
        FieldProfile p = *this;
        p.g = g.scaled(factor);
        p.H = H.scaled(factor);
        p.F1 = F1.scaled(factor);
        p.F2 = F2.scaled(factor);
        p.r11 = r11.scaled(factor);
        p.r12 = r12.scaled(factor);
        p.r22 = r22.scaled(factor);
        return p;
    }
};

//---------------------------------------------------------------------------//
// PRESETS
//---------------------------------------------------------------------------//
/*!
 * Rotating quadrupole ("vortex") field.
 *
 * r11 = -r22 = c_amp cos(omega xi), r12 = c_amp sin(omega xi), all other
 * functions zero. The amplitude is called c_amp to keep it apart from the
 * speed of light.
 */
inline FieldProfile vortex(double c_amp, double omega, double m = 1.0)
{
    FieldProfile p;
    p.r11 = XiFunction::cosine(c_amp, omega);
    p.r22 = XiFunction::cosine(-c_amp, omega);
    p.r12 = XiFunction::cosine(c_amp, omega, -std::numbers::pi / 2);
    p.m = m;
    return p;
}

/*!
 * Rotating quadrupole on an isotropic background with uniform H.
 *
 * r11 = c1 + c2 cos(omega xi), r22 = c1 - c2 cos(omega xi),
 * r12 = c2 sin(omega xi), H constant, g = F = 0.
 */
inline FieldProfile
periodic_with_H(double c1, double c2, double omega, double H, double m = 1.0)
{
    FieldProfile p;
    p.r11 = XiFunction(c1, {{c2, omega, 0}});
    p.r22 = XiFunction(c1, {{-c2, omega, 0}});
    p.r12 = XiFunction::cosine(c2, omega, -std::numbers::pi / 2);
    p.H = XiFunction::constant(H);
    p.m = m;
    return p;
}

//---------------------------------------------------------------------------//
// EVALUATION
//---------------------------------------------------------------------------//
//! Scaled four-potential (a0, a1, a2, a3)
inline std::array<double, 4>
eval_potentials(FieldProfile const& prof, double xi, double x, double y)
{
    double const quad = prof.r11(xi) * x * x + 2 * prof.r12(xi) * x * y
                        + prof.r22(xi) * y * y;
    double const g = prof.g(xi);
    double const h = prof.H(xi);
    return {0.5 * (g - quad),
            -prof.F1(xi) - h * y,
            -prof.F2(xi) + h * x,
            -0.5 * (g + quad)};
}

struct EMField
{
    Eigen::Vector3d E;
    Eigen::Vector3d Hv;
};

inline EMField eval_fields(FieldProfile const& prof, double xi, double x, double y)
{
    double const hp = prof.H.derivative(xi);
    double const r11 = prof.r11(xi);
    double const r12 = prof.r12(xi);
    double const r22 = prof.r22(xi);
    double const ex = prof.F1.derivative(xi) + r11 * x + (r12 + hp) * y;
    double const ey = prof.F2.derivative(xi) + (r12 - hp) * x + r22 * y;
    EMField f;
    f.E = {ex, ey, prof.g.derivative(xi)};
    f.Hv = {-ey, ex, 2 * prof.H(xi)};
    return f;
}

//! Source density r11 + r22 - g'' required by Maxwell's equations
inline double maxwell_current(FieldProfile const& prof, double xi)
{
    return prof.r11(xi) + prof.r22(xi) - prof.g.derivative(xi, 2);
}

inline double eval_p(FieldProfile const& prof, double lambda, double xi)
{
    return lambda - prof.g(xi);
}

//! p(xi), throwing TurningPoint when |p| < eps_p
inline double
checked_p(FieldProfile const& prof, double lambda, double xi, double eps_p = 1e-12)
{
    double const p = eval_p(prof, lambda, xi);
    if (!(std::abs(p) >= eps_p))
    {
        throw TurningPoint(xi, p);
    }
    return p;
}

//---------------------------------------------------------------------------//
} // namespace beamguide
