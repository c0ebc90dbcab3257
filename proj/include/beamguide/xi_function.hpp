//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/xi_function.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace beamguide
{
//---------------------------------------------------------------------------//
//! amplitude * cos(omega * xi + phase)
struct FourierTerm
{
    double amplitude = 0;
    double omega = 0;
    double phase = 0;
};

//! coefficient * xi^power
struct PolynomialTerm
{
    double coefficient = 0;
    int power = 0;
};

//---------------------------------------------------------------------------//
/*!
 * Sampled function with linear or natural-cubic-spline interpolation.
 *
 * Queries outside [x_front, x_back] throw DomainError.
 */
class XiTable
{
  public:
    XiTable() = default;

    XiTable(std::vector<double> xs, std::vector<double> ys, int order)
        : x_(std::move(xs)), y_(std::move(ys)), order_(order)
    {
        if (x_.size() != y_.size() || x_.size() < 2)
        {
            throw ConfigError("table needs at least two (xi, value) pairs");
        }
        if (order_ != 1 && order_ != 3)
        {
            throw ConfigError("table interpolation order must be 1 or 3");
        }
        for (std::size_t i = 1; i < x_.size(); ++i)
        {
            if (!(x_[i] > x_[i - 1]))
            {
                throw ConfigError("table xi values must be strictly "
                                  "increasing");
            }
        }
        if (order_ == 3)
        {
            this->build_spline();
        }
    }

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    int order() const { return order_; }
    std::vector<double> const& xs() const { return x_; }
    std::vector<double> const& ys() const { return y_; }

    //! Derivative of the interpolant of the given order (0..3)
    double eval(double xi, int deriv) const
    {
        if (!(xi >= x_.front() && xi <= x_.back()))
        {
            throw DomainError("xi = " + std::to_string(xi)
                              + " outside table range ["
                              + std::to_string(x_.front()) + ", "
                              + std::to_string(x_.back()) + "]");
        }
        auto it = std::upper_bound(x_.begin(), x_.end(), xi);
        std::size_t i = std::size_t(it - x_.begin());
        i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
        double const h = x_[i + 1] - x_[i];
        double const t = xi - x_[i];
        if (order_ == 1)
        {
            double const slope = (y_[i + 1] - y_[i]) / h;
            switch (deriv)
            {
                case 0:
                    return y_[i] + slope * t;
                case 1:
                    return slope;
                default:
                    return 0;
            }
        }
        // Natural cubic on [x_i, x_i+1] in terms of second derivatives m_
        double const a = m_[i];
        double const b = m_[i + 1];
        double const u = h - t;
        switch (deriv)
        {
            case 0:
                return (a * u * u * u + b * t * t * t) / (6 * h)
                       + (y_[i] / h - a * h / 6) * u
                       + (y_[i + 1] / h - b * h / 6) * t;
            case 1:
                return (-a * u * u + b * t * t) / (2 * h)
                       - (y_[i] / h - a * h / 6)
                       + (y_[i + 1] / h - b * h / 6);
            case 2:
                return (a * u + b * t) / h;
            case 3:
                return (b - a) / h;
            default:
                return 0;
        }
    }

  private:
    std::vector<double> x_, y_, m_;
    int order_ = 1;

    void build_spline()
    {
        // Thomas algorithm for the natural-spline moment equations
        std::size_t const n = x_.size();
        m_.assign(n, 0.0);
        if (n < 3)
        {
            return;
        }
        std::vector<double> diag(n - 2), upper(n - 2), rhs(n - 2);
        for (std::size_t i = 1; i + 1 < n; ++i)
        {
            double const h0 = x_[i] - x_[i - 1];
            double const h1 = x_[i + 1] - x_[i];
            diag[i - 1] = 2 * (h0 + h1);
            upper[i - 1] = h1;
            rhs[i - 1] = 6
                         * ((y_[i + 1] - y_[i]) / h1
                            - (y_[i] - y_[i - 1]) / h0);
        }
        for (std::size_t k = 1; k < n - 2; ++k)
        {
            double const lower = x_[k + 1] - x_[k];
            double const w = lower / diag[k - 1];
            diag[k] -= w * upper[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        for (std::size_t k = n - 2; k-- > 0;)
        {
            double next = k + 1 < n - 2 ? m_[k + 2] : 0.0;
            m_[k + 1] = (rhs[k] - upper[k] * next) / diag[k];
        }
    }
};

//---------------------------------------------------------------------------//
/*!
 * Scalar function of the light-cone variable with exact derivatives.
 *
 * The value is the sum of a constant, Fourier terms, polynomial terms and
 * an optional interpolated table.
 */
class XiFunction
{
  public:
    XiFunction() = default;

    XiFunction(double constant,
               std::vector<FourierTerm> fourier,
               std::vector<PolynomialTerm> poly = {},
               std::optional<XiTable> table = std::nullopt)
        : constant_(constant)
        , fourier_(std::move(fourier))
        , poly_(std::move(poly))
        , table_(std::move(table))
    {
        for (auto const& p : poly_)
        {
            if (p.power < 0)
            {
                throw ConfigError("polynomial powers must be non-negative");
            }
        }
    }

    static XiFunction constant(double c) { return XiFunction(c, {}); }
    static XiFunction cosine(double amp, double omega, double phase = 0)
    {
        return XiFunction(0, {{amp, omega, phase}});
    }

    double operator()(double xi) const { return this->eval(xi, 0); }
    double derivative(double xi, int order = 1) const
    {
        return this->eval(xi, order);
    }

    //! Derivative of the given order (0 is the value)
    double eval(double xi, int order) const
    {
        double result = order == 0 ? constant_ : 0.0;
        for (auto const& t : fourier_)
        {
            result += t.amplitude * std::pow(t.omega, order)
                      * std::cos(t.omega * xi + t.phase
                                 + order * std::numbers::pi / 2);
        }
        for (auto const& t : poly_)
        {
            if (order > t.power)
            {
                continue;
            }
            double c = t.coefficient;
            for (int k = 0; k < order; ++k)
            {
                c *= t.power - k;
            }
            result += c * std::pow(xi, t.power - order);
        }
        if (table_)
        {
            result += table_->eval(xi, order);
        }
        return result;
    }

    bool is_zero() const
    {
        auto zero_amp = [](auto const& t) {
            return t.amplitude == 0;
        };
        auto zero_coef = [](auto const& t) {
            return t.coefficient == 0;
        };
        return constant_ == 0 && std::all_of(fourier_.begin(), fourier_.end(),
                                             zero_amp)
               && std::all_of(poly_.begin(), poly_.end(), zero_coef)
               && !table_;
    }

    //! True when every derivative vanishes identically
    bool is_constant() const
    {
        for (auto const& t : fourier_)
        {
            if (t.amplitude != 0 && t.omega != 0)
                return false;
        }
        for (auto const& t : poly_)
        {
            if (t.coefficient != 0 && t.power > 0)
                return false;
        }
        return !table_;
    }

    double max_frequency() const
    {
        double w = 0;
        for (auto const& t : fourier_)
        {
            w = std::max(w, std::abs(t.omega));
        }
        return w;
    }

    //! Table domain if present
    std::optional<std::pair<double, double>> domain() const
    {
        if (!table_)
            return std::nullopt;
        return std::make_pair(table_->front(), table_->back());
    }

    //! Copy with every term multiplied by a factor
    XiFunction scaled(double factor) const
    {
        XiFunction r = *this;
        r.constant_ *= factor;
        for (auto& t : r.fourier_)
            t.amplitude *= factor;
        for (auto& t : r.poly_)
            t.coefficient *= factor;
        if (r.table_)
        {
            auto ys = r.table_->ys();
            for (auto& y : ys)
                y *= factor;
            r.table_ = XiTable(r.table_->xs(), std::move(ys),
                               r.table_->order());
        }
        return r;
    }

    double constant_term() const { return constant_; }
    std::vector<FourierTerm> const& fourier_terms() const { return fourier_; }
    std::vector<PolynomialTerm> const& polynomial_terms() const
    {
        return poly_;
    }
    std::optional<XiTable> const& table() const { return table_; }

  private:
    double constant_ = 0;
    std::vector<FourierTerm> fourier_;
    std::vector<PolynomialTerm> poly_;
    std::optional<XiTable> table_;
};

//---------------------------------------------------------------------------//
} // namespace beamguide
