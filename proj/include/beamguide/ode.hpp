//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/ode.hpp
//! Adaptive embedded Runge-Kutta driver with exact-step dense evaluation.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "errors.hpp"

namespace beamguide::ode
{
//---------------------------------------------------------------------------//
template<std::size_t N>
using State = std::array<double, N>;

template<std::size_t N>
using Stepper = boost::numeric::odeint::runge_kutta_fehlberg78<State<N>>;

struct Options
{
    double rtol = 1e-10;
    double atol = 1e-12;
    double first_step = 0;  //!< zero selects |span|/64
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
};

//---------------------------------------------------------------------------//
/*!
 * Accepted nodes of an adaptive integration plus the right-hand side.
 *
 * Evaluation between nodes takes one fresh RKF78 step of the exact length
 * from the preceding node, so the result carries the same local error as
 * an accepted step and is a smooth function of x inside each node interval.
 * Nodes are monotone in the integration direction.
 */
template<std::size_t N, class System>
class DenseSolution
{
  public:
    using state_type = State<N>;

    explicit DenseSolution(System sys) : sys_(std::move(sys)) {}

    void push(double x, state_type const& y)
    {
        x_.push_back(x);
        y_.push_back(y);
    }

    std::span<double const> nodes() const { return x_; }
    std::span<state_type const> states() const { return y_; }
    std::size_t size() const { return x_.size(); }
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    double lo() const { return std::min(x_.front(), x_.back()); }
    double hi() const { return std::max(x_.front(), x_.back()); }
    System const& system() const { return sys_; }

    bool contains(double x) const
    {
        double const slack = 1e-12 * std::max(1.0, std::abs(x));
        return x >= this->lo() - slack && x <= this->hi() + slack;
    }

    //! Solution at x (must lie within the integrated span)
    state_type operator()(double x) const
    {
        if (x_.empty() || !this->contains(x))
        {
            throw DomainError("dense evaluation at x = " + std::to_string(x)
                              + " outside integrated span");
        }
        std::size_t const i = this->node_before(x);
        if (x == x_[i])
        {
            return y_[i];
        }
        state_type out;
        Stepper<N> stepper;
        System sys = sys_;
        stepper.do_step(sys, y_[i], x_[i], out, x - x_[i]);
        return out;
    }

    //! Index of the last node not past x in the integration direction
    std::size_t node_before(double x) const
    {
        bool const forward = x_.back() >= x_.front();
        std::size_t i;
        if (forward)
        {
            auto it = std::upper_bound(x_.begin(), x_.end(), x);
            i = it == x_.begin() ? 0 : std::size_t(it - x_.begin()) - 1;
        }
        else
        {
            auto it = std::upper_bound(
                x_.begin(), x_.end(), x, [](double a, double b) {
                    return a > b;
                });
            i = it == x_.begin() ? 0 : std::size_t(it - x_.begin()) - 1;
        }
        return std::min(i, x_.size() - 1);
    }

  private:
    System sys_;
    std::vector<double> x_;
    std::vector<state_type> y_;
};

//---------------------------------------------------------------------------//
/*!
 * Integrate dy/dx = sys(y, x) from x0 to x1 with adaptive RKF7(8).
 *
 * The observer is called as observer(x, y) at the initial point and after
 * every accepted step; returning false stops the integration early.
 * Throws StepFailure when the step size underflows, the step budget is
 * exhausted, or the state becomes non-finite. Exceptions raised by the
 * system (e.g. TurningPoint) propagate unchanged.
 */
template<std::size_t N, class System, class Observer>
DenseSolution<N, System> integrate(System sys,
                                   State<N> y0,
                                   double x0,
                                   double x1,
                                   Options const& opts,
                                   Observer&& observer)
{
    namespace odeint = boost::numeric::odeint;

    DenseSolution<N, System> result(sys);
    result.push(x0, y0);
    if (!observer(x0, y0) || x0 == x1)
    {
        return result;
    }

    double const dir = x1 > x0 ? 1.0 : -1.0;
    double const span = std::abs(x1 - x0);
    double dt = opts.first_step > 0 ? opts.first_step : span / 64;
    dt = dir * std::min(dt, opts.max_step);

    auto controlled = odeint::make_controlled(
        opts.atol, opts.rtol, Stepper<N>{});

    double x = x0;
    State<N> y = y0;
    std::size_t steps = 0;
    while (dir * (x1 - x) > 0)
    {
        bool last = false;
        if (std::abs(dt) > opts.max_step)
        {
            dt = dir * opts.max_step;
        }
        if (dir * (x + dt - x1) >= 0)
        {
            dt = x1 - x;
            last = true;
        }
        double const min_dt = 1e-14 * std::max(1.0, std::abs(x));
        if (std::abs(dt) < min_dt && !last)
        {
            throw StepFailure("step size underflow at x = "
                              + std::to_string(x));
        }
        auto const res = controlled.try_step(sys, y, x, dt);
        if (res != odeint::success)
        {
            if (std::abs(dt) < min_dt)
            {
                throw StepFailure("step size underflow at x = "
                                  + std::to_string(x));
            }
            continue;
        }
        if (last)
        {
            x = x1;
        }
        for (double v : y)
        {
            if (!std::isfinite(v))
            {
                throw StepFailure("non-finite state at x = "
                                  + std::to_string(x));
            }
        }
        result.push(x, y);
        if (++steps > opts.max_steps)
        {
            throw StepFailure("step budget exhausted at x = "
                              + std::to_string(x));
        }
        if (!observer(x, y))
        {
            break;
        }
    }
    return result;
}

//! Integrate without an observer
template<std::size_t N, class System>
DenseSolution<N, System>
integrate(System sys, State<N> y0, double x0, double x1, Options const& opts)
{
    return integrate<N>(std::move(sys), y0, x0, x1, opts,
                        [](double, State<N> const&) { return true; });
}

//---------------------------------------------------------------------------//
} // namespace beamguide::ode
