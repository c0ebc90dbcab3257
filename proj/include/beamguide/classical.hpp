//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/classical.hpp
//! Lorentz equations in the light-cone parameter xi.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fields.hpp"
#include "linalg.hpp"
#include "ode.hpp"
#include "quadrature.hpp"
#include "riccati_solution.hpp"

namespace beamguide
{
//---------------------------------------------------------------------------//
/*!
 * Particle state at light-cone time xi.
 *
 * z_prime is carried as an independent variable; the mass-shell value
 * implied by (p, v') is a diagnostic, not an input.
 */
struct TrajectoryState
{
    double xi = 0;
    Vec2 v = Vec2::Zero();
    Vec2 v_prime = Vec2::Zero();
    double z = 0;
    double z_prime = 0;
};

struct Derivatives
{
    Vec2 v_prime;
    Vec2 v_second;
    double z_prime = 0;   //!< mass-shell value (m^2/p^2 + v'^2 - 1)/2
    double z_second = 0;  //!< longitudinal Lorentz force
};

//! dz/dxi on the mass shell
inline double mass_shell_z_prime(double m, double p, Vec2 const& vp)
{
    return 0.5 * (m * m / (p * p) + vp.squaredNorm() - 1);
}

/*!
 * Right-hand side of the reduced Lorentz equations:
 *   p v'' = r v + H' E v + 2 H E v' + F' - p' v'
 *   p z'' = g' (1 + 2 z') + v' . (F' + r v + H' E v)
 */
inline Derivatives derivatives(FieldProfile const& prof,
                               double lambda,
                               TrajectoryState const& s,
                               double eps_p = 1e-12)
{
    double const p = checked_p(prof, lambda, s.xi, eps_p);
    double const gp = prof.g.derivative(s.xi);
    Mat2 const E = isigma2();
    Vec2 const eperp = prof.F_prime(s.xi) + prof.r(s.xi) * s.v
                       + prof.H.derivative(s.xi) * (E * s.v);
    Derivatives d;
    d.v_prime = s.v_prime;
    d.v_second = (eperp + 2 * prof.H(s.xi) * (E * s.v_prime) + gp * s.v_prime)
                 / p;
    d.z_prime = mass_shell_z_prime(prof.m, p, s.v_prime);
    d.z_second = (gp * (1 + 2 * s.z_prime) + s.v_prime.dot(eperp)) / p;
    return d;
}

//! lambda reconstructed from (v', z') through the mass shell, minus lambda
inline double
lambda_residual(FieldProfile const& prof, double lambda, TrajectoryState const& s)
{
    double const p = checked_p(prof, lambda, s.xi);
    double const shell = 1 + 2 * s.z_prime - s.v_prime.squaredNorm();
    if (!(shell > 0))
    {
        return std::numeric_limits<double>::infinity();
    }
    double const p_rec = std::copysign(prof.m / std::sqrt(shell), p);
    return std::abs(p_rec + prof.g(s.xi) - lambda);
}

//! |(u0)^2 - |u|^2 - 1| with u = (p/m) d(x0, x, y, z)/dxi
inline double mass_shell_residual(FieldProfile const& prof,
                                  double lambda,
                                  TrajectoryState const& s)
{
    double const p = checked_p(prof, lambda, s.xi);
    double const k = p / prof.m;
    double const u0 = k * (1 + s.z_prime);
    double const uz = k * s.z_prime;
    Vec2 const ut = k * s.v_prime;
    return std::abs(u0 * u0 - uz * uz - ut.squaredNorm() - 1);
}

//! State with z' set on the mass shell
inline TrajectoryState make_initial_state(FieldProfile const& prof,
                                          double lambda,
                                          double xi,
                                          Vec2 const& v,
                                          Vec2 const& vp,
                                          double z = 0)
{
    TrajectoryState s{xi, v, vp, z, 0};
    s.z_prime = mass_shell_z_prime(prof.m, checked_p(prof, lambda, xi), vp);
    return s;
}

//---------------------------------------------------------------------------//
namespace detail
{
struct LorentzSystem
{
    std::shared_ptr<FieldProfile const> prof;
    double lambda = 1;
    double eps_p = 1e-12;

    static TrajectoryState unpack(double xi, ode::State<6> const& y)
    {
        return {xi, {y[0], y[1]}, {y[2], y[3]}, y[4], y[5]};
    }
    static ode::State<6> pack(TrajectoryState const& s)
    {
        return {s.v[0], s.v[1], s.v_prime[0], s.v_prime[1], s.z, s.z_prime};
    }

    void operator()(ode::State<6> const& y, ode::State<6>& dy, double xi) const
    {
        auto const d = derivatives(*prof, lambda, unpack(xi, y), eps_p);
        dy = {d.v_prime[0], d.v_prime[1], d.v_second[0], d.v_second[1],
              y[5], d.z_second};
    }
};
} // namespace detail

struct IntegrateOptions
{
    double rtol = 1e-10;
    double atol = 1e-12;
    double eps_p = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
    //! Return false to stop after the current accepted step
    std::function<bool(TrajectoryState const&)> keep_going;
};

/*!
 * Accepted states of an integration with per-state diagnostics.
 */
class Trajectory
{
  public:
    using Dense = ode::DenseSolution<6, detail::LorentzSystem>;

    double lambda = 0;
    std::vector<TrajectoryState> states;
    std::vector<double> lambda_residuals;
    std::vector<double> mass_shell_residuals;
    bool stopped_early = false;

    TrajectoryState const& back() const { return states.back(); }

    //! State at any xi inside the integrated span
    TrajectoryState at(double xi) const
    {
        return detail::LorentzSystem::unpack(xi, (*dense_)(xi));
    }

    double max_lambda_residual() const { return max_of(lambda_residuals); }
    double max_mass_shell_residual() const
    {
        return max_of(mass_shell_residuals);
    }

    void set_dense(std::shared_ptr<Dense const> d) { dense_ = std::move(d); }

  private:
    std::shared_ptr<Dense const> dense_;

    static double max_of(std::vector<double> const& v)
    {
        return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    }
};

/*!
 * Adaptive integration of the reduced Lorentz equations over
 * [init.xi, xi_end] (xi_end >= init.xi).
 */
inline Trajectory integrate(FieldProfile const& prof,
                            double lambda,
                            TrajectoryState const& init,
                            double xi_end,
                            IntegrateOptions const& opts = {})
{
    prof.validate();
    if (xi_end < init.xi)
    {
        throw DomainError("trajectories run forward in xi");
    }
    auto const shared = std::make_shared<FieldProfile const>(prof);
    detail::LorentzSystem sys{shared, lambda, opts.eps_p};

    Trajectory traj;
    traj.lambda = lambda;
    auto observer = [&](double xi, ode::State<6> const& y) {
        auto const s = detail::LorentzSystem::unpack(xi, y);
        checked_p(prof, lambda, xi, opts.eps_p);
        traj.states.push_back(s);
        traj.lambda_residuals.push_back(lambda_residual(prof, lambda, s));
        traj.mass_shell_residuals.push_back(
            mass_shell_residual(prof, lambda, s));
        if (opts.keep_going && !opts.keep_going(s))
        {
            traj.stopped_early = xi < xi_end;
            return false;
        }
        return true;
    };
    ode::Options o;
    o.rtol = opts.rtol;
    o.atol = opts.atol;
    o.max_steps = opts.max_steps;
    o.max_step = opts.max_step;
    if (double w = prof.max_frequency(); w > 0)
    {
        o.max_step = std::min(o.max_step, std::numbers::pi / (2 * w));
    }
    auto dense = ode::integrate<6>(sys, detail::LorentzSystem::pack(init),
                                   init.xi, xi_end, o, observer);
    traj.set_dense(
        std::make_shared<Trajectory::Dense const>(std::move(dense)));
    return traj;
}

//---------------------------------------------------------------------------//
// DERIVED QUANTITIES
//---------------------------------------------------------------------------//
//! Proper time m \int dxi / p; TurningPoint if p vanishes or changes sign
inline double proper_time(FieldProfile const& prof,
                          double lambda,
                          double xi0,
                          double xi1,
                          QuadOptions const& q = {1e-15, 1e-12, 40})
{
    if (xi0 == xi1)
        return 0;
    double const sign0 = checked_p(prof, lambda, xi0) > 0 ? 1 : -1;
    auto integrand = [&](double s) {
        double const p = checked_p(prof, lambda, s);
        if (p * sign0 < 0)
        {
            throw TurningPoint(s, p);
        }
        return prof.m / p;
    };
    auto const bp = half_period_breakpoints(xi0, xi1, prof.max_frequency());
    return integrate_gk(integrand, xi0, xi1, q, bp).value;
}

struct LabEvent
{
    double t = 0;
    double x = 0;
    double y = 0;
    double z = 0;
};

//! Lab-frame events with t = xi + z
inline std::vector<LabEvent> lab_frame(Trajectory const& traj)
{
    std::vector<LabEvent> out;
    out.reserve(traj.states.size());
    for (auto const& s : traj.states)
    {
        out.push_back({s.xi + s.z, s.v[0], s.v[1], s.z});
    }
    return out;
}

inline double xi_from_lab(LabEvent const& e)
{
    return e.t - e.z;
}

//---------------------------------------------------------------------------//
/*!
 * Largest |p v' + (f - H E) v + chi| along a trajectory for a given k.
 */
inline double first_integral_residual(Trajectory const& traj,
                                      RiccatiSolution const& rs,
                                      Vec2 const& k)
{
    double worst = 0;
    for (auto const& s : traj.states)
    {
        auto const pt = rs.at(s.xi, false);
        Vec2 const chi = pt.B * k + pt.chibar;
        worst = std::max(
            worst, first_integral_norm(pt, rs.profile(), s.v, s.v_prime, chi));
    }
    return worst;
}

//! As above with k fixed by the first state of the trajectory
inline double
first_integral_residual(Trajectory const& traj, RiccatiSolution const& rs)
{
    auto const& s0 = traj.states.front();
    auto const pt = rs.at(s0.xi, false);
    Mat2 const he = rs.profile().H(s0.xi) * isigma2();
    Vec2 const chi = -pt.p * s0.v_prime - (pt.f - he) * s0.v;
    Vec2 const k = pt.B.inverse() * (chi - pt.chibar);
    return first_integral_residual(traj, rs, k);
}

//---------------------------------------------------------------------------//
} // namespace beamguide
