//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/riccati_solution.hpp
//! Complete integral of the Hamilton-Jacobi equation built on a Z flow.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fields.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"
#include "riccati_z.hpp"

namespace beamguide
{
//---------------------------------------------------------------------------//
//! Quadratic dependence of the phase integral on k: k^T M k + 2 b^T k + c
struct PhaseCoefficients
{
    Mat2 M = Mat2::Zero();
    Vec2 b = Vec2::Zero();
    double c = 0;

    double operator()(Vec2 const& k) const
    {
        return k.dot(M * k) + 2 * b.dot(k) + c;
    }
};

//! Everything the action and wavefunctions need at one xi
struct RiccatiPoint
{
    double xi = 0;
    double p = 0;
    double T = 0;
    Mat2 Z, Zp;
    Mat2 f;
    Mat2 B;       //!< columns are the homogeneous chi basis
    Vec2 chibar;  //!< particular chi
    Vec2 F;
    double delta = 0;  //!< det B
    PhaseCoefficients phase;
};

//---------------------------------------------------------------------------//
/*!
 * Riccati data f, chi and the phase integral on the caustic-free segment of
 * a Z flow that contains the base point.
 *
 * With R = Rot(T) and B = R Z^{-T}:
 *   f = -p R Z' Z^{-1} R^{-1},  chi = B k + chibar,
 *   chibar = -B \int Z^T R^{-1} F',
 *   alpha  = \int (chi^2 + m^2)/p,
 *   v      = R Z {w0 - \int Z^{-1} R^{-1} chi / p}
 * with all integrals starting at the base point. The k dependence of the
 * integrals is quadratic and tabulated once on the flow's knots.
 */
class RiccatiSolution
{
  public:
    using Vec6 = Eigen::Matrix<double, 6, 1>;

    RiccatiSolution(FieldProfile prof,
                    double lambda,
                    std::shared_ptr<ZFlow const> flow,
                    double xi_base,
                    QuadOptions quad = {1e-14, 1e-12, 40})
        : prof_(std::move(prof))
        , lambda_(lambda)
        , flow_(std::move(flow))
        , base_(xi_base)
        , quad_(quad)
    {
        prof_.validate();
        if (!flow_->contains(base_))
        {
            throw DomainError("Riccati base point outside the Z flow");
        }
        lo_ = flow_->lo();
        hi_ = flow_->hi();
        for (double c : flow_->caustics())
        {
            if (c == base_)
            {
                throw SingularZ("Riccati base point lies on a caustic");
            }
            if (c < base_)
                lo_ = std::max(lo_, c);
            else
                hi_ = std::min(hi_, c);
        }
        lo_open_ = lo_ > flow_->lo();
        hi_open_ = hi_ < flow_->hi();
        has_F_ = !(prof_.F1.is_constant() && prof_.F2.is_constant());
        this->build_knots();
        this->build_tables();
    }

    FieldProfile const& profile() const { return prof_; }
    double lambda() const { return lambda_; }
    double base() const { return base_; }
    std::shared_ptr<ZFlow const> const& flow() const { return flow_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool contains(double xi) const
    {
        return (lo_open_ ? xi > lo_ : xi >= lo_)
               && (hi_open_ ? xi < hi_ : xi <= hi_);
    }

    double p(double xi) const { return checked_p(prof_, lambda_, xi); }
    double T(double xi) const { return (*flow_)(xi).T; }

    //! Full evaluation at xi (phase integrals only when requested)
    RiccatiPoint at(double xi, bool with_phase = true) const
    {
        this->check_domain(xi);
        ZSample const z = (*flow_)(xi);
        RiccatiPoint pt;
        pt.xi = xi;
        pt.p = this->p(xi);
        pt.T = z.T;
        pt.Z = z.Z;
        pt.Zp = z.Zp;
        pt.f = f_from_Z(z.Z, z.Zp, z.T, pt.p).f;
        Mat2 const Zit = z.Z.inverse().transpose();
        pt.B = rot(z.T) * Zit;
        pt.chibar = has_F_ ? Vec2(-pt.B * this->F_integral(xi))
                           : Vec2::Zero();
        pt.F = prof_.F(xi);
        pt.delta = pt.B.determinant();
        if (with_phase)
        {
            Vec6 const ph = this->phase_integral(xi);
            pt.phase.M = symmetric(ph[0], ph[1], ph[2]);
            pt.phase.b = {ph[3], ph[4]};
            pt.phase.c = ph[5];
        }
        return pt;
    }

    Mat2 f(double xi) const { return this->at(xi, false).f; }
    Mat2 chi_basis(double xi) const { return this->at(xi, false).B; }
    Vec2 chi_particular(double xi) const { return this->at(xi, false).chibar; }
    double delta(double xi) const { return this->at(xi, false).delta; }
    PhaseCoefficients phase_coefficients(double xi) const
    {
        return this->at(xi, true).phase;
    }
    double alpha_phase(Vec2 const& k, double xi) const
    {
        return this->phase_coefficients(xi)(k);
    }

    //! \int_base^xi Z^T Rot(-T) F'
    Vec2 F_integral(double xi) const
    {
        if (!has_F_)
            return Vec2::Zero();
        std::size_t const j = this->nearest_knot(xi);
        return F_table_[j]
               + integrate_gk(
                     [this](double s) { return this->F_integrand(s); },
                     knots_[j], xi, quad_)
                     .value;
    }

  private:
    FieldProfile prof_;
    double lambda_;
    std::shared_ptr<ZFlow const> flow_;
    double base_;
    QuadOptions quad_;
    double lo_ = 0, hi_ = 0;
    bool lo_open_ = false, hi_open_ = false;
    bool has_F_ = false;
    std::vector<double> knots_;
    std::size_t base_index_ = 0;
    std::vector<Vec2> F_table_;
    std::vector<Vec6> phase_table_;

    void check_domain(double xi) const
    {
        if (!this->contains(xi))
        {
            throw DomainError("xi = " + std::to_string(xi)
                              + " outside the caustic-free Riccati segment ["
                              + std::to_string(lo_) + ", "
                              + std::to_string(hi_) + "]");
        }
    }

    void build_knots()
    {
        // Segment ends that are caustics are never knots
        std::vector<double> k{base_};
        if (!lo_open_)
            k.push_back(lo_);
        if (!hi_open_)
            k.push_back(hi_);
        for (double x : flow_->breakpoints())
        {
            if (x > lo_ && x < hi_)
                k.push_back(x);
        }
        double const w = std::max(prof_.max_frequency(), 1.0);
        double const h = std::min((hi_ - lo_) / 64, std::numbers::pi / (2 * w));
        if (h > 0)
        {
            for (double x = base_ + h; x < hi_; x += h)
                k.push_back(x);
            for (double x = base_ - h; x > lo_; x -= h)
                k.push_back(x);
        }
        std::sort(k.begin(), k.end());
        k.erase(std::unique(k.begin(), k.end()), k.end());
        // Drop interior knots near a caustic end, where the phase integrand
        // grows like 1/det(Z)^2
        double const guard = 1e-3 * (hi_ - lo_);
        std::erase_if(k, [&](double x) {
            return x != base_
                   && ((lo_open_ && x - lo_ < guard)
                       || (hi_open_ && hi_ - x < guard));
        });
        knots_ = std::move(k);
        base_index_ = std::size_t(
            std::find(knots_.begin(), knots_.end(), base_) - knots_.begin());
    }

    template<class V, class F>
    std::vector<V> cumulative(F const& integrand) const
    {
        std::vector<V> table(knots_.size(), V::Zero());
        for (std::size_t i = base_index_; i + 1 < knots_.size(); ++i)
        {
            table[i + 1] = table[i]
                           + integrate_gk(integrand, knots_[i], knots_[i + 1],
                                          quad_)
                                 .value;
        }
        for (std::size_t i = base_index_; i > 0; --i)
        {
            table[i - 1] = table[i]
                           + integrate_gk(integrand, knots_[i], knots_[i - 1],
                                          quad_)
                                 .value;
        }
        return table;
    }

    void build_tables()
    {
        if (has_F_)
        {
            F_table_ = this->cumulative<Vec2>(
                [this](double s) { return this->F_integrand(s); });
        }
        phase_table_ = this->cumulative<Vec6>(
            [this](double s) { return this->phase_integrand(s); });
    }

    std::size_t nearest_knot(double xi) const
    {
        auto it = std::lower_bound(knots_.begin(), knots_.end(), xi);
        if (it == knots_.end())
            return knots_.size() - 1;
        std::size_t j = std::size_t(it - knots_.begin());
        if (j > 0 && xi - knots_[j - 1] < knots_[j] - xi)
            --j;
        return j;
    }

    Vec2 F_integrand(double s) const
    {
        ZSample const z = (*flow_)(s);
        return z.Z.transpose() * rot(-z.T) * prof_.F_prime(s);
    }

    Vec6 phase_integrand(double s) const
    {
        ZSample const z = (*flow_)(s);
        double const p = this->p(s);
        Mat2 const B = rot(z.T) * z.Z.inverse().transpose();
        Vec2 const chibar = has_F_ ? Vec2(-B * this->F_integral(s))
                                   : Vec2::Zero();
        Mat2 const BtB = B.transpose() * B;
        Vec2 const Btc = B.transpose() * chibar;
        double const m = prof_.m;
        Vec6 out;
        out << BtB(0, 0), BtB(0, 1), BtB(1, 1), Btc[0], Btc[1],
            chibar.squaredNorm() + m * m;
        return out / p;
    }

    Vec6 phase_integral(double xi) const
    {
        std::size_t const j = this->nearest_knot(xi);
        return phase_table_[j]
               + integrate_gk(
                     [this](double s) { return this->phase_integrand(s); },
                     knots_[j], xi, quad_)
                     .value;
    }
};

//---------------------------------------------------------------------------//
// CHI, V, ACTION
//---------------------------------------------------------------------------//
//! chi = B k + chibar
inline Vec2 solve_chi(RiccatiSolution const& rs, Vec2 const& k, double xi)
{
    auto const pt = rs.at(xi, false);
    return pt.B * k + pt.chibar;
}

//! v = R Z (w0 - M k - b)
inline Vec2
solve_v(RiccatiSolution const& rs, Vec2 const& k, Vec2 const& w0, double xi)
{
    auto const pt = rs.at(xi, true);
    return rot(pt.T) * pt.Z * (w0 - pt.phase.M * k - pt.phase.b);
}

//! v' from the first-order relation p v' + (f - H E) v + chi = 0
inline Vec2 velocity_from_first_integral(RiccatiPoint const& pt,
                                         FieldProfile const& prof,
                                         Vec2 const& v,
                                         Vec2 const& chi)
{
    Mat2 const he = prof.H(pt.xi) * isigma2();
    return -((pt.f - he) * v + chi) / pt.p;
}

//! Integration constants (k, w0) reproducing position v and velocity vp at
//! the base point
struct RiccatiConstants
{
    Vec2 k;
    Vec2 w0;
};

inline RiccatiConstants
match_initial_conditions(RiccatiSolution const& rs, Vec2 const& v, Vec2 const& vp)
{
    auto const pt = rs.at(rs.base(), false);
    Mat2 const he = rs.profile().H(pt.xi) * isigma2();
    Vec2 const chi = -pt.p * vp - (pt.f - he) * v;
    RiccatiConstants out;
    out.k = pt.B.inverse() * (chi - pt.chibar);
    out.w0 = (rot(pt.T) * pt.Z).inverse() * v;
    return out;
}

//! |p v' + (f - H E) v + chi|
inline double first_integral_norm(RiccatiPoint const& pt,
                                  FieldProfile const& prof,
                                  Vec2 const& v,
                                  Vec2 const& vp,
                                  Vec2 const& chi)
{
    Mat2 const he = prof.H(pt.xi) * isigma2();
    return (pt.p * vp + (pt.f - he) * v + chi).norm();
}

struct Event
{
    double xi = 0;
    double eta = 0;  //!< x0 + z
    double x = 0;
    double y = 0;
};

//! Gamma = v^T f v + 2 (chi + F)^T v + alpha
inline double gamma_form(RiccatiPoint const& pt, Vec2 const& k, Vec2 const& v)
{
    Vec2 const chi = pt.B * k + pt.chibar;
    return v.dot(pt.f * v) + 2 * (chi + pt.F).dot(v) + pt.phase(k);
}

inline double action_S(RiccatiPoint const& pt,
                       double lambda,
                       Vec2 const& k,
                       Event const& ev)
{
    return -0.5 * (lambda * ev.eta + gamma_form(pt, k, {ev.x, ev.y}));
}

inline double action_S(RiccatiSolution const& rs, Vec2 const& k, Event const& ev)
{
    return action_S(rs.at(ev.xi, true), rs.lambda(), k, ev);
}

/*!
 * Hamilton-Jacobi residual
 *   (d0 S + a0)^2 - (dx S - a1)^2 - (dy S - a2)^2 - (dz S - a3)^2 - m^2
 * with derivatives by fourth-order central differences of S(xi, eta, x, y)
 * and d0 = d_xi + d_eta, dz = d_eta - d_xi.
 */
template<class Action>
double hj_residual(FieldProfile const& prof,
                   Action const& S,
                   Event const& ev,
                   double h = 1e-3)
{
    auto d = [&](auto shift) {
        auto at = [&](double s) { return S(shift(ev, s)); };
        return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    };
    double const s_xi = d([](Event e, double s) {
        e.xi += s;
        return e;
    });
    double const s_eta = d([](Event e, double s) {
        e.eta += s;
        return e;
    });
    double const s_x = d([](Event e, double s) {
        e.x += s;
        return e;
    });
    double const s_y = d([](Event e, double s) {
        e.y += s;
        return e;
    });
    auto const a = eval_potentials(prof, ev.xi, ev.x, ev.y);
    double const t0 = s_xi + s_eta + a[0];
    double const t1 = s_x - a[1];
    double const t2 = s_y - a[2];
    double const t3 = s_eta - s_xi - a[3];
    double const m = prof.m;
    return t0 * t0 - t1 * t1 - t2 * t2 - t3 * t3 - m * m;
}

//---------------------------------------------------------------------------//
// SEGMENTED TRAJECTORY
//---------------------------------------------------------------------------//
struct RiccatiTrajectoryPoint
{
    double xi = 0;
    Vec2 v;
    Vec2 vp;
    double first_integral = 0;  //!< |p v' + (f - H E) v + chi|
};

/*!
 * Transverse trajectory from the Riccati quadratures.
 *
 * Z is seeded as (I, 0) at the start; whenever a caustic lies ahead the
 * segment is cut halfway to it and Z is re-seeded there with the current
 * (v, v'). The grid must be ascending and start at or after xi0.
 */
inline std::vector<RiccatiTrajectoryPoint>
riccati_trajectory(FieldProfile const& prof,
                   double lambda,
                   double xi0,
                   Vec2 v0,
                   Vec2 vp0,
                   std::vector<double> const& grid,
                   ZSolveOptions zopts = {})
{
    std::vector<RiccatiTrajectoryPoint> out;
    if (grid.empty())
        return out;
    if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < xi0)
    {
        throw DomainError("riccati_trajectory grid must be ascending from "
                          "xi0");
    }
    double const xi_end = grid.back();
    double start = xi0;
    double T0 = 0;
    std::size_t gi = 0;
    while (gi < grid.size())
    {
        zopts.T0 = T0;
        auto flow = solve_Z_numeric(prof, lambda, Mat2::Identity(),
                                    Mat2::Zero(), {start, xi_end}, zopts);
        double seg_end = xi_end;
        for (double c : flow->caustics())
        {
            if (c > start)
            {
                seg_end = start + 0.5 * (c - start);
                break;
            }
        }
        RiccatiSolution rs(prof, lambda, flow, start);
        auto const cst = match_initial_conditions(rs, v0, vp0);
        auto eval = [&](double xi) {
            auto const pt = rs.at(xi, true);
            RiccatiTrajectoryPoint rp;
            rp.xi = xi;
            rp.v = rot(pt.T) * pt.Z
                   * (cst.w0 - pt.phase.M * cst.k - pt.phase.b);
            Vec2 const chi = pt.B * cst.k + pt.chibar;
            rp.vp = velocity_from_first_integral(pt, prof, rp.v, chi);
            rp.first_integral = first_integral_norm(pt, prof, rp.v, rp.vp, chi);
            return std::make_pair(rp, pt.T);
        };
        while (gi < grid.size() && grid[gi] <= seg_end)
        {
            out.push_back(eval(grid[gi]).first);
            ++gi;
        }
        if (gi == grid.size())
            break;
        auto const [last, T_end] = eval(seg_end);
        v0 = last.v;
        vp0 = last.vp;
        T0 = T_end;
        start = seg_end;
    }
    return out;
}

//---------------------------------------------------------------------------//
} // namespace beamguide
