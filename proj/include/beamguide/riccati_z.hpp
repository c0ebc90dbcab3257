//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/riccati_z.hpp
//! Linearization of the matrix Riccati equation through Z(xi).
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "errors.hpp"
#include "fields.hpp"
#include "linalg.hpp"
#include "ode.hpp"
#include "quadrature.hpp"

namespace beamguide
{
//---------------------------------------------------------------------------//
// ROTATION ANGLE AND ROTATED RESTORING MATRIX
//---------------------------------------------------------------------------//
/*!
 * T(xi) = integral of H/p from xi0 to xi.
 */
inline double T_of_xi(FieldProfile const& prof,
                      double lambda,
                      double xi,
                      double xi0 = 0,
                      QuadOptions const& opts = {1e-15, 1e-13, 40})
{
    if (prof.H.is_zero())
    {
        return 0;
    }
    checked_p(prof, lambda, xi0);
    double const sign0 = eval_p(prof, lambda, xi0) > 0 ? 1 : -1;
    auto integrand = [&](double s) {
        double const p = checked_p(prof, lambda, s);
        if (p * sign0 < 0)
        {
            throw TurningPoint(s, p);
        }
        return prof.H(s) / p;
    };
    auto bp = half_period_breakpoints(xi0, xi, prof.max_frequency());
    return integrate_gk(integrand, xi0, xi, opts, bp).value;
}

//! Rot(-T) r Rot(T) from the explicit double-angle components
inline Mat2 rbar_from_T(Mat2 const& r, double T)
{
    double const mean = 0.5 * (r(0, 0) + r(1, 1));
    double const half_diff = 0.5 * (r(0, 0) - r(1, 1));
    double const c2 = std::cos(2 * T);
    double const s2 = std::sin(2 * T);
    return symmetric(mean + half_diff * c2 - r(0, 1) * s2,
                     half_diff * s2 + r(0, 1) * c2,
                     mean - half_diff * c2 + r(0, 1) * s2);
}

inline Mat2
rbar(FieldProfile const& prof, double lambda, double xi, double xi0 = 0)
{
    checked_p(prof, lambda, xi);
    return rbar_from_T(prof.r(xi), T_of_xi(prof, lambda, xi, xi0));
}

//---------------------------------------------------------------------------//
// Z FLOWS
//---------------------------------------------------------------------------//
struct ZSample
{
    Mat2 Z;
    Mat2 Zp;
    double T = 0;
};

/*!
 * A real fundamental solution Z(xi) of
 *   p^2 Z'' + p p' Z' + (H^2 - p rbar) Z = 0
 * together with the rotation angle T(xi) it was built with.
 */
class ZFlow
{
  public:
    virtual ~ZFlow() = default;
    virtual ZSample operator()(double xi) const = 0;
    virtual double lo() const = 0;
    virtual double hi() const = 0;
    //! Zeros of det Z inside [lo, hi], ascending
    virtual std::vector<double> const& caustics() const = 0;
    //! Points where integrands built on this flow change character
    virtual std::vector<double> breakpoints() const { return {}; }

    bool contains(double xi) const
    {
        double const slack = 1e-12 * std::max(1.0, std::abs(xi));
        return xi >= this->lo() - slack && xi <= this->hi() + slack;
    }

    //! Number of caustics strictly between a and b
    int caustics_between(double a, double b) const
    {
        if (a > b)
            std::swap(a, b);
        auto const& c = this->caustics();
        return int(std::count_if(c.begin(), c.end(), [a, b](double x) {
            return x > a && x < b;
        }));
    }
};

namespace detail
{
//! |det Z| / (|Z|^2 + |Z'|^2): zero exactly where Z is singular
inline double singularity_measure(Mat2 const& z, Mat2 const& zp)
{
    return std::abs(z.determinant()) / (z.squaredNorm() + zp.squaredNorm());
}

/*!
 * Zeros of det Z on the span of the accepted nodes xs.
 *
 * Each step is subdivided for the sign scan. Odd-order zeros show up as sign
 * changes of det Z. Local minima of the singularity measure are refined too:
 * an even-order zero (an isotropic focus) touches zero without a sign
 * change, and a pair of close simple zeros can hide inside one subinterval.
 */
template<class ZAt>
std::vector<double> find_caustics(ZAt const& z_at, std::vector<double> const& nodes)
{
    using boost::math::tools::eps_tolerance;
    using boost::math::tools::toms748_solve;

    constexpr int n_sub = 8;
    std::vector<double> xs;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    {
        double const h = (nodes[i + 1] - nodes[i]) / n_sub;
        for (int j = 0; j < n_sub; ++j)
            xs.push_back(nodes[i] + j * h);
    }
    if (!nodes.empty())
        xs.push_back(nodes.back());

    auto det_at = [&](double x) { return z_at(x).Z.determinant(); };
    auto bracketed = [&](double a, double b, double fa, double fb) {
        std::uintmax_t iters = 100;
        auto const br = toms748_solve(det_at, a, b, fa, fb, eps_tolerance<double>(52), iters);
        return 0.5 * (br.first + br.second);
    };

    std::vector<double> roots;
    std::vector<double> det(xs.size()), ratio(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        auto const s = z_at(xs[i]);
        det[i] = s.Z.determinant();
        ratio[i] = singularity_measure(s.Z, s.Zp);
    }
    for (std::size_t i = 1; i < xs.size(); ++i)
    {
        double const a = xs[i - 1];
        double const fa = det[i - 1];
        if (fa == 0)
        {
            roots.push_back(a);
            continue;
        }
        if (fa * det[i] < 0)
        {
            roots.push_back(bracketed(a, xs[i], fa, det[i]));
            continue;
        }
        if (i + 1 >= xs.size() || ratio[i] > ratio[i - 1] || ratio[i] > ratio[i + 1]
            || fa * det[i + 1] < 0)
        {
            continue;
        }
        // Signed measure: negative between a pair of zeros, zero at a touch
        double const c = xs[i + 1];
        auto signed_ratio = [&](double x) {
            auto const s = z_at(x);
            return std::copysign(singularity_measure(s.Z, s.Zp), fa * s.Z.determinant());
        };
        std::uintmax_t iters = 200;
        auto const m = boost::math::tools::brent_find_minima(signed_ratio, a, c, 52, iters);
        double const dm = det_at(m.first);
        if (dm * fa < 0)
        {
            // Two simple zeros on either side of the minimum
            roots.push_back(bracketed(a, m.first, fa, dm));
            roots.push_back(bracketed(m.first, c, dm, det[i + 1]));
        }
        else if (std::abs(m.second) < 1e-9)
        {
            // d(det Z) has a simple zero there; polish beyond sqrt(eps)
            auto ddet_at = [&](double x) {
                auto const s = z_at(x);
                return s.Z(0, 0) * s.Zp(1, 1) + s.Zp(0, 0) * s.Z(1, 1)
                       - s.Z(0, 1) * s.Zp(1, 0) - s.Zp(0, 1) * s.Z(1, 0);
            };
            double const lo = std::max(a, m.first - 1e-4);
            double const hi = std::min(c, m.first + 1e-4);
            double const dlo = ddet_at(lo), dhi = ddet_at(hi);
            double root = m.first;
            if (dlo * dhi < 0)
            {
                std::uintmax_t it = 100;
                auto const br = toms748_solve(ddet_at, lo, hi, dlo, dhi,
                                              eps_tolerance<double>(52), it);
                root = 0.5 * (br.first + br.second);
            }
            roots.push_back(root);
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

//! Right-hand side for (Z, Z', T) packed column-major into 9 doubles
struct ZSystem
{
    std::shared_ptr<FieldProfile const> prof;
    double lambda = 1;
    double eps_p = 1e-12;

    void operator()(ode::State<9> const& s, ode::State<9>& ds, double xi) const
    {
        double const p = checked_p(*prof, lambda, xi, eps_p);
        double const pp = -prof->g.derivative(xi);
        double const h = prof->H(xi);
        Eigen::Map<Mat2 const> Z(s.data());
        Eigen::Map<Mat2 const> Zp(s.data() + 4);
        Mat2 const q = h * h * Mat2::Identity()
                       - p * rbar_from_T(prof->r(xi), s[8]);
        Mat2 const Zpp = -(pp / p) * Zp - q * Z / (p * p);
        Eigen::Map<Mat2>(ds.data()) = Zp;
        Eigen::Map<Mat2>(ds.data() + 4) = Zpp;
        ds[8] = h / p;
    }
};
} // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Z integrated numerically from initial data at xi0.
 */
class NumericZFlow final : public ZFlow
{
  public:
    using Dense = ode::DenseSolution<9, detail::ZSystem>;

    explicit NumericZFlow(Dense dense) : dense_(std::move(dense))
    {
        this->analyze();
    }

    ZSample operator()(double xi) const override
    {
        return unpack(dense_(xi));
    }
    double lo() const override { return dense_.lo(); }
    double hi() const override { return dense_.hi(); }
    std::vector<double> const& caustics() const override { return caustics_; }
    //! Accepted nodes: dense evaluation is smooth only between them
    std::vector<double> breakpoints() const override
    {
        std::vector<double> xs(dense_.nodes().begin(), dense_.nodes().end());
        std::sort(xs.begin(), xs.end());
        return xs;
    }

    Dense const& dense() const { return dense_; }
    //! Largest |J12 - J21| with J = Z'Z^{-1} over accepted nodes
    double max_symmetry_residual() const { return max_sym_; }
    //! Largest |p (Z^T Z' - Z'^T Z)_12| over accepted nodes
    double max_wronskian() const { return max_wronskian_; }

    static ZSample unpack(ode::State<9> const& s)
    {
        ZSample out;
        out.Z = Eigen::Map<Mat2 const>(s.data());
        out.Zp = Eigen::Map<Mat2 const>(s.data() + 4);
        out.T = s[8];
        return out;
    }

  private:
    Dense dense_;
    std::vector<double> caustics_;
    double max_sym_ = 0;
    double max_wronskian_ = 0;

    void analyze()
    {
        auto const& sys = dense_.system();
        std::vector<double> xs(dense_.nodes().begin(), dense_.nodes().end());
        for (std::size_t i = 0; i < xs.size(); ++i)
        {
            ZSample const z = unpack(dense_.states()[i]);
            double const det = z.Z.determinant();
            if (std::abs(det) < 1e-12)
            {
                throw SingularZ("|det Z| < 1e-12 at xi = "
                                + std::to_string(xs[i])
                                + "; re-seed Z beyond the caustic");
            }
            Mat2 const J = z.Zp * z.Z.inverse();
            max_sym_ = std::max(max_sym_, asymmetry(J));
            Mat2 const w = z.Z.transpose() * z.Zp - z.Zp.transpose() * z.Z;
            double const p = eval_p(*sys.prof, sys.lambda, xs[i]);
            max_wronskian_ = std::max(max_wronskian_, std::abs(p * w(0, 1)));
        }
        if (xs.front() > xs.back())
        {
            std::reverse(xs.begin(), xs.end());
        }
        caustics_ = detail::find_caustics(
            [this](double x) { return (*this)(x); }, xs);
    }
};

struct ZSolveOptions
{
    double rtol = 1e-12;
    double atol = 1e-14;
    double eps_p = 1e-12;
    double T0 = 0;  //!< T at the initial point
    double max_step = std::numeric_limits<double>::infinity();
};

/*!
 * Integrate the Z equation from (Z0, Z0') at span.first to span.second.
 *
 * The step is capped at a quarter of the shortest field period. Throws
 * SingularZ when an accepted node has |det Z| < 1e-12.
 */
inline std::shared_ptr<NumericZFlow>
solve_Z_numeric(FieldProfile const& prof,
                double lambda,
                Mat2 const& Z0,
                Mat2 const& Z0p,
                std::pair<double, double> span,
                ZSolveOptions const& zopts = {})
{
    prof.validate();
    detail::ZSystem sys{
        std::make_shared<FieldProfile const>(prof), lambda, zopts.eps_p};
    ode::State<9> y0;
    Eigen::Map<Mat2>(y0.data()) = Z0;
    Eigen::Map<Mat2>(y0.data() + 4) = Z0p;
    y0[8] = zopts.T0;

    ode::Options opts;
    opts.rtol = zopts.rtol;
    opts.atol = zopts.atol;
    opts.max_step = zopts.max_step;
    if (double w = prof.max_frequency(); w > 0)
    {
        opts.max_step = std::min(opts.max_step, std::numbers::pi / (2 * w));
    }
    return std::make_shared<NumericZFlow>(
        ode::integrate<9>(sys, y0, span.first, span.second, opts));
}

//---------------------------------------------------------------------------//
// CLOSED FORM FOR THE ROTATING QUADRUPOLE WITH UNIFORM H
//---------------------------------------------------------------------------//
/*!
 * Parameters of the closed-form Z for
 *   r = c1 I + c2 [[cos w xi, sin w xi], [sin w xi, -cos w xi]], H const.
 *
 * gamma is the principal root unless limit_sign is set, in which case the
 * (then real) gamma takes the sign that makes c2 gamma < 0.
 */
struct ClosedFormParams
{
    double c1 = 0;
    double c2 = 0;
    double omega = 0;
    double H = 0;
    double lambda = 1;
    double A_amp = 1;
    double B_amp = 1;
    bool limit_sign = false;

    double Omega() const { return omega + 2 * H / lambda; }
    double gamma_squared() const
    {
        double const om = this->Omega();
        return c2 * c2 + (H * H - lambda * c1) * om * om;
    }
    complex gamma() const
    {
        double const g2 = this->gamma_squared();
        if (g2 >= 0)
        {
            double const g = std::sqrt(g2);
            return limit_sign && c2 > 0 ? -g : g;
        }
        return {0, std::sqrt(-g2)};
    }
    complex kappa_base() const
    {
        double const om = this->Omega();
        return (H * H - lambda * c1) / (lambda * lambda) + om * om / 4;
    }
    complex alpha_squared() const
    {
        return this->kappa_base() + this->gamma() / lambda;
    }
    complex beta_squared() const
    {
        return this->kappa_base() - this->gamma() / lambda;
    }
    complex alpha() const { return std::sqrt(this->alpha_squared()); }
    complex beta() const { return std::sqrt(this->beta_squared()); }
    bool gamma_is_real() const { return this->gamma_squared() >= 0; }

    FieldProfile profile(double m = 1.0) const
    {
        return periodic_with_H(c1, c2, omega, H, m);
    }
};

//! Z, Z' and Z'' at one point
struct ZJet
{
    Mat2 Z;
    Mat2 Zp;
    Mat2 Zpp;
};

//! One or two real closed-form solutions
struct ClosedFormZ
{
    ZJet first;
    std::optional<ZJet> second;
};

namespace detail
{
//! c cos(w xi + phase)
struct CosTerm
{
    complex c;
    complex w;
    double phase;
};

using CosSum = std::vector<CosTerm>;

inline complex eval(CosSum const& terms, double xi, int order)
{
    complex sum = 0;
    for (auto const& t : terms)
    {
        sum += t.c * std::pow(t.w, order)
               * std::cos(t.w * xi + t.phase + order * std::numbers::pi / 2);
    }
    return sum;
}

//! coef * cos(a xi + pa) * cos(b xi + pb) as a sum of two cosines
inline void add_product(
    CosSum& out, complex coef, complex a, double pa, complex b, double pb)
{
    out.push_back({0.5 * coef, a + b, pa + pb});
    out.push_back({0.5 * coef, a - b, pa - pb});
}

constexpr double sin_phase = -std::numbers::pi / 2;

//! Complex entries of the generic closed form (column-major)
inline std::array<CosSum, 4> generic_entries(ClosedFormParams const& p)
{
    double const om = p.Omega();
    complex const h = om / 2;
    complex const al = p.alpha();
    complex const be = p.beta();
    complex const q = (p.gamma() + p.c2) / (p.lambda * om);
    complex const kp = om / 2 + q;
    complex const km = om / 2 - q;
    double const A = p.A_amp;
    double const B = p.B_amp;

    std::array<CosSum, 4> e;
    // Z11 = A [al cos h cos al + kp sin h sin al]
    add_product(e[0], A * al, h, 0, al, 0);
    add_product(e[0], A * kp, h, sin_phase, al, sin_phase);
    // Z21 = A [al sin h cos al - kp cos h sin al]
    add_product(e[1], A * al, h, sin_phase, al, 0);
    add_product(e[1], -A * kp, h, 0, al, sin_phase);
    // Z12 = B [be sin h sin be + km cos h cos be]
    add_product(e[2], B * be, h, sin_phase, be, sin_phase);
    add_product(e[2], B * km, h, 0, be, 0);
    // Z22 = -B [be cos h sin be - km sin h cos be]
    add_product(e[3], -B * be, h, 0, be, sin_phase);
    add_product(e[3], B * km, h, sin_phase, be, 0);
    return e;
}

inline CMat2 eval_entries(std::array<CosSum, 4> const& e, double xi, int order)
{
    CMat2 z;
    z(0, 0) = eval(e[0], xi, order);
    z(1, 0) = eval(e[1], xi, order);
    z(0, 1) = eval(e[2], xi, order);
    z(1, 1) = eval(e[3], xi, order);
    return z;
}
} // namespace detail

/*!
 * Closed-form Z, Z', Z'' for the rotating quadrupole with uniform H.
 *
 * With gamma real every column is either real or i times real; the latter
 * (alpha^2 < 0) is rescaled by -i and one real solution is returned. With
 * gamma imaginary the real and imaginary parts are two independent real
 * solutions. Throws DegenerateOmega when |Omega| < 1e-10.
 */
inline ClosedFormZ closed_form_Z(ClosedFormParams const& params, double xi)
{
    if (std::abs(params.Omega()) < 1e-10)
    {
        throw DegenerateOmega("|Omega| < 1e-10: use closed_form_Z_limit");
    }
    auto const entries = detail::generic_entries(params);
    std::array<CMat2, 3> jet;
    for (int k = 0; k < 3; ++k)
    {
        jet[k] = detail::eval_entries(entries, xi, k);
    }
    ClosedFormZ out;
    if (params.gamma_is_real())
    {
        if (params.alpha_squared().real() < 0)
        {
            for (auto& m : jet)
                m.col(0) *= complex(0, -1);
        }
        out.first = {jet[0].real(), jet[1].real(), jet[2].real()};
    }
    else
    {
        out.first = {jet[0].real(), jet[1].real(), jet[2].real()};
        out.second = ZJet{jet[0].imag(), jet[1].imag(), jet[2].imag()};
    }
    return out;
}

/*!
 * Omega -> 0 limit: diag(A cos(alpha xi), B sin(beta xi)).
 *
 * Negative alpha^2 (beta^2) continue to cosh (sinh); beta = 0 gives B xi.
 */
inline ZJet closed_form_Z_limit(ClosedFormParams const& params, double xi)
{
    double const lam = params.lambda;
    double const base = params.H * params.H - lam * params.c1;
    double const a2 = (base - lam * params.c2) / (lam * lam);
    double const b2 = (base + lam * params.c2) / (lam * lam);
    ZJet z{Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};

    double const A = params.A_amp;
    if (a2 >= 0)
    {
        double const a = std::sqrt(a2);
        z.Z(0, 0) = A * std::cos(a * xi);
        z.Zp(0, 0) = -A * a * std::sin(a * xi);
        z.Zpp(0, 0) = -A * a2 * std::cos(a * xi);
    }
    else
    {
        double const a = std::sqrt(-a2);
        z.Z(0, 0) = A * std::cosh(a * xi);
        z.Zp(0, 0) = A * a * std::sinh(a * xi);
        z.Zpp(0, 0) = -A * a2 * std::cosh(a * xi);
    }

    double const B = params.B_amp;
    if (b2 > 0)
    {
        double const b = std::sqrt(b2);
        z.Z(1, 1) = B * std::sin(b * xi);
        z.Zp(1, 1) = B * b * std::cos(b * xi);
        z.Zpp(1, 1) = -B * b2 * std::sin(b * xi);
    }
    else if (b2 < 0)
    {
        double const b = std::sqrt(-b2);
        z.Z(1, 1) = B * std::sinh(b * xi);
        z.Zp(1, 1) = B * b * std::cosh(b * xi);
        z.Zpp(1, 1) = -B * b2 * std::sinh(b * xi);
    }
    else
    {
        z.Z(1, 1) = B * xi;
        z.Zp(1, 1) = B;
    }
    return z;
}

/*!
 * lambda^2 Z'' + [H^2 - lambda c1 - lambda c2 (sigma . l)] Z with
 * l = (sin Omega xi, 0, cos Omega xi).
 */
inline Mat2
closed_form_residual(ClosedFormParams const& p, ZJet const& z, double xi)
{
    double const om = p.Omega();
    Mat2 sl;
    sl << std::cos(om * xi), std::sin(om * xi), std::sin(om * xi),
        -std::cos(om * xi);
    double const lam = p.lambda;
    Mat2 const q = (p.H * p.H - lam * p.c1) * Mat2::Identity()
                   - lam * p.c2 * sl;
    return lam * lam * z.Zpp + q * z.Z;
}

/*!
 * Closed-form Z as a flow on [lo, hi], with T = H xi / lambda.
 */
class ClosedFormZFlow final : public ZFlow
{
  public:
    enum class Kind
    {
        first,   //!< real solution (real part when gamma is imaginary)
        second,  //!< imaginary part (gamma imaginary only)
        limit    //!< Omega -> 0 diagonal form
    };

    ClosedFormZFlow(ClosedFormParams params, Kind kind, double lo, double hi)
        : params_(params), kind_(kind), lo_(lo), hi_(hi)
    {
        if (kind_ == Kind::second && params_.gamma_is_real())
        {
            throw ConfigError("closed-form second solution requires "
                              "imaginary gamma");
        }
        (void)this->jet(lo_);
        double const freq
            = std::max({std::abs(params_.alpha()), std::abs(params_.beta()),
                        std::abs(params_.Omega()), 1.0});
        int const n = std::max(
            200, int(std::ceil((hi_ - lo_) * freq * 20)));
        std::vector<double> xs(n + 1);
        for (int i = 0; i <= n; ++i)
            xs[i] = lo_ + (hi_ - lo_) * i / n;
        caustics_ = detail::find_caustics(
            [this](double x) { return (*this)(x); }, xs);
    }

    ZJet jet(double xi) const
    {
        switch (kind_)
        {
            case Kind::limit:
                return closed_form_Z_limit(params_, xi);
            case Kind::second:
                return *closed_form_Z(params_, xi).second;
            default:
                return closed_form_Z(params_, xi).first;
        }
    }

    ZSample operator()(double xi) const override
    {
        if (!this->contains(xi))
        {
            throw DomainError("closed-form Z queried outside its domain");
        }
        ZJet const j = this->jet(xi);
        return {j.Z, j.Zp, params_.H * xi / params_.lambda};
    }
    double lo() const override { return lo_; }
    double hi() const override { return hi_; }
    std::vector<double> const& caustics() const override { return caustics_; }
    std::vector<double> breakpoints() const override
    {
        return half_period_breakpoints(lo_, hi_, params_.omega);
    }
    ClosedFormParams const& params() const { return params_; }

  private:
    ClosedFormParams params_;
    Kind kind_;
    double lo_, hi_;
    std::vector<double> caustics_;
};

//---------------------------------------------------------------------------//
// F FROM Z
//---------------------------------------------------------------------------//
struct FResult
{
    Mat2 f;
    double asymmetry = 0;  //!< |J12 - J21| / max(1, |J|)
};

/*!
 * f = -p Rot(T) J Rot(-T) with J = Z' Z^{-1}, symmetrized.
 *
 * This sign makes f solve p (f' + r) = (f + H E)(f - H E).
 */
inline FResult f_from_Z(Mat2 const& Z,
                        Mat2 const& Zp,
                        double T,
                        double p,
                        double sym_tol = 1e-6)
{
    double const det = Z.determinant();
    if (std::abs(det) < 1e-12)
    {
        throw SingularZ("f undefined: |det Z| = " + std::to_string(det));
    }
    Mat2 const J = Zp * Z.inverse();
    FResult out;
    out.asymmetry = asymmetry(J) / std::max(1.0, max_abs(J));
    if (out.asymmetry > sym_tol)
    {
        throw SymmetryViolation("J = Z'Z^-1 asymmetric by "
                                + std::to_string(out.asymmetry));
    }
    out.f = -p * rot(T) * sym_part(J) * rot(-T);
    return out;
}

//---------------------------------------------------------------------------//
// RESIDUALS OF THE RICCATI SYSTEM
//---------------------------------------------------------------------------//
//! p (f' + r) - (f + H E)(f - H E)
inline Mat2 riccati_f_residual(FieldProfile const& prof,
                               double lambda,
                               double xi,
                               Mat2 const& f,
                               Mat2 const& fp)
{
    double const p = eval_p(prof, lambda, xi);
    Mat2 const he = prof.H(xi) * isigma2();
    return p * (fp + prof.r(xi)) - (f + he) * (f - he);
}

//! p (chi' + F') - (f + H E) chi
inline Vec2 riccati_chi_residual(FieldProfile const& prof,
                                 double lambda,
                                 double xi,
                                 Mat2 const& f,
                                 Vec2 const& chi,
                                 Vec2 const& chip)
{
    double const p = eval_p(prof, lambda, xi);
    return p * (chip + prof.F_prime(xi)) - (f + prof.H(xi) * isigma2()) * chi;
}

/*!
 * The six scalar coefficient equations obtained by inserting the quadratic
 * action ansatz into the Hamilton-Jacobi equation.
 */
inline std::array<double, 6> scalar_residuals(FieldProfile const& prof,
                                              double lambda,
                                              double xi,
                                              Mat2 const& f,
                                              Mat2 const& fp,
                                              Vec2 const& chi,
                                              Vec2 const& chip,
                                              double alpha_p)
{
    double const p = eval_p(prof, lambda, xi);
    double const h = prof.H(xi);
    double const f11 = f(0, 0), f12 = f(0, 1), f22 = f(1, 1);
    Vec2 const Fp = prof.F_prime(xi);
    double const m = prof.m;
    return {
        p * (fp(0, 0) + prof.r11(xi)) - f11 * f11 - (f12 + h) * (f12 + h),
        p * (fp(1, 1) + prof.r22(xi)) - f22 * f22 - (f12 - h) * (f12 - h),
        p * (fp(0, 1) + prof.r12(xi)) - f11 * (f12 - h) - f22 * (f12 + h),
        p * (chip[0] + Fp[0]) - f11 * chi[0] - (f12 + h) * chi[1],
        p * (chip[1] + Fp[1]) - f22 * chi[1] - (f12 - h) * chi[0],
        p * alpha_p - chi.squaredNorm() - m * m,
    };
}

//---------------------------------------------------------------------------//
} // namespace beamguide
