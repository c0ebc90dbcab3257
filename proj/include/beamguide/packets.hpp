//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/packets.hpp
//! Gaussian wave packets of the exact solutions and null-plane inner
//! products.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "quantum.hpp"
#include "riccati_solution.hpp"

namespace beamguide
{
//---------------------------------------------------------------------------//
struct PacketWidths
{
    double lambda = 0.1;
    double k1 = 0.1;
    double k2 = 0.1;
};

/*!
 * Gaussian superposition over (lambda, k1, k2) with weight
 *   prod_i (pi s_i^2)^{-1/4} exp(-(q_i - q0_i)^2 / (2 s_i^2)),
 * normalized so that the self inner product is sign(p) for scalars and 1
 * for spinors.
 */
struct PacketSpec
{
    QuantumNumbers center;
    PacketWidths sigma;
    CVec2 V0 = CVec2(1, 0);  //!< constant spinor (spinor packets only)

    static PacketSpec scalar(QuantumNumbers c, PacketWidths s)
    {
        return {c, s, spinor_V0(c.zeta)};
    }
    static PacketSpec spinor(QuantumNumbers c, PacketWidths s)
    {
        return {c, s, spinor_V0(c.zeta)};
    }

    void validate() const
    {
        center.validate();
        if (!(sigma.lambda > 0 && sigma.k1 > 0 && sigma.k2 > 0))
        {
            throw ConfigError("packet widths must be positive");
        }
    }
};

struct PacketQuadrature
{
    int n_lambda = 33;
    int n_k = 33;
    double half_width = 6;  //!< quadrature range in standard deviations
};

//! Analytic overlap of two Gaussian weights (times V0 overlap for spinors)
inline double gaussian_overlap(PacketSpec const& a, PacketSpec const& b)
{
    auto one = [](double qa, double sa, double qb, double sb) {
        double const s2 = sa * sa + sb * sb;
        return std::sqrt(2 * sa * sb / s2)
               * std::exp(-(qa - qb) * (qa - qb) / (2 * s2));
    };
    return one(a.center.lambda, a.sigma.lambda, b.center.lambda, b.sigma.lambda)
           * one(a.center.k[0], a.sigma.k1, b.center.k[0], b.sigma.k1)
           * one(a.center.k[1], a.sigma.k2, b.center.k[1], b.sigma.k2);
}

//---------------------------------------------------------------------------//
/*!
 * Thread-safe memo of Riccati solutions keyed by lambda.
 */
class RiccatiCache
{
  public:
    using Factory
        = std::function<std::shared_ptr<RiccatiSolution const>(double)>;

    explicit RiccatiCache(Factory f) : factory_(std::move(f)) {}

    std::shared_ptr<RiccatiSolution const> get(double lambda)
    {
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(lambda); it != cache_.end())
                return it->second;
        }
        auto rs = factory_(lambda);
        std::lock_guard lock(mutex_);
        return cache_.emplace(lambda, std::move(rs)).first->second;
    }

  private:
    Factory factory_;
    std::mutex mutex_;
    std::map<double, std::shared_ptr<RiccatiSolution const>> cache_;
};

//---------------------------------------------------------------------------//
//! Axis-aligned integration box on a null plane
struct Box
{
    double eta_lo = 0, eta_hi = 0;
    double x_lo = 0, x_hi = 0;
    double y_lo = 0, y_hi = 0;

    Box merged(Box const& o) const
    {
        return {std::min(eta_lo, o.eta_lo), std::max(eta_hi, o.eta_hi),
                std::min(x_lo, o.x_lo),     std::max(x_hi, o.x_hi),
                std::min(y_lo, o.y_lo),     std::max(y_hi, o.y_hi)};
    }
};

//! Uniform tensor grid (nodes include the box faces)
struct Grid3
{
    Box box;
    int n_eta = 64;
    int n_x = 64;
    int n_y = 64;

    double d_eta() const { return (box.eta_hi - box.eta_lo) / (n_eta - 1); }
    double dx() const { return (box.x_hi - box.x_lo) / (n_x - 1); }
    double dy() const { return (box.y_hi - box.y_lo) / (n_y - 1); }
    double eta(int i) const { return box.eta_lo + i * this->d_eta(); }
    double x(int i) const { return box.x_lo + i * this->dx(); }
    double y(int i) const { return box.y_lo + i * this->dy(); }
    std::size_t size() const { return std::size_t(n_eta) * n_x * n_y; }
    //! Flat index with y fastest
    std::size_t index(int ie, int ix, int iy) const
    {
        return (std::size_t(ie) * n_x + ix) * n_y + iy;
    }
};

//! Packet values on a grid; spinor packets store the projected spinor
struct ScalarSamples
{
    std::vector<complex> phi;
    std::vector<complex> q_phi;
};

struct SpinorSamples
{
    std::vector<CVec4> psi_minus;
};

//---------------------------------------------------------------------------//
/*!
 * Stationary-phase shape of a packet on the plane xi.
 *
 * The k integral peaks at s = B^T v + b = -M k0 with amplitude covariance
 * W^{-1}, W = Re((Sigma_k^{-1} + i M)^{-1}); the lambda integral peaks at
 * eta_c(v) = -d/dlambda Gamma(v).
 */
struct PacketGeometry
{
    Box box;  //!< n_std amplitude deviations, union over lambda0 +- 3 sigma
    double eta_c = 0;
    double std_eta = 0;
    Mat2 Bt = Mat2::Identity();  //!< B^T at lambda0
    Vec2 b = Vec2::Zero();
    Vec2 s_c = Vec2::Zero();
    Vec2 std_s = Vec2::Zero();
};

inline PacketGeometry packet_geometry(PacketSpec const& spec,
                                      RiccatiCache& cache,
                                      double xi,
                                      double n_std = 10)
{
    spec.validate();
    double const lam0 = spec.center.lambda;
    double const sl = spec.sigma.lambda;
    Vec2 const k0 = spec.center.k;
    PacketGeometry geo;
    bool first = true;
    Vec2 vc0, sd0;
    for (double dl : {-3.0, 0.0, 3.0})
    {
        auto const pt = cache.get(lam0 + dl * sl)->at(xi, true);
        CMat2 A = CMat2::Zero();
        A(0, 0) = 1 / (spec.sigma.k1 * spec.sigma.k1);
        A(1, 1) = 1 / (spec.sigma.k2 * spec.sigma.k2);
        A += complex(0, 1) * pt.phase.M.cast<complex>();
        Mat2 const Winv = A.inverse().real().inverse();
        Mat2 const Bit = pt.B.inverse().transpose();
        Mat2 const cov = Bit * Winv * Bit.transpose();
        Vec2 const vc = -Bit * (pt.phase.M * k0 + pt.phase.b);
        Vec2 const sd{std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1))};
        Box const bx{0, 0, vc[0] - n_std * sd[0], vc[0] + n_std * sd[0],
                     vc[1] - n_std * sd[1], vc[1] + n_std * sd[1]};
        geo.box = first ? bx : geo.box.merged(bx);
        first = false;
        if (dl == 0)
        {
            vc0 = vc;
            sd0 = sd;
            geo.Bt = pt.B.transpose();
            geo.b = pt.phase.b;
            geo.s_c = -pt.phase.M * k0;
            geo.std_s = {std::sqrt(Winv(0, 0)), std::sqrt(Winv(1, 1))};
        }
    }

    // eta_c and its chirped width by central differences in lambda
    auto phase = [&](double lam, Vec2 const& v) {
        return gamma_form(cache.get(lam)->at(xi, true), k0, v);
    };
    double eta_lo = 0, eta_hi = 0;
    first = true;
    for (double ox : {-3.0, 0.0, 3.0})
    {
        for (double oy : {-3.0, 0.0, 3.0})
        {
            Vec2 const v = vc0 + Vec2{ox * sd0[0], oy * sd0[1]};
            double const fm = phase(lam0 - sl, v);
            double const f0 = phase(lam0, v);
            double const fp = phase(lam0 + sl, v);
            double const ec = -(fp - fm) / (2 * sl);
            complex const a(1 / (sl * sl), (fp - 2 * f0 + fm) / (2 * sl * sl));
            geo.std_eta = std::max(geo.std_eta,
                                   2 / std::sqrt((1.0 / a).real()));
            if (ox == 0 && oy == 0)
                geo.eta_c = ec;
            eta_lo = first ? ec : std::min(eta_lo, ec);
            eta_hi = first ? ec : std::max(eta_hi, ec);
            first = false;
        }
    }
    geo.box.eta_lo = eta_lo - n_std * geo.std_eta;
    geo.box.eta_hi = eta_hi + n_std * geo.std_eta;
    return geo;
}

/*!
 * Node counts for which the periodic images of the trapezoid sums
 * (period 4 pi / d lambda in eta, 2 pi / dk in s) stay n_std deviations
 * outside the box.
 */
inline PacketQuadrature alias_free_quadrature(PacketSpec const& spec,
                                              PacketGeometry const& geo,
                                              Box const& box,
                                              PacketQuadrature quad = {},
                                              double n_std = 10)
{
    double const span = 2 * quad.half_width;
    auto count = [&](double period_needed, double period_per_du) {
        double const du = period_per_du / period_needed;
        return static_cast<int>(std::ceil(span / du)) + 1;
    };
    double const reach_eta = std::max(box.eta_hi - geo.eta_c,
                                      geo.eta_c - box.eta_lo)
                             + n_std * geo.std_eta;
    quad.n_lambda = std::max(
        quad.n_lambda,
        count(reach_eta, 4 * std::numbers::pi / spec.sigma.lambda));

    Vec2 reach_s = Vec2::Zero();
    for (double x : {box.x_lo, box.x_hi})
    {
        for (double y : {box.y_lo, box.y_hi})
        {
            Vec2 const ds = geo.Bt * Vec2{x, y} + geo.b - geo.s_c;
            reach_s = reach_s.cwiseMax(ds.cwiseAbs());
        }
    }
    reach_s += n_std * geo.std_s;
    quad.n_k = std::max(
        {quad.n_k,
         count(reach_s[0], 2 * std::numbers::pi / spec.sigma.k1),
         count(reach_s[1], 2 * std::numbers::pi / spec.sigma.k2)});
    return quad;
}

//---------------------------------------------------------------------------//
/*!
 * Quadrature representation of one packet on the null plane xi.
 */
class PacketSampler
{
  public:
    PacketSampler(PacketSpec spec,
                  RiccatiCache& cache,
                  double xi,
                  PacketQuadrature quad = {})
        : spec_(std::move(spec)), xi_(xi), quad_(quad)
    {
        spec_.validate();
        if (quad_.n_lambda < 3 || quad_.n_k < 3)
        {
            throw ConfigError("packet quadrature needs at least 3 nodes");
        }
        auto const ln
            = nodes(spec_.center.lambda, spec_.sigma.lambda, quad_.n_lambda);
        for (auto const& [lam, w] : ln)
        {
            auto const rs = cache.get(lam);
            LambdaNode node{lam, w, rs->at(xi_, true)};
            lnodes_.push_back(node);
        }
        k1_ = nodes(spec_.center.k[0], spec_.sigma.k1, quad_.n_k);
        k2_ = nodes(spec_.center.k[1], spec_.sigma.k2, quad_.n_k);
        prof_ = &cache.get(spec_.center.lambda)->profile();
    }

    PacketSpec const& spec() const { return spec_; }
    double xi() const { return xi_; }
    PacketQuadrature const& quadrature() const { return quad_; }

    //! Scalar packet at one event by direct summation
    complex scalar(Event const& ev) const
    {
        complex sum = 0;
        for (auto const& ln : lnodes_)
        {
            for (auto const& [k1, w1] : k1_)
            {
                for (auto const& [k2, w2] : k2_)
                {
                    sum += ln.w * w1 * w2
                           * kg_wavefunction(ln.pt, ln.lambda, {k1, k2}, ev);
                }
            }
        }
        return sum;
    }

    //! Projected spinor packet at one event by direct summation
    CVec4 spinor(Event const& ev) const
    {
        CVec4 sum = CVec4::Zero();
        for (auto const& ln : lnodes_)
        {
            for (auto const& [k1, w1] : k1_)
            {
                for (auto const& [k2, w2] : k2_)
                {
                    sum += ln.w * w1 * w2
                           * projector_minus(dirac_wavefunction(
                               ln.pt, *prof_, ln.lambda, {k1, k2}, spec_.V0,
                               ev));
                }
            }
        }
        return sum;
    }

    //! Packet and Q-packet on a grid (factorized summation)
    ScalarSamples sample_scalar(Grid3 const& grid, unsigned threads = 1) const
    {
        auto const g = this->transverse_sums(grid, threads);
        ScalarSamples out;
        out.phi.assign(grid.size(), 0);
        out.q_phi.assign(grid.size(), 0);
        std::size_t const nxy = std::size_t(grid.n_x) * grid.n_y;
        for (int ie = 0; ie < grid.n_eta; ++ie)
        {
            double const eta = grid.eta(ie);
            for (std::size_t j = 0; j < lnodes_.size(); ++j)
            {
                auto const& ln = lnodes_[j];
                complex const amp = wave_normalization()
                                    * principal_sqrt(ln.pt.delta)
                                    / principal_sqrt(ln.pt.p)
                                    * std::exp(complex(0, -0.5 * ln.lambda * eta));
                complex const* gj = g.data() + j * nxy;
                complex* dst = out.phi.data() + ie * nxy;
                complex* qdst = out.q_phi.data() + ie * nxy;
                for (std::size_t i = 0; i < nxy; ++i)
                {
                    complex const val = amp * gj[i];
                    dst[i] += val;
                    qdst[i] += ln.pt.p * val;
                }
            }
        }
        return out;
    }

    //! Projected spinor packet on a grid
    SpinorSamples sample_spinor(Grid3 const& grid, unsigned threads = 1) const
    {
        auto const g = this->transverse_sums(grid, threads);
        std::size_t const nxy = std::size_t(grid.n_x) * grid.n_y;
        std::vector<complex> up(nxy), um(nxy);
        SpinorSamples out;
        out.psi_minus.resize(grid.size());
        complex const a = spec_.V0[0];
        complex const b = spec_.V0[1];
        for (int ie = 0; ie < grid.n_eta; ++ie)
        {
            double const eta = grid.eta(ie);
            std::fill(up.begin(), up.end(), complex(0));
            std::fill(um.begin(), um.end(), complex(0));
            for (std::size_t j = 0; j < lnodes_.size(); ++j)
            {
                auto const& ln = lnodes_[j];
                complex const amp = wave_normalization()
                                    * principal_sqrt(ln.pt.delta)
                                    * std::exp(complex(0, -0.5 * ln.lambda * eta));
                complex const ap = amp * std::exp(complex(0, ln.pt.T));
                complex const am = amp * std::exp(complex(0, -ln.pt.T));
                complex const* gj = g.data() + j * nxy;
                for (std::size_t i = 0; i < nxy; ++i)
                {
                    up[i] += ap * gj[i];
                    um[i] += am * gj[i];
                }
            }
            for (std::size_t i = 0; i < nxy; ++i)
            {
                out.psi_minus[ie * nxy + i]
                    = CVec4(up[i] * a, um[i] * b, -up[i] * a, um[i] * b);
            }
        }
        return out;
    }

    //! Largest |value| on the box faces relative to the interior maximum
    template<class Samples>
    static double boundary_fraction(Grid3 const& grid, Samples const& s)
    {
        double inner = 0, edge = 0;
        for (int ie = 0; ie < grid.n_eta; ++ie)
        {
            for (int ix = 0; ix < grid.n_x; ++ix)
            {
                for (int iy = 0; iy < grid.n_y; ++iy)
                {
                    double const a = magnitude(s, grid.index(ie, ix, iy));
                    bool const face = ie == 0 || ix == 0 || iy == 0
                                      || ie == grid.n_eta - 1
                                      || ix == grid.n_x - 1
                                      || iy == grid.n_y - 1;
                    (face ? edge : inner) = std::max(face ? edge : inner, a);
                }
            }
        }
        return inner > 0 ? edge / inner : 1.0;
    }

  private:
    struct LambdaNode
    {
        double lambda;
        double w;
        RiccatiPoint pt;
    };

    PacketSpec spec_;
    double xi_;
    PacketQuadrature quad_;
    FieldProfile const* prof_ = nullptr;
    std::vector<LambdaNode> lnodes_;
    std::vector<std::pair<double, double>> k1_, k2_;

    static double magnitude(ScalarSamples const& s, std::size_t i)
    {
        return std::abs(s.phi[i]);
    }
    static double magnitude(SpinorSamples const& s, std::size_t i)
    {
        return s.psi_minus[i].norm();
    }

    //! Trapezoid nodes and Gaussian amplitude weights over +- half_width
    std::vector<std::pair<double, double>>
    nodes(double q0, double sigma, int n) const
    {
        double const hw = quad_.half_width;
        double const du = 2 * hw / (n - 1);
        double const norm = std::pow(std::numbers::pi * sigma * sigma, -0.25);
        std::vector<std::pair<double, double>> out;
        for (int i = 0; i < n; ++i)
        {
            double const u = -hw + i * du;
            double const trap = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            out.emplace_back(q0 + sigma * u,
                             trap * du * sigma * norm * std::exp(-u * u / 2));
        }
        return out;
    }

    /*!
     * G_j(x, y) = w_j e^{-i/2 [v f v + 2 (chibar + F) v + c]}
     *             sum_k w_k e^{-i k.(B^T v + b) - i/2 k M k}
     * for every lambda node j, stored as [j][ix][iy].
     */
    std::vector<complex>
    transverse_sums(Grid3 const& grid, unsigned threads) const
    {
        std::size_t const nxy = std::size_t(grid.n_x) * grid.n_y;
        std::vector<complex> g(lnodes_.size() * nxy);
        std::size_t const n1 = k1_.size();
        std::size_t const n2 = k2_.size();
        double const d1 = k1_[1].first - k1_[0].first;
        double const d2 = k2_[1].first - k2_[0].first;
        auto work = [&](std::size_t jbeg, std::size_t jend) {
            std::vector<complex> c(n1 * n2);
            for (std::size_t j = jbeg; j < jend; ++j)
            {
                auto const& ln = lnodes_[j];
                auto const& pt = ln.pt;
                Mat2 const& M = pt.phase.M;
                for (std::size_t a = 0; a < n1; ++a)
                {
                    for (std::size_t b = 0; b < n2; ++b)
                    {
                        Vec2 const k{k1_[a].first, k2_[b].first};
                        c[a * n2 + b] = k1_[a].second * k2_[b].second
                                        * std::exp(complex(
                                            0, -0.5 * k.dot(M * k)));
                    }
                }
                double const A = ln.w;
                Vec2 const k0{k1_[0].first, k2_[0].first};
                for (int ix = 0; ix < grid.n_x; ++ix)
                {
                    for (int iy = 0; iy < grid.n_y; ++iy)
                    {
                        Vec2 const v{grid.x(ix), grid.y(iy)};
                        Vec2 const s = pt.B.transpose() * v + pt.phase.b;
                        double const base
                            = -0.5
                                  * (v.dot(pt.f * v)
                                     + 2 * (pt.chibar + pt.F).dot(v)
                                     + pt.phase.c)
                              - k0.dot(s);
                        complex const z1 = std::exp(complex(0, -d1 * s[0]));
                        complex const z2 = std::exp(complex(0, -d2 * s[1]));
                        complex outer = 0;
                        for (std::size_t a = n1; a-- > 0;)
                        {
                            complex inner = 0;
                            complex const* row = c.data() + a * n2;
                            for (std::size_t b = n2; b-- > 0;)
                                inner = inner * z2 + row[b];
                            outer = outer * z1 + inner;
                        }
                        g[j * nxy + std::size_t(ix) * grid.n_y + iy]
                            = A * std::exp(complex(0, base)) * outer;
                    }
                }
            }
        };
        threads = std::max(1u, std::min<unsigned>(threads, lnodes_.size()));
        if (threads == 1)
        {
            work(0, lnodes_.size());
        }
        else
        {
            std::vector<std::jthread> pool;
            std::size_t const chunk = (lnodes_.size() + threads - 1) / threads;
            for (std::size_t b = 0; b < lnodes_.size(); b += chunk)
                pool.emplace_back(work, b, std::min(lnodes_.size(), b + chunk));
        }
        return g;
    }
};

//---------------------------------------------------------------------------//
// INNER PRODUCTS
//---------------------------------------------------------------------------//
namespace detail
{
inline double trapezoid_weight(Grid3 const& g, int ie, int ix, int iy, int stride = 1)
{
    auto edge = [stride](int i, int n) { return i == 0 || i + stride > n - 1; };
    double w = stride * g.d_eta() * stride * g.dx() * stride * g.dy();
    if (edge(ie, g.n_eta))
        w *= 0.5;
    if (edge(ix, g.n_x))
        w *= 0.5;
    if (edge(iy, g.n_y))
        w *= 0.5;
    return w;
}
} // namespace detail

//! \int [(Q a)^* b + a^* (Q b)] d eta dx dy with Q a = p a, on every
//! stride-th node
inline complex inner_product_scalar(ScalarSamples const& a,
                                    ScalarSamples const& b,
                                    Grid3 const& grid,
                                    int stride = 1)
{
    complex sum = 0;
    for (int ie = 0; ie < grid.n_eta; ie += stride)
        for (int ix = 0; ix < grid.n_x; ix += stride)
            for (int iy = 0; iy < grid.n_y; iy += stride)
            {
                auto const i = grid.index(ie, ix, iy);
                sum += detail::trapezoid_weight(grid, ie, ix, iy, stride)
                       * (std::conj(a.q_phi[i]) * b.phi[i]
                          + std::conj(a.phi[i]) * b.q_phi[i]);
            }
    return sum;
}

//! \int Psi1_(-)^+ Psi2_(-) d eta dx dy
inline complex inner_product_spinor(SpinorSamples const& a,
                                    SpinorSamples const& b,
                                    Grid3 const& grid,
                                    int stride = 1)
{
    complex sum = 0;
    for (int ie = 0; ie < grid.n_eta; ie += stride)
        for (int ix = 0; ix < grid.n_x; ix += stride)
            for (int iy = 0; iy < grid.n_y; iy += stride)
            {
                auto const i = grid.index(ie, ix, iy);
                sum += detail::trapezoid_weight(grid, ie, ix, iy, stride)
                       * a.psi_minus[i].dot(b.psi_minus[i]);
            }
    return sum;
}

//---------------------------------------------------------------------------//
/*!
 * Gram matrix of a packet set on the plane xi, on a shared auto-sized grid.
 *
 * Throws QuadratureFailure when a packet does not decay to 1e-6 of its
 * peak on the box faces. resolution_error is the largest change of an
 * entry when only every other node is used. It is a loose upper bound on
 * the grid error: the half grid converges much more slowly.
 */
struct GramResult
{
    Eigen::MatrixXcd gram;
    Grid3 grid;
    double boundary_fraction = 0;
    double resolution_error = 0;
};

inline GramResult gram_matrix(std::vector<PacketSpec> const& specs,
                              RiccatiCache& cache,
                              double xi,
                              bool spinor,
                              int n_grid = 64,
                              PacketQuadrature quad = {},
                              double n_std = 10,
                              unsigned threads = 1)
{
    GramResult res;
    res.grid.n_eta = res.grid.n_x = res.grid.n_y = n_grid;
    std::vector<PacketGeometry> geos;
    for (std::size_t i = 0; i < specs.size(); ++i)
    {
        geos.push_back(packet_geometry(specs[i], cache, xi, n_std));
        res.grid.box = i == 0 ? geos.back().box
                              : res.grid.box.merged(geos.back().box);
    }
    std::vector<PacketSampler> samplers;
    for (std::size_t i = 0; i < specs.size(); ++i)
    {
        samplers.emplace_back(
            specs[i], cache, xi,
            alias_free_quadrature(specs[i], geos[i], res.grid.box, quad,
                                  n_std));
    }
    std::size_t const n = specs.size();
    res.gram = Eigen::MatrixXcd::Zero(n, n);
    auto check = [&](double frac) {
        res.boundary_fraction = std::max(res.boundary_fraction, frac);
        if (frac > 1e-6)
        {
            throw QuadratureFailure(
                "packet does not decay inside the integration box");
        }
    };
    if (spinor)
    {
        std::vector<SpinorSamples> s;
        for (auto const& sm : samplers)
        {
            s.push_back(sm.sample_spinor(res.grid, threads));
            check(PacketSampler::boundary_fraction(res.grid, s.back()));
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
            {
                res.gram(i, j) = inner_product_spinor(s[i], s[j], res.grid);
                res.resolution_error = std::max(
                    res.resolution_error,
                    std::abs(inner_product_spinor(s[i], s[j], res.grid, 2)
                             - res.gram(i, j)));
            }
    }
    else
    {
        std::vector<ScalarSamples> s;
        for (auto const& sm : samplers)
        {
            s.push_back(sm.sample_scalar(res.grid, threads));
            check(PacketSampler::boundary_fraction(res.grid, s.back()));
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
            {
                res.gram(i, j) = inner_product_scalar(s[i], s[j], res.grid);
                res.resolution_error = std::max(
                    res.resolution_error,
                    std::abs(inner_product_scalar(s[i], s[j], res.grid, 2)
                             - res.gram(i, j)));
            }
    }
    return res;
}

//! Expected Gram matrix: eps * V0 overlap * Gaussian overlap
inline Eigen::MatrixXcd expected_gram(std::vector<PacketSpec> const& specs,
                                      bool spinor,
                                      double eps = 1)
{
    std::size_t const n = specs.size();
    Eigen::MatrixXcd g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
        {
            complex const v = spinor ? specs[i].V0.dot(specs[j].V0)
                                     : complex(eps, 0);
            g(i, j) = v * gaussian_overlap(specs[i], specs[j]);
        }
    return g;
}

//---------------------------------------------------------------------------//
} // namespace beamguide
