//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/cli.hpp
//! Batch pipelines behind the command-line front end.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "classical.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "io.hpp"
#include "packets.hpp"
#include "quantum.hpp"
#include "riccati_solution.hpp"
#include "riccati_z.hpp"
#include "stability.hpp"

namespace beamguide::cli
{
//---------------------------------------------------------------------------//
enum ExitCode : int
{
    ok = 0,
    config_error = 2,
    numerical_error = 3,
    tolerance_breach = 4,
};

//! Command-line overrides applied on top of the config file
struct RunOptions
{
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::optional<std::string> preset;
};

struct RunResult
{
    int exit_code = ok;
    json report;
    std::vector<std::string> files;
};

/*!
 * Config with command-line overrides folded in. The result is what gets
 * embedded in every output.
 */
inline json resolve_config(json cfg, RunOptions const& opts)
{
    if (!cfg.is_object())
    {
        throw ConfigError("field '': the config must be a JSON object");
    }
    if (opts.seed)
        cfg["seed"] = *opts.seed;
    if (!cfg.contains("seed"))
        cfg["seed"] = std::uint64_t{0};
    if (opts.preset)
    {
        json prof = preset_defaults(*opts.preset);
        // Keep parameters already given for the same preset
        if (cfg.contains("profile") && cfg["profile"].is_object()
            && cfg["profile"].value("preset", "") == *opts.preset)
        {
            prof.update(cfg["profile"]);
        }
        cfg["profile"] = prof;
    }
    cfg["threads"] = opts.threads;
    return cfg;
}

//---------------------------------------------------------------------------//
namespace detail
{
struct Check
{
    std::string name;
    double value;
    double tolerance;
    bool pass() const { return value <= tolerance; }
};

inline json checks_to_json(std::vector<Check> const& checks, bool* all_pass)
{
    json j = json::array();
    *all_pass = true;
    for (auto const& c : checks)
    {
        j.push_back({{"name", c.name},
                     {"value", c.value},
                     {"tolerance", c.tolerance},
                     {"pass", c.pass()}});
        *all_pass = *all_pass && c.pass();
    }
    return j;
}

inline std::string out_path(RunOptions const& opts, std::string const& name)
{
    std::filesystem::create_directories(opts.out_dir);
    return (std::filesystem::path(opts.out_dir) / name).string();
}

inline json complex_matrix(Eigen::MatrixXcd const& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

//! Match each root to its nearest unused partner
inline double root_distance(Roots const& a, Roots const& b)
{
    std::array<bool, 4> used{};
    double worst = 0;
    for (auto const& r : a)
    {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        for (std::size_t j = 0; j < 4; ++j)
        {
            if (!used[j] && std::abs(r - b[j]) < best)
            {
                best = std::abs(r - b[j]);
                bi = j;
            }
        }
        used[bi] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

inline std::vector<double> axis(ConfigNode const& n)
{
    if (n.raw().is_array())
        return n.numbers();
    n.allow_only({"min", "max", "n"});
    double const lo = n["min"].number();
    double const hi = n["max"].number();
    auto const count = n["n"].integer();
    if (count < 0)
        n["n"].fail("expected a non-negative count");
    std::vector<double> out;
    for (long long i = 0; i < count; ++i)
        out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return out;
}
} // namespace detail

//---------------------------------------------------------------------------//
// SIMULATE
//---------------------------------------------------------------------------//
inline RunResult
run_simulate(json const& cfg, FieldProfile const& prof, RunOptions const& opts)
{
    ConfigNode const root(cfg, "");
    auto const s = root["simulate"];
    s.allow_only({"lambda", "xi0", "xi1", "v0", "vp0", "z0", "rtol", "atol",
                  "max_step", "tolerances", "format"});
    double const lambda = s["lambda"].number();
    double const xi0 = s.number_or("xi0", 0);
    double const xi1 = s["xi1"].number();
    if (xi1 < xi0)
        s["xi1"].fail("must not be smaller than xi0");
    Vec2 const v0 = s.has("v0") ? s["v0"].vec2() : Vec2::Zero();
    Vec2 const vp0 = s.has("vp0") ? s["vp0"].vec2() : Vec2::Zero();
    IntegrateOptions io;
    io.rtol = s.positive_or("rtol", io.rtol);
    io.atol = s.positive_or("atol", io.atol);
    io.max_step = s.positive_or("max_step", io.max_step);
    double tol_lambda = 1e-8, tol_shell = 1e-8;
    if (s.has("tolerances"))
    {
        auto const t = s["tolerances"];
        t.allow_only({"lambda_residual", "mass_shell"});
        tol_lambda = t.positive_or("lambda_residual", tol_lambda);
        tol_shell = t.positive_or("mass_shell", tol_shell);
    }
    std::string const format = s.string_or("format", "csv");
    if (format != "csv" && format != "json" && format != "both")
        s["format"].fail("expected csv, json or both");

    auto const init = make_initial_state(prof, lambda, xi0, v0, vp0,
                                         s.number_or("z0", 0));
    auto const traj = integrate(prof, lambda, init, xi1, io);

    RunResult res;
    if (format != "json")
    {
        auto const path = detail::out_path(opts, "trajectory.csv");
        CsvWriter csv(path, cfg,
                      {"xi", "x", "y", "xp", "yp", "z", "t",
                       "lambda_residual", "mass_shell_residual"});
        for (std::size_t i = 0; i < traj.states.size(); ++i)
        {
            auto const& st = traj.states[i];
            csv.row({st.xi, st.v[0], st.v[1], st.v_prime[0], st.v_prime[1],
                     st.z, st.xi + st.z, traj.lambda_residuals[i],
                     traj.mass_shell_residuals[i]});
        }
        res.files.push_back(path);
    }
    if (format != "csv")
    {
        json rows = json::array();
        for (std::size_t i = 0; i < traj.states.size(); ++i)
        {
            auto const& st = traj.states[i];
            rows.push_back({{"xi", st.xi},
                            {"x", st.v[0]},
                            {"y", st.v[1]},
                            {"xp", st.v_prime[0]},
                            {"yp", st.v_prime[1]},
                            {"z", st.z},
                            {"t", st.xi + st.z},
                            {"lambda_residual", traj.lambda_residuals[i]},
                            {"mass_shell_residual",
                             traj.mass_shell_residuals[i]}});
        }
        auto const path = detail::out_path(opts, "trajectory.json");
        write_json(path, {{"config", cfg}, {"trajectory", rows}});
        res.files.push_back(path);
    }

    bool pass = false;
    std::vector<detail::Check> checks{
        {"lambda_residual", traj.max_lambda_residual(),
         tol_lambda * std::max(1.0, std::abs(lambda))},
        {"mass_shell_residual", traj.max_mass_shell_residual(), tol_shell}};
    res.report = {{"command", "simulate"},
                  {"config", cfg},
                  {"steps", traj.states.size()},
                  {"proper_time", proper_time(prof, lambda, xi0, xi1)},
                  {"checks", detail::checks_to_json(checks, &pass)}};
    res.report["pass"] = pass;
    auto const path = detail::out_path(opts, "simulate_report.json");
    write_json(path, res.report);
    res.files.push_back(path);
    res.exit_code = pass ? ok : tolerance_breach;
    return res;
}

//---------------------------------------------------------------------------//
// STABILITY
//---------------------------------------------------------------------------//
inline RunResult
run_stability(json const& cfg, FieldProfile const&, RunOptions const& opts)
{
    static json const empty = json::object();
    ConfigNode const root(cfg, "");
    ConfigNode const st = root.has("stability") ? root["stability"]
                                                : ConfigNode(empty, "stability");
    st.allow_only({"lambda", "tol", "floquet", "point", "map"});
    double const lambda = st.number_or("lambda", 1);
    if (lambda == 0)
        st["lambda"].fail("must be nonzero");
    double const tol = st.positive_or("tol", 1e-9);
    bool const do_floquet = st.boolean_or("floquet", true);

    // Rotating-frame coefficients
    double c1 = 0, c2 = 0, omega = 0;
    std::optional<double> threshold;
    auto const pn = root.has("profile") ? root["profile"]
                                        : ConfigNode(empty, "profile");
    std::string const preset = pn.string_or("preset", "");
    if (st.has("point"))
    {
        auto const p = st["point"];
        p.allow_only({"c1", "c2", "omega"});
        c1 = p.number_or("c1", 0);
        c2 = p["c2"].number();
        omega = p["omega"].number();
    }
    else if (preset == "vortex")
    {
        omega = pn["omega"].number();
        if (omega == 0)
            pn["omega"].fail("vortex stability needs omega != 0");
        double const B0 = pn["c_amp"].number() / omega;
        c2 = B0 * omega / lambda;
        threshold = vortex_threshold(B0, lambda);
    }
    else if (preset == "periodic_with_H")
    {
        if (pn.number_or("H", 0) != 0)
            pn["H"].fail("stability analysis needs H = 0");
        c1 = pn["c1"].number() / lambda;
        c2 = pn["c2"].number() / lambda;
        omega = pn["omega"].number();
    }
    else
    {
        st.fail("needs stability.point or a preset profile");
    }

    auto rep = analyze(c1, c2, omega, tol);
    rep.threshold = threshold;
    std::vector<detail::Check> checks;
    double const scale = 1 + std::abs(c1) + std::abs(c2) + omega * omega;
    checks.push_back({"roots_vs_matrix_eigenvalues",
                      detail::root_distance(rep.roots,
                                            xi_tilde_eigenvalues(c1, c2, omega))
                          / scale,
                      1e-8});
    json roots = json::array();
    for (auto const& r : rep.roots)
        roots.push_back({r.real(), r.imag()});
    json report = {{"c1", c1},
                   {"c2", c2},
                   {"omega", omega},
                   {"lambda", lambda},
                   {"roots", roots},
                   {"verdict", to_string(rep.verdict)},
                   {"margin", rep.margin}};
    if (threshold)
        report["threshold"] = *threshold;
    if (do_floquet && omega != 0 && rep.verdict != Verdict::marginal_degenerate)
    {
        auto const fl = floquet_verdict(rotating_quadrupole_matrix(c1, c2, omega),
                                        2 * std::numbers::pi / std::abs(omega));
        json mult = json::array();
        for (auto const& mu : fl.multipliers)
            mult.push_back({mu.real(), mu.imag()});
        report["floquet"] = {{"verdict", to_string(fl.verdict)},
                             {"multipliers", mult}};
        // A marginal Floquet verdict sits on the tolerance band; not a breach
        bool const agree = fl.verdict == rep.verdict
                           || fl.verdict == Verdict::marginal_degenerate;
        checks.push_back({"floquet_disagreement", agree ? 0.0 : 1.0, 0.0});
    }

    RunResult res;
    if (st.has("map"))
    {
        auto const m = st["map"];
        m.allow_only({"omega", "c1", "c2", "vortex"});
        StabilityGrid grid;
        grid.omega = detail::axis(m["omega"]);
        grid.vortex = m.boolean_or("vortex", false);
        grid.c1 = m.has("c1") ? detail::axis(m["c1"]) : std::vector<double>{0};
        grid.c2 = detail::axis(m["c2"]);
        grid.lambda = lambda;
        grid.tol = tol;
        auto const rows = stability_map(grid, opts.threads);
        auto const path = detail::out_path(opts, "stability_map.csv");
        CsvWriter csv(path, cfg, {"omega", "c1", "c2", "max_re_lambda", "verdict"});
        for (auto const& r : rows)
        {
            csv.row({format_double(r.omega), format_double(r.c1),
                     format_double(r.c2), format_double(r.max_re_lambda),
                     to_string(r.verdict)});
        }
        res.files.push_back(path);
        report["map_rows"] = rows.size();
    }

    bool pass = false;
    res.report = {{"command", "stability"},
                  {"config", cfg},
                  {"report", report},
                  {"checks", detail::checks_to_json(checks, &pass)}};
    res.report["pass"] = pass;
    auto const path = detail::out_path(opts, "stability.json");
    write_json(path, res.report);
    res.files.push_back(path);
    res.exit_code = pass ? ok : tolerance_breach;
    return res;
}

//---------------------------------------------------------------------------//
// RICCATI
//---------------------------------------------------------------------------//
namespace detail
{
//! Largest Riccati and Delta residuals by central differences in xi
inline std::pair<double, double>
riccati_residuals(RiccatiSolution const& rs, int n, double h = 1e-5)
{
    double const pad = 1e-3 * (rs.hi() - rs.lo()) + 2 * h;
    double worst_f = 0, worst_d = 0;
    for (int i = 0; i < n; ++i)
    {
        double const xi = rs.lo() + pad + (rs.hi() - rs.lo() - 2 * pad) * i / (n - 1);
        auto const pt = rs.at(xi, false);
        auto const pp = rs.at(xi + h, false);
        auto const pm = rs.at(xi - h, false);
        Mat2 const fp = (pp.f - pm.f) / (2 * h);
        double const scale = 1 + pt.f.norm() * pt.f.norm() + std::abs(pt.p);
        worst_f = std::max(
            worst_f,
            max_abs(riccati_f_residual(rs.profile(), rs.lambda(), xi, pt.f, fp))
                / scale);
        double const dd = (pp.delta - pm.delta) / (2 * h);
        worst_d = std::max(worst_d, std::abs(pt.p * dd - pt.f.trace() * pt.delta)
                                        / (std::abs(pt.delta) * scale));
    }
    return {worst_f, worst_d};
}
} // namespace detail

inline RunResult
run_riccati(json const& cfg, FieldProfile const& prof, RunOptions const& opts)
{
    ConfigNode const root(cfg, "");
    auto const r = root["riccati"];
    r.allow_only({"lambda", "span", "xi_base", "Z0", "Z0p", "n_samples", "rtol",
                  "atol", "tolerances"});
    double const lambda = r["lambda"].number();
    Vec2 const span = r["span"].vec2();
    if (!(span[1] > span[0]))
        r["span"].fail("expected an increasing pair");
    double const base = r.number_or("xi_base", span[0]);
    if (base < span[0] || base > span[1])
        r["xi_base"].fail("must lie inside span");
    Mat2 const Z0 = r.has("Z0") ? r["Z0"].mat2() : Mat2::Identity();
    Mat2 const Z0p = r.has("Z0p") ? r["Z0p"].mat2() : Mat2::Zero();
    ZSolveOptions zo;
    zo.rtol = r.positive_or("rtol", zo.rtol);
    zo.atol = r.positive_or("atol", zo.atol);
    double tol_sym = 1e-8, tol_ric = 1e-6, tol_delta = 1e-6;
    if (r.has("tolerances"))
    {
        auto const t = r["tolerances"];
        t.allow_only({"symmetry", "riccati", "delta"});
        tol_sym = t.positive_or("symmetry", tol_sym);
        tol_ric = t.positive_or("riccati", tol_ric);
        tol_delta = t.positive_or("delta", tol_delta);
    }
    auto const n = r.integer_or("n_samples", 101);
    if (n < 2)
        r["n_samples"].fail("expected at least 2");

    auto const flow = solve_Z_numeric(prof, lambda, Z0, Z0p, {span[0], span[1]}, zo);
    RiccatiSolution const rs(prof, lambda, flow, base);
    auto const [res_f, res_d] = detail::riccati_residuals(rs, 64);

    std::vector<detail::Check> checks{
        {"symmetry", flow->max_symmetry_residual(), tol_sym},
        {"riccati_equation", res_f, tol_ric},
        {"delta_equation", res_d, tol_delta}};
    bool pass = false;
    RunResult res;
    res.report = {{"command", "riccati"},
                  {"config", cfg},
                  {"wronskian", flow->max_wronskian()},
                  {"checks", detail::checks_to_json(checks, &pass)}};
    res.report["pass"] = pass;
    json out = res.report;
    out["solution"] = export_riccati(rs, static_cast<int>(n));
    auto const path = detail::out_path(opts, "riccati.json");
    write_json(path, out);
    res.files.push_back(path);
    res.exit_code = pass ? ok : tolerance_breach;
    return res;
}

//---------------------------------------------------------------------------//
// QUANTUM
//---------------------------------------------------------------------------//
namespace detail
{
//! (2i d_eta - g) Phi - p Phi relative to |p Phi|, fourth-order stencil
template<class Wave>
double d9_residual(FieldProfile const& prof,
                   double lambda,
                   Wave const& phi,
                   Event const& ev,
                   double h = 1e-3)
{
    complex const f = phi(ev);
    using beamguide::detail::fd1;
    using beamguide::detail::shift_eta;
    complex const d = fd1(phi, ev, shift_eta, h);
    double const p = eval_p(prof, lambda, ev.xi);
    return std::abs(complex(0, 2) * d - prof.g(ev.xi) * f - p * f)
           / std::abs(p * f);
}
} // namespace detail

inline RunResult
run_quantum(json const& cfg, FieldProfile const& prof, RunOptions const& opts)
{
    ConfigNode const root(cfg, "");
    auto const q = root["quantum"];
    q.allow_only({"lambda", "k", "sigma", "planes", "xi_base", "grid", "n_std",
                  "n_events", "events", "tolerances"});
    double const lambda = q["lambda"].number();
    Vec2 const k = q.has("k") ? q["k"].vec2() : Vec2::Zero();
    PacketWidths w;
    if (q.has("sigma"))
    {
        auto const s = q["sigma"];
        s.allow_only({"lambda", "k1", "k2"});
        w = {s.positive_or("lambda", w.lambda), s.positive_or("k1", w.k1),
             s.positive_or("k2", w.k2)};
    }
    std::vector<double> const planes = q.has("planes") ? q["planes"].numbers()
                                                        : std::vector<double>{0.3, 0.5};
    if (planes.empty())
        q["planes"].fail("expected at least one plane");
    double const base = q.number_or("xi_base", 0);
    auto const n_grid = q.integer_or("grid", 48);
    if (n_grid < 8)
        q["grid"].fail("expected at least 8 points per axis");
    double const n_std = q.positive_or("n_std", 10);
    auto const n_events = q.integer_or("n_events", 20);
    if (n_events < 0)
        q["n_events"].fail("expected a non-negative count");
    Vec2 eta_r{-1, 1}, x_r{-1, 1}, y_r{-1, 1};
    if (q.has("events"))
    {
        auto const e = q["events"];
        e.allow_only({"eta", "x", "y"});
        if (e.has("eta"))
            eta_r = e["eta"].vec2();
        if (e.has("x"))
            x_r = e["x"].vec2();
        if (e.has("y"))
            y_r = e["y"].vec2();
    }
    std::map<std::string, double> tol{{"klein_gordon", 1e-6}, {"dirac", 1e-6},
                                      {"hamilton_jacobi", 1e-6}, {"d9", 1e-8},
                                      {"delta", 1e-8}, {"gram_diagonal", 1e-3},
                                      {"gram_zeta", 1e-8}, {"plane", 1e-3}};
    if (q.has("tolerances"))
    {
        auto const t = q["tolerances"];
        for (auto const& [key, v] : t.raw().items())
        {
            if (!tol.count(key))
                throw ConfigError("field 'quantum.tolerances." + key
                                  + "': unknown field");
            tol[key] = t[key].positive();
        }
    }

    double const lo = std::min(base, *std::min_element(planes.begin(), planes.end()));
    double const hi = std::max(base, *std::max_element(planes.begin(), planes.end()));
    if (lo < base)
        q["planes"].fail("planes must not precede xi_base");
    double const z_end = hi + 0.25 * std::max(hi - lo, 1.0);
    // Z = I, Z' = 0 on the base plane for every lambda
    RiccatiCache cache([&](double lam) {
        auto const flow = solve_Z_numeric(prof, lam, Mat2::Identity(),
                                          Mat2::Zero(), {base, z_end});
        return std::make_shared<RiccatiSolution const>(prof, lam, flow, base);
    });

    std::vector<detail::Check> checks;
    std::mt19937_64 rng(cfg.value("seed", std::uint64_t{0}));
    std::uniform_real_distribution<double> u01(0, 1);
    auto const rs0 = cache.get(lambda);
    WaveData const wave(rs0);
    double w_kg = 0, w_dirac = 0, w_hj = 0, w_d9 = 0, w_delta = 0;
    for (long long i = 0; i < n_events; ++i)
    {
        Event ev;
        ev.xi = planes.front()
                + (planes.back() - planes.front()) * u01(rng);
        ev.eta = eta_r[0] + (eta_r[1] - eta_r[0]) * u01(rng);
        ev.x = x_r[0] + (x_r[1] - x_r[0]) * u01(rng);
        ev.y = y_r[0] + (y_r[1] - y_r[0]) * u01(rng);
        int const zeta = u01(rng) < 0.5 ? 1 : -1;
        QuantumNumbers const qn{lambda, k, zeta};
        auto phi = [&](Event const& e) { return kg_wavefunction(wave, qn, e); };
        auto psi = [&](Event const& e) { return dirac_wavefunction(wave, qn, e); };
        auto S = [&](Event const& e) { return action_S(*rs0, k, e); };
        w_kg = std::max(w_kg, std::abs(klein_gordon_residual(prof, phi, ev))
                                  / std::abs(phi(ev)));
        w_dirac = std::max(w_dirac, dirac_residual(prof, psi, ev).norm()
                                        / psi(ev).norm());
        w_hj = std::max(w_hj, std::abs(hj_residual(prof, S, ev)) / (prof.m * prof.m));
        w_d9 = std::max(w_d9, detail::d9_residual(prof, lambda, phi, ev));
        double const h = 1e-5;
        auto const pt = rs0->at(ev.xi, false);
        double const dd = (rs0->delta(ev.xi + h) - rs0->delta(ev.xi - h)) / (2 * h);
        w_delta = std::max(w_delta,
                           std::abs(pt.p * dd - pt.f.trace() * pt.delta)
                               / std::abs(pt.p * pt.delta));
    }
    checks.push_back({"klein_gordon", w_kg, tol["klein_gordon"]});
    checks.push_back({"dirac", w_dirac, tol["dirac"]});
    checks.push_back({"hamilton_jacobi", w_hj, tol["hamilton_jacobi"]});
    checks.push_back({"d9_eigenrelation", w_d9, tol["d9"]});
    checks.push_back({"delta_equation", w_delta, tol["delta"]});

    // Gram matrices on each plane
    QuantumNumbers const c0{lambda, k, 1};
    double const eps = eval_p(prof, lambda, planes.front()) > 0 ? 1 : -1;
    std::vector<PacketSpec> const scalars{PacketSpec::scalar(c0, w)};
    std::vector<PacketSpec> const spinors{
        PacketSpec::spinor(c0, w),
        PacketSpec::spinor({lambda, k, -1}, w)};
    json gram_out = json::array();
    std::optional<Eigen::MatrixXcd> first_s, first_d;
    double diag = 0, zeta_off = 0, plane_dev = 0;
    for (double xi : planes)
    {
        auto const gs = gram_matrix(scalars, cache, xi, false,
                                    static_cast<int>(n_grid), {}, n_std,
                                    opts.threads);
        auto const gd = gram_matrix(spinors, cache, xi, true,
                                    static_cast<int>(n_grid), {}, n_std,
                                    opts.threads);
        diag = std::max(diag, std::abs(gs.gram(0, 0) - eps));
        for (int i = 0; i < 2; ++i)
            diag = std::max(diag, std::abs(gd.gram(i, i) - 1.0));
        zeta_off = std::max({zeta_off, std::abs(gd.gram(0, 1)),
                             std::abs(gd.gram(1, 0))});
        if (first_s)
        {
            plane_dev = std::max({plane_dev, (gs.gram - *first_s).cwiseAbs().maxCoeff(),
                                  (gd.gram - *first_d).cwiseAbs().maxCoeff()});
        }
        else
        {
            first_s = gs.gram;
            first_d = gd.gram;
        }
        gram_out.push_back({{"xi", xi},
                            {"scalar", detail::complex_matrix(gs.gram)},
                            {"spinor", detail::complex_matrix(gd.gram)},
                            {"boundary_fraction",
                             std::max(gs.boundary_fraction, gd.boundary_fraction)},
                            {"resolution_error",
                             std::max(gs.resolution_error, gd.resolution_error)}});
    }
    checks.push_back({"gram_diagonal", diag, tol["gram_diagonal"]});
    checks.push_back({"gram_zeta_offdiagonal", zeta_off, tol["gram_zeta"]});
    checks.push_back({"plane_independence", plane_dev, tol["plane"]});

    RunResult res;
    bool pass = false;
    res.report = {{"command", "quantum-verify"},
                  {"config", cfg},
                  {"checks", detail::checks_to_json(checks, &pass)}};
    res.report["pass"] = pass;
    auto const gpath = detail::out_path(opts, "gram.json");
    write_json(gpath, {{"config", cfg}, {"planes", gram_out}});
    auto const rpath = detail::out_path(opts, "quantum_report.json");
    write_json(rpath, res.report);
    res.files = {gpath, rpath};
    res.exit_code = pass ? ok : tolerance_breach;
    return res;
}

//---------------------------------------------------------------------------//
/*!
 * Dispatch on "command"; throws ConfigError or numerical errors.
 */
inline RunResult run(json const& raw, RunOptions const& opts)
{
    json const cfg = resolve_config(raw, opts);
    ConfigNode const root(cfg, "");
    root.allow_only({"command", "profile", "seed", "threads", "simulate",
                     "stability", "riccati", "quantum"});
    std::string const cmd = root["command"].string();
    auto const seed = root["seed"];
    if (!seed.raw().is_number_unsigned())
        seed.fail("expected a non-negative integer");
    FieldProfile prof;
    if (root.has("profile"))
        prof = profile_from_json(root["profile"]);
    else if (cmd != "stability")
        root["profile"];  // throws the missing-field diagnostic

    if (cmd == "simulate")
        return run_simulate(cfg, prof, opts);
    if (cmd == "stability")
        return run_stability(cfg, prof, opts);
    if (cmd == "riccati")
        return run_riccati(cfg, prof, opts);
    if (cmd == "quantum-verify")
        return run_quantum(cfg, prof, opts);
    root["command"].fail("unknown command '" + cmd
                         + "' (expected simulate, stability, riccati or "
                           "quantum-verify)");
}

//! As run, with errors mapped to exit codes and messages
inline RunResult run_guarded(json const& raw, RunOptions const& opts, std::string* message)
{
    try
    {
        return run(raw, opts);
    }
    catch (ConfigError const& e)
    {
        *message = std::string("config error: ") + e.what();
        return {config_error, {}, {}};
    }
    catch (Error const& e)
    {
        *message = std::string("numerical error: ") + e.what();
        return {numerical_error, {}, {}};
    }
}

//---------------------------------------------------------------------------//
} // namespace beamguide::cli
