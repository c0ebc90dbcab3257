//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/io.hpp
//! JSON ingestion of field profiles and result export helpers.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "fields.hpp"
#include "riccati_solution.hpp"
#include "xi_function.hpp"

namespace beamguide
{
using json = nlohmann::json;

//---------------------------------------------------------------------------//
// CHECKED ACCESS
//---------------------------------------------------------------------------//
/*!
 * Read-only view of a JSON value that remembers its path for diagnostics.
 */
class ConfigNode
{
  public:
    ConfigNode(json const& j, std::string path)
        : j_(&j), path_(std::move(path))
    {
    }

    json const& raw() const { return *j_; }
    std::string const& path() const { return path_; }

    bool has(std::string_view key) const
    {
        return j_->is_object() && j_->contains(key);
    }

    ConfigNode operator[](std::string_view key) const
    {
        this->expect_object();
        auto it = j_->find(key);
        if (it == j_->end())
        {
            throw ConfigError("field '" + this->child(key)
                              + "': required field is missing");
        }
        return {*it, this->child(key)};
    }

    ConfigNode at(std::size_t i) const
    {
        this->expect_array();
        if (i >= j_->size())
        {
            this->fail("index out of range");
        }
        return {(*j_)[i], path_ + "[" + std::to_string(i) + "]"};
    }

    std::size_t size() const
    {
        this->expect_array();
        return j_->size();
    }

    double number() const
    {
        if (!j_->is_number())
            this->fail("expected a number");
        double const v = j_->get<double>();
        if (!std::isfinite(v))
            this->fail("expected a finite number");
        return v;
    }

    double positive() const
    {
        double const v = this->number();
        if (!(v > 0))
            this->fail("expected a positive number");
        return v;
    }

    long long integer() const
    {
        if (!j_->is_number_integer())
            this->fail("expected an integer");
        return j_->get<long long>();
    }

    bool boolean() const
    {
        if (!j_->is_boolean())
            this->fail("expected true or false");
        return j_->get<bool>();
    }

    std::string string() const
    {
        if (!j_->is_string())
            this->fail("expected a string");
        return j_->get<std::string>();
    }

    std::vector<double> numbers() const
    {
        std::vector<double> out;
        for (std::size_t i = 0; i < this->size(); ++i)
            out.push_back(this->at(i).number());
        return out;
    }

    Vec2 vec2() const
    {
        if (this->size() != 2)
            this->fail("expected an array of 2 numbers");
        return {this->at(0).number(), this->at(1).number()};
    }

    Mat2 mat2() const
    {
        if (this->size() != 2)
            this->fail("expected a 2x2 array");
        Mat2 m;
        for (int i = 0; i < 2; ++i)
        {
            Vec2 const row = this->at(i).vec2();
            m(i, 0) = row[0];
            m(i, 1) = row[1];
        }
        return m;
    }

    //! Optional fields with defaults
    double number_or(std::string_view key, double def) const
    {
        return this->has(key) ? (*this)[key].number() : def;
    }
    double positive_or(std::string_view key, double def) const
    {
        return this->has(key) ? (*this)[key].positive() : def;
    }
    long long integer_or(std::string_view key, long long def) const
    {
        return this->has(key) ? (*this)[key].integer() : def;
    }
    bool boolean_or(std::string_view key, bool def) const
    {
        return this->has(key) ? (*this)[key].boolean() : def;
    }
    std::string string_or(std::string_view key, std::string def) const
    {
        return this->has(key) ? (*this)[key].string() : def;
    }

    //! Reject keys outside the allowed set (catches misspelled fields)
    void allow_only(std::initializer_list<std::string_view> keys) const
    {
        this->expect_object();
        for (auto const& [k, v] : j_->items())
        {
            if (std::find(keys.begin(), keys.end(), k) == keys.end())
            {
                throw ConfigError("field '" + this->child(k)
                                  + "': unknown field");
            }
        }
    }

    [[noreturn]] void fail(std::string const& msg) const
    {
        throw ConfigError("field '" + path_ + "': " + msg);
    }

  private:
    json const* j_;
    std::string path_;

    std::string child(std::string_view key) const
    {
        return path_.empty() ? std::string(key)
                             : path_ + "." + std::string(key);
    }
    void expect_object() const
    {
        if (!j_->is_object())
            this->fail("expected an object");
    }
    void expect_array() const
    {
        if (!j_->is_array())
            this->fail("expected an array");
    }
};

//! Parse JSON text; syntax errors report line and column
inline json parse_json(std::string const& text, std::string const& source)
{
    try
    {
        return json::parse(text);
    }
    catch (json::parse_error const& e)
    {
        std::size_t const byte = std::min<std::size_t>(
            e.byte > 0 ? e.byte - 1 : 0, text.size());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < byte; ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                col = 1;
            }
            else
            {
                ++col;
            }
        }
        throw ConfigError(source + ":" + std::to_string(line) + ":"
                          + std::to_string(col) + ": " + e.what());
    }
}

inline json load_json_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError(path + ": cannot open file");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path);
}

//---------------------------------------------------------------------------//
// PROFILES
//---------------------------------------------------------------------------//
/*!
 * A number is a constant; an object holds "constant", "fourier"
 * [{amplitude, omega, phase}], "poly" [{coefficient, power}] and "table"
 * {xi, values, order}.
 */
inline XiFunction xi_function_from_json(ConfigNode const& n)
{
    if (n.raw().is_number())
    {
        return XiFunction::constant(n.number());
    }
    n.allow_only({"constant", "fourier", "poly", "table"});
    std::vector<FourierTerm> fourier;
    if (n.has("fourier"))
    {
        auto const arr = n["fourier"];
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            auto const t = arr.at(i);
            t.allow_only({"amplitude", "omega", "phase"});
            fourier.push_back({t["amplitude"].number(), t["omega"].number(),
                               t.number_or("phase", 0)});
        }
    }
    std::vector<PolynomialTerm> poly;
    if (n.has("poly"))
    {
        auto const arr = n["poly"];
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            auto const t = arr.at(i);
            t.allow_only({"coefficient", "power"});
            auto const pw = t["power"].integer();
            if (pw < 0)
                t["power"].fail("power must be non-negative");
            poly.push_back({t["coefficient"].number(), static_cast<int>(pw)});
        }
    }
    std::optional<XiTable> table;
    if (n.has("table"))
    {
        auto const t = n["table"];
        t.allow_only({"xi", "values", "order"});
        try
        {
            table = XiTable(t["xi"].numbers(), t["values"].numbers(),
                            static_cast<int>(t.integer_or("order", 3)));
        }
        catch (DomainError const& e)
        {
            t.fail(e.what());
        }
        catch (ConfigError const& e)
        {
            t.fail(e.what());
        }
    }
    return XiFunction(n.number_or("constant", 0), std::move(fourier),
                      std::move(poly), std::move(table));
}

inline json to_json(XiFunction const& f)
{
    json j = json::object();
    j["constant"] = f.constant_term();
    if (!f.fourier_terms().empty())
    {
        j["fourier"] = json::array();
        for (auto const& t : f.fourier_terms())
        {
            j["fourier"].push_back(
                {{"amplitude", t.amplitude}, {"omega", t.omega}, {"phase", t.phase}});
        }
    }
    if (!f.polynomial_terms().empty())
    {
        j["poly"] = json::array();
        for (auto const& t : f.polynomial_terms())
            j["poly"].push_back({{"coefficient", t.coefficient}, {"power", t.power}});
    }
    if (auto const& t = f.table())
    {
        j["table"] = {{"xi", t->xs()}, {"values", t->ys()}, {"order", t->order()}};
    }
    return j;
}

inline json to_json(FieldProfile const& p)
{
    return {{"m", p.m},
            {"g", to_json(p.g)},
            {"H", to_json(p.H)},
            {"F1", to_json(p.F1)},
            {"F2", to_json(p.F2)},
            {"r11", to_json(p.r11)},
            {"r12", to_json(p.r12)},
            {"r22", to_json(p.r22)}};
}

/*!
 * Profile from JSON: either {"preset": "vortex", "c_amp", "omega"},
 * {"preset": "periodic_with_H", "c1", "c2", "omega", "H"} or explicit
 * xi-functions. "charge_scale" multiplies every function (absorbs e/(c hbar)).
 */
inline FieldProfile profile_from_json(ConfigNode const& n)
{
    FieldProfile prof;
    std::string const preset = n.string_or("preset", "");
    if (preset == "vortex")
    {
        n.allow_only({"preset", "c_amp", "omega", "m", "charge_scale"});
        prof = vortex(n["c_amp"].number(), n["omega"].number(),
                      n.positive_or("m", 1));
    }
    else if (preset == "periodic_with_H")
    {
        n.allow_only({"preset", "c1", "c2", "omega", "H", "m", "charge_scale"});
        prof = periodic_with_H(n["c1"].number(), n["c2"].number(),
                               n["omega"].number(), n.number_or("H", 0),
                               n.positive_or("m", 1));
    }
    else if (preset.empty())
    {
        n.allow_only({"g", "H", "F1", "F2", "r11", "r12", "r22", "m",
                      "charge_scale"});
        auto get = [&](std::string_view key) {
            return n.has(key) ? xi_function_from_json(n[key]) : XiFunction{};
        };
        prof.g = get("g");
        prof.H = get("H");
        prof.F1 = get("F1");
        prof.F2 = get("F2");
        prof.r11 = get("r11");
        prof.r12 = get("r12");
        prof.r22 = get("r22");
        prof.m = n.positive_or("m", 1);
    }
    else
    {
        n["preset"].fail("unknown preset '" + preset
                         + "' (expected vortex or periodic_with_H)");
    }
    if (n.has("charge_scale"))
    {
        double const s = n["charge_scale"].number();
        double const m = prof.m;
        prof = prof.scaled(s);
        prof.m = m;
    }
    try
    {
        prof.validate();
    }
    catch (Error const& e)
    {
        n.fail(e.what());
    }
    return prof;
}

//! Default parameters for a preset selected on the command line
inline json preset_defaults(std::string const& name)
{
    if (name == "vortex")
        return {{"preset", "vortex"}, {"c_amp", 0.5}, {"omega", 2.5}};
    if (name == "periodic_with_H")
    {
        return {{"preset", "periodic_with_H"}, {"c1", 0.0}, {"c2", 0.3},
                {"omega", 2.0}, {"H", 0.5}};
    }
    throw ConfigError("--preset: unknown preset '" + name
                      + "' (expected vortex or periodic_with_H)");
}

//---------------------------------------------------------------------------//
// OUTPUT
//---------------------------------------------------------------------------//
//! Shortest decimal that round-trips, at most 17 significant digits
inline std::string format_double(double x)
{
    if (!std::isfinite(x))
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec)
    {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x)
            break;
    }
    return buf;
}

//! CSV writer with a one-line "# config:" header
class CsvWriter
{
  public:
    CsvWriter(std::string const& path,
              json const& config,
              std::vector<std::string> const& columns)
        : out_(path)
    {
        if (!out_)
        {
            throw Error(path + ": cannot open for writing");
        }
        out_ << "# config: " << config.dump() << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    void row(std::initializer_list<double> values)
    {
        bool first = true;
        for (double v : values)
        {
            out_ << (first ? "" : ",") << format_double(v);
            first = false;
        }
        out_ << '\n';
    }

    void row(std::vector<std::string> const& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

inline void write_json(std::string const& path, json const& j)
{
    std::ofstream out(path);
    if (!out)
    {
        throw Error(path + ": cannot open for writing");
    }
    out << j.dump(2) << '\n';
}

inline json to_json(Mat2 const& m)
{
    return json::array({json::array({m(0, 0), m(0, 1)}),
                        json::array({m(1, 0), m(1, 1)})});
}

inline json to_json(Vec2 const& v)
{
    return json::array({v[0], v[1]});
}

/*!
 * Samples of a Riccati solution on a uniform grid of its segment.
 */
inline json export_riccati(RiccatiSolution const& rs, int n_samples)
{
    if (n_samples < 2)
    {
        throw ConfigError("riccati export needs at least 2 samples");
    }
    // Stay off the caustics that bound the segment
    double const pad = 1e-6 * (rs.hi() - rs.lo());
    double const lo = rs.lo() + pad;
    double const hi = rs.hi() - pad;
    json samples = json::array();
    for (int i = 0; i < n_samples; ++i)
    {
        double const xi = lo + (hi - lo) * i / (n_samples - 1);
        auto const pt = rs.at(xi, true);
        samples.push_back({{"xi", xi},
                           {"p", pt.p},
                           {"T", pt.T},
                           {"Z", to_json(pt.Z)},
                           {"Zp", to_json(pt.Zp)},
                           {"f", to_json(pt.f)},
                           {"B", to_json(pt.B)},
                           {"chibar", to_json(pt.chibar)},
                           {"delta", pt.delta}});
    }
    json caustics = json::array();
    for (double c : rs.flow()->caustics())
        caustics.push_back(c);
    return {{"lambda", rs.lambda()},
            {"xi_base", rs.base()},
            {"segment", {rs.lo(), rs.hi()}},
            {"caustics", caustics},
            {"samples", samples}};
}

//---------------------------------------------------------------------------//
} // namespace beamguide
