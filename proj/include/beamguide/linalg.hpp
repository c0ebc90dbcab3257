//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/linalg.hpp
//! Small fixed-size algebra shared by all modules.
//---------------------------------------------------------------------------//
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace beamguide
{
//---------------------------------------------------------------------------//
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using complex = std::complex<double>;
using CVec2 = Eigen::Vector2cd;
using CVec4 = Eigen::Vector4cd;
using CMat2 = Eigen::Matrix2cd;
using CMat4 = Eigen::Matrix4cd;

//---------------------------------------------------------------------------//
/*!
 * The real representation of i*sigma_2: [[0, 1], [-1, 0]].
 *
 * E^2 = -I, so cos(T) I + sin(T) E = exp(T E) is a rotation by -T.
 */
inline Mat2 isigma2()
{
    Mat2 e;
    e << 0.0, 1.0, -1.0, 0.0;
    return e;
}

//! cos(T) I + sin(T) i*sigma_2
inline Mat2 rot(double t)
{
    double const c = std::cos(t);
    double const s = std::sin(t);
    Mat2 r;
    r << c, s, -s, c;
    return r;
}

inline Mat2 symmetric(double a11, double a12, double a22)
{
    Mat2 m;
    m << a11, a12, a12, a22;
    return m;
}

//! Symmetric part (A + A^T)/2
inline Mat2 sym_part(Mat2 const& a)
{
    return 0.5 * (a + a.transpose());
}

//! |A_12 - A_21|
inline double asymmetry(Mat2 const& a)
{
    return std::abs(a(0, 1) - a(1, 0));
}

//! Max-abs entry of a matrix or vector
template<class Derived>
double max_abs(Eigen::MatrixBase<Derived> const& m)
{
    return m.cwiseAbs().maxCoeff();
}

//---------------------------------------------------------------------------//
// Pauli matrices
//---------------------------------------------------------------------------//
inline CMat2 sigma1()
{
    CMat2 s;
    s << 0.0, 1.0, 1.0, 0.0;
    return s;
}

inline CMat2 sigma2()
{
    CMat2 s;
    s << 0.0, complex(0, -1), complex(0, 1), 0.0;
    return s;
}

inline CMat2 sigma3()
{
    CMat2 s;
    s << 1.0, 0.0, 0.0, -1.0;
    return s;
}

//---------------------------------------------------------------------------//
} // namespace beamguide
