//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file beamguide/errors.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <stdexcept>
#include <string>

namespace beamguide
{
//---------------------------------------------------------------------------//
/*!
 * Base class for all library errors.
 *
 * Numerical failures derive from NumericalError; configuration problems
 * from ConfigError. The CLI maps these onto distinct exit codes.
 */
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public Error
{
  public:
    using Error::Error;
};

//! A tabulated xi-function was queried outside its sample range
class DomainError : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

//! p(xi) = lambda - g(xi) vanished; the light-cone parameterization fails
class TurningPoint : public NumericalError
{
  public:
    TurningPoint(double xi, double p)
        : NumericalError("turning point: p(xi) = " + std::to_string(p)
                         + " at xi = " + std::to_string(xi))
        , xi_(xi)
    {
    }
    double xi() const noexcept { return xi_; }

  private:
    double xi_;
};

//! Adaptive stepping could not meet the requested tolerances
class StepFailure : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

//! det Z vanished (caustic); f = Z'Z^{-1} has a pole there
class SingularZ : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

//! J = Z'Z^{-1} is not symmetric to the required tolerance
class SymmetryViolation : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

//! Omega = omega + 2H/lambda is zero; use the limiting closed form
class DegenerateOmega : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

//! Quadrature did not converge or the integrand does not decay in the box
class QuadratureFailure : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

//! Malformed or inconsistent configuration
class ConfigError : public Error
{
  public:
    using Error::Error;
};

//---------------------------------------------------------------------------//
} // namespace beamguide
