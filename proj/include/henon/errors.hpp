/*
* Copyright (C) 2026 henonlab authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#pragma once

#include <stdexcept>
#include <string>

namespace henon
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed map definition (non-monic p, a == 0, degree < 2, bad JSON shape).
class InvalidMap : public Error
{
public:
    using Error::Error;
};

/// A projective extension was evaluated at its point of indeterminacy.
class IndeterminacyPoint : public Error
{
public:
    using Error::Error;
};

/// Non-finite coordinate met in log-space iteration.
class Degenerate : public Error
{
public:
    using Error::Error;
};

class NonConvergent : public Error
{
public:
    using Error::Error;
};

/// Some telescoping factor had |u - 1| >= 1/2, so the principal root is not trusted.
class BranchAmbiguity : public Error
{
public:
    using Error::Error;
};

class NoBracket : public Error
{
public:
    using Error::Error;
};

class DivisionByZero : public Error
{
public:
    using Error::Error;
};

class TruncationLoss : public Error
{
public:
    using Error::Error;
};

class ProjectionDiverged : public Error
{
public:
    using Error::Error;
};

class DepthInsufficient : public Error
{
public:
    using Error::Error;
};

/// A series operation ran out of known coefficients.
class TruncationExhausted : public Error
{
public:
    using Error::Error;
};

/// A verified mathematical check failed (filtration inclusion, closed-form bound).
/// The CLI maps this family to exit code 2.
class CheckFailure : public Error
{
public:
    using Error::Error;
};

class FiltrationViolation : public CheckFailure
{
public:
    using CheckFailure::CheckFailure;
};

class BoundViolation : public CheckFailure
{
public:
    using CheckFailure::CheckFailure;
};

} // namespace henon
