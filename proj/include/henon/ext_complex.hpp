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

// Complex numbers stored as (log modulus, phase). Products and powers are
// exact in log space; sums pivot on the larger operand.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "henon/mp.hpp"

namespace henon
{

struct ExtComplex {
    double log_mag = -std::numeric_limits<double>::infinity();
    double phase   = 0.0;

    ExtComplex() = default;
    ExtComplex(double lm, double ph) : log_mag(lm), phase(lm == -std::numeric_limits<double>::infinity() ? 0.0 : wrap_phase(ph)) {}

    static ExtComplex from(const std::complex<double>& z)
    {
        if (z == 0.0)
            return {};
        return {c_log_abs(z), std::arg(z)};
    }
    static ExtComplex from(const mpcomplex& z)
    {
        if (c_is_zero(z))
            return {};
        return {to_double(r_log(c_abs(z))), to_double(c_arg(z))};
    }
    static ExtComplex zero() { return {}; }
    static ExtComplex one() { return {0.0, 0.0}; }

    bool is_zero() const { return log_mag == -std::numeric_limits<double>::infinity(); }

    /// Ordinary complex value; overflows to inf / underflows to 0 outside the double range.
    std::complex<double> to_complex() const
    {
        if (is_zero())
            return 0.0;
        return std::polar(std::exp(log_mag), phase);
    }

    /// Value at MPFR precision (always representable).
    mpcomplex to_mp() const
    {
        if (is_zero())
            return mpcomplex();
        const mpreal m = r_exp(mpreal(log_mag));
        return {m * r_cos(mpreal(phase)), m * r_sin(mpreal(phase))};
    }

    friend ExtComplex operator*(const ExtComplex& a, const ExtComplex& b)
    {
        if (a.is_zero() || b.is_zero())
            return {};
        return {a.log_mag + b.log_mag, a.phase + b.phase};
    }
    friend ExtComplex operator/(const ExtComplex& a, const ExtComplex& b)
    {
        if (b.is_zero())
            return {std::numeric_limits<double>::infinity(), 0.0};
        if (a.is_zero())
            return {};
        return {a.log_mag - b.log_mag, a.phase - b.phase};
    }
    friend ExtComplex operator-(const ExtComplex& a)
    {
        if (a.is_zero())
            return a;
        return {a.log_mag, a.phase + std::numbers::pi};
    }

    /// a + b = A (1 + B/A) with |A| >= |B|; the correction is computed in ordinary arithmetic.
    friend ExtComplex operator+(const ExtComplex& a, const ExtComplex& b)
    {
        if (a.is_zero())
            return b;
        if (b.is_zero())
            return a;
        const ExtComplex& big   = a.log_mag >= b.log_mag ? a : b;
        const ExtComplex& small = a.log_mag >= b.log_mag ? b : a;
        const double dl         = small.log_mag - big.log_mag;
        if (dl < -60.0)
            return big;
        const std::complex<double> q = std::polar(std::exp(dl), small.phase - big.phase);
        const std::complex<double> s = 1.0 + q;
        if (s == 0.0)
            return {};
        // log|1+q| via log1p for accuracy when |q| is small.
        const double x   = q.real();
        const double y   = q.imag();
        const double lm  = 0.5 * std::log1p(2 * x + x * x + y * y);
        const double arg = std::atan2(s.imag(), s.real());
        return {big.log_mag + lm, big.phase + arg};
    }
    friend ExtComplex operator-(const ExtComplex& a, const ExtComplex& b) { return a + (-b); }

    ExtComplex pow(long long n) const
    {
        if (n == 0)
            return one();
        if (is_zero())
            return n > 0 ? ExtComplex{} : ExtComplex{std::numeric_limits<double>::infinity(), 0.0};
        return {log_mag * static_cast<double>(n), phase * static_cast<double>(n)};
    }
};

/// Relative distance |a-b| / max(|a|,|b|) computed without leaving log space.
inline double relative_distance(const ExtComplex& a, const ExtComplex& b)
{
    if (a.is_zero() && b.is_zero())
        return 0.0;
    const ExtComplex diff = a - b;
    if (diff.is_zero())
        return 0.0;
    return std::exp(diff.log_mag - std::max(a.log_mag, b.log_mag));
}

} // namespace henon
