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

// Scalar layer shared by the double-precision and MPFR code paths.
//
// Every algorithm in the library is a template over a complex type C with
// real type real_of<C>. Two instantiations are used: std::complex<double>
// and mpcomplex (a plain complex over a dynamic-precision MPFR real). The
// helpers below give both a single spelling so that templates never depend
// on argument-dependent lookup for fundamental types.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <boost/multiprecision/mpfr.hpp>

namespace henon
{

using mpreal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                             boost::multiprecision::et_off>;

template <class R>
struct basic_complex {
    using value_type = R;

    R re{0};
    R im{0};

    basic_complex() = default;
    basic_complex(R r) : re(std::move(r)), im(0) {}
    basic_complex(R r, R i) : re(std::move(r)), im(std::move(i)) {}
    template <class T>
        requires std::is_arithmetic_v<T>
    basic_complex(T x) : re(x), im(0)
    {
    }

    const R& real() const { return re; }
    const R& imag() const { return im; }

    basic_complex& operator+=(const basic_complex& o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    basic_complex& operator-=(const basic_complex& o)
    {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    basic_complex& operator*=(const basic_complex& o)
    {
        R r = re * o.re - im * o.im;
        im  = re * o.im + im * o.re;
        re  = std::move(r);
        return *this;
    }
    basic_complex& operator/=(const basic_complex& o)
    {
        const R den = o.re * o.re + o.im * o.im;
        R r         = (re * o.re + im * o.im) / den;
        im          = (im * o.re - re * o.im) / den;
        re          = std::move(r);
        return *this;
    }

    friend basic_complex operator+(basic_complex a, const basic_complex& b) { return a += b; }
    friend basic_complex operator-(basic_complex a, const basic_complex& b) { return a -= b; }
    friend basic_complex operator*(basic_complex a, const basic_complex& b) { return a *= b; }
    friend basic_complex operator/(basic_complex a, const basic_complex& b) { return a /= b; }
    friend basic_complex operator*(basic_complex a, const R& s)
    {
        a.re *= s;
        a.im *= s;
        return a;
    }
    friend basic_complex operator*(const R& s, basic_complex a) { return a * s; }
    friend basic_complex operator/(basic_complex a, const R& s)
    {
        a.re /= s;
        a.im /= s;
        return a;
    }
    friend basic_complex operator-(basic_complex a)
    {
        a.re = -a.re;
        a.im = -a.im;
        return a;
    }
    friend bool operator==(const basic_complex& a, const basic_complex& b) { return a.re == b.re && a.im == b.im; }
};

using mpcomplex = basic_complex<mpreal>;

template <class C>
using real_of = typename C::value_type;

// ---- reals ----------------------------------------------------------------

inline double to_double(double x) { return x; }
inline double to_double(const mpreal& x) { return x.convert_to<double>(); }

inline double r_abs(double x) { return std::fabs(x); }
inline double r_log(double x) { return std::log(x); }
inline double r_log1p(double x) { return std::log1p(x); }
inline double r_exp(double x) { return std::exp(x); }
inline double r_sqrt(double x) { return std::sqrt(x); }
inline double r_atan2(double y, double x) { return std::atan2(y, x); }
inline double r_cos(double x) { return std::cos(x); }
inline double r_sin(double x) { return std::sin(x); }
inline double r_floor(double x) { return std::floor(x); }
inline bool r_isfinite(double x) { return std::isfinite(x); }

inline mpreal r_abs(const mpreal& x) { return boost::multiprecision::abs(x); }
inline mpreal r_log(const mpreal& x) { return boost::multiprecision::log(x); }
inline mpreal r_log1p(const mpreal& x) { return boost::multiprecision::log1p(x); }
inline mpreal r_exp(const mpreal& x) { return boost::multiprecision::exp(x); }
inline mpreal r_sqrt(const mpreal& x) { return boost::multiprecision::sqrt(x); }
inline mpreal r_atan2(const mpreal& y, const mpreal& x) { return boost::multiprecision::atan2(y, x); }
inline mpreal r_cos(const mpreal& x) { return boost::multiprecision::cos(x); }
inline mpreal r_sin(const mpreal& x) { return boost::multiprecision::sin(x); }
inline mpreal r_floor(const mpreal& x) { return boost::multiprecision::floor(x); }
inline bool r_isfinite(const mpreal& x) { return boost::multiprecision::isfinite(x); }

template <class R>
R r_pi()
{
    if constexpr (std::is_same_v<R, double>)
        return std::numbers::pi;
    else
        return boost::math::constants::pi<R>();
}

/// Reduces an angle to (-pi, pi].
template <class R>
R wrap_phase(R x)
{
    const R two_pi = 2 * r_pi<R>();
    x -= two_pi * r_floor((x + r_pi<R>()) / two_pi);
    if (x <= -r_pi<R>())
        x += two_pi;
    return x;
}

// ---- complex ----------------------------------------------------------------

inline double c_real(const std::complex<double>& z) { return z.real(); }
inline double c_imag(const std::complex<double>& z) { return z.imag(); }
inline double c_abs(const std::complex<double>& z) { return std::abs(z); }
inline double c_norm(const std::complex<double>& z) { return std::norm(z); }
inline double c_arg(const std::complex<double>& z) { return std::arg(z); }
inline std::complex<double> c_log(const std::complex<double>& z) { return std::log(z); }
inline std::complex<double> c_exp(const std::complex<double>& z) { return std::exp(z); }

template <class R>
const R& c_real(const basic_complex<R>& z)
{
    return z.re;
}
template <class R>
const R& c_imag(const basic_complex<R>& z)
{
    return z.im;
}
template <class R>
R c_norm(const basic_complex<R>& z)
{
    return z.re * z.re + z.im * z.im;
}
template <class R>
R c_abs(const basic_complex<R>& z)
{
    return boost::multiprecision::hypot(z.re, z.im);
}
template <class R>
R c_arg(const basic_complex<R>& z)
{
    if (z.re == 0 && z.im == 0)
        return R(0);
    return r_atan2(z.im, z.re);
}
template <class R>
basic_complex<R> c_log(const basic_complex<R>& z)
{
    return {r_log(c_abs(z)), c_arg(z)};
}
template <class R>
basic_complex<R> c_exp(const basic_complex<R>& z)
{
    const R m = r_exp(z.re);
    return {m * r_cos(z.im), m * r_sin(z.im)};
}

template <class C>
C c_conj(const C& z)
{
    return C(c_real(z), -c_imag(z));
}

/// Log-modulus without forming |z| (safe for subnormal-range doubles).
template <class C>
real_of<C> c_log_abs(const C& z)
{
    if constexpr (std::is_same_v<C, std::complex<double>>) {
        const double ax = std::fabs(z.real()), ay = std::fabs(z.imag());
        const double m  = std::max(ax, ay);
        if (m == 0)
            return -std::numeric_limits<double>::infinity();
        const double lo = std::min(ax, ay) / m;
        return std::log(m) + 0.5 * std::log1p(lo * lo);
    }
    else {
        return r_log(c_abs(z));
    }
}

/// Integer power by repeated squaring.
template <class C>
C c_pow(C base, long long n)
{
    if (n < 0)
        return C(1) / c_pow(base, -n);
    C result(1);
    while (n > 0) {
        if (n & 1)
            result = result * base;
        n >>= 1;
        if (n)
            base = base * base;
    }
    return result;
}

template <class C>
C make_complex(const real_of<C>& re, const real_of<C>& im)
{
    return C(re, im);
}

template <class C>
C from_std(const std::complex<double>& z)
{
    if constexpr (std::is_same_v<C, std::complex<double>>)
        return z;
    else
        return C(real_of<C>(z.real()), real_of<C>(z.imag()));
}

template <class C>
std::complex<double> to_std(const C& z)
{
    if constexpr (std::is_same_v<C, std::complex<double>>)
        return z;
    else
        return {to_double(c_real(z)), to_double(c_imag(z))};
}

template <class C>
bool c_is_zero(const C& z)
{
    return c_real(z) == 0 && c_imag(z) == 0;
}

// ---- precision control ------------------------------------------------------

inline unsigned digits10_for_bits(unsigned bits)
{
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

/// Sets the default MPFR precision for values created while the scope lives.
/// Arithmetic results take the largest precision of their operands, so a
/// computation that starts from doubles inside the scope stays at `bits`.
class precision_scope
{
public:
    explicit precision_scope(unsigned bits) : saved_(mpreal::default_precision())
    {
        mpreal::default_precision(digits10_for_bits(bits));
    }
    ~precision_scope() { mpreal::default_precision(saved_); }
    precision_scope(const precision_scope&)            = delete;
    precision_scope& operator=(const precision_scope&) = delete;

private:
    unsigned saved_;
};

/// Copy of x carried at the current default precision.
inline mpreal at_default_precision(const mpreal& x)
{
    return mpreal(x, mpreal::default_precision());
}
inline mpcomplex at_default_precision(const mpcomplex& z)
{
    return {at_default_precision(z.re), at_default_precision(z.im)};
}

/// Scientific rendering with `digits` significant digits; works past the double range.
inline std::string format_real(const mpreal& x, int digits = 17)
{
    return x.str(digits, std::ios_base::scientific);
}

} // namespace henon
