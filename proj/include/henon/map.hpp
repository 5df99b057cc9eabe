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

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "henon/errors.hpp"
#include "henon/ext_complex.hpp"
#include "henon/mp.hpp"

namespace henon
{

/// One factor (z, w) -> (p(z) - a w, z). coeffs are listed from the constant term up.
template <class C>
struct basic_factor {
    std::vector<C> coeffs;
    C a;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    const C& leading() const { return coeffs.back(); }

    /// Builds a validated factor: monic, a != 0, degree >= 2.
    static basic_factor make(std::vector<C> coeffs, C a)
    {
        if (coeffs.size() < 3)
            throw InvalidMap("factor degree must be at least 2");
        if (!(c_real(coeffs.back()) == 1 && c_imag(coeffs.back()) == 0))
            throw InvalidMap("leading coefficient must be exactly 1");
        if (c_is_zero(a))
            throw InvalidMap("Jacobian constant a must be nonzero");
        return {std::move(coeffs), std::move(a)};
    }
};

/// Composition f_N o ... o f_1; factors[0] is applied first.
template <class C>
struct basic_system {
    std::vector<basic_factor<C>> factors;

    int degree() const
    {
        int d = 1;
        for (const auto& f : factors)
            d *= f.degree();
        return d;
    }
    C jacobian_constant() const
    {
        C a(1);
        for (const auto& f : factors)
            a = a * f.a;
        return a;
    }
    std::size_t size() const { return factors.size(); }

    static basic_system make(std::vector<basic_factor<C>> factors)
    {
        if (factors.empty())
            throw InvalidMap("system needs at least one factor");
        return {std::move(factors)};
    }
};

template <class C>
struct basic_point {
    C z;
    C w;
};

template <class C>
struct basic_proj_point {
    C z, w, t;
};

template <class C>
struct basic_tangent {
    basic_point<C> base;
    C dz, dw;
};

template <class C>
struct Mat2 {
    std::array<std::array<C, 2>, 2> m;

    static Mat2 identity() { return {{{{C(1), C(0)}, {C(0), C(1)}}}}; }
    C det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    std::pair<C, C> apply(const C& x, const C& y) const
    {
        return {m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y};
    }
    friend Mat2 operator*(const Mat2& A, const Mat2& B)
    {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.m[i][j] = A.m[i][0] * B.m[0][j] + A.m[i][1] * B.m[1][j];
        return r;
    }
};

using Complex      = std::complex<double>;
using HenonFactor  = basic_factor<Complex>;
using HenonSystem  = basic_system<Complex>;
using AffinePoint  = basic_point<Complex>;
using ProjPoint    = basic_proj_point<Complex>;
using Tangent      = basic_tangent<Complex>;
using MpSystem     = basic_system<mpcomplex>;
using MpPoint      = basic_point<mpcomplex>;

/// Converts a double system to another scalar type at the current default precision.
template <class D>
basic_system<D> system_cast(const HenonSystem& sys)
{
    basic_system<D> out;
    for (const auto& f : sys.factors) {
        basic_factor<D> g;
        for (const auto& c : f.coeffs)
            g.coeffs.push_back(from_std<D>(c));
        g.a = from_std<D>(f.a);
        out.factors.push_back(std::move(g));
    }
    return out;
}

template <class D>
basic_point<D> point_cast(const AffinePoint& p)
{
    return {from_std<D>(p.z), from_std<D>(p.w)};
}

template <class C>
AffinePoint to_std(const basic_point<C>& p)
{
    return {to_std(p.z), to_std(p.w)};
}

// ---- polynomial evaluation ---------------------------------------------------

template <class C>
C eval_poly(const basic_factor<C>& f, const C& z)
{
    C r = f.coeffs.back();
    for (int k = f.degree() - 1; k >= 0; --k)
        r = r * z + f.coeffs[k];
    return r;
}

template <class C>
C eval_dpoly(const basic_factor<C>& f, const C& z)
{
    const int d = f.degree();
    C r         = f.coeffs.back() * real_of<C>(d);
    for (int k = d - 1; k >= 1; --k)
        r = r * z + f.coeffs[k] * real_of<C>(k);
    return r;
}

/// Sum_k c_k z^k t^(d-k).
template <class C>
C eval_homogeneous(const basic_factor<C>& f, const C& z, const C& t)
{
    const int d = f.degree();
    C r         = f.coeffs.back();
    C tp        = t;
    for (int k = d - 1; k >= 0; --k) {
        r  = r * z + f.coeffs[k] * tp;
        tp = tp * t;
    }
    return r;
}

// ---- affine maps -------------------------------------------------------------

template <class C>
basic_point<C> factor_forward(const basic_factor<C>& f, const basic_point<C>& p)
{
    return {eval_poly(f, p.z) - f.a * p.w, p.z};
}

template <class C>
basic_point<C> factor_inverse(const basic_factor<C>& f, const basic_point<C>& p)
{
    return {p.w, (eval_poly(f, p.w) - p.z) / f.a};
}

template <class C>
basic_point<C> apply_forward(const basic_system<C>& sys, basic_point<C> p)
{
    for (const auto& f : sys.factors)
        p = factor_forward(f, p);
    return p;
}

template <class C>
basic_point<C> apply_inverse(const basic_system<C>& sys, basic_point<C> p)
{
    for (auto it = sys.factors.rbegin(); it != sys.factors.rend(); ++it)
        p = factor_inverse(*it, p);
    return p;
}

/// f^n for n >= 0, f^(-n) for n < 0.
template <class C>
basic_point<C> apply_power(const basic_system<C>& sys, basic_point<C> p, int n)
{
    for (int k = 0; k < n; ++k)
        p = apply_forward(sys, p);
    for (int k = 0; k < -n; ++k)
        p = apply_inverse(sys, p);
    return p;
}

// ---- Jacobians ---------------------------------------------------------------

template <class C>
Mat2<C> factor_jacobian_forward(const basic_factor<C>& f, const basic_point<C>& p)
{
    return {{{{eval_dpoly(f, p.z), -f.a}, {C(1), C(0)}}}};
}

template <class C>
Mat2<C> factor_jacobian_inverse(const basic_factor<C>& f, const basic_point<C>& p)
{
    return {{{{C(0), C(1)}, {-(C(1) / f.a), eval_dpoly(f, p.w) / f.a}}}};
}

template <class C>
Mat2<C> jacobian_forward(const basic_system<C>& sys, basic_point<C> p)
{
    Mat2<C> J = Mat2<C>::identity();
    for (const auto& f : sys.factors) {
        J = factor_jacobian_forward(f, p) * J;
        p = factor_forward(f, p);
    }
    return J;
}

template <class C>
Mat2<C> jacobian_inverse(const basic_system<C>& sys, basic_point<C> p)
{
    Mat2<C> J = Mat2<C>::identity();
    for (auto it = sys.factors.rbegin(); it != sys.factors.rend(); ++it) {
        J = factor_jacobian_inverse(*it, p) * J;
        p = factor_inverse(*it, p);
    }
    return J;
}

// ---- projective extensions ---------------------------------------------------

/// Scales so the largest-modulus coordinate becomes exactly 1 (ties: z, then w, then t).
template <class C>
basic_proj_point<C> normalize(const basic_proj_point<C>& q)
{
    const real_of<C> az = c_abs(q.z), aw = c_abs(q.w), at = c_abs(q.t);
    if (az == 0 && aw == 0 && at == 0)
        throw Degenerate("projective point with all coordinates zero");
    basic_proj_point<C> r;
    if (az >= aw && az >= at) {
        r = {C(1), q.w / q.z, q.t / q.z};
    }
    else if (aw >= at) {
        r = {q.z / q.w, C(1), q.t / q.w};
    }
    else {
        r = {q.z / q.t, q.w / q.t, C(1)};
    }
    return r;
}

/// Equality up to common scale: all 2x2 minors small relative to the sizes.
template <class C>
bool proj_equal(const basic_proj_point<C>& p, const basic_proj_point<C>& q, double tol = 1e-12)
{
    const auto a = normalize(p);
    const auto b = normalize(q);
    const C pa[3] = {a.z, a.w, a.t};
    const C pb[3] = {b.z, b.w, b.t};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (to_double(c_abs(pa[i] * pb[j] - pa[j] * pb[i])) > tol)
                return false;
    return true;
}

template <class C>
bool is_i_plus(const basic_proj_point<C>& q)
{
    return c_is_zero(q.z) && c_is_zero(q.t);
}

template <class C>
bool is_i_minus(const basic_proj_point<C>& q)
{
    return c_is_zero(q.w) && c_is_zero(q.t);
}

template <class C>
basic_proj_point<C> affine_to_proj(const basic_point<C>& p)
{
    return normalize(basic_proj_point<C>{p.z, p.w, C(1)});
}

template <class C>
basic_proj_point<C> factor_extend_forward(const basic_factor<C>& f, const basic_proj_point<C>& q)
{
    if (is_i_plus(q))
        throw IndeterminacyPoint("forward extension is undefined at [0:1:0]");
    const int d = f.degree();
    const C td1 = c_pow(q.t, d - 1);
    return normalize(basic_proj_point<C>{eval_homogeneous(f, q.z, q.t) - f.a * q.w * td1, q.z * td1, td1 * q.t});
}

template <class C>
basic_proj_point<C> factor_extend_inverse(const basic_factor<C>& f, const basic_proj_point<C>& q)
{
    if (is_i_minus(q))
        throw IndeterminacyPoint("inverse extension is undefined at [1:0:0]");
    const int d = f.degree();
    const C td1 = c_pow(q.t, d - 1);
    return normalize(basic_proj_point<C>{q.w * td1, (eval_homogeneous(f, q.w, q.t) - q.z * td1) / f.a, td1 * q.t});
}

template <class C>
basic_proj_point<C> extend_forward_proj(const basic_system<C>& sys, basic_proj_point<C> q)
{
    q = normalize(q);
    for (const auto& f : sys.factors)
        q = factor_extend_forward(f, q);
    return q;
}

template <class C>
basic_proj_point<C> extend_inverse_proj(const basic_system<C>& sys, basic_proj_point<C> q)
{
    q = normalize(q);
    for (auto it = sys.factors.rbegin(); it != sys.factors.rend(); ++it)
        q = factor_extend_inverse(*it, q);
    return q;
}

// ---- extended-range iteration ------------------------------------------------

struct ExtPoint {
    ExtComplex z;
    ExtComplex w;
};

namespace detail
{

// Steps whose inputs and output stay comfortably inside the double range are
// done in ordinary arithmetic; this is also the exact fallback when a zero
// coordinate would make the log-space recursion meaningless.
inline bool fits_double(const ExtComplex& z, const ExtComplex& w, int d)
{
    const double lz = z.is_zero() ? 0.0 : z.log_mag;
    const double lw = w.is_zero() ? 0.0 : w.log_mag;
    return std::max(lz * d, lw) + 5.0 < 650.0 && lz > -300.0 && lw > -300.0;
}

/// p(u) - a v in log space: u^d (1 + sum c_k u^(k-d) - a v u^(-d)) when u dominates, Horner otherwise.
inline ExtComplex ext_poly_minus(const HenonFactor& f, const ExtComplex& u, const ExtComplex& v)
{
    const int d         = f.degree();
    const ExtComplex av = ExtComplex::from(f.a) * v;
    if (!u.is_zero() && u.log_mag > 1.0 && (av.is_zero() || av.log_mag < d * u.log_mag - 1.0)) {
        ExtComplex corr;
        const ExtComplex uinv = ExtComplex::one() / u;
        ExtComplex upow       = ExtComplex::one();
        for (int k = d - 1; k >= 0; --k) {
            upow = upow * uinv;
            corr = corr + ExtComplex::from(f.coeffs[k]) * upow;
        }
        corr = corr - av * u.pow(-d);
        return u.pow(d) * (ExtComplex::one() + corr);
    }
    ExtComplex r = ExtComplex::one();
    for (int k = d - 1; k >= 0; --k)
        r = r * u + ExtComplex::from(f.coeffs[k]);
    return r - av;
}

} // namespace detail

inline ExtPoint factor_forward_ext(const HenonFactor& f, const ExtPoint& p)
{
    if (detail::fits_double(p.z, p.w, f.degree())) {
        const AffinePoint q = factor_forward(f, AffinePoint{p.z.to_complex(), p.w.to_complex()});
        return {ExtComplex::from(q.z), ExtComplex::from(q.w)};
    }
    ExtPoint r{detail::ext_poly_minus(f, p.z, p.w), p.z};
    if (std::isnan(r.z.log_mag))
        throw Degenerate("extended-range forward step undefined");
    return r;
}

inline ExtPoint factor_inverse_ext(const HenonFactor& f, const ExtPoint& p)
{
    if (detail::fits_double(p.w, p.z, f.degree())) {
        const AffinePoint q = factor_inverse(f, AffinePoint{p.z.to_complex(), p.w.to_complex()});
        return {ExtComplex::from(q.z), ExtComplex::from(q.w)};
    }
    // (p(w) - z) / a.
    HenonFactor unit{f.coeffs, Complex(1.0)};
    ExtPoint r{p.w, detail::ext_poly_minus(unit, p.w, p.z) / ExtComplex::from(f.a)};
    if (std::isnan(r.w.log_mag))
        throw Degenerate("extended-range inverse step undefined");
    return r;
}

/// f^n (direction = +1) or f^(-n) (direction = -1) carried in log space.
inline ExtPoint iterate_ext(const HenonSystem& sys, const AffinePoint& p, int n, int direction = 1)
{
    if (n < 0)
        throw std::invalid_argument("iterate_ext: n must be nonnegative");
    ExtPoint q{ExtComplex::from(p.z), ExtComplex::from(p.w)};
    for (int k = 0; k < n; ++k) {
        if (direction >= 0) {
            for (const auto& f : sys.factors)
                q = factor_forward_ext(f, q);
        }
        else {
            for (auto it = sys.factors.rbegin(); it != sys.factors.rend(); ++it)
                q = factor_inverse_ext(*it, q);
        }
    }
    return q;
}

// ---- map documents -------------------------------------------------------------

inline Complex complex_from_json(const nlohmann::json& j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2)
        throw InvalidMap("complex values are written as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::json complex_to_json(const Complex& c) { return nlohmann::json::array({c.real(), c.imag()}); }

inline HenonSystem system_from_json(const nlohmann::json& j)
{
    if (!j.contains("factors") || !j["factors"].is_array())
        throw InvalidMap("map document needs a \"factors\" array");
    std::vector<HenonFactor> factors;
    for (const auto& fj : j["factors"]) {
        if (!fj.contains("coeffs") || !fj.contains("a"))
            throw InvalidMap("each factor needs \"coeffs\" and \"a\"");
        std::vector<Complex> coeffs;
        for (const auto& c : fj["coeffs"])
            coeffs.push_back(complex_from_json(c));
        factors.push_back(HenonFactor::make(std::move(coeffs), complex_from_json(fj["a"])));
    }
    return HenonSystem::make(std::move(factors));
}

inline nlohmann::json system_to_json(const HenonSystem& sys)
{
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& f : sys.factors) {
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& c : f.coeffs)
            cs.push_back(complex_to_json(c));
        fs.push_back({{"coeffs", cs}, {"a", complex_to_json(f.a)}});
    }
    return {{"factors", fs}};
}

/// Single factor from coefficients (constant term first, leading 1 included).
inline HenonSystem single_factor(std::vector<Complex> coeffs, Complex a)
{
    return HenonSystem::make({HenonFactor::make(std::move(coeffs), a)});
}

/// The three reference systems: z^2 with a=1, z^2+0.3 with a=0.5, and a composition of two quadratics.
inline HenonSystem benchmark_system(int which)
{
    switch (which) {
    case 0:
        return single_factor({0.0, 0.0, 1.0}, 1.0);
    case 1:
        return single_factor({0.3, 0.0, 1.0}, 0.5);
    case 2:
        return HenonSystem::make({HenonFactor::make({Complex(-0.2, 0.1), 0.0, 1.0}, 0.8),
                                  HenonFactor::make({0.5, 0.0, 1.0}, Complex(0.0, 1.0))});
    default:
        throw std::out_of_range("benchmark index");
    }
}

} // namespace henon
