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

// Normal-form side of the construction: the chart psi, the model map G with
// its closed-form iterates, and the numerical tracing of analytic discs in a
// leaf of {g+ = c}.
//
// A disc of depth n around a base point P is built at Q = f^n(P), deep in V+,
// where the leaf through Q is nearly the vertical line z = const. The point
// (z_Q, w_Q + rho theta) with rho = (c_phi / 2) |z_Q| is moved back onto the
// leaf by Newton's method in z (keeping w fixed) so that the first normal
// coordinate log x equals its value at Q, then pulled back by f^(-n). Pulling
// back loses roughly log2 |z_Q| bits to cancellation, so the whole chain runs
// in MPFR with a precision budget derived from log |z_Q|.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "henon/errors.hpp"
#include "henon/filtration.hpp"
#include "henon/green.hpp"
#include "henon/map.hpp"
#include "henon/mp.hpp"

namespace henon
{

// ---- chart psi -----------------------------------------------------------------

template <class C>
std::pair<C, C> psi(const basic_point<C>& p)
{
    if (c_is_zero(p.z))
        throw DivisionByZero("psi is undefined at z = 0");
    return {C(1) / p.z, p.w / p.z};
}

template <class C>
basic_point<C> psi_inverse(const C& zeta, const C& omega)
{
    if (c_is_zero(zeta))
        throw DivisionByZero("psi inverse is undefined at zeta = 0");
    return {C(1) / zeta, omega / zeta};
}

// ---- model map G -----------------------------------------------------------------

/// G(x, y) = (x^d, (a/d) y x^(2d-2) + x^(d-1) (1 + r(x))); r is a truncated power
/// series with zero constant term, coefficients listed from the constant term up.
struct ModelMapG {
    int d = 2;
    Complex a{1.0};
    std::vector<Complex> r_coeffs{};

    static ModelMapG make(int d, Complex a, std::vector<Complex> r = {})
    {
        if (d < 2)
            throw InvalidMap("model map needs d >= 2");
        if (a == 0.0)
            throw InvalidMap("model map needs a != 0");
        if (!r.empty() && r[0] != 0.0)
            throw InvalidMap("r must vanish at 0");
        return {d, a, std::move(r)};
    }

    bool r_is_zero() const
    {
        for (const auto& c : r_coeffs)
            if (c != 0.0)
                return false;
        return true;
    }
};

namespace detail
{

template <class C>
C eval_r(const ModelMapG& G, const C& x)
{
    if (G.r_coeffs.empty())
        return C(0);
    C s = from_std<C>(G.r_coeffs.back());
    for (int k = (int)G.r_coeffs.size() - 2; k >= 0; --k)
        s = s * x + from_std<C>(G.r_coeffs[k]);
    return s;
}

/// Next-term estimate of the truncated r relative to 1 + r(x).
template <class C>
void check_truncation(const ModelMapG& G, const C& x)
{
    if (G.r_is_zero())
        return;
    const int K     = (int)G.r_coeffs.size() - 1;
    const double ax = to_double(c_abs(x));
    const double est =
        std::abs(G.r_coeffs.back()) * std::pow(ax, K + 1) / std::max(1e-300, to_double(c_abs(C(1) + eval_r(G, x))));
    if (est > 1e-9)
        throw TruncationLoss("truncated r is too short for |x| = " + std::to_string(ax));
}

} // namespace detail

template <class C>
std::pair<C, C> model_G_apply(const ModelMapG& G, const C& x, const C& y)
{
    const C ad  = from_std<C>(G.a) / real_of<C>(G.d);
    const C xd1 = c_pow(x, G.d - 1);
    return {xd1 * x, ad * y * xd1 * xd1 + xd1 * (C(1) + detail::eval_r(G, x))};
}

/// Polynomial part Q_n of the second component of G^n: G^n(x, y)_2 = (a/d)^n x^(q_n) y + Q_n(x).
template <class C>
C model_Q(const ModelMapG& G, const C& x, int n)
{
    const C ad = from_std<C>(G.a) / real_of<C>(G.d);
    C Q(0);
    C xk = x;
    for (int k = 0; k < n; ++k) {
        const C xd1 = c_pow(xk, G.d - 1);
        Q           = ad * xd1 * xd1 * Q + xd1 * (C(1) + detail::eval_r(G, xk));
        xk          = xd1 * xk;
    }
    return Q;
}

/// q_n = 2 (d^n - 1).
inline long long model_q(int d, int n)
{
    long long p = 1;
    for (int k = 0; k < n; ++k)
        p *= d;
    return 2 * (p - 1);
}

/// G^n for n >= 0; for n < 0 the closed form G^(-m)(X, Y) = (x, (Y - Q_m(x)) / ((a/d)^m x^(q_m)))
/// with x a d^m-th root of X. branch selects the root exp((arg X + 2 pi branch) / d^m).
template <class C>
std::pair<C, C> model_G_pow(const ModelMapG& G, C x, C y, int n, long long branch = 0)
{
    using R = real_of<C>;
    if (n >= 0) {
        detail::check_truncation(G, x);
        for (int k = 0; k < n; ++k)
            std::tie(x, y) = model_G_apply(G, x, y);
        return {x, y};
    }
    const int m = -n;
    if (c_is_zero(x))
        throw DivisionByZero("inverse of G needs x != 0");
    R dm(1);
    for (int k = 0; k < m; ++k)
        dm *= G.d;
    const R lm   = c_log_abs(x) / dm;
    const R ph   = (c_arg(x) + R(2) * r_pi<R>() * R(branch)) / dm;
    const C root = c_exp(C(lm, ph));
    detail::check_truncation(G, root);
    const C ad = from_std<C>(G.a) / R(G.d);
    const C Q  = model_Q(G, root, m);
    return {root, (y - Q) / (c_pow(ad, m) * c_pow(root, model_q(G.d, m)))};
}

// ---- leaf parametrisation --------------------------------------------------------------

struct LeafParam {
    double c = 0.0;
    double s_phase = 0.0;
    AffinePoint base{};
    int depth = 0;
};

struct TracerOptions {
    unsigned min_bits = 128;
    double bits_per_log = 1.25; // multiplies log2 |z_Q|
    int newton_max_iter = 50;
    int max_auto_depth = 40;
};

/// Bits used for a disc whose deep point has log |z_Q| = L.
inline unsigned tracer_bits(double L, const TracerOptions& opt = {})
{
    const double extra = std::ceil(opt.bits_per_log * std::max(0.0, L) / std::numbers::ln2);
    return std::max<unsigned>(opt.min_bits, 128u + (unsigned)extra);
}

/// Depth rule: smallest n with log |z(f^n(base))| >= max(log(1/c_phi), 30) and f^n(base) in V+.
inline int auto_depth(const HenonSystem& sys, const FiltrationConstants& k, const AffinePoint& base,
                      const TracerOptions& opt = {})
{
    const double need = std::max(std::log(1 / k.c_phi), 30.0);
    for (int n = 0; n <= opt.max_auto_depth; ++n) {
        const auto q = iterate_ext(sys, base, n);
        if (q.z.log_mag >= need && region_of(q, k) == Region::VPlus)
            return n;
    }
    throw DepthInsufficient("no depth up to the cap reaches the deep zone");
}

struct DiscChain {
    Complex theta;
    std::vector<MpPoint> points;                       // f^j(phi(theta)), j = 0..n
    std::vector<std::pair<mpcomplex, mpcomplex>> tangents; // d/dtheta of the same
    int newton_iterations = 0;
};

class DiscTracer
{
public:
    DiscTracer(const HenonSystem& sys, const FiltrationConstants& k, const LeafParam& L, const TracerOptions& opt = {})
        : sys_(sys), k_(k), leaf_(L), opt_(opt)
    {
        if (L.depth < 0)
            throw DepthInsufficient("negative depth");
        const auto qe = iterate_ext(sys, L.base, L.depth);
        if (region_of(qe, k) != Region::VPlus)
            throw DepthInsufficient("f^n(base) is not in V+");
        if (qe.z.log_mag < std::log(1 / k.c_phi))
            throw DepthInsufficient("f^n(base) is not in the deep zone |z| >= 1/c_phi");
        deep_log_ = qe.z.log_mag;
        main_     = make_state(tracer_bits(deep_log_, opt));
    }

    unsigned bits() const { return main_.bits; }
    int depth() const { return leaf_.depth; }
    double deep_log_abs_z() const { return deep_log_; }
    const LeafParam& leaf() const { return leaf_; }
    const MpSystem& mp_system() const { return main_.msys; }
    const HenonSystem& system() const { return sys_; }
    const FiltrationConstants& constants() const { return k_; }
    const MpPoint& deep_base() const { return main_.Q; }
    const mpcomplex& log_x_deep() const { return main_.logx_Q; }
    const mpreal& rho() const { return main_.rho; }
    const mpreal& tolerance() const { return main_.tol; }

    /// Leaf point at depth n with w = w_Q + rho theta.
    MpPoint deep_point(const Complex& theta, int* iterations = nullptr) const
    {
        precision_scope scope(main_.bits);
        return deep_point(main_, from_std<mpcomplex>(theta), iterations);
    }

    /// Residual of the leaf equation log x(z, w) = log x(Q), imaginary part wrapped.
    mpcomplex leaf_residual(const mpcomplex& z, const mpcomplex& w) const { return residual(main_, z, w); }

    /// Full chain: deep point, its tangent from implicit differentiation, and the
    /// pullbacks of both by f^(-1) down to depth 0.
    DiscChain trace(const Complex& theta) const { return trace(main_, theta); }

    /// The same chain computed at a higher precision (for forward re-verification
    /// from depth 0, which needs the cancellation budget of the whole chain).
    DiscChain trace_at(const Complex& theta, unsigned bits) const
    {
        if (bits <= main_.bits)
            return trace(main_, theta);
        return trace(make_state(bits), theta);
    }

    /// Chain at an MPFR parameter value, for displacements below double resolution.
    DiscChain trace_mp(const mpcomplex& theta, unsigned bits) const
    {
        if (bits <= main_.bits)
            return trace(main_, theta);
        return trace(make_state(bits), theta);
    }

    /// Depth-0 disc point phi(theta).
    MpPoint point(const Complex& theta) const
    {
        precision_scope scope(main_.bits);
        return apply_power(main_.msys, deep_point(theta), -leaf_.depth);
    }

    /// dz/dtheta at depth n by central differences along theta (dw/dtheta = rho exactly).
    mpcomplex deep_dz_dtheta_fd(const Complex& theta, double step = 1e-5) const
    {
        precision_scope scope(main_.bits);
        const MpPoint a = deep_point(theta + step);
        const MpPoint b = deep_point(theta - step);
        return (a.z - b.z) / mpcomplex(mpreal(2 * step));
    }

private:
    struct State {
        unsigned bits = 128;
        MpSystem msys;
        MpPoint Q;
        mpcomplex logx_Q;
        mpreal rho, tol, newton_tol, fd_rel;
    };

    State make_state(unsigned bits) const
    {
        precision_scope scope(bits);
        State st;
        st.bits       = bits;
        st.msys       = system_cast<mpcomplex>(sys_);
        st.Q          = apply_power(st.msys, point_cast<mpcomplex>(leaf_.base), leaf_.depth);
        st.tol        = boost::multiprecision::ldexp(mpreal(1), -(int)bits);
        st.logx_Q     = log_bottcher(st.msys, st.Q, st.tol);
        st.rho        = mpreal(k_.c_phi / 2) * c_abs(st.Q.z);
        st.newton_tol = boost::multiprecision::ldexp(mpreal(1), -(int)bits + 16) * (1 + c_abs(st.logx_Q));
        st.fd_rel     = boost::multiprecision::ldexp(mpreal(1), -(int)(bits / 3));
        return st;
    }

    static mpcomplex residual(const State& st, const mpcomplex& z, const mpcomplex& w)
    {
        const mpcomplex F = log_bottcher(st.msys, MpPoint{z, w}, st.tol) - st.logx_Q;
        return {F.re, wrap_phase(F.im)};
    }

    MpPoint deep_point(const State& st, const mpcomplex& theta, int* iterations) const
    {
        precision_scope scope(st.bits);
        const mpcomplex w = st.Q.w + at_default_precision(theta) * st.rho;
        mpcomplex z       = st.Q.z;
        for (int it = 0; it <= opt_.newton_max_iter; ++it) {
            const mpcomplex F = residual(st, z, w);
            if (c_abs(F) < st.newton_tol) {
                if (iterations)
                    *iterations = it;
                return {z, w};
            }
            if (it == opt_.newton_max_iter)
                break;
            const mpreal h = c_abs(z) * st.fd_rel;
            const mpcomplex hz(h);
            const mpcomplex dF = (residual(st, z + hz, w) - residual(st, z - hz, w)) / mpcomplex(2 * h);
            if (c_is_zero(dF))
                break;
            z = z - F / dF;
        }
        throw ProjectionDiverged("Newton projection onto the leaf did not converge");
    }

    DiscChain trace(const State& st, const Complex& theta) const
    {
        precision_scope scope(st.bits);
        return trace(st, from_std<mpcomplex>(theta));
    }

    DiscChain trace(const State& st, const mpcomplex& theta) const
    {
        precision_scope scope(st.bits);
        DiscChain ch;
        ch.theta    = to_std(theta);
        const int n = leaf_.depth;
        ch.points.resize(n + 1);
        ch.tangents.resize(n + 1);
        ch.points[n]  = deep_point(st, theta, &ch.newton_iterations);
        const auto& P = ch.points[n];
        // dz/dtheta = -rho F_w / F_z.
        const mpreal h = c_abs(P.z) * st.fd_rel;
        const mpcomplex hz(h), two_h(2 * h);
        const mpcomplex Fz = (residual(st, P.z + hz, P.w) - residual(st, P.z - hz, P.w)) / two_h;
        const mpcomplex Fw = (residual(st, P.z, P.w + hz) - residual(st, P.z, P.w - hz)) / two_h;
        ch.tangents[n]     = {-(mpcomplex(st.rho) * Fw / Fz), mpcomplex(st.rho)};
        for (int j = n; j >= 1; --j) {
            const auto J       = jacobian_inverse(st.msys, ch.points[j]);
            const auto [a, b]  = J.apply(ch.tangents[j].first, ch.tangents[j].second);
            ch.tangents[j - 1] = {a, b};
            ch.points[j - 1]   = apply_inverse(st.msys, ch.points[j]);
        }
        return ch;
    }

    HenonSystem sys_;
    FiltrationConstants k_;
    LeafParam leaf_;
    TracerOptions opt_;
    double deep_log_ = 0;
    State main_;
};

/// Base point on {g+ = c} along a ray, the depth (auto when depth < 0), and the phase of s.
inline LeafParam make_leaf(const HenonSystem& sys, const FiltrationConstants& k, double c, const AffinePoint& ray,
                           int depth = -1, const GreenParams& params = {}, const TracerOptions& opt = {})
{
    LeafParam L;
    L.c     = c;
    L.base  = level_set_seed(sys, c, ray, params);
    L.depth = depth < 0 ? auto_depth(sys, k, L.base, opt) : depth;
    const DiscTracer tr(sys, k, L, opt);
    // s is a d^n-th root of x(Q); the principal one is recorded.
    precision_scope scope(tr.bits());
    mpreal dn(1);
    for (int j = 0; j < L.depth; ++j)
        dn *= sys.degree();
    L.s_phase = to_double(wrap_phase(mpreal(tr.log_x_deep().im / dn)));
    return L;
}

/// Disc point phi_(s,n)(theta) at depth 0.
inline MpPoint leaf_point(const HenonSystem& sys, const FiltrationConstants& k, const LeafParam& L, const Complex& theta,
                          const TracerOptions& opt = {})
{
    return DiscTracer(sys, k, L, opt).point(theta);
}

/// Index of a chain point: true iff levels i..n all lie in V+.
inline bool chain_in_theta_region(const DiscChain& ch, const FiltrationConstants& k, int i)
{
    for (std::size_t j = (std::size_t)i; j < ch.points.size(); ++j)
        if (region_of(ch.points[j], k) != Region::VPlus)
            return false;
    return true;
}

inline bool theta_region_index(const DiscTracer& tr, const Complex& theta, int i)
{
    if (i < 0 || i > tr.depth())
        throw std::invalid_argument("theta_region_index: need 0 <= i <= n");
    return chain_in_theta_region(tr.trace(theta), tr.constants(), i);
}

/// sup |dz/dtheta| / |dw/dtheta| over the given deep-zone samples (theta differences, step 1e-5).
inline double verticality_slope(const DiscTracer& tr, const std::vector<Complex>& thetas, double step = 1e-5)
{
    double s = 0;
    precision_scope scope(tr.bits());
    for (const auto& th : thetas) {
        const mpcomplex dz = tr.deep_dz_dtheta_fd(th, step);
        s = std::max(s, to_double(c_abs(dz) / tr.rho()));
    }
    return s;
}

/// Same slope read from the Jacobian-propagated tangents at every V+ level of the chains.
inline double chain_verticality(const std::vector<DiscChain>& chains, const FiltrationConstants& k)
{
    double s = 0;
    for (const auto& ch : chains)
        for (std::size_t j = 0; j < ch.points.size(); ++j)
            if (region_of(ch.points[j], k) == Region::VPlus) {
                const auto& t = ch.tangents[j];
                s = std::max(s, to_double(c_abs(t.first) / c_abs(t.second)));
            }
    return s;
}

/// log of the larger coordinate modulus over a chain (sets the precision for forward re-checks).
inline double chain_max_log(const DiscChain& ch)
{
    double m = 0;
    for (const auto& p : ch.points)
        m = std::max({m, to_double(r_log(c_abs(p.z) + 1)), to_double(r_log(c_abs(p.w) + 1))});
    return m;
}

struct LeafCheck {
    double green_value = 0;      // g+(phi(theta))
    double green_error = 0;      // |g+(phi(theta)) - c|
    double logmag_error = 0;     // | log|x(f^n phi(theta))| - log|x(Q)| |
    double phase_error = 0;      // phase difference mod 2 pi
};

/// Precision for re-deriving a chain forward from depth 0: the forward orbit of a
/// depth-0 point amplifies its rounding error by roughly the product of the
/// largest coordinate moduli met on the way.
inline unsigned recheck_bits(double chain_max_log, double deep_log, const TracerOptions& opt = {})
{
    return tracer_bits(2 * chain_max_log + deep_log, opt);
}

/// Re-derives g+ at phi(theta) and x at f^n(phi(theta)) by forward iteration from
/// depth 0, with the chain recomputed at the re-check precision.
inline LeafCheck check_leaf_point(const DiscTracer& tr, const Complex& theta)
{
    const DiscChain coarse = tr.trace(theta);
    const unsigned bits    = recheck_bits(chain_max_log(coarse), tr.deep_log_abs_z());
    const DiscChain ch     = tr.trace_at(theta, bits);
    precision_scope scope(std::max(bits, tr.bits()));
    const MpSystem ms  = system_cast<mpcomplex>(tr.system());
    const MpPoint X0   = ch.points.front();
    const mpreal tol   = boost::multiprecision::ldexp(mpreal(1), -(int)tr.bits());
    LeafCheck r;
    const mpreal g     = green_plus_precise(ms, X0, tol);
    r.green_value      = to_double(g);
    r.green_error      = to_double(r_abs(g - mpreal(tr.leaf().c)));
    const MpPoint Xn   = apply_power(ms, X0, tr.depth());
    const mpcomplex lx = log_bottcher(ms, Xn, tol);
    r.logmag_error     = to_double(r_abs(lx.re - tr.log_x_deep().re));
    r.phase_error      = to_double(r_abs(wrap_phase(mpreal(lx.im - tr.log_x_deep().im))));
    return r;
}

} // namespace henon
