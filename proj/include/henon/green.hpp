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

// Green functions g+ and g-, K/U classification, the Bottcher-type
// coordinate on V+, and level-set seeding.
//
// Once an orbit is far out (|z| > escape_radius, |w| <= |z|) the iteration
// continues in the chart zeta = 1/z, r = w/z. A factor step becomes
//   u = q(zeta) - a r zeta^(d-1),  zeta' = zeta^d / u,  r' = zeta^(d-1) / u,
// with q(zeta) = c_d + c_(d-1) zeta + ... + c_0 zeta^d, and z' = z^d u. The
// Green value telescopes to log|z_m| / D_m + sum_j log|u_j| / D_(j+1), where
// D_j is the product of the degrees of the first j factor steps. Nothing in
// the chart overflows.

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>

#include "henon/errors.hpp"
#include "henon/ext_complex.hpp"
#include "henon/map.hpp"

namespace henon
{

struct GreenParams {
    double escape_radius = 1e8;
    int max_iter         = 400;
    double tol           = 1e-10;
};

enum class GreenStatus { Escaped, BoundedWithinBudget };

struct GreenValue {
    double value = 0.0;
    int iterations = 0;
    GreenStatus status = GreenStatus::BoundedWithinBudget;
    bool refined = false;
};

namespace detail
{

/// Factors with arbitrary (possibly non-monic) leading coefficient, used for
/// the swapped inverse system behind g-. Never exposed as a HenonSystem.
template <class C>
basic_system<C> swapped_inverse_system(const basic_system<C>& sys)
{
    basic_system<C> out;
    for (auto it = sys.factors.rbegin(); it != sys.factors.rend(); ++it) {
        basic_factor<C> g;
        const C inv = C(1) / it->a;
        for (const auto& c : it->coeffs)
            g.coeffs.push_back(c * inv);
        g.a = inv;
        out.factors.push_back(std::move(g));
    }
    return out;
}

/// Escape-chart multiplier u = q(zeta) - a r zeta^(d-1).
template <class C>
C chart_multiplier(const basic_factor<C>& f, const C& zeta, const C& r)
{
    const int d = f.degree();
    C q         = f.coeffs[0];
    for (int k = 1; k <= d; ++k)
        q = q * zeta + f.coeffs[k];
    return q - f.a * r * c_pow(zeta, d - 1);
}

template <class C>
bool escaped(const basic_point<C>& p, double radius)
{
    const auto az = c_abs(p.z);
    return az > radius && c_abs(p.w) <= az;
}

template <class C>
struct ChartResult {
    real_of<C> log_abs_sum;  // sum_j log|u_j| / D_(j+1), relative to D_m = 1
    C log_sum;               // sum_j log(u_j) / D_(j+1) with principal logs
    int steps = 0;
    real_of<C> max_u_dev = 0; // max |u_j / c_d(j) - 1|
};

/// Runs the chart recursion from (zeta, r); factor_index is the next factor to apply, D starts at 1.
template <class C>
ChartResult<C> run_chart(const basic_system<C>& sys, std::size_t factor_index, C zeta, C r, const real_of<C>& tol,
                         bool want_log, int max_steps = 400)
{
    using R = real_of<C>;
    ChartResult<C> res{R(0), C(0), 0, R(0)};
    R D(1);
    int min_deg = 1 << 30;
    for (const auto& f : sys.factors)
        min_deg = std::min(min_deg, f.degree());
    int small_run = 0;
    for (int step = 0; step < max_steps; ++step) {
        const auto& f = sys.factors[factor_index];
        const int d   = f.degree();
        const C u     = chart_multiplier(f, zeta, r);
        if (c_is_zero(u))
            throw NonConvergent("escape chart multiplier vanished");
        D *= d;
        const R term = c_log_abs(u) / D;
        res.log_abs_sum += term;
        if (want_log) {
            res.log_sum = res.log_sum + c_log(u) / D;
            const R dev = c_abs(u / f.leading() - C(1));
            if (dev > res.max_u_dev)
                res.max_u_dev = dev;
            if (dev >= R(0.5))
                throw BranchAmbiguity("per-step multiplier too far from 1; iterate forward first");
        }
        const C zd1 = c_pow(zeta, d - 1);
        const C zeta_next = zd1 * zeta / u;
        r           = zd1 / u;
        zeta        = zeta_next;
        res.steps   = step + 1;
        factor_index = (factor_index + 1) % sys.size();
        // The remaining terms are bounded by a geometric tail with ratio 1/min_deg.
        if (r_abs(term) / R(min_deg - 1) < tol * R(0.1)) {
            if (++small_run >= (int)sys.size())
                return res;
        }
        else {
            small_run = 0;
        }
        if (c_abs(zeta) > R(0.5))
            throw NonConvergent("orbit left the escape chart; correction terms are not decaying");
    }
    throw NonConvergent("telescoping correction failed to converge");
}

/// Forward orbit until escape, then the chart. Returns the value in the scalar's
/// own precision alongside the metadata; tol is absolute.
template <class C>
std::pair<real_of<C>, GreenValue> green_forward(const basic_system<C>& sys, basic_point<C> p, const real_of<C>& tol,
                                                double escape_radius, int max_iter)
{
    using R = real_of<C>;
    GreenValue gv;
    R D(1);
    std::size_t fi = 0;
    const int n_factors = (int)sys.size();
    for (int it = 0; it <= max_iter * n_factors; ++it) {
        if (escaped(p, escape_radius)) {
            const C zeta  = C(1) / p.z;
            const C r     = p.w / p.z;
            const auto ch = run_chart(sys, fi, zeta, r, R(tol * D), false);
            const R val   = (c_log_abs(p.z) + ch.log_abs_sum) / D;
            gv.value      = to_double(val);
            gv.iterations = it / n_factors + ch.steps;
            gv.status     = GreenStatus::Escaped;
            gv.refined    = true;
            return {val, gv};
        }
        if (it == max_iter * n_factors)
            break;
        p = factor_forward(sys.factors[fi], p);
        D *= sys.factors[fi].degree();
        fi = (fi + 1) % sys.size();
        if (!r_isfinite(c_real(p.z)) || !r_isfinite(c_imag(p.z)))
            throw NonConvergent("orbit overflowed before reaching the escape radius");
    }
    gv.iterations = max_iter;
    return {R(0), gv};
}

template <class C>
GreenValue green_forward(const basic_system<C>& sys, const basic_point<C>& p, const GreenParams& params)
{
    return green_forward(sys, p, real_of<C>(params.tol), params.escape_radius, params.max_iter).second;
}

} // namespace detail

template <class C>
GreenValue green_plus(const basic_system<C>& sys, const basic_point<C>& p, const GreenParams& params = {})
{
    return detail::green_forward(sys, p, params);
}

template <class C>
GreenValue green_minus(const basic_system<C>& sys, const basic_point<C>& p, const GreenParams& params = {})
{
    return detail::green_forward(detail::swapped_inverse_system(sys), basic_point<C>{p.w, p.z}, params);
}

enum class PlusSide { KPlus, UPlus };
enum class MinusSide { KMinus, UMinus };

struct Classification {
    PlusSide plus;
    MinusSide minus;
    bool plus_budget_limited;
    bool minus_budget_limited;
};

template <class C>
Classification classify(const basic_system<C>& sys, const basic_point<C>& p, const GreenParams& params = {})
{
    const GreenValue gp = green_plus(sys, p, params);
    const GreenValue gm = green_minus(sys, p, params);
    return {gp.status == GreenStatus::Escaped && gp.value > 0 ? PlusSide::UPlus : PlusSide::KPlus,
            gm.status == GreenStatus::Escaped && gm.value > 0 ? MinusSide::UMinus : MinusSide::KMinus,
            gp.status == GreenStatus::BoundedWithinBudget, gm.status == GreenStatus::BoundedWithinBudget};
}

/// log x for the first normal coordinate: -(log z + sum_j log(u_j) / D_(j+1)),
/// principal logarithms, not reduced mod 2 pi i. Requires the point to sit in V+.
template <class C>
C log_bottcher(const basic_system<C>& sys, const basic_point<C>& p, const real_of<C>& tol)
{
    if (c_is_zero(p.z))
        throw BranchAmbiguity("z = 0 is outside V+");
    const C zeta  = C(1) / p.z;
    const C r     = p.w / p.z;
    const auto ch = detail::run_chart(sys, 0, zeta, r, tol, true);
    return -(c_log(p.z) + ch.log_sum);
}

template <class C>
C log_bottcher(const basic_system<C>& sys, const basic_point<C>& p, const GreenParams& params = {})
{
    return log_bottcher(sys, p, real_of<C>(params.tol));
}

/// g+ carried at the scalar's precision (for MPFR points beyond the double range).
template <class C>
real_of<C> green_plus_precise(const basic_system<C>& sys, const basic_point<C>& p, const real_of<C>& tol,
                              int max_iter = 400)
{
    auto [v, gv] = detail::green_forward(sys, p, tol, 1e8, max_iter);
    if (gv.status != GreenStatus::Escaped)
        throw NonConvergent("orbit did not escape within the iteration budget");
    return v;
}

/// x = exp(log_bottcher) as (log|x|, phase); log|x| = -g+.
template <class C>
ExtComplex bottcher_x(const basic_system<C>& sys, const basic_point<C>& p, const GreenParams& params = {})
{
    const C lx = log_bottcher(sys, p, params);
    return {to_double(c_real(lx)), to_double(wrap_phase(c_imag(lx)))};
}

/// Point t * dir on the ray with g+ = c. The search runs over log t.
inline AffinePoint level_set_seed(const HenonSystem& sys, double c, const AffinePoint& dir,
                                  const GreenParams& params = {})
{
    if (!(c > 0))
        throw std::invalid_argument("level_set_seed: c must be positive");
    const double dn = std::max(std::abs(dir.z), std::abs(dir.w));
    if (dn == 0)
        throw NoBracket("zero ray direction");
    auto at = [&](double lt) {
        const double t = std::exp(lt);
        return AffinePoint{dir.z * t, dir.w * t};
    };
    auto h = [&](double lt) { return green_plus(sys, at(lt), params).value - c; };

    double lo = -std::log(dn), hi = lo;
    double hlo = h(lo);
    while (hlo >= 0) {
        lo -= 2.0;
        if (lo < -60.0)
            throw NoBracket("ray does not reach below the level");
        hlo = h(lo);
    }
    double hhi = hlo;
    while (hhi <= 0) {
        hi += 2.0;
        if (hi > 650.0)
            throw NoBracket("ray does not cross the level within search bounds");
        hhi = h(hi);
    }
    lo = std::max(lo, hi - 2.0);
    hlo = h(lo);
    if (hlo >= 0)
        throw NoBracket("g+ is not increasing along the ray");
    // Sampled monotonicity inside the bracket.
    double prev = hlo;
    for (int k = 1; k <= 8; ++k) {
        const double v = h(lo + (hi - lo) * k / 8.0);
        if (v < prev - 1e-12)
            throw NoBracket("g+ is not increasing along the ray");
        prev = v;
    }
    std::uintmax_t max_it = 200;
    const double target   = 1e-9 * std::max(1.0, c);
    auto tol              = [&](double a, double b) { return std::abs(b - a) < 1e-15 * std::max(1.0, std::abs(a)); };
    auto [a, b]           = boost::math::tools::toms748_solve(h, lo, hi, hlo, hhi, tol, max_it);
    const double ha = std::abs(h(a)), hb = std::abs(h(b));
    const double lt = ha <= hb ? a : b;
    if (std::abs(h(lt)) > target)
        throw NoBracket("root refinement did not reach the level tolerance");
    return at(lt);
}

} // namespace henon
