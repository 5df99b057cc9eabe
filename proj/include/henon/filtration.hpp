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

// Filtration V+ / V- / W of C^2 and the constants that define it.
//
//   V+ = { R <= |z|, c_vplus |w| <= |z| }
//   V- = { R <= c_vplus |w|, |z| <= c_vplus |w| }
//   W  = { |z| <= R, c_vplus |w| <= R }

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "henon/errors.hpp"
#include "henon/green.hpp"
#include "henon/map.hpp"

namespace henon
{

enum class ConstantsMode { PaperFaithful, Relaxed };

inline const char* mode_name(ConstantsMode m) { return m == ConstantsMode::PaperFaithful ? "PaperFaithful" : "Relaxed"; }

inline ConstantsMode mode_from_name(const std::string& s)
{
    if (s == "PaperFaithful" || s == "faithful")
        return ConstantsMode::PaperFaithful;
    if (s == "Relaxed" || s == "relaxed")
        return ConstantsMode::Relaxed;
    throw std::invalid_argument("unknown mode '" + s + "' (use PaperFaithful or Relaxed)");
}

struct FiltrationConstants {
    double R       = 2.0;
    double c_vplus = 5.0;
    double c_phi   = 0.25;
    double r_phi   = 1.01;
    double c_g     = 0.1;
    ConstantsMode mode = ConstantsMode::Relaxed;
    bool r_phi_nominal = true;
    // Set when the lower derivative bound |p'(z)| >= d|z|^(d-1)/2 + |z| cannot hold
    // for large |z| (quadratic factors with a linear term).
    bool derivative_bound_unsatisfiable = false;

    void validate() const
    {
        if (!(R > 1))
            throw InvalidMap("filtration constants need R > 1");
        if (!(c_vplus > 1 / c_phi))
            throw InvalidMap("filtration constants need c_vplus > 1/c_phi");
        if (mode == ConstantsMode::PaperFaithful && !(c_phi < r_phi / 4 && c_phi < 0.01))
            throw InvalidMap("PaperFaithful constants need c_phi < r_phi/4 and c_phi < 1/100");
    }
};

inline nlohmann::json to_json(const FiltrationConstants& k)
{
    return {{"R", k.R},
            {"c_vplus", k.c_vplus},
            {"c_phi", k.c_phi},
            {"r_phi", k.r_phi},
            {"r_phi_nominal", k.r_phi_nominal},
            {"c_g", k.c_g},
            {"mode", mode_name(k.mode)},
            {"derivative_bound_unsatisfiable", k.derivative_bound_unsatisfiable}};
}

// ---- regions -------------------------------------------------------------------

enum class Region { VPlus, VMinus, W, Ambiguous };

inline const char* region_name(Region r)
{
    switch (r) {
    case Region::VPlus:
        return "VPlus";
    case Region::VMinus:
        return "VMinus";
    case Region::W:
        return "W";
    default:
        return "Ambiguous";
    }
}

template <class C>
bool in_vplus(const basic_point<C>& p, const FiltrationConstants& k)
{
    using R       = real_of<C>;
    const R az    = c_abs(p.z);
    const R aw    = c_abs(p.w);
    return R(k.R) <= az && R(k.c_vplus) * aw <= az;
}

template <class C>
bool in_vminus(const basic_point<C>& p, const FiltrationConstants& k)
{
    using R       = real_of<C>;
    const R az    = c_abs(p.z);
    const R aw    = c_abs(p.w);
    return R(k.R) <= R(k.c_vplus) * aw && az <= R(k.c_vplus) * aw;
}

template <class C>
bool in_w(const basic_point<C>& p, const FiltrationConstants& k)
{
    using R       = real_of<C>;
    const R az    = c_abs(p.z);
    const R aw    = c_abs(p.w);
    return az <= R(k.R) && R(k.c_vplus) * aw <= R(k.R);
}

/// Membership with boundary priority V+ > V- > W.
template <class C>
Region region_of(const basic_point<C>& p, const FiltrationConstants& k)
{
    if (in_vplus(p, k))
        return Region::VPlus;
    if (in_vminus(p, k))
        return Region::VMinus;
    if (in_w(p, k))
        return Region::W;
    return Region::Ambiguous;
}

inline Region region_of(const ExtPoint& p, const FiltrationConstants& k)
{
    const double lz = p.z.log_mag, lw = p.w.log_mag;
    const double lR = std::log(k.R), lc = std::log(k.c_vplus);
    if (lR <= lz && lc + lw <= lz)
        return Region::VPlus;
    if (lR <= lc + lw && lz <= lc + lw)
        return Region::VMinus;
    if (lz <= lR && lc + lw <= lR)
        return Region::W;
    return Region::Ambiguous;
}

// ---- constant selection ------------------------------------------------------------

namespace detail
{

inline double next_power_of_two(double x)
{
    double r = 2.0;
    while (r < x)
        r *= 2.0;
    return r;
}

/// Smallest R (before rounding to a power of two) for which the closed-form
/// sufficient conditions hold for one factor.
inline double factor_radius_bound(const HenonFactor& f, double C, double c_g, bool& derivative_unsat)
{
    const int d = f.degree();
    double A = 0, B = 0;
    for (int k = 0; k < d; ++k) {
        A += std::abs(f.coeffs[k]);
        B += k * std::abs(f.coeffs[k]);
    }
    const double abs_a = std::abs(f.a);
    // Growth of |p| on |z| >= R/C: |p(z)| >= |z|^d - A|z|^(d-1) and |z|^d/2 >= (A + C)|z|^(d-1).
    double rho = std::max(1.0, 2 * (A + C));
    // Growth of |p'| on |z| >= R/C.
    if (d >= 3) {
        rho = std::max(rho, 2 * (B + 1) / d);
    }
    else {
        rho = std::max(rho, B); // upper bound |2z + c_1| <= 3|z|
        if (std::abs(f.coeffs[1]) != 0)
            derivative_unsat = true;
    }
    double R = C * rho;
    // Size condition on R.
    R = std::max(R, std::pow(2.0, d + 5) * 9.0 * std::sqrt(41.0) * (1 + abs_a) * (1 + abs_a) * std::pow(C, d) *
                        std::sqrt(1 + 0.25 * c_g * c_g));
    // Trichotomy: |z| > R forces |p(z) - aw| > C|z| when |z| >= C|w|;
    // |w| > R/C forces |p(w) - z| > |a||w| when |z| <= C|w|.
    R = std::max(R, std::pow(2 * abs_a / C, 1.0 / (d - 1)));
    R = std::max(R, C * std::pow(2 * abs_a, 1.0 / (d - 1)));
    return std::max(R, 1.0 + 1e-12);
}

} // namespace detail

struct ConstantsOptions {
    long relaxed_samples    = 100000;
    std::uint64_t seed      = 1;
    double c_g              = 0.1;
    double max_relaxed_R    = 1e12;
};

struct FiltrationWitness {
    std::string kind; // "forward", "backward", "escape"
    AffinePoint point;
    AffinePoint image;
};

struct FiltrationReport {
    long violations = 0;
    std::vector<FiltrationWitness> witnesses;
    long samples = 0;
    ConstantsMode mode = ConstantsMode::Relaxed;
    long vplus_checked = 0, vminus_checked = 0, uplus_checked = 0;
};

inline nlohmann::json to_json(const FiltrationReport& r)
{
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& w : r.witnesses)
        ws.push_back({{"kind", w.kind},
                      {"point", {complex_to_json(w.point.z), complex_to_json(w.point.w)}},
                      {"image", {complex_to_json(w.image.z), complex_to_json(w.image.w)}}});
    return {{"violations", r.violations},
            {"witnesses", ws},
            {"samples", r.samples},
            {"mode", mode_name(r.mode)},
            {"vplus_checked", r.vplus_checked},
            {"vminus_checked", r.vminus_checked},
            {"uplus_checked", r.uplus_checked}};
}

/// Samples V+ (log-uniform |z|, a quarter exactly on |z| = R), V- (mirror) and escaping
/// points of the box |z|, |w| <= 2R, and checks f(V+) in V+, f^-1(V-) in V-, and that
/// escaping orbits reach V+.
inline FiltrationReport verify_filtration(const HenonSystem& sys, const FiltrationConstants& k, long n_samples,
                                          std::uint64_t seed = 1, int max_iter = 400, std::size_t max_witnesses = 10)
{
    if (n_samples < 1)
        throw std::invalid_argument("verify_filtration: n_samples must be at least 1");
    FiltrationReport rep;
    rep.mode = k.mode;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double two_pi = 2 * std::numbers::pi;
    auto add = [&](const char* kind, const AffinePoint& p, const AffinePoint& q) {
        ++rep.violations;
        if (rep.witnesses.size() < max_witnesses)
            rep.witnesses.push_back({kind, p, q});
    };
    auto sample_cone = [&](long i, double& big, double& small) {
        // big in [R, R*1e8] log-uniform (exactly R for a quarter), small = big/C * v.
        const bool boundary = (i % 4) == 0;
        big                 = boundary ? k.R : k.R * std::exp(uni(rng) * std::log(1e8));
        const double v      = (i % 4) == 1 ? 1.0 : std::sqrt(uni(rng));
        small               = big / k.c_vplus * v;
    };
    for (long i = 0; i < n_samples; ++i) {
        double big, small;
        sample_cone(i, big, small);
        const AffinePoint p{std::polar(big, two_pi * uni(rng)), std::polar(small, two_pi * uni(rng))};
        const AffinePoint q = apply_forward(sys, p);
        if (!in_vplus(q, k))
            add("forward", p, q);
        ++rep.vplus_checked;
    }
    for (long i = 0; i < n_samples; ++i) {
        double big, small;
        sample_cone(i, big, small);
        // Mirror cone: c_vplus|w| = big, |z| = c_vplus * small <= c_vplus|w|.
        const AffinePoint p{std::polar(small * k.c_vplus, two_pi * uni(rng)),
                            std::polar(big / k.c_vplus, two_pi * uni(rng))};
        const AffinePoint q = apply_inverse(sys, p);
        if (!in_vminus(q, k))
            add("backward", p, q);
        ++rep.vminus_checked;
    }
    const long n_escape = std::max(1L, n_samples / 10);
    GreenParams gp;
    gp.max_iter = max_iter;
    long found = 0, tries = 0;
    while (found < n_escape && tries < 100 * n_escape) {
        ++tries;
        const AffinePoint p{std::polar(2 * k.R * std::sqrt(uni(rng)), two_pi * uni(rng)),
                            std::polar(2 * k.R * std::sqrt(uni(rng)), two_pi * uni(rng))};
        const auto g = green_plus(sys, p, gp);
        if (g.status != GreenStatus::Escaped || !(g.value > 0))
            continue;
        ++found;
        AffinePoint q = p;
        bool reached  = in_vplus(q, k);
        for (int it = 0; it < max_iter && !reached; ++it) {
            q = apply_forward(sys, q);
            if (!std::isfinite(std::abs(q.z)) || !std::isfinite(std::abs(q.w)))
                break;
            reached = in_vplus(q, k);
        }
        if (!reached)
            add("escape", p, q);
    }
    rep.uplus_checked = found;
    rep.samples       = rep.vplus_checked + rep.vminus_checked + rep.uplus_checked;
    return rep;
}

inline void require_filtration(const FiltrationReport& r)
{
    if (r.violations == 0)
        return;
    const auto& w = r.witnesses.front();
    std::ostringstream os;
    os << r.violations << " filtration violation(s); first (" << w.kind << ") at (" << w.point.z << ", " << w.point.w
       << ")";
    throw FiltrationViolation(os.str());
}

/// PaperFaithful radius of one factor with the given c_vplus and c_g.
inline double paper_faithful_radius(const HenonFactor& f, double c_vplus, double c_g, bool* derivative_unsat = nullptr)
{
    bool unsat     = false;
    const double R = detail::next_power_of_two(detail::factor_radius_bound(f, c_vplus, c_g, unsat));
    if (derivative_unsat)
        *derivative_unsat = unsat;
    return R;
}

inline FiltrationConstants choose_constants(const HenonSystem& sys, ConstantsMode mode, const ConstantsOptions& opt = {})
{
    FiltrationConstants k;
    k.mode = mode;
    k.c_g  = opt.c_g;
    if (mode == ConstantsMode::PaperFaithful) {
        k.c_phi   = 1.0 / 128;
        k.c_vplus = 1.25 / k.c_phi;
        k.r_phi   = 4.04 * k.c_phi;
        k.R       = 2.0;
        for (const auto& f : sys.factors) {
            bool unsat = false;
            k.R        = std::max(k.R, paper_faithful_radius(f, k.c_vplus, k.c_g, &unsat));
            k.derivative_bound_unsatisfiable |= unsat;
        }
    }
    else {
        k.c_phi   = 0.25;
        k.c_vplus = 5.0;
        k.r_phi   = 4.04 * k.c_phi;
        for (k.R = 2.0; k.R <= opt.max_relaxed_R; k.R *= 2.0) {
            if (verify_filtration(sys, k, opt.relaxed_samples, opt.seed).violations == 0)
                break;
        }
        if (k.R > opt.max_relaxed_R)
            throw FiltrationViolation("no relaxed radius up to the search cap passes verification");
    }
    k.validate();
    return k;
}

/// Grid estimate of max g+ over the torus |z| = R, |w| = R / c_vplus (the maximum
/// over W is attained there), optionally pushed forward by a map first.
template <class F>
double max_green_on_w(const HenonSystem& sys, const FiltrationConstants& k, int grid, F&& push,
                      const GreenParams& params = {})
{
    double m = 0;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const AffinePoint p{std::polar(k.R, 2 * std::numbers::pi * i / grid),
                                std::polar(k.R / k.c_vplus, 2 * std::numbers::pi * j / grid)};
            m = std::max(m, green_plus(sys, push(p), params).value);
        }
    return m;
}

/// Smallest admissible level c: above max_W g+ (plus the pushed-forward W maxima for
/// compositions) with a 1.1 safety factor, above log R, and large enough for the
/// disc definition with r taken to be zero.
inline double min_large_c(const HenonSystem& sys, const FiltrationConstants& k, int grid = 100,
                          const GreenParams& params = {})
{
    double sum = max_green_on_w(sys, k, grid, [](const AffinePoint& p) { return p; }, params);
    if (sys.size() > 1) {
        for (std::size_t i = 0; i < sys.size(); ++i) {
            auto push = [&](const AffinePoint& p) {
                AffinePoint q = p;
                for (std::size_t j = i; j < sys.size(); ++j)
                    q = factor_forward(sys.factors[j], q);
                return q;
            };
            sum += max_green_on_w(sys, k, grid, push, params);
        }
    }
    const double inf = std::numeric_limits<double>::infinity();
    double c         = 1.1 * sum;
    c = std::max(c, std::nextafter(std::log(k.R), inf));
    const double abs_a = std::abs(sys.jacobian_constant());
    const double d     = sys.degree();
    c = std::max(c, std::nextafter(std::log(8 * (abs_a * k.c_phi / d + 1) / k.c_phi), inf));
    return c;
}

} // namespace henon
