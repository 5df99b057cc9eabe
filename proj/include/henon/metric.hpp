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

// Fubini-Study norms of disc derivatives and the bound checks built on them.
//
// Disc derivatives grow like exp(c d^n), so every norm, ratio and bound below
// is carried as a natural logarithm.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "henon/errors.hpp"
#include "henon/filtration.hpp"
#include "henon/io.hpp"
#include "henon/normal_form.hpp"

namespace henon
{

/// ds = [(|z'|^2 + |w'|^2 + |z w' - z' w|^2) / (1 + |z|^2 + |w|^2)^2]^(1/2).
inline double fs_norm(const Tangent& t)
{
    const Complex z = t.base.z, w = t.base.w, dz = t.dz, dw = t.dw;
    const double num = std::norm(dz) + std::norm(dw) + std::norm(z * dw - dz * w);
    const double den = 1 + std::norm(z) + std::norm(w);
    return std::sqrt(num) / den;
}

/// log of the same norm for MPFR points and tangents of any size.
inline double fs_log_norm(const MpPoint& p, const mpcomplex& dz, const mpcomplex& dw)
{
    const mpreal num = c_norm(dz) + c_norm(dw) + c_norm(p.z * dw - dz * p.w);
    const mpreal den = 1 + c_norm(p.z) + c_norm(p.w);
    return to_double(r_log(num) / 2 - r_log(den));
}

/// 64 boundary points, 8 rays at radii 1/5..4/5, and the centre.
inline std::vector<Complex> theta_grid(int boundary = 64, int rays = 8, int radii = 4)
{
    std::vector<Complex> g;
    g.push_back(0.0);
    for (int k = 0; k < boundary; ++k)
        g.push_back(std::polar(1.0, 2 * std::numbers::pi * k / boundary));
    for (int r = 1; r <= radii; ++r)
        for (int k = 0; k < rays; ++k)
            g.push_back(std::polar(double(r) / (radii + 1), 2 * std::numbers::pi * (k + 0.5) / rays));
    return g;
}

struct DiscSample {
    Complex theta;
    ExtPoint point;                   // phi(theta) at depth 0
    double fs_norm = 0;               // may be inf; see log_fs
    double log_fs = 0;                // log ||phi||_FS at theta
    std::vector<double> level_log_fs; // log ||f^j o phi||_FS, j = 0..n
    std::vector<Region> region_trace; // region of f^j(phi(theta)), j = 0..n
    std::vector<double> level_vertical_log; // log(|z'| / |w'|) at each level
    std::vector<double> level_w_log;  // log |w'| at each level
    std::vector<double> level_den_log; // log(1 + |z|^2 + |w|^2) at each level
};

inline ExtPoint to_ext(const MpPoint& p) { return {ExtComplex::from(p.z), ExtComplex::from(p.w)}; }

inline DiscSample sample_from_chain(const DiscChain& ch, const FiltrationConstants& k)
{
    DiscSample s;
    s.theta = ch.theta;
    s.point = to_ext(ch.points.front());
    for (std::size_t j = 0; j < ch.points.size(); ++j) {
        const auto& p = ch.points[j];
        const auto& t = ch.tangents[j];
        s.level_log_fs.push_back(fs_log_norm(p, t.first, t.second));
        s.region_trace.push_back(region_of(p, k));
        s.level_vertical_log.push_back(to_double(r_log(c_abs(t.first)) - r_log(c_abs(t.second))));
        s.level_w_log.push_back(to_double(r_log(c_abs(t.second))));
        s.level_den_log.push_back(to_double(r_log(1 + c_norm(p.z) + c_norm(p.w))));
    }
    s.log_fs  = s.level_log_fs.front();
    s.fs_norm = std::exp(s.log_fs);
    return s;
}

struct DiscProfile {
    std::vector<DiscSample> samples;
    double chain_c_g = 0; // sup |z'| / |w'| over V+ levels
};

/// FS norms along the disc: deep tangent by implicit differentiation, then exact
/// Jacobian products of f^(-1) down the chain.
inline DiscProfile disc_fs_profile(const DiscTracer& tr, const std::vector<Complex>& grid)
{
    DiscProfile prof;
    for (const auto& th : grid) {
        const DiscChain ch = tr.trace(th);
        prof.samples.push_back(sample_from_chain(ch, tr.constants()));
        const auto& s = prof.samples.back();
        for (std::size_t j = 0; j < s.region_trace.size(); ++j)
            if (s.region_trace[j] == Region::VPlus)
                prof.chain_c_g = std::max(prof.chain_c_g, std::exp(s.level_vertical_log[j]));
    }
    return prof;
}

inline bool sample_in_theta_region(const DiscSample& s, int i)
{
    for (std::size_t j = (std::size_t)i; j < s.region_trace.size(); ++j)
        if (s.region_trace[j] != Region::VPlus)
            return false;
    return true;
}

// ---- case bounds ------------------------------------------------------------------

enum class BoundCase { I, II, III };

inline const char* case_name(BoundCase c) { return c == BoundCase::I ? "i" : c == BoundCase::II ? "ii" : "iii"; }

/// Trichotomy for the step f^i -> f^(i-1): theta in Theta_(n,i-1), in Theta_(n,i) only, or outside Theta_(n,i).
inline BoundCase classify_case(const DiscSample& s, int i)
{
    if (sample_in_theta_region(s, i - 1))
        return BoundCase::I;
    if (sample_in_theta_region(s, i))
        return BoundCase::II;
    return BoundCase::III;
}

struct CaseRow {
    int n = 0, i = 0;
    BoundCase kase = BoundCase::I;
    Complex theta;
    double log_ratio = 0; // log of ||f^(i-1) o phi||^2 / ||f^i o phi||^2
    double log_bound = std::numeric_limits<double>::quiet_NaN();
    bool asserted = false;
    bool pass = true;
};

struct SandwichRow {
    int n = 0, i = 0;
    Complex theta;
    double log_fs2 = 0, log_lower = 0, log_upper = 0;
    bool pass = true;
};

struct CaseReport {
    int n = 0;
    std::vector<CaseRow> rows;
    std::vector<SandwichRow> sandwich;
    double c_g = 0;                  // measured verticality used in the formulas
    double log_case_i_inf = std::numeric_limits<double>::infinity();
    double log_C_s_hat = -std::numeric_limits<double>::infinity();
    std::vector<double> log_C_sVplus_hat; // per i, log of sup/inf of fs^2 over Theta_(n,i)
    bool closed_form_asserted = false;
    long failures = 0;
};

/// log of d^2 / (96 (1 + c_g^2) 2^(2d-2) |a|^2) * exp(c (4 - 4/d) d^i).
inline double log_case_i_bound(int d, double abs_a, double c_g, double c, int i)
{
    return 2 * std::log(d) - std::log(96.0) - std::log1p(c_g * c_g) - (2 * d - 2) * std::numbers::ln2 -
           2 * std::log(abs_a) + c * (4 - 4.0 / d) * std::pow(d, i);
}

/// log of 2^4 3^2 41 d^2 |a|^2 c_vplus^(2d) / R^(2d-4).
inline double log_case_iii_bound(int d, double abs_a, double c_vplus, double R)
{
    return std::log(16.0 * 9.0 * 41.0) + 2 * std::log(d) + 2 * std::log(abs_a) + 2 * d * std::log(c_vplus) -
           (2 * d - 4) * std::log(R);
}

/// Per-(theta, i) ratio checks over a traced profile of depth n, 1 <= i <= n, plus the
/// two-sided FS sandwich at every V+ level. Closed-form bounds are asserted only for
/// PaperFaithful constants on single-factor systems; otherwise they are reported.
inline CaseReport case_bound_check(const DiscTracer& tr, const DiscProfile& prof, double c_g)
{
    const auto& k    = tr.constants();
    const auto& sys  = tr.system();
    const int n      = tr.depth();
    const int d      = sys.degree();
    const double aa  = std::abs(sys.jacobian_constant());
    const double c   = tr.leaf().c;
    CaseReport rep;
    rep.n                    = n;
    rep.c_g                  = c_g;
    rep.closed_form_asserted = k.mode == ConstantsMode::PaperFaithful && sys.size() == 1;
    const double tol         = 1e-9; // slack in log space for rounding on equality cases
    std::vector<CaseRow> crossing;
    for (int i = 1; i <= n; ++i) {
        for (const auto& s : prof.samples) {
            CaseRow row;
            row.n         = n;
            row.i         = i;
            row.theta     = s.theta;
            row.kase      = classify_case(s, i);
            row.log_ratio = 2 * (s.level_log_fs[i - 1] - s.level_log_fs[i]);
            if (row.kase == BoundCase::I) {
                row.log_bound = log_case_i_bound(d, aa, c_g, c, i);
                rep.log_case_i_inf = std::min(rep.log_case_i_inf, row.log_ratio);
                row.asserted  = true;
                row.pass      = row.log_ratio > 0;
                if (rep.closed_form_asserted)
                    row.pass = row.pass && row.log_ratio >= row.log_bound - tol;
            }
            else if (row.kase == BoundCase::III) {
                row.log_bound = log_case_iii_bound(d, aa, k.c_vplus, k.R);
                row.asserted  = rep.closed_form_asserted;
                row.pass      = !row.asserted || row.log_ratio <= row.log_bound + tol;
            }
            if (!row.pass)
                ++rep.failures;
            rep.rows.push_back(row);
            if (row.kase == BoundCase::II)
                crossing.push_back(row);
        }
    }
    for (const auto& row : crossing)
        rep.log_C_s_hat = std::max(rep.log_C_s_hat, row.log_ratio - rep.log_case_i_inf);
    for (int i = 0; i <= n; ++i) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& s : prof.samples) {
            if (!sample_in_theta_region(s, i))
                continue;
            const double fs2 = 2 * s.level_log_fs[i];
            lo               = std::min(lo, fs2);
            hi               = std::max(hi, fs2);
            SandwichRow sw;
            sw.n         = n;
            sw.i         = i;
            sw.theta     = s.theta;
            sw.log_fs2   = fs2;
            sw.log_lower = 2 * s.level_w_log[i] - std::log(4.0) - s.level_den_log[i];
            sw.log_upper = std::log(2.0) + std::log1p(c_g * c_g) + 2 * s.level_w_log[i] - s.level_den_log[i];
            sw.pass      = sw.log_lower <= fs2 + tol && fs2 <= sw.log_upper + tol;
            if (!sw.pass)
                ++rep.failures;
            rep.sandwich.push_back(sw);
        }
        rep.log_C_sVplus_hat.push_back(hi >= lo ? hi - lo : std::numeric_limits<double>::quiet_NaN());
    }
    return rep;
}

struct BrodyReport {
    std::vector<int> n_values;
    std::vector<double> log_base_norms; // log ||phi_(s,n)||_(FS,0)
    std::vector<double> log_sup_norms;  // log sup over the grid
    std::vector<double> log_ratios;     // log_sup - log_base
    std::vector<double> log_kn_base;    // log ||k_n||_(FS,0), zero by construction
    std::vector<double> log_kn_sup;     // log sup of ||k_n||_FS over |theta| <= R_n / 2
    std::vector<int> depths_bits;
    std::vector<CaseReport> case_reports;
    double c = 0;
    double c_g = 0;
    double deep_c_g = 0;
    double log_M_s_hat = 0;
    double log_C_s_hat = -std::numeric_limits<double>::infinity();
    double log_C_sVplus_hat = 0;
    ConstantsMode mode = ConstantsMode::Relaxed;
    long failures = 0;
};

/// Discs of depth n in [nmin, nmax] through the same base point, their FS profiles, and the case checks.
inline BrodyReport brody_ratio_sequence(const HenonSystem& sys, const FiltrationConstants& k, const LeafParam& L0,
                                        int nmin, int nmax, const std::vector<Complex>& grid,
                                        const TracerOptions& opt = {})
{
    if (nmin < 1 || nmax < nmin)
        throw std::invalid_argument("brody_ratio_sequence: need 1 <= nmin <= nmax");
    BrodyReport rep;
    rep.c    = L0.c;
    rep.mode = k.mode;
    std::vector<DiscProfile> profiles;
    std::vector<DiscTracer> tracers;
    for (int n = nmin; n <= nmax; ++n) {
        LeafParam L = L0;
        L.depth     = n;
        tracers.emplace_back(sys, k, L, opt);
        profiles.push_back(disc_fs_profile(tracers.back(), grid));
        rep.c_g = std::max(rep.c_g, profiles.back().chain_c_g);
        // Deep-zone slope at a few boundary points, by differences along theta.
        std::vector<Complex> probe;
        for (int j = 0; j < 4; ++j)
            probe.push_back(std::polar(1.0, std::numbers::pi * j / 2));
        rep.deep_c_g = std::max(rep.deep_c_g, verticality_slope(tracers.back(), probe));
    }
    for (std::size_t idx = 0; idx < profiles.size(); ++idx) {
        const auto& prof = profiles[idx];
        const int n      = nmin + (int)idx;
        double base = std::numeric_limits<double>::quiet_NaN(), sup = -std::numeric_limits<double>::infinity();
        double ksup = -std::numeric_limits<double>::infinity();
        for (const auto& s : prof.samples) {
            if (s.theta == 0.0)
                base = s.log_fs;
            sup = std::max(sup, s.log_fs);
        }
        for (const auto& s : prof.samples)
            if (std::abs(s.theta) <= 0.5 + 1e-12)
                ksup = std::max(ksup, s.log_fs - base);
        rep.n_values.push_back(n);
        rep.log_base_norms.push_back(base);
        rep.log_sup_norms.push_back(sup);
        rep.log_ratios.push_back(sup - base);
        rep.log_kn_base.push_back(base - base);
        rep.log_kn_sup.push_back(ksup);
        rep.depths_bits.push_back((int)tracers[idx].bits());
        rep.case_reports.push_back(case_bound_check(tracers[idx], prof, std::max(rep.c_g, rep.deep_c_g)));
        rep.failures += rep.case_reports.back().failures;
        rep.log_C_s_hat = std::max(rep.log_C_s_hat, rep.case_reports.back().log_C_s_hat);
        for (double v : rep.case_reports.back().log_C_sVplus_hat)
            if (!std::isnan(v))
                rep.log_C_sVplus_hat = std::max(rep.log_C_sVplus_hat, v);
    }
    rep.log_M_s_hat = *std::max_element(rep.log_ratios.begin(), rep.log_ratios.end());
    return rep;
}

inline void require_bounds(const BrodyReport& rep)
{
    for (const auto& cr : rep.case_reports) {
        for (const auto& row : cr.rows)
            if (!row.pass) {
                std::ostringstream os;
                os << "case " << case_name(row.kase) << " bound violated at theta=" << row.theta << " i=" << row.i
                   << " n=" << row.n << ": log ratio " << row.log_ratio << ", log bound " << row.log_bound;
                throw BoundViolation(os.str());
            }
        for (const auto& sw : cr.sandwich)
            if (!sw.pass) {
                std::ostringstream os;
                os << "FS sandwich violated at theta=" << sw.theta << " i=" << sw.i << " n=" << sw.n;
                throw BoundViolation(os.str());
            }
    }
}

inline nlohmann::json to_json(const BrodyReport& r)
{
    nlohmann::json cases = nlohmann::json::array();
    for (const auto& cr : r.case_reports) {
        long ci = 0, cii = 0, ciii = 0;
        for (const auto& row : cr.rows)
            (row.kase == BoundCase::I ? ci : row.kase == BoundCase::II ? cii : ciii)++;
        nlohmann::json vplus = nlohmann::json::array();
        for (double v : cr.log_C_sVplus_hat)
            vplus.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(format_from_log(v)));
        cases.push_back({{"n", cr.n},
                         {"case_i", ci},
                         {"case_ii", cii},
                         {"case_iii", ciii},
                         {"closed_form_asserted", cr.closed_form_asserted},
                         {"case_i_inf", format_from_log(cr.log_case_i_inf)},
                         {"C_s_hat", format_from_log(cr.log_C_s_hat)},
                         {"C_sVplus_hat", vplus},
                         {"sandwich_points", cr.sandwich.size()},
                         {"failures", cr.failures}});
    }
    auto fl = [](const std::vector<double>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (double x : v)
            a.push_back(format_from_log(x));
        return a;
    };
    return {{"n_values", r.n_values},
            {"base_norms", fl(r.log_base_norms)},
            {"sup_norms", fl(r.log_sup_norms)},
            {"ratios", fl(r.log_ratios)},
            {"log_base_norms", r.log_base_norms},
            {"log_ratios", r.log_ratios},
            {"kn_base_norms", fl(r.log_kn_base)},
            {"kn_sup_half_disc", fl(r.log_kn_sup)},
            {"precision_bits", r.depths_bits},
            {"c", r.c},
            {"c_g", r.c_g},
            {"deep_zone_slope", r.deep_c_g},
            {"M_s_hat", format_from_log(r.log_M_s_hat)},
            {"C_s_hat", format_from_log(r.log_C_s_hat)},
            {"C_sVplus_hat", format_from_log(r.log_C_sVplus_hat)},
            {"mode", mode_name(r.mode)},
            {"failures", r.failures},
            {"cases", cases}};
}

inline std::string case_table_csv(const BrodyReport& r)
{
    std::ostringstream os;
    os << "n,i,case,theta_re,theta_im,ratio,bound,pass\n";
    for (const auto& cr : r.case_reports)
        for (const auto& row : cr.rows)
            os << row.n << ',' << row.i << ',' << case_name(row.kase) << ',' << fmt_double(row.theta.real()) << ','
               << fmt_double(row.theta.imag()) << ',' << format_from_log(row.log_ratio) << ','
               << (std::isnan(row.log_bound) ? std::string("") : format_from_log(row.log_bound)) << ','
               << (row.pass ? "true" : "false") << '\n';
    return os.str();
}

// ---- disc geometry checks -------------------------------------------------------------

inline mpreal relative_gap(const MpPoint& a, const MpPoint& b)
{
    const mpreal dz = c_abs(a.z - b.z) / std::max(mpreal(1), c_abs(a.z));
    const mpreal dw = c_abs(a.w - b.w) / std::max(mpreal(1), c_abs(a.w));
    return std::max(dz, dw);
}

/// Largest relative gap between the Jacobian-propagated tangent at each level and a
/// central difference of the traced chain. The parameter step at level j is
/// rel_step * max(1, |P_j|) / |T_j|, so that the point itself moves by a relative
/// rel_step; the chains are recomputed with enough bits to resolve that step.
inline double chain_rule_fd_error(const DiscTracer& tr, const Complex& theta, double rel_step = 1e-6,
                                  bool all_levels = true)
{
    const DiscChain ch = tr.trace(theta);
    const int n        = tr.depth();
    double err         = 0;
    for (int j = 0; j <= n; ++j) {
        if (!all_levels && j != 0 && j != n)
            continue;
        precision_scope outer(tr.bits());
        const auto& P      = ch.points[j];
        const auto& t      = ch.tangents[j];
        const mpreal tnorm = std::max(c_abs(t.first), c_abs(t.second));
        const mpreal pnorm = std::max({mpreal(1), c_abs(P.z), c_abs(P.w)});
        const double shrink = std::max(0.0, to_double(r_log(tnorm) - r_log(pnorm)));
        const unsigned bits = tr.bits() + (unsigned)std::ceil(shrink / std::numbers::ln2) + 64;
        precision_scope scope(bits);
        const mpreal h      = mpreal(rel_step) * at_default_precision(pnorm) / at_default_precision(tnorm);
        const mpcomplex th  = from_std<mpcomplex>(theta);
        const DiscChain hi  = tr.trace_mp(th + mpcomplex(h), bits);
        const DiscChain lo  = tr.trace_mp(th - mpcomplex(h), bits);
        const mpcomplex two_h(2 * h);
        const mpcomplex fz = (hi.points[j].z - lo.points[j].z) / two_h;
        const mpcomplex fw = (hi.points[j].w - lo.points[j].w) / two_h;
        const mpreal e     = std::max(c_abs(fz - t.first), c_abs(fw - t.second)) / tnorm;
        err                = std::max(err, to_double(e));
    }
    return err;
}

struct NestingResult {
    double max_gap = 0;      // relative gap at depth 0
    double max_theta = 0;    // largest |theta'| in the deeper disc
    long samples = 0;
};

/// Phi_(s,n) inside Phi_(s,n+1): each deep point of the depth-n disc is pushed once,
/// located in the depth-(n+1) disc by its w-displacement, re-projected there, and
/// both are compared at depth 0.
inline NestingResult nesting_check(const DiscTracer& tn, const DiscTracer& tn1, const std::vector<Complex>& grid)
{
    if (tn1.depth() != tn.depth() + 1)
        throw std::invalid_argument("nesting_check: depths must differ by one");
    NestingResult res;
    const unsigned bits = std::max(tn.bits(), tn1.bits());
    for (const auto& th : grid) {
        const DiscChain a = tn.trace_at(th, bits);
        precision_scope scope(bits);
        const MpPoint up   = apply_forward(tn1.mp_system(), a.points.back());
        const mpcomplex tp = (up.w - tn1.deep_base().w) / mpcomplex(tn1.rho());
        const Complex theta1 = to_std(tp);
        res.max_theta        = std::max(res.max_theta, std::abs(theta1));
        if (std::abs(theta1) > 1)
            throw CheckFailure("nesting_check: pushed disc leaves the deeper disc");
        const DiscChain b = tn1.trace_at(theta1, bits);
        res.max_gap       = std::max(res.max_gap, to_double(relative_gap(a.points.front(), b.points.front())));
        ++res.samples;
    }
    return res;
}

struct InjectivityResult {
    double min_separation = std::numeric_limits<double>::infinity(); // max-coordinate distance at depth 0
    long points = 0;
    long pairs = 0;
};

/// Depth-0 images of an m x m lattice of [-1,1]^2 inside the closed unit disc, pairwise.
inline InjectivityResult injectivity_check(const DiscTracer& tr, int m = 32)
{
    std::vector<MpPoint> pts;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const Complex th(-1 + 2.0 * i / (m - 1), -1 + 2.0 * j / (m - 1));
            if (std::abs(th) <= 1)
                pts.push_back(tr.trace(th).points.front());
        }
    precision_scope scope(tr.bits());
    InjectivityResult r;
    r.points = (long)pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const mpreal dist = std::max(c_abs(pts[i].z - pts[j].z), c_abs(pts[i].w - pts[j].w));
            r.min_separation  = std::min(r.min_separation, to_double(dist));
            ++r.pairs;
        }
    return r;
}

} // namespace henon
