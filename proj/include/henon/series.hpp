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

// Exact Laurent series over Q(i) and the curve-at-infinity recursion.
//
// A series is known below its truncation order; coefficients from trunc_order on
// are unknown. Exact series (constants, finite polynomials) carry kExact.

#include <algorithm>
#include <climits>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "json.hpp"

#include "henon/errors.hpp"
#include "henon/map.hpp"

namespace henon
{

struct GaussianRational {
    mpq_class re, im;

    GaussianRational() = default;
    GaussianRational(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i))
    {
        re.canonicalize();
        im.canonicalize();
    }
    GaussianRational(long v) : re(v), im(0) {}

    /// Exact value of a double-precision complex number.
    static GaussianRational from_complex(const Complex& z) { return {mpq_class(z.real()), mpq_class(z.imag())}; }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    Complex to_complex() const { return {re.get_d(), im.get_d()}; }
    GaussianRational conj() const { return {re, -im}; }
    mpq_class norm() const { return re * re + im * im; }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b)
    {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b)
    {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b)
    {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b)
    {
        if (b.is_zero())
            throw DivisionByZero("Gaussian rational division by zero");
        const mpq_class n = b.norm();
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }
    GaussianRational& operator+=(const GaussianRational& b) { return *this = *this + b; }
    GaussianRational& operator-=(const GaussianRational& b) { return *this = *this - b; }
    GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) { return a.re == b.re && a.im == b.im; }
};

// [num, den, num, den]; integers that do not fit in 64 bits are written as strings.
inline nlohmann::json mpz_to_json(const mpz_class& v)
{
    if (v.fits_slong_p())
        return v.get_si();
    return v.get_str();
}

inline mpz_class mpz_from_json(const nlohmann::json& j)
{
    if (j.is_string())
        return mpz_class(j.get<std::string>());
    if (j.is_number_integer())
        return mpz_class(std::to_string(j.get<long long>()));
    throw InvalidMap("series coefficient entries must be integers or integer strings");
}

inline nlohmann::json to_json(const GaussianRational& g)
{
    return nlohmann::json::array(
        {mpz_to_json(g.re.get_num()), mpz_to_json(g.re.get_den()), mpz_to_json(g.im.get_num()), mpz_to_json(g.im.get_den())});
}

inline GaussianRational gaussian_from_json(const nlohmann::json& j)
{
    if (!j.is_array() || j.size() != 4)
        throw InvalidMap("series coefficient must be [num, den, num, den]");
    const mpz_class d1 = mpz_from_json(j[1]), d2 = mpz_from_json(j[3]);
    if (d1 == 0 || d2 == 0)
        throw InvalidMap("zero denominator in series coefficient");
    return {mpq_class(mpz_from_json(j[0]), d1), mpq_class(mpz_from_json(j[2]), d2)};
}

// ---- Laurent series ---------------------------------------------------------------

class LaurentSeries
{
public:
    static constexpr int kZero  = INT_MAX;     // valuation of a series with no known nonzero term
    static constexpr int kExact = INT_MAX / 4; // trunc_order of an exactly known series

    LaurentSeries() = default;

    /// Coefficients from `valuation` upward, known below `trunc_order`. Leading zeros are stripped;
    /// coefficients at or beyond trunc_order are dropped.
    LaurentSeries(int valuation, std::vector<GaussianRational> coeffs, int trunc_order)
        : val_(valuation), coeffs_(std::move(coeffs)), trunc_(trunc_order)
    {
        normalize();
    }

    static LaurentSeries constant(const GaussianRational& c) { return {0, {c}, kExact}; }
    static LaurentSeries monomial(int k, const GaussianRational& c = GaussianRational(1)) { return {k, {c}, kExact}; }
    static LaurentSeries zero(int trunc_order = kExact) { return {0, {}, trunc_order}; }

    int valuation() const { return val_; }
    int trunc_order() const { return trunc_; }
    bool is_exact() const { return trunc_ >= kExact; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<GaussianRational>& coeffs() const { return coeffs_; }

    /// Coefficient of theta^k (zero below the valuation and past the stored terms).
    GaussianRational coeff(int k) const
    {
        if (k >= trunc_)
            throw TruncationExhausted("coefficient " + std::to_string(k) + " is beyond the truncation order");
        if (is_zero() || k < val_ || k - val_ >= (int)coeffs_.size())
            return GaussianRational(0);
        return coeffs_[k - val_];
    }

    const GaussianRational& leading() const
    {
        if (is_zero())
            throw TruncationExhausted("series has no known nonzero coefficient");
        return coeffs_.front();
    }

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) { return combine(a, b, false); }
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return combine(a, b, true); }
    friend LaurentSeries operator-(const LaurentSeries& a)
    {
        std::vector<GaussianRational> c;
        for (const auto& x : a.coeffs_)
            c.push_back(-x);
        return {a.val_ == kZero ? 0 : a.val_, std::move(c), a.trunc_};
    }

    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b)
    {
        if (a.is_zero() || b.is_zero()) {
            // Known zero up to the shifted budget of the other factor.
            int t = kExact;
            if (a.is_zero() && !a.is_exact())
                t = std::min(t, b.is_zero() ? a.trunc_ : sat_add(a.trunc_, b.val_));
            if (b.is_zero() && !b.is_exact())
                t = std::min(t, a.is_zero() ? b.trunc_ : sat_add(b.trunc_, a.val_));
            return zero(t);
        }
        const int v = a.val_ + b.val_;
        int t       = std::min(sat_add(a.trunc_, b.val_), sat_add(b.trunc_, a.val_));
        int last    = v + (int)(a.coeffs_.size() + b.coeffs_.size()) - 2; // highest product term
        if (t <= v)
            throw TruncationExhausted("product has no known coefficients");
        const int top = std::min(t - 1, last);
        std::vector<GaussianRational> c(top - v + 1);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (a.coeffs_[i].is_zero())
                continue;
            for (std::size_t j = 0; j < b.coeffs_.size() && (int)(i + j) <= top - v; ++j)
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return {v, std::move(c), t};
    }

    /// 1 / a, with a known nonzero leading coefficient.
    friend LaurentSeries reciprocal(const LaurentSeries& a)
    {
        if (a.is_zero())
            throw TruncationExhausted("reciprocal of a series with no known nonzero coefficient");
        const int v = -a.val_;
        if (a.coeffs_.size() == 1 && a.is_exact())
            return monomial(v, GaussianRational(1) / a.coeffs_[0]);
        if (a.is_exact())
            throw TruncationExhausted("reciprocal of an exact non-monomial needs a truncation order");
        const int terms = a.trunc_ - a.val_; // relative terms known in a
        const GaussianRational inv0 = GaussianRational(1) / a.coeffs_[0];
        std::vector<GaussianRational> c(terms);
        c[0] = inv0;
        for (int k = 1; k < terms; ++k) {
            GaussianRational s(0);
            for (int j = 1; j <= k && j < (int)a.coeffs_.size(); ++j)
                s += a.coeffs_[j] * c[k - j];
            c[k] = -(s * inv0);
        }
        return {v, std::move(c), v + terms};
    }

    friend LaurentSeries operator/(const LaurentSeries& a, const LaurentSeries& b) { return a * reciprocal(b); }

    /// Lowers the truncation order (never raises it).
    LaurentSeries truncated(int trunc_order) const
    {
        return {val_ == kZero ? 0 : val_, coeffs_, std::min(trunc_, trunc_order)};
    }

    friend bool operator==(const LaurentSeries& a, const LaurentSeries& b)
    {
        return a.val_ == b.val_ && a.trunc_ == b.trunc_ && a.coeffs_ == b.coeffs_;
    }

private:
    static int sat_add(int x, int y)
    {
        if (x >= kExact || y >= kExact)
            return kExact;
        return x + y;
    }

    void normalize()
    {
        if (trunc_ >= kExact)
            trunc_ = kExact;
        if (coeffs_.empty()) {
            val_ = kZero;
            return;
        }
        std::size_t lead = 0;
        while (lead < coeffs_.size() && coeffs_[lead].is_zero())
            ++lead;
        if (lead == coeffs_.size() || val_ + (long long)lead >= trunc_) {
            coeffs_.clear();
            val_ = kZero;
            return;
        }
        val_ += (int)lead;
        coeffs_.erase(coeffs_.begin(), coeffs_.begin() + (long)lead);
        if (!is_exact() && val_ + (long long)coeffs_.size() > trunc_)
            coeffs_.resize(trunc_ - val_);
        while (!coeffs_.empty() && coeffs_.back().is_zero())
            coeffs_.pop_back();
    }

    static LaurentSeries combine(const LaurentSeries& a, const LaurentSeries& b, bool subtract)
    {
        const int t = std::min(a.trunc_, b.trunc_);
        if (a.is_zero() && b.is_zero())
            return zero(t);
        const int v  = std::min(a.val_, b.val_);
        int last     = INT_MIN;
        if (!a.is_zero())
            last = std::max(last, a.val_ + (int)a.coeffs_.size() - 1);
        if (!b.is_zero())
            last = std::max(last, b.val_ + (int)b.coeffs_.size() - 1);
        const int top = std::min(last, t - 1);
        if (top < v)
            return zero(t);
        std::vector<GaussianRational> c(top - v + 1);
        for (int k = v; k <= top; ++k) {
            GaussianRational x = a.is_zero() || k < a.val_ || k - a.val_ >= (int)a.coeffs_.size()
                                     ? GaussianRational(0)
                                     : a.coeffs_[k - a.val_];
            GaussianRational y = b.is_zero() || k < b.val_ || k - b.val_ >= (int)b.coeffs_.size()
                                     ? GaussianRational(0)
                                     : b.coeffs_[k - b.val_];
            c[k - v] = subtract ? x - y : x + y;
        }
        return {v, std::move(c), t};
    }

    int val_ = kZero;
    std::vector<GaussianRational> coeffs_;
    int trunc_ = kExact;
};

inline int valuation(const LaurentSeries& s) { return s.valuation(); }

/// p(s) by Horner's rule; coefficients are listed from the constant term up.
inline LaurentSeries poly_compose(const std::vector<GaussianRational>& p, const LaurentSeries& s)
{
    if (p.empty())
        return LaurentSeries::zero();
    LaurentSeries r = LaurentSeries::constant(p.back());
    for (int k = (int)p.size() - 2; k >= 0; --k)
        r = r * s + LaurentSeries::constant(p[k]);
    return r;
}

inline nlohmann::json to_json(const LaurentSeries& s)
{
    nlohmann::json c = nlohmann::json::array();
    for (const auto& x : s.coeffs())
        c.push_back(to_json(x));
    nlohmann::json j = {{"valuation", s.is_zero() ? nlohmann::json(nullptr) : nlohmann::json(s.valuation())},
                        {"coeffs", c}};
    if (!s.is_exact())
        j["trunc_order"] = s.trunc_order();
    return j;
}

/// Reads {valuation, coeffs[, trunc_order]}; without trunc_order the listed
/// coefficients are padded with zeros up to default_trunc (absolute order).
inline LaurentSeries series_from_json(const nlohmann::json& j, int default_trunc)
{
    if (!j.contains("valuation") || !j.contains("coeffs"))
        throw InvalidMap("series needs 'valuation' and 'coeffs'");
    const int v = j.at("valuation").get<int>();
    std::vector<GaussianRational> c;
    for (const auto& x : j.at("coeffs"))
        c.push_back(gaussian_from_json(x));
    const int t = j.contains("trunc_order") ? j.at("trunc_order").get<int>() : std::max(default_trunc, v + 1);
    if (t <= v)
        throw InvalidMap("series trunc_order must exceed its valuation");
    return {v, std::move(c), t};
}

// ---- curve at infinity -----------------------------------------------------------------

struct ExactFactor {
    std::vector<GaussianRational> coeffs; // p, constant term first
    GaussianRational a;

    int degree() const { return (int)coeffs.size() - 1; }

    static ExactFactor from(const HenonFactor& f)
    {
        ExactFactor e;
        for (const auto& c : f.coeffs)
            e.coeffs.push_back(GaussianRational::from_complex(c));
        e.a = GaussianRational::from_complex(f.a);
        return e;
    }
};

enum class Verdict { OrderRelationViolated, NotDivisible, NonvanishingImage, OrderOverflow, Inconclusive };

inline const char* verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::OrderRelationViolated:
        return "OrderRelationViolated";
    case Verdict::NotDivisible:
        return "NotDivisible";
    case Verdict::NonvanishingImage:
        return "NonvanishingImage";
    case Verdict::OrderOverflow:
        return "OrderOverflow";
    case Verdict::Inconclusive:
        return "Inconclusive";
    }
    return "?";
}

struct Certificate {
    Verdict verdict = Verdict::Inconclusive;
    int step = 0;
    int factor_index = 0;
    int degree = 0;
    std::string relation;      // the relation that fails
    int alpha = 0, beta = 0;   // orders of z_step, t_step
    int N = 0;
    int sum_alpha = 0;         // alpha_0 + ... + alpha_step
    std::vector<int> alphas, betas;
};

inline nlohmann::json to_json(const Certificate& c)
{
    return {{"verdict", verdict_name(c.verdict)},
            {"step", c.step},
            {"data",
             {{"relation", c.relation},
              {"factor_index", c.factor_index},
              {"d", c.degree},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"N", c.N},
              {"sum_alpha", c.sum_alpha},
              {"alphas", c.alphas},
              {"betas", c.betas}}}};
}

struct PushResult {
    std::optional<LaurentSeries> z1, t1;
    std::optional<Certificate> certificate; // set when the push exposes a contradiction
};

/// One step [z : 1 : t] -> [(t p(z/t) - a)/z : 1 : t/z] of the extended map near I+.
inline PushResult curve_push(const ExactFactor& f, const LaurentSeries& z, const LaurentSeries& t)
{
    if (z.is_zero() || t.is_zero())
        throw TruncationExhausted("curve_push needs known valuations of z and t");
    const int d     = f.degree();
    const int alpha = z.valuation(), beta = t.valuation();
    if (alpha < 1)
        throw std::invalid_argument("curve_push: z must vanish at 0");
    auto fail = [&](Verdict v, std::string rel) {
        Certificate c;
        c.verdict  = v;
        c.degree   = d;
        c.relation = std::move(rel);
        c.alpha    = alpha;
        c.beta     = beta;
        return PushResult{std::nullopt, std::nullopt, c};
    };
    if (beta <= alpha)
        return fail(Verdict::OrderRelationViolated, "beta > alpha");
    if (alpha % (d - 1) != 0)
        return fail(Verdict::NotDivisible, "alpha divisible by d-1");
    if ((long long)d * alpha != (long long)(d - 1) * beta)
        return fail(Verdict::OrderRelationViolated, "d alpha = (d-1) beta");
    const LaurentSeries num = t * poly_compose(f.coeffs, z / t) - LaurentSeries::constant(f.a);
    if (num.trunc_order() <= 0 && num.is_zero())
        throw TruncationExhausted("constant term of t p(z/t) - a is beyond the truncation order");
    if (!num.coeff(0).is_zero())
        return fail(Verdict::NonvanishingImage, "t p(z/t) - a vanishes at 0");
    const LaurentSeries z1 = num / z;
    const LaurentSeries t1 = t / z;
    if (z1.is_zero())
        throw TruncationExhausted("order of z_1 is beyond the truncation order");
    if (z1.valuation() < 1)
        return fail(Verdict::NonvanishingImage, "z_1 vanishes at 0");
    return {z1, t1, std::nullopt};
}

inline PushResult curve_push(const HenonFactor& f, const LaurentSeries& z, const LaurentSeries& t)
{
    return curve_push(ExactFactor::from(f), z, t);
}

/// Pushes the germ theta -> [z : 1 : t] through the factors cyclically until a
/// contradiction appears. N is the vanishing order of t.
inline Certificate certify_no_curve(const std::vector<ExactFactor>& factors, LaurentSeries z, LaurentSeries t, int N)
{
    if (factors.empty())
        throw InvalidMap("certify_no_curve needs at least one factor");
    if (t.is_zero() || t.valuation() != N)
        throw std::invalid_argument("certify_no_curve: valuation(t) must equal N");
    if (z.is_zero() || z.valuation() < 1)
        throw std::invalid_argument("certify_no_curve: z must vanish at 0");
    std::vector<int> alphas, betas;
    int sum = 0;
    for (int step = 0;; ++step) {
        const int fi = step % (int)factors.size();
        Certificate c;
        c.step         = step;
        c.factor_index = fi;
        c.degree       = factors[fi].degree();
        c.N            = N;
        try {
            c.alpha = z.valuation();
            c.beta  = t.valuation();
            alphas.push_back(c.alpha);
            betas.push_back(c.beta);
            sum += c.alpha;
            c.sum_alpha = sum;
            c.alphas    = alphas;
            c.betas     = betas;
            // val t = val t_(m+1) + sum alpha_i and t_(m+1) must still vanish.
            if (sum >= N) {
                c.verdict  = Verdict::OrderOverflow;
                c.relation = "alpha_0 + ... + alpha_m < N";
                return c;
            }
            PushResult r = curve_push(factors[fi], z, t);
            if (r.certificate) {
                c.verdict  = r.certificate->verdict;
                c.relation = r.certificate->relation;
                return c;
            }
            z = *r.z1;
            t = *r.t1;
        }
        catch (const TruncationExhausted& e) {
            c.verdict  = Verdict::Inconclusive;
            c.relation = e.what();
            return c;
        }
    }
}

inline Certificate certify_no_curve(const HenonSystem& sys, const LaurentSeries& z, const LaurentSeries& t, int N)
{
    std::vector<ExactFactor> fs;
    for (const auto& f : sys.factors)
        fs.push_back(ExactFactor::from(f));
    return certify_no_curve(fs, z, t, N);
}

/// Default truncation order for certification inputs of vanishing order N.
inline int default_trunc_order(int valuation, int N) { return valuation + 8 * (N + 2); }

} // namespace henon
