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

// Reference model and generators for the Laurent series engine, shared by the
// unit tests and the acceptance driver.

#include <climits>
#include <map>
#include <random>

#include "henon/series.hpp"

namespace henon::testing
{

using G = GaussianRational;
using S = LaurentSeries;


// Dense model: explicit coefficients plus the absolute order where knowledge stops.
struct Dense {
    std::map<int, G> c;
    int trunc;
};

inline Dense dense(const S& s)
{
    Dense d{{}, s.trunc_order()};
    if (!s.is_zero())
        for (std::size_t i = 0; i < s.coeffs().size(); ++i)
            d.c[s.valuation() + (int)i] = s.coeffs()[i];
    return d;
}

inline G at(const Dense& d, int k)
{
    auto it = d.c.find(k);
    return it == d.c.end() ? G(0) : it->second;
}

inline int lowest(const Dense& d)
{
    for (const auto& [k, v] : d.c)
        if (!v.is_zero())
            return k;
    return INT_MAX;
}

// Convolution by definition; coefficient k counts as known when every pair
// (i, k - i) with both indices at or above the valuations is known.
inline Dense oracle_mul(const Dense& a, const Dense& b)
{
    const int va = lowest(a), vb = lowest(b);
    Dense r{{}, INT_MAX};
    const int top = std::min(a.trunc, 1000) + std::min(b.trunc, 1000);
    for (int k = va + vb; k < top; ++k) {
        bool known = true;
        G s(0);
        for (int i = va; i <= k - vb; ++i) {
            if (i >= a.trunc || k - i >= b.trunc) {
                known = false;
                break;
            }
            s += at(a, i) * at(b, k - i);
        }
        if (!known) {
            r.trunc = k;
            break;
        }
        r.c[k] = s;
    }
    return r;
}

inline G rand_gr(std::mt19937_64& rng, bool nonzero)
{
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
    for (;;) {
        G g(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
        if (!nonzero || !g.is_zero())
            return g;
    }
}

inline S rand_series(std::mt19937_64& rng, int vmin, int vmax, int terms)
{
    std::uniform_int_distribution<int> v(vmin, vmax);
    const int val = v(rng);
    std::vector<G> c;
    c.push_back(rand_gr(rng, true));
    for (int i = 1; i < terms; ++i)
        c.push_back(rand_gr(rng, false));
    return {val, c, val + terms};
}

inline ExactFactor power_factor(int d, std::vector<G> lower, const G& a)
{
    ExactFactor f;
    f.coeffs = std::move(lower);
    f.coeffs.resize(d, G(0));
    f.coeffs.push_back(G(1));
    f.a = a;
    return f;
}

inline G gpow(const G& x, int n)
{
    G r(1);
    for (int i = 0; i < n; ++i)
        r = r * x;
    return r;
}

inline G rand_unit(std::mt19937_64& rng)
{
    static const G units[] = {G(1), G(-1), G(mpq_class(0), mpq_class(1)), G(mpq_class(0), mpq_class(-1))};
    return units[std::uniform_int_distribution<int>(0, 3)(rng)];
}

inline G rand_gint(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> c(-3, 3);
    return G(mpq_class(c(rng)), mpq_class(c(rng)));
}

// Gaussian-integer series with a unit leading coefficient, known to absolute order trunc.
inline S rand_int_series(std::mt19937_64& rng, int val, int trunc)
{
    std::vector<G> c{rand_unit(rng)};
    for (int k = val + 1; k < std::min(trunc, val + 6); ++k)
        c.push_back(rand_gint(rng));
    return {val, c, trunc};
}

// Monic p with Gaussian-integer lower coefficients and a unit Jacobian.
inline ExactFactor rand_int_factor(std::mt19937_64& rng, int d)
{
    std::vector<G> lower;
    for (int j = 0; j < d; ++j)
        lower.push_back(rand_gint(rng));
    return power_factor(d, lower, rand_unit(rng));
}

// Preimage of a prescribed push result: z = a / (t1 p(1/t1) - z1), t = t1 z.
inline std::pair<S, S> pull_back(const ExactFactor& f, const S& z1, const S& t1)
{
    const S z = S::constant(f.a) / (t1 * poly_compose(f.coeffs, reciprocal(t1)) - z1);
    return {z, t1 * z};
}

struct AdmissibleInput {
    ExactFactor f;
    S z, t;
    int N;
};

// Even iterations: generic orders and coefficients. Odd: germs built to survive
// at least one push.
inline AdmissibleInput random_admissible(std::mt19937_64& rng, int d, int iter)
{
    AdmissibleInput in{rand_int_factor(rng, d), {}, {}, 0};
    if (iter % 2 == 0) {
        in.N            = std::uniform_int_distribution<int>(2, 8)(rng);
        const int alpha = std::uniform_int_distribution<int>(1, in.N - 1)(rng);
        in.z            = rand_int_series(rng, alpha, default_trunc_order(alpha, in.N));
        in.t            = rand_int_series(rng, in.N, default_trunc_order(in.N, in.N));
    }
    else {
        const int b1 = 1 + (iter / 2) % (8 / d);
        in.N         = d * b1;
        auto [z0, t0] = pull_back(in.f, rand_int_series(rng, 1 + iter % 3, 8 * (in.N + 2) + 2),
                                  rand_int_series(rng, b1, b1 + 8 * (in.N + 2) + 2));
        in.z = z0.truncated(default_trunc_order(z0.valuation(), in.N));
        in.t = t0.truncated(default_trunc_order(in.N, in.N));
    }
    return in;
}

// One random arithmetic case against the dense model; kind cycles through
// product, sum and difference, reciprocal, polynomial composition.
inline bool arithmetic_case_agrees(std::mt19937_64& rng, int kind)
{
    const S a = rand_series(rng, -5, 5, 20), b = rand_series(rng, -5, 5, 20);
    const Dense da = dense(a), db = dense(b);
    bool ok        = true;
    switch (kind % 4) {
    case 0: {
        const S p      = a * b;
        const Dense dp = oracle_mul(da, db);
        ok             = p.trunc_order() == dp.trunc && p.valuation() == lowest(dp);
        for (int k = p.valuation() - 3; ok && k < p.trunc_order(); ++k)
            ok = p.coeff(k) == at(dp, k);
        break;
    }
    case 1: {
        const S s = a + b, d = a - b;
        const int t = std::min(da.trunc, db.trunc);
        ok          = s.trunc_order() == t && d.trunc_order() == t;
        for (int k = -10; ok && k < t; ++k)
            ok = s.coeff(k) == at(da, k) + at(db, k) && d.coeff(k) == at(da, k) - at(db, k);
        break;
    }
    case 2: {
        const S r      = reciprocal(a);
        const Dense dp = oracle_mul(da, dense(r));
        ok             = r.valuation() == -a.valuation() && dp.trunc == 20;
        for (int k = 0; ok && k < dp.trunc; ++k)
            ok = at(dp, k) == G(k == 0 ? 1 : 0);
        break;
    }
    case 3: {
        const S s = rand_series(rng, 0, 2, 20);
        const std::vector<G> p{rand_gr(rng, false), rand_gr(rng, false), rand_gr(rng, false), rand_gr(rng, true)};
        const S c       = poly_compose(p, s);
        const Dense ds  = dense(s);
        const Dense ds2 = oracle_mul(ds, ds);
        const Dense ds3 = oracle_mul(ds2, ds);
        const int t     = std::min({ds.trunc, ds2.trunc, ds3.trunc});
        ok              = c.trunc_order() == t;
        for (int k = 0; ok && k < t; ++k)
            ok = c.coeff(k) == (k == 0 ? p[0] : G(0)) + p[1] * at(ds, k) + p[2] * at(ds2, k) + p[3] * at(ds3, k);
        break;
    }
    }
    return ok;
}

} // namespace henon::testing
