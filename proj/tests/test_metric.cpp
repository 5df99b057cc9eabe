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
#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "henon/metric.hpp"

using namespace henon;

namespace
{

ConstantsOptions quick_options()
{
    ConstantsOptions o;
    o.relaxed_samples = 20000;
    return o;
}

struct Setup {
    HenonSystem sys;
    FiltrationConstants k;
    LeafParam L;
};

Setup setup(int benchmark, ConstantsMode mode, int depth = 1)
{
    Setup s;
    s.sys = benchmark_system(benchmark);
    s.k   = choose_constants(s.sys, mode, quick_options());
    s.L   = make_leaf(s.sys, s.k, min_large_c(s.sys, s.k), AffinePoint{1.0, 0.0}, depth);
    return s;
}

// Direct FS formula in MPFR on the exponentiated values, for moderate sizes.
double fs_oracle(const Complex& z, const Complex& w, const Complex& dz, const Complex& dw)
{
    precision_scope scope(200);
    const mpcomplex Z = from_std<mpcomplex>(z), W = from_std<mpcomplex>(w);
    const mpcomplex A = from_std<mpcomplex>(dz), B = from_std<mpcomplex>(dw);
    const mpreal num  = c_norm(A) + c_norm(B) + c_norm(Z * B - A * W);
    const mpreal den  = 1 + c_norm(Z) + c_norm(W);
    return to_double(r_sqrt(num) / den);
}

} // namespace

TEST(FubiniStudy, Examples)
{
    EXPECT_DOUBLE_EQ(fs_norm(Tangent{{0.0, 0.0}, 1.0, 0.0}), 1.0);
    EXPECT_NEAR(fs_norm(Tangent{{1.0, 0.0}, 0.0, 1.0}), std::sqrt(2.0) / 2, 1e-15);
}

TEST(FubiniStudy, HomogeneityAndPositivity)
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0, 2);
    for (int i = 0; i < 1000; ++i) {
        const Tangent t{{{n(rng), n(rng)}, {n(rng), n(rng)}}, {n(rng), n(rng)}, {n(rng), n(rng)}};
        const Complex lam(n(rng), n(rng));
        const double v = fs_norm(t);
        EXPECT_GT(v, 0);
        EXPECT_NEAR(fs_norm(Tangent{t.base, lam * t.dz, lam * t.dw}), std::abs(lam) * v, 1e-12 * std::abs(lam) * v);
        EXPECT_NEAR(v, fs_oracle(t.base.z, t.base.w, t.dz, t.dw), 1e-13 * v);
        precision_scope scope(128);
        const MpPoint p = point_cast<mpcomplex>(t.base);
        EXPECT_NEAR(fs_log_norm(p, from_std<mpcomplex>(t.dz), from_std<mpcomplex>(t.dw)), std::log(v), 1e-12);
    }
}

TEST(FubiniStudy, LogNormBeyondDoubleRange)
{
    // Scaling base and tangent by lambda leaves the norm of tangent/lambda unchanged asymptotically:
    // for |z| >> 1 the norm behaves like |z dw - dz w| / |z|^2.
    precision_scope scope(256);
    const mpreal big = boost::multiprecision::exp(mpreal(2000));
    const MpPoint p{mpcomplex(big), mpcomplex(mpreal(1))};
    const double l = fs_log_norm(p, mpcomplex(mpreal(0)), mpcomplex(big));
    EXPECT_NEAR(l, 0.0, 1e-12); // |z dw| / |z|^2 = 1
}

TEST(ThetaGrid, DefaultLayout)
{
    const auto g = theta_grid();
    ASSERT_EQ(g.size(), 97u);
    EXPECT_EQ(g[0], Complex(0.0));
    int boundary = 0;
    for (const auto& t : g) {
        EXPECT_LE(std::abs(t), 1 + 1e-15);
        boundary += std::abs(std::abs(t) - 1) < 1e-15;
    }
    EXPECT_EQ(boundary, 64);
}

TEST(Profile, PositiveAndRefinementStable)
{
    const auto s = setup(0, ConstantsMode::Relaxed, 2);
    const DiscTracer tr(s.sys, s.k, s.L);
    const auto p64  = disc_fs_profile(tr, theta_grid(64));
    const auto p256 = disc_fs_profile(tr, theta_grid(256));
    double s64 = -1e300, s256 = -1e300;
    for (const auto& x : p64.samples) {
        EXPECT_TRUE(std::isfinite(x.log_fs));
        EXPECT_GT(x.fs_norm, 0);
        s64 = std::max(s64, x.log_fs);
    }
    for (const auto& x : p256.samples)
        s256 = std::max(s256, x.log_fs);
    EXPECT_LT(std::abs(std::expm1(s256 - s64)), 0.02);
}

TEST(Profile, ChainRuleMatchesFiniteDifferences)
{
    for (int b : {0, 1}) {
        const auto s = setup(b, ConstantsMode::Relaxed, 2);
        const DiscTracer tr(s.sys, s.k, s.L);
        for (const auto& th : theta_grid(16, 4, 2))
            EXPECT_LT(chain_rule_fd_error(tr, th), 1e-4) << "benchmark " << b << " theta " << th;
    }
}

TEST(Brody, RelaxedSequence)
{
    const auto s   = setup(0, ConstantsMode::Relaxed);
    const auto rep = brody_ratio_sequence(s.sys, s.k, s.L, 1, 6, theta_grid());
    ASSERT_EQ(rep.n_values.size(), 6u);
    for (std::size_t j = 1; j < 6; ++j)
        EXPECT_GT(rep.log_base_norms[j], rep.log_base_norms[j - 1]);
    const double r3 = rep.log_ratios[2];
    for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_DOUBLE_EQ(rep.log_ratios[j], rep.log_sup_norms[j] - rep.log_base_norms[j]);
        EXPECT_GE(rep.log_ratios[j], 0);
        EXPECT_LE(rep.log_ratios[j], r3 + std::log(2.0));
        EXPECT_NEAR(std::exp(rep.log_kn_base[j]), 1.0, 1e-9);
        EXPECT_LE(rep.log_kn_sup[j], rep.log_M_s_hat + 1e-12);
    }
    EXPECT_EQ(rep.failures, 0);
    EXPECT_NO_THROW(require_bounds(rep));
    // C_sVplus_hat at the top level is stable from n to n + 1.
    for (std::size_t j = 1; j < 6; ++j) {
        const double a = rep.case_reports[j - 1].log_C_sVplus_hat.back();
        const double b = rep.case_reports[j].log_C_sVplus_hat.back();
        EXPECT_LE(std::abs(a - b), std::log(2.0));
    }
}

TEST(Brody, CaseTrichotomy)
{
    const auto s = setup(1, ConstantsMode::Relaxed, 3);
    const DiscTracer tr(s.sys, s.k, s.L);
    const auto prof = disc_fs_profile(tr, theta_grid());
    const auto cr   = case_bound_check(tr, prof, std::max(prof.chain_c_g, 1e-3));
    ASSERT_EQ(cr.rows.size(), 3u * prof.samples.size());
    for (const auto& row : cr.rows) {
        const auto& smp = *std::find_if(prof.samples.begin(), prof.samples.end(),
                                        [&](const DiscSample& x) { return x.theta == row.theta; });
        const bool in_prev = sample_in_theta_region(smp, row.i - 1), in_cur = sample_in_theta_region(smp, row.i);
        const int count    = (int)in_prev + (int)(in_cur && !in_prev) + (int)!in_cur;
        EXPECT_EQ(count, 1);
        EXPECT_EQ(row.kase, in_prev ? BoundCase::I : in_cur ? BoundCase::II : BoundCase::III);
        if (row.kase == BoundCase::I) {
            EXPECT_GT(row.log_ratio, 0);
        }
    }
    for (const auto& sw : cr.sandwich)
        EXPECT_TRUE(sw.pass);
    EXPECT_FALSE(cr.closed_form_asserted);
}

TEST(Brody, PaperFaithfulClosedForms)
{
    const auto s   = setup(0, ConstantsMode::PaperFaithful);
    const auto rep = brody_ratio_sequence(s.sys, s.k, s.L, 1, 4, theta_grid());
    long asserted  = 0;
    for (const auto& cr : rep.case_reports) {
        EXPECT_TRUE(cr.closed_form_asserted);
        for (const auto& row : cr.rows) {
            if (row.kase == BoundCase::I) {
                EXPECT_GE(row.log_ratio, row.log_bound);
                ++asserted;
            }
            if (row.kase == BoundCase::III) {
                EXPECT_LE(row.log_ratio, row.log_bound);
                ++asserted;
            }
        }
    }
    EXPECT_GT(asserted, 0);
    EXPECT_EQ(rep.failures, 0);
}

TEST(Brody, BoundFormulas)
{
    // d = 2, |a| = 1, c_g = 0: d^2 / (96 * 4) * exp(c * 2 * 2^i).
    EXPECT_NEAR(log_case_i_bound(2, 1.0, 0.0, 1.5, 2), std::log(4.0 / 384.0) + 1.5 * 2 * 4, 1e-12);
    // 16 * 9 * 41 * d^2 |a|^2 C^(2d) / R^(2d-4) with d = 3, |a| = 2, C = 5, R = 7.
    EXPECT_NEAR(log_case_iii_bound(3, 2.0, 5.0, 7.0), std::log(16.0 * 9 * 41 * 9 * 4 * std::pow(5.0, 6) / 49.0), 1e-12);
}

TEST(Brody, ViolationIsReported)
{
    const auto s = setup(0, ConstantsMode::Relaxed);
    auto rep     = brody_ratio_sequence(s.sys, s.k, s.L, 1, 2, theta_grid());
    ASSERT_FALSE(rep.case_reports[0].sandwich.empty());
    rep.case_reports[0].sandwich[0].pass = false;
    EXPECT_THROW(require_bounds(rep), BoundViolation);
    EXPECT_THROW(brody_ratio_sequence(s.sys, s.k, s.L, 0, 2, theta_grid()), std::invalid_argument);
}

TEST(Brody, ReportSerialization)
{
    const auto s   = setup(0, ConstantsMode::Relaxed);
    const auto rep = brody_ratio_sequence(s.sys, s.k, s.L, 1, 2, theta_grid());
    const auto j   = to_json(rep);
    for (const char* key : {"n_values", "base_norms", "sup_norms", "ratios", "M_s_hat", "C_s_hat", "C_sVplus_hat", "cases"})
        EXPECT_TRUE(j.contains(key)) << key;
    const std::string csv = case_table_csv(rep);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,i,case,theta_re,theta_im,ratio,bound,pass");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 97 * (1 + 2));
    EXPECT_EQ(j.dump(), to_json(brody_ratio_sequence(s.sys, s.k, s.L, 1, 2, theta_grid())).dump());
}
