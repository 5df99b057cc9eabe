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

#include <fstream>
#include <random>

#include <cstdio>
#include <filesystem>

#include "henon/green.hpp"
#include "henon/io.hpp"
#include "henon/render.hpp"

using namespace henon;

namespace
{

// Crude limit L_n = log max(|z_n|, |w_n|) / d^n evaluated in MPFR. When the
// leading coefficient of the iterated map is not 1 the limit has a geometric
// tail, removed by L_n + (L_n - L_(n-1)) / (d - 1).
double crude_green(const HenonSystem& sys, const AffinePoint& p, int n, int direction)
{
    precision_scope scope(256);
    const auto ms = system_cast<mpcomplex>(sys);
    auto q        = point_cast<mpcomplex>(p);
    mpreal D(1), prev(0), cur(0);
    for (int k = 0; k < n; ++k) {
        q = direction > 0 ? apply_forward(ms, q) : apply_inverse(ms, q);
        D *= sys.degree();
        prev = cur;
        cur  = r_log(std::max(c_abs(q.z), c_abs(q.w))) / D;
    }
    return to_double(cur + (cur - prev) / (sys.degree() - 1));
}

double crude_green_plus(const HenonSystem& sys, const AffinePoint& p, int n) { return crude_green(sys, p, n, 1); }
double crude_green_minus(const HenonSystem& sys, const AffinePoint& p, int n) { return crude_green(sys, p, n, -1); }

std::vector<AffinePoint> escaped_samples(const HenonSystem& sys, std::mt19937_64& rng, int count, double box)
{
    std::uniform_real_distribution<double> u(-box, box);
    std::vector<AffinePoint> out;
    while ((int)out.size() < count) {
        const AffinePoint p{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const auto g = green_plus(sys, p);
        if (g.status == GreenStatus::Escaped && g.value > 1e-3)
            out.push_back(p);
    }
    return out;
}

AffinePoint vplus_sample(std::mt19937_64& rng, double rmin, double rmax, double slope)
{
    std::uniform_real_distribution<double> lr(std::log(rmin), std::log(rmax)), ph(-3.14159265, 3.14159265),
        v(0.0, 1.0);
    const double r = std::exp(lr(rng));
    return {std::polar(r, ph(rng)), std::polar(r / slope * std::sqrt(v(rng)), ph(rng))};
}

} // namespace

TEST(Green, FixedPointIsBounded)
{
    const auto sys = benchmark_system(0);
    const auto g   = green_plus(sys, AffinePoint{2.0, 2.0});
    EXPECT_EQ(g.status, GreenStatus::BoundedWithinBudget);
    EXPECT_EQ(g.value, 0.0);
    const auto gm = green_minus(sys, AffinePoint{2.0, 2.0});
    EXPECT_EQ(gm.status, GreenStatus::BoundedWithinBudget);
    const auto c = classify(sys, AffinePoint{2.0, 2.0});
    EXPECT_EQ(c.plus, PlusSide::KPlus);
    EXPECT_EQ(c.minus, MinusSide::KMinus);
    EXPECT_TRUE(c.plus_budget_limited);
}

TEST(Green, LargeRealPoint)
{
    const auto sys = benchmark_system(0);
    const auto g   = green_plus(sys, AffinePoint{1e6, 0.0});
    EXPECT_EQ(g.status, GreenStatus::Escaped);
    EXPECT_TRUE(g.refined);
    EXPECT_NEAR(g.value, std::log(1e6), 1e-6);
    EXPECT_NEAR(g.value, crude_green_plus(sys, AffinePoint{1e6, 0.0}, 8), 1e-10);
    EXPECT_EQ(classify(sys, AffinePoint{1e6, 0.0}).plus, PlusSide::UPlus);
}

TEST(Green, MatchesCrudeLimitOracle)
{
    std::mt19937_64 rng(21);
    for (int b = 0; b < 3; ++b) {
        const auto sys = benchmark_system(b);
        for (const auto& p : escaped_samples(sys, rng, 30, 2.5)) {
            const double g = green_plus(sys, p).value;
            // Enough iterations that |z_n| is far beyond any transient.
            const int n = b == 2 ? 14 : 26;
            EXPECT_NEAR(g, crude_green_plus(sys, p, n), 1e-9 * (1 + g));
        }
    }
}

TEST(Green, GreenMinusMatchesCrudeLimitOracle)
{
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    for (int b = 0; b < 3; ++b) {
        const auto sys = benchmark_system(b);
        int checked    = 0;
        while (checked < 30) {
            const AffinePoint p{{u(rng), u(rng)}, {u(rng), u(rng)}};
            const auto g = green_minus(sys, p);
            if (g.status != GreenStatus::Escaped || g.value < 1e-3)
                continue;
            const int n = b == 2 ? 14 : 26;
            EXPECT_NEAR(g.value, crude_green_minus(sys, p, n), 1e-9 * (1 + g.value));
            ++checked;
        }
    }
}

TEST(Green, FunctionalEquation)
{
    std::mt19937_64 rng(23);
    for (int b = 0; b < 3; ++b) {
        const auto sys = benchmark_system(b);
        for (const auto& p : escaped_samples(sys, rng, 100, 2.5)) {
            const double g  = green_plus(sys, p).value;
            const double gf = green_plus(sys, apply_forward(sys, p)).value;
            EXPECT_LT(std::abs(gf - sys.degree() * g), 1e-8 * (1 + g));
            const double gm  = green_minus(sys, p).value;
            const double gmi = green_minus(sys, apply_inverse(sys, p)).value;
            EXPECT_LT(std::abs(gmi - sys.degree() * gm), 1e-8 * (1 + gm));
        }
    }
}

TEST(Green, ClassificationIsInvariant)
{
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const auto sys = benchmark_system(1);
    for (int i = 0; i < 100; ++i) {
        const AffinePoint p{{u(rng), u(rng) * 0.1}, {u(rng), u(rng) * 0.1}};
        const auto a = classify(sys, p);
        const auto b = classify(sys, apply_forward(sys, p));
        EXPECT_EQ(a.plus, b.plus);
        EXPECT_EQ(a.minus, b.minus);
    }
}

TEST(Green, NonnegativeAndContinuous)
{
    std::mt19937_64 rng(25);
    const auto sys = benchmark_system(0);
    for (const auto& p : escaped_samples(sys, rng, 100, 2.5)) {
        const double g = green_plus(sys, p).value;
        EXPECT_GE(g, 0.0);
        const double g2 = green_plus(sys, AffinePoint{p.z + 1e-6, p.w - Complex(0, 1e-6)}).value;
        EXPECT_LT(std::abs(g - g2), 1e-3);
    }
}

TEST(Green, MonotoneSublevelSets)
{
    // No sample with g+ <= c escapes a larger level c'.
    const auto sys = benchmark_system(1);
    const double c = 0.5, c2 = 1.0;
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) {
            const AffinePoint p{Complex(-3 + 6.0 * i / 39, 0.0), Complex(-3 + 6.0 * j / 39, 0.0)};
            const double g = green_plus(sys, p).value;
            if (g <= c) {
                EXPECT_LE(g, c2);
            }
        }
}

TEST(Bottcher, ModulusIsExpMinusGreen)
{
    std::mt19937_64 rng(26);
    for (int b = 0; b < 3; ++b) {
        const auto sys = benchmark_system(b);
        for (int i = 0; i < 100; ++i) {
            const auto p = vplus_sample(rng, 100.0, 1e5, 5.0);
            const auto x = bottcher_x(sys, p);
            EXPECT_NEAR(x.log_mag + green_plus(sys, p).value, 0.0, 1e-8);
        }
    }
}

TEST(Bottcher, Equivariance)
{
    std::mt19937_64 rng(27);
    for (int b = 0; b < 3; ++b) {
        const auto sys = benchmark_system(b);
        for (int i = 0; i < 100; ++i) {
            const auto p  = vplus_sample(rng, 100.0, 1e4, 5.0);
            const auto x  = bottcher_x(sys, p);
            const auto xf = bottcher_x(sys, apply_forward(sys, p));
            const auto xd = x.pow(sys.degree());
            EXPECT_NEAR(xf.log_mag, xd.log_mag, 1e-8 * (1 + std::abs(xd.log_mag)));
            EXPECT_NEAR(wrap_phase(xf.phase - xd.phase), 0.0, 1e-6);
        }
    }
}

TEST(Bottcher, RealSymmetry)
{
    std::mt19937_64 rng(28);
    std::uniform_real_distribution<double> u(-1.0, 1.0), lr(std::log(100.0), std::log(1e5));
    for (int b = 0; b < 2; ++b) {
        const auto sys = benchmark_system(b);
        for (int i = 0; i < 100; ++i) {
            const double z = (u(rng) < 0 ? -1 : 1) * std::exp(lr(rng));
            const auto x   = bottcher_x(sys, AffinePoint{z, z * u(rng) / 5.0});
            const double ph = std::abs(x.phase);
            EXPECT_LT(std::min(ph, std::abs(ph - 3.14159265358979323846)), 1e-8);
        }
    }
}

TEST(Bottcher, AmbiguousOutsideVPlus)
{
    const auto sys = benchmark_system(0);
    EXPECT_THROW(bottcher_x(sys, AffinePoint{2.0, 3.0}), BranchAmbiguity);
}

TEST(Bottcher, MultiprecisionAgrees)
{
    precision_scope scope(200);
    const auto sys = benchmark_system(1);
    const AffinePoint p{Complex(300.0, 40.0), Complex(-20.0, 7.0)};
    GreenParams mp_params;
    mp_params.tol   = 1e-55;
    const auto mlog = log_bottcher(system_cast<mpcomplex>(sys), point_cast<mpcomplex>(p), mp_params);
    const auto dlog = log_bottcher(sys, p);
    EXPECT_LT(std::abs(to_std(mlog) - dlog), 1e-12);
}

TEST(LevelSeed, Examples)
{
    const auto sys = benchmark_system(0);
    const double c = std::log(1e6);
    const auto s   = level_set_seed(sys, c, AffinePoint{1.0, 0.0});
    EXPECT_LT(std::abs(s.z - Complex(1e6)) / 1e6, 1e-4);
    EXPECT_NEAR(green_plus(sys, s).value, c, 1e-8 * c);
    EXPECT_NEAR(green_plus(sys, apply_forward(sys, s)).value, 2 * c, 1e-7);
}

TEST(LevelSeed, OtherSystemsAndDirections)
{
    for (int b = 0; b < 3; ++b) {
        const auto sys = benchmark_system(b);
        for (double c : {0.3, 2.0, 12.0}) {
            const auto s = level_set_seed(sys, c, AffinePoint{Complex(0.6, 0.8), Complex(0.1, 0.0)});
            EXPECT_NEAR(green_plus(sys, s).value, c, 1e-8 * std::max(1.0, c));
        }
    }
    EXPECT_THROW(level_set_seed(benchmark_system(0), 1.0, AffinePoint{0.0, 0.0}), NoBracket);
}

TEST(Render, AttractingBasinIsBounded)
{
    // z^2 + 0.3 with a = 0.5 has an attracting fixed point at z = w = (1.5 - sqrt(1.05)) / 2.
    const auto sys = benchmark_system(1);
    const double z0 = (1.5 - std::sqrt(1.05)) / 2;
    Slice sl;
    sl.x_axis = Axis::ReZ;
    sl.y_axis = Axis::ReW;
    const auto g = render_grid(sys, Window{z0 - 0.01, z0 + 0.01, z0 - 0.01, z0 + 0.01}, Resolution{9, 7}, sl);
    ASSERT_EQ(g.values.size(), 63u);
    for (const auto& v : g.values) {
        EXPECT_EQ(v.value, 0.0);
        EXPECT_EQ(v.status, GreenStatus::BoundedWithinBudget);
    }
}

TEST(Render, FarWindowFollowsLogModulus)
{
    const auto sys = benchmark_system(0);
    Slice sl;
    sl.x_axis = Axis::ReZ;
    sl.y_axis = Axis::ImZ;
    const auto g = render_grid(sys, Window{1e3, 1e4, 0, 0}, Resolution{50, 1}, sl);
    for (int ix = 0; ix < 50; ++ix) {
        const double x = lattice(1e3, 1e4, ix, 50);
        EXPECT_NEAR(g.at(ix, 0).value, std::log(x), 1e-3);
    }
}

TEST(Render, RowMajorLayout)
{
    const auto sys = benchmark_system(0);
    Slice sl;
    sl.x_axis  = Axis::ReZ;
    sl.y_axis  = Axis::ImW;
    sl.fixed   = {0, 0.25, 0.5, 0};
    const Window win{-3, 3, -2, 2};
    const auto g = render_grid(sys, win, Resolution{7, 5}, sl);
    for (int iy = 0; iy < 5; ++iy)
        for (int ix = 0; ix < 7; ++ix) {
            const AffinePoint p{{lattice(-3, 3, ix, 7), 0.25}, {0.5, lattice(-2, 2, iy, 5)}};
            EXPECT_EQ(g.values[(std::size_t)iy * 7 + ix].value, green_plus(sys, p).value);
        }
}

TEST(Render, RefinementAgreesOnSharedSamples)
{
    const auto sys = benchmark_system(2);
    Slice sl;
    const Window win{-2.5, 2.5, -2.5, 2.5};
    const auto coarse = render_grid(sys, win, Resolution{11, 9}, sl);
    const auto fine   = render_grid(sys, win, Resolution{21, 17}, sl);
    for (int iy = 0; iy < 9; ++iy)
        for (int ix = 0; ix < 11; ++ix) {
            EXPECT_EQ(coarse.at(ix, iy).status, fine.at(2 * ix, 2 * iy).status);
            EXPECT_EQ(coarse.at(ix, iy).value, fine.at(2 * ix, 2 * iy).value);
        }
}

TEST(Render, ThreadCountDoesNotChangeOutput)
{
    const auto sys = benchmark_system(1);
    Slice sl;
    const Window win{-2, 2, -2, 2};
    const auto a = render_grid(sys, win, Resolution{16, 13}, sl, {}, 1);
    const auto b = render_grid(sys, win, Resolution{16, 13}, sl, {}, 4);
    ASSERT_EQ(a.values.size(), b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        EXPECT_EQ(a.values[i].value, b.values[i].value);
        EXPECT_EQ(a.values[i].status, b.values[i].status);
    }
}

TEST(Render, RejectsBadSlices)
{
    const auto sys = benchmark_system(0);
    Slice sl;
    sl.y_axis = Axis::ReZ;
    EXPECT_THROW(render_grid(sys, Window{0, 1, 0, 1}, Resolution{2, 2}, sl), std::invalid_argument);
    Slice ok;
    EXPECT_THROW(render_grid(sys, Window{0, 1, 0, 1}, Resolution{0, 2}, ok), std::invalid_argument);
    EXPECT_THROW(axis_from_name("x"), std::invalid_argument);
}

TEST(Render, CsvAndPngOutputs)
{
    const auto sys = benchmark_system(0);
    Slice sl;
    const auto g   = render_grid(sys, Window{-2, 2, -2, 2}, Resolution{8, 6}, sl);
    const auto dir = std::filesystem::temp_directory_path() / "henon_render_test";
    std::filesystem::create_directories(dir);
    const auto csv = (dir / "g.csv").string();
    const auto png = (dir / "g.png").string();
    write_green_csv(csv, g);
    write_green_png(png, g);
    std::ifstream is(csv);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "x_index,y_index,g_plus,status");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    EXPECT_EQ(rows, 48);
    const std::string bytes = read_file(png);
    ASSERT_GE(bytes.size(), 8u);
    EXPECT_EQ(bytes.substr(1, 3), "PNG");
    // Bounded samples get the reserved value 0, escaping ones never do.
    const auto px = green_grid_pixels(g);
    for (int iy = 0; iy < 6; ++iy)
        for (int ix = 0; ix < 8; ++ix) {
            const auto c = px[(std::size_t)(5 - iy) * 8 + ix];
            EXPECT_EQ(c == 0, g.at(ix, iy).status != GreenStatus::Escaped || g.at(ix, iy).value == 0);
        }
    std::filesystem::remove_all(dir);
}
