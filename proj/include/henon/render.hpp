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

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "henon/green.hpp"

namespace henon
{

/// Real axes of C^2 used for 2D slices.
enum class Axis { ReZ = 0, ImZ = 1, ReW = 2, ImW = 3 };

inline Axis axis_from_name(const std::string& s)
{
    if (s == "rez" || s == "Rez" || s == "re_z")
        return Axis::ReZ;
    if (s == "imz" || s == "Imz" || s == "im_z")
        return Axis::ImZ;
    if (s == "rew" || s == "Rew" || s == "re_w")
        return Axis::ReW;
    if (s == "imw" || s == "Imw" || s == "im_w")
        return Axis::ImW;
    throw std::invalid_argument("unknown slice axis '" + s + "' (use rez, imz, rew, imw)");
}

struct Slice {
    Axis x_axis = Axis::ReZ;
    Axis y_axis = Axis::ReW;
    std::array<double, 4> fixed{0, 0, 0, 0}; // values of the two remaining real coordinates
};

struct Window {
    double x0, x1, y0, y1;
};

struct Resolution {
    int nx, ny;
};

struct GreenGrid {
    Resolution res;
    std::vector<GreenValue> values; // row-major, row = y index

    const GreenValue& at(int ix, int iy) const { return values[(std::size_t)iy * res.nx + ix]; }
};

/// Lattice coordinate i of n points spanning [a, b] inclusively.
inline double lattice(double a, double b, int i, int n)
{
    return n == 1 ? a : a + (b - a) * i / (n - 1);
}

inline AffinePoint slice_point(const Slice& s, double x, double y)
{
    std::array<double, 4> c = s.fixed;
    c[(int)s.x_axis]        = x;
    c[(int)s.y_axis]        = y;
    return {{c[0], c[1]}, {c[2], c[3]}};
}

/// g+ over a slice window. Rows are split across workers; output does not depend on the thread count.
inline GreenGrid render_grid(const HenonSystem& sys, const Window& win, const Resolution& res, const Slice& slice,
                             const GreenParams& params = {}, int threads = 1)
{
    if (res.nx < 1 || res.ny < 1)
        throw std::invalid_argument("render_grid: resolution must be positive");
    if (slice.x_axis == slice.y_axis)
        throw std::invalid_argument("render_grid: slice axes must differ");
    GreenGrid grid{res, std::vector<GreenValue>((std::size_t)res.nx * res.ny)};
    auto work = [&](int first, int stride) {
        for (int iy = first; iy < res.ny; iy += stride) {
            const double y = lattice(win.y0, win.y1, iy, res.ny);
            for (int ix = 0; ix < res.nx; ++ix) {
                const double x = lattice(win.x0, win.x1, ix, res.nx);
                grid.values[(std::size_t)iy * res.nx + ix] = green_plus(sys, slice_point(slice, x, y), params);
            }
        }
    };
    threads = std::max(1, std::min(threads, res.ny));
    if (threads == 1) {
        work(0, 1);
    }
    else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(work, t, threads);
        for (auto& th : pool)
            th.join();
    }
    return grid;
}

} // namespace henon
