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

// File output helpers: PNG, CSV, number formatting and content hashes.

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "henon/errors.hpp"
#include "henon/render.hpp"

namespace henon
{

inline void write_png_gray(const std::string& path, int width, int height, const std::vector<std::uint8_t>& pixels)
{
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp)
        throw Error("cannot open " + path + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info  = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        std::fclose(fp);
        throw Error("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw Error("libpng write failed for " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(pixels.data() + (std::size_t)y * width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

/// K+ samples are black (0); escaping samples map to 1..255 by log1p(g) / log1p(g_max).
/// Image row 0 is the top of the window (largest y).
inline std::vector<std::uint8_t> green_grid_pixels(const GreenGrid& g)
{
    double gmax = 0;
    for (const auto& v : g.values)
        gmax = std::max(gmax, v.value);
    std::vector<std::uint8_t> px((std::size_t)g.res.nx * g.res.ny, 0);
    for (int iy = 0; iy < g.res.ny; ++iy)
        for (int ix = 0; ix < g.res.nx; ++ix) {
            const auto& v = g.at(ix, iy);
            std::uint8_t c = 0;
            if (v.status == GreenStatus::Escaped && gmax > 0)
                c = (std::uint8_t)(1 + std::lround(254.0 * std::log1p(v.value) / std::log1p(gmax)));
            px[(std::size_t)(g.res.ny - 1 - iy) * g.res.nx + ix] = c;
        }
    return px;
}

inline void write_green_png(const std::string& path, const GreenGrid& g)
{
    write_png_gray(path, g.res.nx, g.res.ny, green_grid_pixels(g));
}

/// Shortest round-trip decimal form of a double.
inline std::string fmt_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Decimal scientific form of exp(log_value) even when it is far outside the double range.
inline std::string format_from_log(double log_value, int digits = 10)
{
    if (std::isinf(log_value) && log_value < 0)
        return "0";
    const double l10 = log_value / std::log(10.0);
    double e         = std::floor(l10);
    double m         = std::pow(10.0, l10 - e);
    if (m >= 10.0) {
        m /= 10.0;
        e += 1;
    }
    std::ostringstream os;
    os << std::setprecision(digits) << m << "e" << (long long)e;
    return os.str();
}

inline const char* status_name(GreenStatus s) { return s == GreenStatus::Escaped ? "Escaped" : "BoundedWithinBudget"; }

inline void write_green_csv(const std::string& path, const GreenGrid& g)
{
    std::ofstream os(path);
    if (!os)
        throw Error("cannot open " + path + " for writing");
    os << "x_index,y_index,g_plus,status\n";
    for (int iy = 0; iy < g.res.ny; ++iy)
        for (int ix = 0; ix < g.res.nx; ++ix) {
            const auto& v = g.at(ix, iy);
            os << ix << ',' << iy << ',' << fmt_double(v.value) << ',' << status_name(v.status) << '\n';
        }
}

inline std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 1469598103934665603ULL)
{
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t h)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline std::string read_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error("cannot open " + path + " for writing");
    os << content;
}

} // namespace henon
