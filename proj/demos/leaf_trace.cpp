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
// Traces a disc in a leaf of {g+ = c} and prints its boundary.
//
//   demo_leaf [benchmark] [samples]

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <numbers>

#include "henon/normal_form.hpp"

using namespace henon;

int main(int argc, char** argv)
{
    const int b = argc > 1 ? std::atoi(argv[1]) : 0;
    const int m = argc > 2 ? std::atoi(argv[2]) : 8;
    try {
        const HenonSystem sys        = benchmark_system(b);
        const FiltrationConstants k  = choose_constants(sys, ConstantsMode::Relaxed);
        const double c               = min_large_c(sys, k);
        const DiscTracer tr(sys, k, make_leaf(sys, k, c, AffinePoint{1.0, 0.0}, -1));
        std::cout << "benchmark " << b << ", c = " << c << ", depth " << tr.depth() << ", " << tr.bits()
                  << " bits\n";
        std::cout << std::setprecision(10);
        for (int j = 0; j < m; ++j) {
            const Complex th = std::polar(1.0, 2 * std::numbers::pi * j / m);
            const DiscChain ch = tr.trace(th);
            const auto lc      = check_leaf_point(tr, th);
            const AffinePoint p = to_std(ch.points.front());
            std::cout << "theta " << th << "  z " << p.z << "  w " << p.w << "  |g+ - c| " << lc.green_error
                      << "\n";
        }
    }
    catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
