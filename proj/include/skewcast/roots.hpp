/*
* Copyright (C) 2026 The skewcast authors
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

#include "skewcast/error.hpp"

#include <cmath>
#include <limits>

namespace skewcast
{

/**
 * @brief Brent's safeguarded root finder on a sign-changing bracket [a, b].
 *
 * Mixes inverse quadratic interpolation, secant and bisection steps; the
 * bracket always contains the root. Stops when the bracket half-width falls
 * below 2*eps*|b| + tol/2 or f(b) == 0.
 */
template <class Scalar, class F>
Scalar brent_root(F&& f, Scalar a, Scalar b, Scalar fa, Scalar fb, Scalar tol, int max_iter = 300)
{
    if ((fa > 0 && fb > 0) || (fa < 0 && fb < 0)) {
        throw ArgumentError("brent_root: interval does not bracket a root");
    }
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    Scalar c = b, fc = fb;
    Scalar d = b - a, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
            c  = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a  = b;
            b  = c;
            c  = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const Scalar tol1 = 2 * eps * std::abs(b) + tol / 2;
        const Scalar xm   = (c - b) / 2;
        if (std::abs(xm) <= tol1 || fb == 0) {
            return b;
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            const Scalar s = fb / fa;
            Scalar p, q;
            if (a == c) {
                p = 2 * xm * s;
                q = 1 - s;
            }
            else {
                const Scalar qa = fa / fc;
                const Scalar r  = fb / fc;
                p = s * (2 * xm * qa * (qa - r) - (b - a) * (r - 1));
                q = (qa - 1) * (r - 1) * (s - 1);
            }
            if (p > 0) {
                q = -q;
            }
            p = std::abs(p);
            const Scalar min1 = 3 * xm * q - std::abs(tol1 * q);
            const Scalar min2 = std::abs(e * q);
            if (2 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            }
            else {
                d = xm;
                e = d;
            }
        }
        else {
            d = xm;
            e = d;
        }
        a  = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
        fb = f(b);
    }
    return b;
}

} // namespace skewcast
