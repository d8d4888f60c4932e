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
#include "oracle.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace skewcast::oracle
{

namespace
{

struct SimpsonState {
    const std::function<double(double)>& f;
    int max_depth;
};

double simpson_step(const SimpsonState& s, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth)
{
    const double m   = 0.5 * (a + b);
    const double lm  = 0.5 * (a + m);
    const double rm  = 0.5 * (m + b);
    const double flm = s.f(lm);
    const double frm = s.f(rm);
    const double left  = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (depth >= s.max_depth) {
        throw QuadratureError("adaptive Simpson: no convergence within the depth limit");
    }
    return simpson_step(s, a, m, fa, flm, fm, left, tol / 2, depth + 1) +
           simpson_step(s, m, b, fm, frm, fb, right, tol / 2, depth + 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth)
{
    if (a == b) {
        return 0.0;
    }
    if (a > b) {
        return -adaptive_simpson(f, b, a, tol, max_depth);
    }
    // a fixed first partition keeps narrow peaks from slipping between the initial nodes
    constexpr int panels = 32;
    const SimpsonState state{f, max_depth};
    const double width = (b - a) / panels;
    double total       = 0.0;
    double x0          = a;
    double f0          = f(a);
    for (int k = 0; k < panels; ++k) {
        const double x1 = k + 1 == panels ? b : a + (k + 1) * width;
        const double xm = 0.5 * (x0 + x1);
        const double fm = f(xm);
        const double f1 = f(x1);
        const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += simpson_step(state, x0, x1, f0, fm, f1, whole, tol / panels, 0);
        x0 = x1;
        f0 = f1;
    }
    return total;
}

double owens_t_quad(double h, double a, double tol)
{
    const auto integrand = [h](double x) {
        return std::exp(-0.5 * h * h * (1.0 + x * x)) / (1.0 + x * x) / (2.0 * std::numbers::pi);
    };
    return adaptive_simpson(integrand, 0.0, a, tol);
}

double quad_cdf(double t, const SkewNormalParams<double>& params, double tol)
{
    const double lower = params.location - 12.0 * params.scale;
    if (t <= lower) {
        return 0.0;
    }
    return adaptive_simpson([&](double x) { return std::exp(sn_logpdf(x, params)); }, lower, t, tol);
}

double grid_mode(const SkewNormalParams<double>& params, double step)
{
    const double lo = params.location - 6.0 * params.scale;
    const double hi = params.location + 6.0 * params.scale;
    const double h  = step * params.scale;
    const auto n    = static_cast<long long>(std::llround((hi - lo) / h));
    auto value      = [&](long long i) { return sn_logpdf(lo + double(i) * h, params); };

    // The density is log-concave, so the fine-grid argmax lies within one coarse
    // cell of the coarse argmax; only that neighbourhood of the fine grid is scanned.
    const long long stride = std::max<long long>(1, n / 12000);
    long long best         = 0;
    double best_value      = value(0);
    for (long long i = stride; i <= n; i += stride) {
        const double v = value(i);
        if (v > best_value) {
            best       = i;
            best_value = v;
        }
    }
    const long long from = std::max<long long>(0, best - stride);
    const long long to   = std::min<long long>(n, best + stride);
    for (long long i = from; i <= to; ++i) {
        const double v = value(i);
        if (v > best_value) {
            best       = i;
            best_value = v;
        }
    }
    double x = lo + double(best) * h;
    if (best > 0 && best < n) {
        const double fl    = value(best - 1);
        const double fr    = value(best + 1);
        const double curve = fl - 2.0 * best_value + fr;
        if (curve < 0) {
            x += std::clamp(0.5 * (fl - fr) / curve, -1.0, 1.0) * h;
        }
    }
    return x;
}

int poisson_quantile(double mean, double prob)
{
    if (mean <= 0) {
        return 0;
    }
    long double cdf = 0;
    for (int k = 0;; ++k) {
        cdf += std::exp(static_cast<long double>(-mean + k * std::log(mean) - std::lgamma(k + 1.0)));
        if (cdf >= prob) {
            return k;
        }
        if (k > 10 * mean + 1000) {
            return k;
        }
    }
}

double chi_square_sf(double x, double df)
{
    if (x <= 0) {
        return 1.0;
    }
    return boost::math::gamma_q(df / 2.0, x / 2.0);
}

double chi_square_uniform(std::span<const int> counts)
{
    double total = 0;
    for (int c : counts) {
        total += c;
    }
    const double expected = total / double(counts.size());
    double stat           = 0;
    for (int c : counts) {
        stat += (c - expected) * (c - expected) / expected;
    }
    return stat;
}

double ks_pvalue(std::span<const double> sample, const std::function<double(double)>& cdf)
{
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double d       = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d              = std::max({d, (double(i) + 1) / n - f, f - double(i) / n});
    }
    const double sq     = std::sqrt(n);
    const double lambda = (sq + 0.12 + 0.11 / sq) * d;
    if (lambda < 0.2) {
        return 1.0;
    }
    double sum  = 0;
    double sign = 1;
    for (int k = 1; k <= 200; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ridders_derivative(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                          std::size_t i, double h)
{
    constexpr int ntab    = 12;
    constexpr double con  = 1.4;
    constexpr double con2 = con * con;
    constexpr double safe = 2.0;
    std::vector<double> point(x.begin(), x.end());
    auto central = [&](double step) {
        point[i]        = x[i] + step;
        const double up = f(point);
        point[i]        = x[i] - step;
        const double dn = f(point);
        point[i]        = x[i];
        return (up - dn) / (2.0 * step);
    };
    double a[ntab][ntab];
    double hh   = h;
    a[0][0]     = central(hh);
    double err  = std::numeric_limits<double>::max();
    double best = a[0][0];
    for (int k = 1; k < ntab; ++k) {
        hh /= con;
        a[0][k]    = central(hh);
        double fac = con2;
        for (int j = 1; j <= k; ++j) {
            a[j][k] = (a[j - 1][k] * fac - a[j - 1][k - 1]) / (fac - 1.0);
            fac *= con2;
            const double errt = std::max(std::abs(a[j][k] - a[j - 1][k]), std::abs(a[j][k] - a[j - 1][k - 1]));
            if (errt <= err) {
                err  = errt;
                best = a[j][k];
            }
        }
        if (std::abs(a[k][k] - a[k - 1][k - 1]) >= safe * err) {
            break;
        }
    }
    return best;
}

} // namespace skewcast::oracle
