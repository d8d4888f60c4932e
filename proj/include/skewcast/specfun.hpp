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
#include "skewcast/roots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>

namespace skewcast
{

/**
 * @brief Location/scale/shape parameters of the skew-normal density
 *   g(t) = (2/scale) phi(z) Phi(shape z),  z = (t - location)/scale.
 */
template <std::floating_point Scalar>
struct SkewNormalParams {
    Scalar location;
    Scalar scale;
    Scalar shape;

    bool is_valid() const
    {
        return std::isfinite(location) && std::isfinite(scale) && std::isfinite(shape) && scale > 0;
    }
};

template <std::floating_point Scalar>
inline Scalar normal_logpdf(Scalar x)
{
    constexpr Scalar half_log_2pi = Scalar(0.918938533204672741780329736405617639861397473637783L);
    return -x * x / 2 - half_log_2pi;
}

template <std::floating_point Scalar>
inline Scalar normal_pdf(Scalar x)
{
    return std::exp(normal_logpdf(x));
}

template <std::floating_point Scalar>
inline Scalar normal_cdf(Scalar x)
{
    return std::erfc(-x / std::numbers::sqrt2_v<Scalar>) / 2;
}

/// Upper tail 1 - Phi(x), accurate for large positive x.
template <std::floating_point Scalar>
inline Scalar normal_ccdf(Scalar x)
{
    return std::erfc(x / std::numbers::sqrt2_v<Scalar>) / 2;
}

/**
 * @brief log Phi(x), finite for every finite x.
 *
 * Below x = -10 the asymptotic expansion
 *   log Phi(x) = -x^2/2 - log(-x sqrt(2 pi)) + log(1 - 1/x^2 + 3/x^4 - ...)
 * is summed until its terms drop below machine precision.
 */
template <std::floating_point Scalar>
Scalar log_normal_cdf(Scalar x)
{
    if (x < Scalar(-10)) {
        const Scalar x2 = x * x;
        Scalar series   = 1;
        Scalar term     = 1;
        for (int n = 1; n < 60; ++n) {
            term *= -(2 * n - 1) / x2;
            series += term;
            if (std::abs(term) < std::numeric_limits<Scalar>::epsilon() * Scalar(1e-2)) {
                break;
            }
        }
        return normal_logpdf(x) - std::log(-x) + std::log(series);
    }
    if (x < 0) {
        return std::log(normal_cdf(x));
    }
    return std::log1p(-normal_ccdf(x));
}

/// Inverse Mills ratio phi(x)/Phi(x).
template <std::floating_point Scalar>
inline Scalar inverse_mills_ratio(Scalar x)
{
    return std::exp(normal_logpdf(x) - log_normal_cdf(x));
}

/**
 * @brief Standard normal quantile.
 *
 * Rational starting approximation (Acklam) followed by one Halley step on
 * erfc, which brings the result to full double precision.
 */
template <std::floating_point Scalar>
Scalar normal_quantile(Scalar p)
{
    if (!(p > 0 && p < 1)) {
        if (p == 0) {
            return -std::numeric_limits<Scalar>::infinity();
        }
        if (p == 1) {
            return std::numeric_limits<Scalar>::infinity();
        }
        throw ArgumentError("normal_quantile: probability outside [0, 1]");
    }
    static constexpr std::array<Scalar, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<Scalar, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
    static constexpr std::array<Scalar, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<Scalar, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
    constexpr Scalar p_low = 0.02425;

    Scalar x;
    if (p < p_low) {
        const Scalar q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    else if (p <= 1 - p_low) {
        const Scalar q = p - Scalar(0.5);
        const Scalar r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    }
    else {
        const Scalar q = std::sqrt(-2 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }

    // Halley refinement; work in the tail that keeps the residual well conditioned.
    const Scalar sqrt_2pi = std::sqrt(2 * std::numbers::pi_v<Scalar>);
    Scalar e;
    if (x <= 0) {
        e = normal_cdf(x) - p;
    }
    else {
        e = (1 - p) - normal_ccdf(x);
    }
    const Scalar u = e * sqrt_2pi * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

namespace detail
{

template <std::floating_point Scalar>
struct GaussLegendreRule {
    static constexpr int size = 20;
    std::array<Scalar, size> nodes;
    std::array<Scalar, size> weights;
};

/// 20-point Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on P_20.
template <std::floating_point Scalar>
GaussLegendreRule<Scalar> make_gauss_legendre()
{
    GaussLegendreRule<Scalar> rule{};
    constexpr int n = GaussLegendreRule<Scalar>::size;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        Scalar x = std::cos(std::numbers::pi_v<Scalar> * (i + Scalar(0.75)) / (n + Scalar(0.5)));
        Scalar dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            Scalar p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const Scalar pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            const Scalar step = p1 / dp;
            x -= step;
            if (std::abs(step) < std::numeric_limits<Scalar>::epsilon()) {
                break;
            }
        }
        // refresh derivative at the converged node
        Scalar p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const Scalar pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const Scalar w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[i]             = -x;
        rule.nodes[n - 1 - i]     = x;
        rule.weights[i]           = w;
        rule.weights[n - 1 - i]   = w;
    }
    return rule;
}

template <std::floating_point Scalar>
const GaussLegendreRule<Scalar>& gauss_legendre()
{
    static const GaussLegendreRule<Scalar> rule = make_gauss_legendre<Scalar>();
    return rule;
}

/// (1/2pi) * integral_0^a exp(-h^2 (1+x^2)/2) / (1+x^2) dx  for h >= 0, 0 < a <= 1.
template <std::floating_point Scalar>
Scalar owens_t_small_slope(Scalar h, Scalar a)
{
    const Scalar half_h2 = h * h / 2;
    if (half_h2 > Scalar(745)) {
        return 0;
    }
    const auto& rule = gauss_legendre<Scalar>();
    // panels of width at most 2/h keep exp(-h^2 x^2 / 2) well resolved
    const int panels  = std::max(1, static_cast<int>(std::ceil(a * h / 2)));
    const Scalar half = a / panels / 2;
    Scalar sum        = 0;
    for (int k = 0; k < panels; ++k) {
        const Scalar mid = (2 * k + 1) * half;
        for (int i = 0; i < GaussLegendreRule<Scalar>::size; ++i) {
            const Scalar x = mid + half * rule.nodes[i];
            const Scalar x2 = x * x;
            sum += rule.weights[i] * std::exp(-half_h2 * x2) / (1 + x2);
        }
    }
    return std::exp(-half_h2) * sum * half / (2 * std::numbers::pi_v<Scalar>);
}

} // namespace detail

/**
 * @brief Owen's T function T(h, a) = (1/2pi) int_0^a exp(-h^2(1+x^2)/2)/(1+x^2) dx.
 *
 * |a| <= 1 is integrated directly by composite Gauss-Legendre; |a| > 1 uses
 *   T(h, a) = [Phi(h) Q(ah) + Phi(ah) Q(h)] / 2 - T(ah, 1/a),   h >= 0,
 * with Q the upper normal tail, which avoids cancellation for large h.
 */
template <std::floating_point Scalar>
Scalar owens_t(Scalar h, Scalar a)
{
    if (a == 0) {
        return 0;
    }
    const Scalar sign = a < 0 ? Scalar(-1) : Scalar(1);
    a = std::abs(a);
    h = std::abs(h);
    if (h == 0) {
        return sign * std::atan(a) / (2 * std::numbers::pi_v<Scalar>);
    }
    if (a <= 1) {
        return sign * detail::owens_t_small_slope(h, a);
    }
    const Scalar ah = a * h;
    const Scalar reflected =
        (normal_cdf(h) * normal_ccdf(ah) + normal_cdf(ah) * normal_ccdf(h)) / 2 -
        detail::owens_t_small_slope(ah, 1 / a);
    return sign * reflected;
}

template <std::floating_point Scalar>
Scalar sn_logpdf(Scalar t, const SkewNormalParams<Scalar>& params)
{
    const Scalar z = (t - params.location) / params.scale;
    return std::numbers::ln2_v<Scalar> - std::log(params.scale) + normal_logpdf(z) +
           log_normal_cdf(params.shape * z);
}

namespace detail
{

/**
 * Standardized lower tail int_{-inf}^z 2 phi(s) Phi(eta s) ds for z < 0, eta > 0,
 * integrated backwards from z. log g is concave with slope r at z, so the
 * integrand is below g(z) exp(-r u) and u <= 50/r captures it.
 */
template <std::floating_point Scalar>
Scalar sn_lower_tail(Scalar z, Scalar eta)
{
    const Scalar rate  = -z + eta * inverse_mills_ratio(eta * z);
    const auto& rule   = gauss_legendre<Scalar>();
    constexpr int panels = 16;
    const Scalar half  = Scalar(50) / rate / panels / 2;
    Scalar sum         = 0;
    for (int k = 0; k < panels; ++k) {
        const Scalar mid = (2 * k + 1) * half;
        for (int i = 0; i < GaussLegendreRule<Scalar>::size; ++i) {
            const Scalar s = z - (mid + half * rule.nodes[i]);
            sum += rule.weights[i] * std::exp(normal_logpdf(s) + log_normal_cdf(eta * s));
        }
    }
    return 2 * sum * half;
}

} // namespace detail

/**
 * @brief Skew-normal CDF G(t) = Phi(z) - 2 T(z, shape).
 *
 * Deep in the short tail (z < 0 < shape) the difference cancels; once it
 * drops below 1e-5 Phi(z) the tail is integrated directly instead.
 */
template <std::floating_point Scalar>
Scalar sn_cdf(Scalar t, const SkewNormalParams<Scalar>& params)
{
    const Scalar z = (t - params.location) / params.scale;
    const Scalar phi = normal_cdf(z);
    const Scalar g   = phi - 2 * owens_t(z, params.shape);
    if (z < 0 && params.shape > 0 && g < Scalar(1e-5) * phi) {
        return detail::sn_lower_tail(z, params.shape);
    }
    return std::clamp(g, Scalar(0), Scalar(1));
}

/**
 * @brief Skew-normal quantile: the t with G(t) = q.
 *
 * The bracket location +/- k*scale doubles k until G straddles q, then
 * Brent's method runs to machine precision in t.
 */
template <std::floating_point Scalar>
Scalar sn_quantile(Scalar q, const SkewNormalParams<Scalar>& params)
{
    if (!(q > 0 && q < 1)) {
        throw ArgumentError("sn_quantile: probability must lie in (0, 1)");
    }
    auto f = [&](Scalar t) { return sn_cdf(t, params) - q; };
    Scalar k  = 1;
    Scalar lo = params.location - k * params.scale;
    Scalar flo = f(lo);
    for (int i = 0; flo > 0; ++i) {
        if (i > 60) {
            throw ArgumentError("sn_quantile: could not bracket the lower side");
        }
        k *= 2;
        lo  = params.location - k * params.scale;
        flo = f(lo);
    }
    k = 1;
    Scalar hi  = params.location + k * params.scale;
    Scalar fhi = f(hi);
    for (int i = 0; fhi < 0; ++i) {
        if (i > 60) {
            throw ArgumentError("sn_quantile: could not bracket the upper side");
        }
        k *= 2;
        hi  = params.location + k * params.scale;
        fhi = f(hi);
    }
    return brent_root(f, lo, hi, flo, fhi, Scalar(0));
}

/**
 * @brief Mode of the skew-normal density.
 *
 * Root of d/dz log g = -z + shape * zeta(shape z) on z in [-6, 6]; the
 * derivative is strictly decreasing so the root is unique.
 */
template <std::floating_point Scalar>
Scalar sn_mode(const SkewNormalParams<Scalar>& params)
{
    const Scalar eta = params.shape;
    if (eta == 0) {
        return params.location;
    }
    auto score = [eta](Scalar z) { return -z + eta * inverse_mills_ratio(eta * z); };
    const Scalar lo = -6, hi = 6;
    const Scalar z = brent_root(score, lo, hi, score(lo), score(hi), Scalar(0));
    return params.location + params.scale * z;
}

} // namespace skewcast
