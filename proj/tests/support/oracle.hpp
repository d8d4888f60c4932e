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

// Brute-force references for the tests. Apart from sn_logpdf nothing here
// calls into the library code it is used to check.

#include "skewcast/specfun.hpp"

#include <functional>
#include <span>
#include <stdexcept>

namespace skewcast::oracle
{

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`; throws QuadratureError beyond `max_depth`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth = 60);

/// T(h, a) by quadrature of its defining integral.
double owens_t_quad(double h, double a, double tol = 1e-14);

/// Skew-normal CDF by quadrature of exp(sn_logpdf) over [location - 12 scale, t].
double quad_cdf(double t, const SkewNormalParams<double>& params, double tol = 1e-11);

/**
 * Argmax of sn_logpdf on a uniform grid over location +- 6 scale with spacing
 * step * scale, refined by a three-point parabola.
 */
double grid_mode(const SkewNormalParams<double>& params, double step = 1e-6);

/// Smallest k with P(X <= k) >= prob for X ~ Poisson(mean), by direct summation of the pmf.
int poisson_quantile(double mean, double prob);

/// Upper tail probability of a chi-square variable with `df` degrees of freedom.
double chi_square_sf(double x, double df);

/// Pearson statistic of `counts` against equal expected counts.
double chi_square_uniform(std::span<const int> counts);

/// Asymptotic Kolmogorov p-value of the one-sample KS statistic of `sample` against `cdf`.
double ks_pvalue(std::span<const double> sample, const std::function<double(double)>& cdf);

/**
 * Partial derivative of f along component `i` of x: central differences with
 * shrinking step h, h/1.4, ... combined by Richardson extrapolation (Ridders).
 */
double ridders_derivative(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                          std::size_t i, double h);

} // namespace skewcast::oracle
