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

#include "skewcast/draws.hpp"
#include "skewcast/model.hpp"
#include "skewcast/sampler.hpp"

#include <Eigen/Core>

#include <span>

namespace skewcast
{

inline constexpr int default_horizon = 70;

/// Mean and central 95% interval of a posterior or predictive sample.
struct Summary {
    double mean;
    double q025;
    double q975;
};

/// Per-day summaries; columns are mean, q2.5, q97.5.
struct Band {
    Eigen::VectorXi day;
    Eigen::Matrix<double, Eigen::Dynamic, 3> values;
};

struct ForecastSummary {
    int horizon_days = 0;
    Band daily;
    Band cumulative;
    Summary total_deaths{};
    Summary time_to_threshold{};
    Summary inflection_point{};
};

/// Empirical quantile with linear interpolation between order statistics (type 7).
double empirical_quantile(std::span<const double> sorted, double prob);

/// Mean, q2.5 and q97.5 of `values`; throws ArgumentError when empty.
Summary summarize_quantity(std::span<const double> values);

/// Asymptotic total deaths p * K.
double total_deaths(const ParamVector& theta, double population_millions);

/// Day by which 99% of the expected deaths have occurred.
double time_to_threshold(const ParamVector& theta);

/// Day of maximal death rate.
double inflection_point(const ParamVector& theta);

/// Posterior draw `row` of `draws` (reporting scale) as an unconstrained ParamVector.
ParamVector draw_at(const DrawMatrix& draws, Eigen::Index row);

/**
 * Posterior predictive daily and cumulative counts on days first_day .. first_day + horizon - 1.
 *
 * Daily counts are Poisson(p g(t) K) per draw. Cumulative counts are
 * Poisson(p K G(t)) marginally, drawn as a Poisson process path with
 * independent increments so every draw (and every band column) is
 * nondecreasing in t.
 */
void predictive_bands(const DrawMatrix& draws, double population_millions, int horizon, Rng& rng,
                      ForecastSummary& out, int first_day = 1);

/// Bands plus the three derived quantities summarized over all draws.
ForecastSummary summarize_forecast(const DrawMatrix& draws, double population_millions, int horizon, Rng& rng,
                                   int first_day = 1);

} // namespace skewcast
