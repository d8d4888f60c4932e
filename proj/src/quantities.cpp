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
#include "skewcast/quantities.hpp"
#include "skewcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace skewcast
{

double empirical_quantile(std::span<const double> sorted, double prob)
{
    if (sorted.empty()) {
        throw ArgumentError("empirical_quantile: empty sample");
    }
    const double h       = (double(sorted.size()) - 1.0) * prob;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - double(lo)) * (sorted[hi] - sorted[lo]);
}

Summary summarize_quantity(std::span<const double> values)
{
    if (values.empty()) {
        throw ArgumentError("summarize_quantity: empty input");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / double(sorted.size());
    return {mean, empirical_quantile(sorted, 0.025), empirical_quantile(sorted, 0.975)};
}

double total_deaths(const ParamVector& theta, double population_millions)
{
    return std::exp(theta[LogP]) * population_millions;
}

double time_to_threshold(const ParamVector& theta)
{
    return sn_quantile(0.99, skew_normal_params(theta));
}

double inflection_point(const ParamVector& theta)
{
    return sn_mode(skew_normal_params(theta));
}

ParamVector draw_at(const DrawMatrix& draws, Eigen::Index row)
{
    return from_reporting_scale<double>(draws.values.row(row).transpose());
}

namespace
{

int poisson_draw(double mean, Rng& rng)
{
    if (!(mean > 0)) {
        return 0;
    }
    std::poisson_distribution<int> dist(mean);
    return dist(rng);
}

Band summarize_columns(const Eigen::MatrixXd& samples, int first_day)
{
    Band band;
    band.day.resize(samples.cols());
    band.values.resize(samples.cols(), 3);
    std::vector<double> column(samples.rows());
    for (Eigen::Index t = 0; t < samples.cols(); ++t) {
        Eigen::Map<Eigen::VectorXd>(column.data(), samples.rows()) = samples.col(t);
        const Summary s   = summarize_quantity(column);
        band.day[t]       = first_day + int(t);
        band.values.row(t) << s.mean, s.q025, s.q975;
    }
    return band;
}

} // namespace

void predictive_bands(const DrawMatrix& draws, double population_millions, int horizon, Rng& rng,
                      ForecastSummary& out, int first_day)
{
    if (draws.size() == 0) {
        throw ArgumentError("predictive_bands: no draws");
    }
    if (horizon < 1) {
        throw ArgumentError("predictive_bands: horizon must be at least 1");
    }
    const Eigen::Index n = draws.size();
    Eigen::MatrixXd daily(n, horizon);
    Eigen::MatrixXd cumulative(n, horizon);
    for (Eigen::Index s = 0; s < n; ++s) {
        const ParamVector theta = draw_at(draws, s);
        const auto sn           = skew_normal_params(theta);
        const double pk         = std::exp(theta[LogP]) * population_millions;
        double previous_mass    = 0.0;
        double running          = 0.0;
        for (int k = 0; k < horizon; ++k) {
            const double t      = double(first_day + k);
            const double lambda = pk > 0 ? pk * std::exp(sn_logpdf(t, sn)) : 0.0;
            daily(s, k)         = poisson_draw(lambda, rng);

            const double mass = pk > 0 ? pk * sn_cdf(t, sn) : 0.0;
            running += poisson_draw(std::max(0.0, mass - previous_mass), rng);
            previous_mass    = std::max(previous_mass, mass);
            cumulative(s, k) = running;
        }
    }
    out.horizon_days = horizon;
    out.daily        = summarize_columns(daily, first_day);
    out.cumulative   = summarize_columns(cumulative, first_day);
}

ForecastSummary summarize_forecast(const DrawMatrix& draws, double population_millions, int horizon, Rng& rng,
                                   int first_day)
{
    ForecastSummary out;
    predictive_bands(draws, population_millions, horizon, rng, out, first_day);
    const Eigen::Index n = draws.size();
    std::vector<double> totals(n), thresholds(n), inflections(n);
    for (Eigen::Index s = 0; s < n; ++s) {
        const ParamVector theta = draw_at(draws, s);
        totals[s]               = total_deaths(theta, population_millions);
        thresholds[s]           = time_to_threshold(theta);
        inflections[s]          = inflection_point(theta);
    }
    out.total_deaths      = summarize_quantity(totals);
    out.time_to_threshold = summarize_quantity(thresholds);
    out.inflection_point  = summarize_quantity(inflections);
    return out;
}

} // namespace skewcast
