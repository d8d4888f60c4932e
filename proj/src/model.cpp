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
#include "skewcast/model.hpp"
#include "skewcast/error.hpp"

#include <cmath>
#include <string>

namespace skewcast
{

void DeathSeries::validate() const
{
    if (day.size() != deaths.size()) {
        throw DataError("death series: day and count vectors differ in length");
    }
    if (!(population_millions > 0) || !std::isfinite(population_millions)) {
        throw DataError("death series: population must be positive");
    }
    for (Eigen::Index i = 0; i < size(); ++i) {
        if (deaths[i] < 0) {
            throw DataError("death series: negative count at day " + std::to_string(day[i]));
        }
        if (i > 0 && day[i] != day[i - 1] + 1) {
            throw DataError("death series: days not consecutive after day " + std::to_string(day[i - 1]));
        }
    }
}

PriorSpec PriorSpec::flat()
{
    PriorSpec prior;
    prior.mean       = ParamVector::Zero();
    prior.sd         = ParamVector::Constant(10.0);
    prior.beta_scale = BetaScale::log;
    return prior;
}

PriorSpec PriorSpec::china_reference()
{
    PriorSpec prior;
    prior.mean << 0.87, 2.91, 16.52, 2.34;
    prior.sd << 0.02, 0.02, 0.37, 0.14;
    return prior;
}

bool PriorSpec::is_flat() const
{
    return beta_scale == BetaScale::log;
}

ParamVector PriorSpec::effective_mean() const
{
    ParamVector m = mean;
    if (p_free) {
        m[LogP] = 0.0;
    }
    return m;
}

ParamVector PriorSpec::effective_sd() const
{
    ParamVector s = sd * inflation;
    s[LogP] = p_free ? weak_log_p_sd : sd[LogP] * inflation;
    return s;
}

void PriorSpec::validate() const
{
    if (!mean.allFinite() || !sd.allFinite()) {
        throw ArgumentError("prior: non-finite mean or sd");
    }
    if ((sd.array() <= 0).any()) {
        throw ArgumentError("prior: standard deviations must be positive");
    }
    if (!(inflation > 0) || !std::isfinite(inflation)) {
        throw ArgumentError("prior: inflation must be positive");
    }
}

ValueAndGradient loglik_and_grad(const ParamVector& theta, const DeathSeries& series)
{
    series.validate();
    const auto sn       = skew_normal_params(theta);
    const double alpha  = sn.location;
    const double beta   = sn.scale;
    const double eta    = sn.shape;
    const double log_pk = theta[LogP] + std::log(series.population_millions);

    double value  = 0.0;
    Gradient grad = Gradient::Zero();
    for (Eigen::Index i = 0; i < series.size(); ++i) {
        const double t          = series.day[i];
        const double y          = series.deaths[i];
        const double z          = (t - alpha) / beta;
        const double log_lambda = log_pk + sn_logpdf(t, sn);
        const double lambda     = std::exp(log_lambda);
        value += (y > 0 ? y * log_lambda : 0.0) - lambda;

        const double resid = y - lambda;
        const double mills = inverse_mills_ratio(eta * z);
        const double dz    = -z + eta * mills; // d log g / dz
        grad[LogP] += resid;
        grad[LogAlpha] += resid * dz * (-alpha / beta);
        grad[LogBeta] += resid * (-1.0 - dz * z);
        grad[Eta] += resid * z * mills;
    }
    return {value, grad};
}

ValueAndGradient logprior_and_grad(const ParamVector& theta, const PriorSpec& prior)
{
    const ParamVector m = prior.effective_mean();
    const ParamVector s = prior.effective_sd();

    double value  = 0.0;
    Gradient grad = Gradient::Zero();
    for (Eigen::Index j = 0; j < num_params; ++j) {
        if (j == LogBeta && prior.beta_scale == BetaScale::natural) {
            // normal on beta = exp(log beta), plus log|d beta / d log beta| = log beta
            const double beta = std::exp(theta[j]);
            const double u    = (beta - m[j]) / s[j];
            value += normal_logpdf(u) - std::log(s[j]) + theta[j];
            grad[j] = -u / s[j] * beta + 1.0;
            continue;
        }
        const double u = (theta[j] - m[j]) / s[j];
        value += normal_logpdf(u) - std::log(s[j]);
        grad[j] = -u / s[j];
    }
    return {value, grad};
}

ValueAndGradient logpost_and_grad(const ParamVector& theta, const DeathSeries& series, const PriorSpec& prior)
{
    auto lik         = loglik_and_grad(theta, series);
    const auto prior_part = logprior_and_grad(theta, prior);
    lik.value += prior_part.value;
    lik.gradient += prior_part.gradient;
    return lik;
}

LogDensity make_logpost(DeathSeries series, PriorSpec prior)
{
    series.validate();
    prior.validate();
    return [series = std::move(series), prior = std::move(prior)](const ParamVector& theta) {
        return logpost_and_grad(theta, series, prior);
    };
}

PriorSpec prior_from_draws(const DrawMatrix& draws, double inflation, bool p_free)
{
    if (draws.size() == 0) {
        throw ArgumentError("prior_from_draws: no draws");
    }
    const ParamVector mean = draws.values.colwise().mean().transpose();
    const Eigen::Index n   = draws.size();
    ParamVector sd;
    for (Eigen::Index j = 0; j < num_params; ++j) {
        const double ss = (draws.values.col(j).array() - mean[j]).square().sum();
        sd[j]           = n > 1 ? std::sqrt(ss / double(n - 1)) : 0.0;
    }
    if ((sd.array() <= 0).any()) {
        throw ArgumentError("prior_from_draws: degenerate draws (zero variance)");
    }
    PriorSpec prior;
    prior.mean       = mean;
    prior.sd         = sd;
    prior.inflation  = inflation;
    prior.p_free     = p_free;
    prior.beta_scale = BetaScale::natural;
    prior.validate();
    return prior;
}

double intensity(const ParamVector& theta, double day, double population_millions)
{
    const auto sn = skew_normal_params(theta);
    return std::exp(theta[LogP] + std::log(population_millions) + sn_logpdf(day, sn));
}

} // namespace skewcast
