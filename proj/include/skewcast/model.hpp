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
#include "skewcast/specfun.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>

namespace skewcast
{

struct ValueAndGradient {
    double value;
    Gradient gradient;
};

/// Log density with gradient on the unconstrained scale; must be reentrant.
using LogDensity = std::function<ValueAndGradient(const ParamVector&)>;

template <class Scalar>
SkewNormalParams<Scalar> skew_normal_params(const ParamVectorT<Scalar>& theta)
{
    return {std::exp(theta[LogAlpha]), std::exp(theta[LogBeta]), theta[Eta]};
}

/// Maps (log p, log alpha, log beta, eta) to the reporting order (log p, log alpha, beta, eta).
template <class Scalar>
ParamVectorT<Scalar> to_reporting_scale(ParamVectorT<Scalar> theta)
{
    theta[LogBeta] = std::exp(theta[LogBeta]);
    return theta;
}

template <class Scalar>
ParamVectorT<Scalar> from_reporting_scale(ParamVectorT<Scalar> values)
{
    values[LogBeta] = std::log(values[LogBeta]);
    return values;
}

/**
 * Daily death counts indexed by day since the first reported death.
 * Days are consecutive integers; counts are non-negative.
 */
struct DeathSeries {
    Eigen::VectorXi day;
    Eigen::VectorXi deaths;
    double population_millions = 1.0;

    Eigen::Index size() const { return day.size(); }

    /// Throws DataError on negative counts, gaps, length mismatch or K <= 0.
    void validate() const;
};

enum class BetaScale
{
    natural, ///< normal prior on beta itself, Jacobian term for the log transform
    log,     ///< normal prior directly on log beta
};

/**
 * Independent normal priors in reporting order (log p, log alpha, beta, eta).
 *
 * `inflation` multiplies the log alpha, beta and eta standard deviations at
 * evaluation time. With `p_free` the log p component is replaced by the weak
 * N(0, 10^2) prior and is never inflated.
 */
struct PriorSpec {
    ParamVector mean = ParamVector::Zero();
    ParamVector sd   = ParamVector::Constant(10.0);
    double inflation = 1.0;
    bool p_free      = false;
    BetaScale beta_scale = BetaScale::natural;

    static constexpr double weak_log_p_sd = 10.0;

    /// Diffuse N(0, 10^2) prior on every unconstrained coordinate.
    static PriorSpec flat();

    /// Published posterior summary of the source-country fit.
    static PriorSpec china_reference();

    bool is_flat() const;

    ParamVector effective_mean() const;
    ParamVector effective_sd() const;

    void validate() const;
};

ValueAndGradient loglik_and_grad(const ParamVector& theta, const DeathSeries& series);

ValueAndGradient logprior_and_grad(const ParamVector& theta, const PriorSpec& prior);

/// loglik + logprior; the single callable handed to the sampler.
ValueAndGradient logpost_and_grad(const ParamVector& theta, const DeathSeries& series, const PriorSpec& prior);

/// Binds series and prior (by value) into a reentrant LogDensity.
LogDensity make_logpost(DeathSeries series, PriorSpec prior);

/**
 * Normal prior matching the posterior moments of `draws` (reporting scale).
 * Throws ArgumentError on empty draws or a zero-variance column.
 */
PriorSpec prior_from_draws(const DrawMatrix& draws, double inflation, bool p_free);

/// Expected deaths p * g(t) * K on the given day.
double intensity(const ParamVector& theta, double day, double population_millions);

} // namespace skewcast
