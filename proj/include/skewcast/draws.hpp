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

#include <Eigen/Core>

#include <vector>

namespace skewcast
{

/// Component indices shared by parameter vectors, gradients and prior vectors.
enum Param : Eigen::Index
{
    LogP     = 0,
    LogAlpha = 1,
    LogBeta  = 2, ///< natural-scale beta in prior and reporting vectors
    Eta      = 3,
};

inline constexpr Eigen::Index num_params = 4;

template <class Scalar>
using ParamVectorT = Eigen::Matrix<Scalar, num_params, 1>;

/// Unconstrained sampling coordinates (log p, log alpha, log beta, eta).
using ParamVector = ParamVectorT<double>;
using Gradient    = ParamVectorT<double>;

using DrawValues = Eigen::Matrix<double, Eigen::Dynamic, num_params>;

/**
 * Posterior draws of all chains, stacked chain-major: row c * num_samples + i
 * holds iteration i of chain c.
 */
struct DrawMatrix {
    int num_chains  = 0;
    int num_samples = 0;
    DrawValues values;
    Eigen::VectorXd lp;
    Eigen::Array<bool, Eigen::Dynamic, 1> divergent;
    std::vector<double> stepsize;
    std::vector<ParamVector> inv_metric;

    Eigen::Index size() const { return values.rows(); }

    auto chain(int c) const { return values.middleRows(Eigen::Index(c) * num_samples, num_samples); }
    auto chain(int c) { return values.middleRows(Eigen::Index(c) * num_samples, num_samples); }

    int divergence_count() const { return static_cast<int>(divergent.count()); }
};

} // namespace skewcast
