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

#include <Eigen/Core>

#include <array>

namespace skewcast
{

/// Draws of one scalar quantity: one column per chain, one row per iteration.
using ChainColumns = Eigen::MatrixXd;

struct ParameterDiagnostics {
    double rhat;
    double ess_bulk;
};

struct DiagnosticsReport {
    std::array<ParameterDiagnostics, num_params> parameters;
    int divergences = 0;

    double max_rhat() const;
};

/// Split chains in half (dropping the middle draw of odd-length chains).
ChainColumns split_chains(const ChainColumns& chains);

/// Pooled ranks mapped through the normal quantile, (r - 3/8) / (S + 1/4).
ChainColumns rank_normalize(const ChainColumns& chains);

/// Classic potential scale reduction sqrt(var+ / W) of the given chains.
double rhat_basic(const ChainColumns& chains);

/// Geyer initial-monotone-sequence effective sample size of the given chains.
double ess_basic(const ChainColumns& chains);

/// max(bulk, tail) rank-normalized split R-hat.
double split_rhat(const ChainColumns& chains);

/// Effective sample size of the rank-normalized split chains.
double ess_bulk(const ChainColumns& chains);

/// Monte Carlo standard error of the mean, sd / sqrt(ESS of the split chains).
double mcse_mean(const ChainColumns& chains);

/// Column `param` of every chain as a (samples x chains) matrix.
ChainColumns chain_columns(const DrawMatrix& draws, Eigen::Index param);

/// Requires >= 2 chains with >= 4 draws each; throws ArgumentError otherwise.
DiagnosticsReport diagnostics(const DrawMatrix& draws);

} // namespace skewcast
