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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace skewcast
{

using Rng = std::mt19937_64;

/// Independent generator for substream `stream` of a run seeded with `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Substream ids reserved for the pipeline; chain c of a fit uses stream c.
namespace streams
{
inline constexpr std::uint64_t initial_values = 0x1000;
inline constexpr std::uint64_t predictive     = 0x2000;
} // namespace streams

struct SamplerConfig {
    int chains          = 4;
    int warmup          = 1000;
    int samples         = 1000;
    double target_accept = 0.8;
    int max_tree_depth  = 10;
    std::uint64_t seed  = 0;

    void validate() const;
};

/**
 * One draw per chain from the inflated prior, on the unconstrained scale.
 *
 * Beta is drawn on its natural scale and redrawn until positive (at most
 * 1000 tries). Under p_free the log p start comes from the stored transfer
 * component rather than the weak N(0, 10^2) prior. A flat prior starts every
 * coordinate uniformly in (-2, 2).
 */
std::vector<ParamVector> sample_initials(const PriorSpec& prior, int chains, Rng& rng);

/**
 * No-U-Turn sampler with multinomial trajectory sampling and a diagonal metric.
 *
 * Warmup tunes the step size by dual averaging toward cfg.target_accept and
 * the inverse metric over doubling windows; both are frozen for sampling.
 * Chains run concurrently, chain c drawing from make_rng(cfg.seed, c).
 * Values are returned on the scale of `logpost`.
 */
DrawMatrix nuts_sample(const LogDensity& logpost, std::span<const ParamVector> init, const SamplerConfig& cfg);

/// Sample the posterior of `series` under `prior`; beta column reported on its natural scale.
DrawMatrix fit_posterior(const DeathSeries& series, const PriorSpec& prior, const SamplerConfig& cfg);

} // namespace skewcast
