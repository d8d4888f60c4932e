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
#include "skewcast/diagnostics.hpp"
#include "skewcast/error.hpp"
#include "skewcast/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace skewcast
{

double DiagnosticsReport::max_rhat() const
{
    double m = 0.0;
    for (const auto& p : parameters) {
        m = std::max(m, p.rhat);
    }
    return m;
}

ChainColumns split_chains(const ChainColumns& chains)
{
    const Eigen::Index n    = chains.rows();
    const Eigen::Index half = n / 2;
    ChainColumns out(half, 2 * chains.cols());
    for (Eigen::Index c = 0; c < chains.cols(); ++c) {
        out.col(2 * c)     = chains.col(c).head(half);
        out.col(2 * c + 1) = chains.col(c).tail(half);
    }
    return out;
}

ChainColumns rank_normalize(const ChainColumns& chains)
{
    const Eigen::Index total = chains.size();
    std::vector<Eigen::Index> order(total);
    std::iota(order.begin(), order.end(), 0);
    const double* data = chains.data();
    std::stable_sort(order.begin(), order.end(), [data](auto a, auto b) { return data[a] < data[b]; });

    ChainColumns z(chains.rows(), chains.cols());
    double* out = z.data();
    for (Eigen::Index i = 0; i < total;) {
        Eigen::Index j = i;
        while (j + 1 < total && data[order[j + 1]] == data[order[i]]) {
            ++j;
        }
        // ties share their average (1-based) rank
        const double rank = 0.5 * double(i + j) + 1.0;
        const double u    = (rank - 0.375) / (double(total) + 0.25);
        const double value = normal_quantile(u);
        for (Eigen::Index k = i; k <= j; ++k) {
            out[order[k]] = value;
        }
        i = j + 1;
    }
    return z;
}

double rhat_basic(const ChainColumns& chains)
{
    const double n           = double(chains.rows());
    const Eigen::VectorXd mu = chains.colwise().mean().transpose();
    Eigen::VectorXd within(chains.cols());
    for (Eigen::Index c = 0; c < chains.cols(); ++c) {
        within[c] = (chains.col(c).array() - mu[c]).square().sum() / (n - 1.0);
    }
    const double w        = within.mean();
    const double b_over_n = (mu.array() - mu.mean()).square().sum() / double(chains.cols() - 1);
    const double var_plus = (n - 1.0) / n * w + b_over_n;
    return std::sqrt(var_plus / w);
}

namespace
{

/// Biased autocovariance at lags 0..n-1.
Eigen::VectorXd autocovariance(const Eigen::VectorXd& x)
{
    const Eigen::Index n       = x.size();
    const Eigen::VectorXd c    = x.array() - x.mean();
    Eigen::VectorXd acov(n);
    for (Eigen::Index lag = 0; lag < n; ++lag) {
        acov[lag] = c.head(n - lag).dot(c.tail(n - lag)) / double(n);
    }
    return acov;
}

} // namespace

double ess_basic(const ChainColumns& chains)
{
    const Eigen::Index m = chains.cols();
    const Eigen::Index n = chains.rows();
    Eigen::MatrixXd acov(n, m);
    Eigen::VectorXd chain_mean(m), chain_var(m);
    for (Eigen::Index c = 0; c < m; ++c) {
        acov.col(c)   = autocovariance(chains.col(c));
        chain_mean[c] = chains.col(c).mean();
        chain_var[c]  = acov(0, c) * double(n) / double(n - 1);
    }
    const double mean_var = chain_var.mean();
    double var_plus       = mean_var * double(n - 1) / double(n);
    if (m > 1) {
        var_plus += (chain_mean.array() - chain_mean.mean()).square().sum() / double(m - 1);
    }
    if (!(var_plus > 0)) {
        return double(n * m);
    }

    auto rho_at = [&](Eigen::Index lag) { return 1.0 - (mean_var - acov.row(lag).mean()) / var_plus; };

    std::vector<double> rho_hat(n, 0.0);
    double rho_even = 1.0;
    double rho_odd  = rho_at(1);
    rho_hat[0]      = rho_even;
    rho_hat[1]      = rho_odd;
    Eigen::Index t  = 1;
    while (t < n - 5 && rho_even + rho_odd > 0) {
        rho_even = rho_at(t + 1);
        rho_odd  = rho_at(t + 2);
        if (rho_even + rho_odd >= 0) {
            rho_hat[t + 1] = rho_even;
            rho_hat[t + 2] = rho_odd;
        }
        t += 2;
    }
    const Eigen::Index max_t = t;
    if (rho_even > 0) {
        rho_hat[max_t + 1] = rho_even;
    }
    // Geyer's initial monotone sequence
    for (t = 1; t <= max_t - 2; t += 2) {
        if (rho_hat[t + 1] + rho_hat[t + 2] > rho_hat[t - 1] + rho_hat[t]) {
            rho_hat[t + 1] = (rho_hat[t - 1] + rho_hat[t]) / 2;
            rho_hat[t + 2] = rho_hat[t + 1];
        }
    }
    const double draws = double(n * m);
    double tau = -1.0 + rho_hat[max_t + 1];
    for (Eigen::Index k = 0; k <= max_t; ++k) {
        tau += 2.0 * rho_hat[k];
    }
    tau = std::max(tau, 1.0 / std::log10(draws));
    return draws / tau;
}

double split_rhat(const ChainColumns& chains)
{
    const ChainColumns split = split_chains(chains);
    const double bulk        = rhat_basic(rank_normalize(split));

    std::vector<double> pooled(split.data(), split.data() + split.size());
    std::sort(pooled.begin(), pooled.end());
    const std::size_t mid = pooled.size() / 2;
    const double median   = pooled.size() % 2 ? pooled[mid] : 0.5 * (pooled[mid - 1] + pooled[mid]);
    const ChainColumns fold = (split.array() - median).abs().matrix();
    const double tail       = rhat_basic(rank_normalize(fold));
    return std::max(bulk, tail);
}

double ess_bulk(const ChainColumns& chains)
{
    return ess_basic(rank_normalize(split_chains(chains)));
}

double mcse_mean(const ChainColumns& chains)
{
    const double n    = double(chains.size());
    const double mean = chains.mean();
    const double sd   = std::sqrt((chains.array() - mean).square().sum() / (n - 1.0));
    return sd / std::sqrt(ess_basic(split_chains(chains)));
}

ChainColumns chain_columns(const DrawMatrix& draws, Eigen::Index param)
{
    ChainColumns out(draws.num_samples, draws.num_chains);
    for (int c = 0; c < draws.num_chains; ++c) {
        out.col(c) = draws.chain(c).col(param);
    }
    return out;
}

DiagnosticsReport diagnostics(const DrawMatrix& draws)
{
    if (draws.num_chains < 2 || draws.num_samples < 4) {
        throw ArgumentError("diagnostics: need at least 2 chains with 4 draws each");
    }
    DiagnosticsReport report;
    for (Eigen::Index j = 0; j < num_params; ++j) {
        const ChainColumns cols = chain_columns(draws, j);
        report.parameters[j]    = {split_rhat(cols), ess_bulk(cols)};
    }
    report.divergences = draws.divergence_count();
    return report;
}

} // namespace skewcast
