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
#include "skewcast/sampler.hpp"
#include "skewcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace skewcast
{

Rng make_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                      std::uint32_t(stream >> 32), 0x5ca1ab1eu};
    return Rng(seq);
}

void SamplerConfig::validate() const
{
    if (chains < 1 || warmup < 1 || samples < 1 || max_tree_depth < 1) {
        throw ArgumentError("sampler config: chains, warmup, samples and max_tree_depth must be positive");
    }
    if (!(target_accept > 0 && target_accept < 1)) {
        throw ArgumentError("sampler config: target_accept must lie in (0, 1)");
    }
}

std::vector<ParamVector> sample_initials(const PriorSpec& prior, int chains, Rng& rng)
{
    prior.validate();
    std::vector<ParamVector> inits;
    inits.reserve(chains);
    if (prior.is_flat()) {
        std::uniform_real_distribution<double> unif(-2.0, 2.0);
        for (int c = 0; c < chains; ++c) {
            ParamVector theta;
            for (Eigen::Index j = 0; j < num_params; ++j) {
                theta[j] = unif(rng);
            }
            inits.push_back(theta);
        }
        return inits;
    }

    ParamVector sd = prior.effective_sd();
    sd[LogP]       = prior.sd[LogP] * (prior.p_free ? 1.0 : prior.inflation);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int c = 0; c < chains; ++c) {
        ParamVector theta;
        theta[LogP]     = prior.mean[LogP] + sd[LogP] * normal(rng);
        theta[LogAlpha] = prior.mean[LogAlpha] + sd[LogAlpha] * normal(rng);
        double beta     = -1.0;
        for (int attempt = 0; !(beta > 0); ++attempt) {
            if (attempt == 1000) {
                throw SamplerError("sample_initials: 1000 non-positive beta draws; prior too wide");
            }
            beta = prior.mean[LogBeta] + sd[LogBeta] * normal(rng);
        }
        theta[LogBeta] = std::log(beta);
        theta[Eta]     = prior.mean[Eta] + sd[Eta] * normal(rng);
        inits.push_back(theta);
    }
    return inits;
}

namespace
{

constexpr double max_delta_h = 1000.0;

struct PhasePoint {
    ParamVector q;
    ParamVector p;
    ParamVector grad;
    double logp = 0.0;
};

double log_sum_exp(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    if (b == -std::numeric_limits<double>::infinity()) {
        return a;
    }
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// Dual averaging of log step size.
class StepsizeAdaptation
{
public:
    explicit StepsizeAdaptation(double target)
        : target_(target)
    {
    }

    void set_mu(double mu) { mu_ = mu; }

    void restart()
    {
        counter_ = 0;
        s_bar_   = 0;
        x_bar_   = 0;
    }

    double learn(double accept_stat)
    {
        ++counter_;
        accept_stat      = std::min(1.0, accept_stat);
        const double eta = 1.0 / (counter_ + t0_);
        s_bar_           = (1.0 - eta) * s_bar_ + eta * (target_ - accept_stat);
        const double x   = mu_ - s_bar_ * std::sqrt(double(counter_)) / gamma_;
        const double w   = std::pow(double(counter_), -kappa_);
        x_bar_           = (1.0 - w) * x_bar_ + w * x;
        return std::exp(x);
    }

    double final_stepsize() const { return std::exp(x_bar_); }

private:
    static constexpr double gamma_ = 0.05;
    static constexpr double kappa_ = 0.75;
    static constexpr double t0_    = 10.0;
    double target_;
    double mu_    = std::log(10.0);
    double s_bar_ = 0;
    double x_bar_ = 0;
    int counter_  = 0;
};

/// Diagonal metric estimation over an initial buffer, doubling windows and a terminal buffer.
class MetricAdaptation
{
public:
    explicit MetricAdaptation(int num_warmup)
        : num_warmup_(num_warmup)
    {
        if (num_warmup < 20) {
            enabled_ = false;
            return;
        }
        if (init_buffer_ + base_window_ + term_buffer_ > num_warmup) {
            init_buffer_ = static_cast<int>(0.15 * num_warmup);
            term_buffer_ = static_cast<int>(0.1 * num_warmup);
            base_window_ = num_warmup - (init_buffer_ + term_buffer_);
        }
        window_size_ = base_window_;
        next_window_ = init_buffer_ + window_size_ - 1;
    }

    /// Feeds one warmup position; returns true when `inv_metric` was updated.
    bool learn(ParamVector& inv_metric, const ParamVector& q)
    {
        if (!enabled_) {
            return false;
        }
        if (in_window()) {
            ++n_;
            const ParamVector delta = q - mean_;
            mean_ += delta / double(n_);
            m2_ += delta.cwiseProduct(q - mean_);
        }
        if (end_of_window()) {
            compute_next_window();
            const double n = double(n_);
            const ParamVector var = m2_ / (n - 1.0);
            inv_metric = (n / (n + 5.0)) * var + ParamVector::Constant(1e-3 * 5.0 / (n + 5.0));
            n_    = 0;
            mean_ = ParamVector::Zero();
            m2_   = ParamVector::Zero();
            ++counter_;
            return true;
        }
        ++counter_;
        return false;
    }

private:
    bool in_window() const
    {
        return counter_ >= init_buffer_ && counter_ < num_warmup_ - term_buffer_ && counter_ != num_warmup_;
    }

    bool end_of_window() const { return counter_ == next_window_ && counter_ != num_warmup_; }

    void compute_next_window()
    {
        const int last = num_warmup_ - term_buffer_ - 1;
        if (next_window_ == last) {
            return;
        }
        window_size_ *= 2;
        next_window_ = counter_ + window_size_;
        if (next_window_ != last && next_window_ + 2 * window_size_ >= num_warmup_ - term_buffer_) {
            next_window_ = last;
        }
    }

    int num_warmup_;
    bool enabled_     = true;
    int init_buffer_  = 75;
    int term_buffer_  = 50;
    int base_window_  = 25;
    int window_size_  = 0;
    int next_window_  = 0;
    int counter_      = 0;
    int n_            = 0;
    ParamVector mean_ = ParamVector::Zero();
    ParamVector m2_   = ParamVector::Zero();
};

struct TransitionInfo {
    double accept_stat;
    bool divergent;
};

class NutsChain
{
public:
    NutsChain(const LogDensity& logpost, const SamplerConfig& cfg, Rng rng)
        : logpost_(logpost)
        , cfg_(cfg)
        , rng_(std::move(rng))
    {
    }

    void run(const ParamVector& init, int chain, DrawMatrix& out)
    {
        z_.q = init;
        evaluate(z_);
        if (!std::isfinite(z_.logp)) {
            throw SamplerError("nuts: non-finite log density at the initial point of chain " + std::to_string(chain));
        }
        init_stepsize();
        StepsizeAdaptation stepsize_adapt(cfg_.target_accept);
        stepsize_adapt.set_mu(std::log(10.0 * epsilon_));
        MetricAdaptation metric_adapt(cfg_.warmup);

        for (int iter = 0; iter < cfg_.warmup; ++iter) {
            const TransitionInfo info = transition();
            epsilon_                  = stepsize_adapt.learn(info.accept_stat);
            if (metric_adapt.learn(inv_metric_, z_.q)) {
                init_stepsize();
                stepsize_adapt.set_mu(std::log(10.0 * epsilon_));
                stepsize_adapt.restart();
            }
        }
        epsilon_ = stepsize_adapt.final_stepsize();

        const Eigen::Index offset = Eigen::Index(chain) * cfg_.samples;
        for (int iter = 0; iter < cfg_.samples; ++iter) {
            const TransitionInfo info        = transition();
            out.values.row(offset + iter)    = z_.q.transpose();
            out.lp[offset + iter]            = z_.logp;
            out.divergent[offset + iter]     = info.divergent;
        }
        out.stepsize[chain]   = epsilon_;
        out.inv_metric[chain] = inv_metric_;
    }

private:
    void evaluate(PhasePoint& z) const
    {
        const ValueAndGradient r = logpost_(z.q);
        z.logp                   = r.value;
        z.grad                   = r.gradient;
        if (std::isnan(z.logp) || !z.grad.allFinite()) {
            z.logp = -std::numeric_limits<double>::infinity();
        }
    }

    double hamiltonian(const PhasePoint& z) const
    {
        const double h = -z.logp + 0.5 * z.p.cwiseProduct(inv_metric_).dot(z.p);
        return std::isnan(h) ? std::numeric_limits<double>::infinity() : h;
    }

    ParamVector velocity(const ParamVector& p) const { return inv_metric_.cwiseProduct(p); }

    void leapfrog(PhasePoint& z, double eps) const
    {
        z.p += 0.5 * eps * z.grad;
        z.q += eps * velocity(z.p);
        evaluate(z);
        z.p += 0.5 * eps * z.grad;
    }

    void sample_momentum(PhasePoint& z)
    {
        for (Eigen::Index j = 0; j < num_params; ++j) {
            z.p[j] = normal_(rng_) / std::sqrt(inv_metric_[j]);
        }
    }

    /// Doubles or halves epsilon until a single leapfrog step crosses 50% acceptance.
    void init_stepsize()
    {
        const PhasePoint start = z_;
        sample_momentum(z_);
        double h0 = hamiltonian(z_);
        leapfrog(z_, epsilon_);
        double delta_h        = h0 - hamiltonian(z_);
        const double log_half = std::log(0.5);
        const int direction   = delta_h > log_half ? 1 : -1;
        for (;;) {
            z_ = start;
            sample_momentum(z_);
            h0 = hamiltonian(z_);
            leapfrog(z_, epsilon_);
            delta_h = h0 - hamiltonian(z_);
            if (direction == 1 && !(delta_h > log_half)) {
                break;
            }
            if (direction == -1 && !(delta_h < log_half)) {
                break;
            }
            epsilon_ = direction == 1 ? 2.0 * epsilon_ : 0.5 * epsilon_;
            if (epsilon_ > 1e7) {
                throw SamplerError("nuts: step size diverged during initialisation (improper posterior?)");
            }
            if (epsilon_ == 0) {
                throw SamplerError("nuts: step size collapsed to zero during initialisation");
            }
        }
        z_ = start;
    }

    static bool no_u_turn(const ParamVector& p_sharp_minus, const ParamVector& p_sharp_plus, const ParamVector& rho)
    {
        return p_sharp_plus.dot(rho) > 0 && p_sharp_minus.dot(rho) > 0;
    }

    TransitionInfo transition()
    {
        sample_momentum(z_);
        const PhasePoint z_init = z_;
        PhasePoint z_fwd = z_, z_bck = z_, z_sample = z_, z_propose = z_;

        ParamVector p_fwd_fwd = z_.p, p_fwd_bck = z_.p, p_bck_fwd = z_.p, p_bck_bck = z_.p;
        ParamVector p_sharp_fwd_fwd = velocity(z_.p);
        ParamVector p_sharp_fwd_bck = p_sharp_fwd_fwd, p_sharp_bck_fwd = p_sharp_fwd_fwd,
                    p_sharp_bck_bck = p_sharp_fwd_fwd;
        ParamVector rho = z_.p;

        double log_sum_weight = 0.0;
        const double h0       = hamiltonian(z_);
        n_leapfrog_           = 0;
        sum_metro_prob_       = 0.0;
        divergent_            = false;

        for (int depth = 0; depth < cfg_.max_tree_depth; ++depth) {
            ParamVector rho_fwd = ParamVector::Zero(), rho_bck = ParamVector::Zero();
            double log_sum_weight_subtree = -std::numeric_limits<double>::infinity();
            bool valid_subtree;
            if (uniform_(rng_) > 0.5) {
                z_              = z_fwd;
                rho_bck         = rho;
                p_bck_fwd       = p_fwd_bck;
                p_sharp_bck_fwd = p_sharp_fwd_bck;
                valid_subtree   = build_tree(depth, z_propose, p_sharp_fwd_bck, p_sharp_fwd_fwd, rho_fwd, p_fwd_bck,
                                             p_fwd_fwd, h0, 1.0, log_sum_weight_subtree);
                z_fwd = z_;
            }
            else {
                z_              = z_bck;
                rho_fwd         = rho;
                p_fwd_bck       = p_bck_fwd;
                p_sharp_fwd_bck = p_sharp_bck_fwd;
                valid_subtree   = build_tree(depth, z_propose, p_sharp_bck_fwd, p_sharp_bck_bck, rho_bck, p_bck_fwd,
                                             p_bck_bck, h0, -1.0, log_sum_weight_subtree);
                z_bck = z_;
            }
            if (!valid_subtree) {
                break;
            }
            if (log_sum_weight_subtree > log_sum_weight) {
                z_sample = z_propose;
            }
            else if (uniform_(rng_) < std::exp(log_sum_weight_subtree - log_sum_weight)) {
                z_sample = z_propose;
            }
            log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);

            rho = rho_bck + rho_fwd;
            bool persist = no_u_turn(p_sharp_bck_bck, p_sharp_fwd_fwd, rho);
            persist      = persist && no_u_turn(p_sharp_bck_bck, p_sharp_fwd_bck, rho_bck + p_fwd_bck);
            persist      = persist && no_u_turn(p_sharp_bck_fwd, p_sharp_fwd_fwd, rho_fwd + p_bck_fwd);
            if (!persist) {
                break;
            }
        }
        z_ = n_leapfrog_ > 0 ? z_sample : z_init;
        const double accept = n_leapfrog_ > 0 ? sum_metro_prob_ / n_leapfrog_ : 0.0;
        return {accept, divergent_};
    }

    bool build_tree(int depth, PhasePoint& z_propose, ParamVector& p_sharp_beg, ParamVector& p_sharp_end,
                    ParamVector& rho, ParamVector& p_beg, ParamVector& p_end, double h0, double sign,
                    double& log_sum_weight)
    {
        if (depth == 0) {
            leapfrog(z_, sign * epsilon_);
            ++n_leapfrog_;
            const double h = hamiltonian(z_);
            if (h - h0 > max_delta_h) {
                divergent_ = true;
            }
            log_sum_weight = log_sum_exp(log_sum_weight, h0 - h);
            sum_metro_prob_ += h0 - h > 0 ? 1.0 : std::exp(h0 - h);
            z_propose   = z_;
            p_sharp_beg = velocity(z_.p);
            p_sharp_end = p_sharp_beg;
            rho += z_.p;
            p_beg = z_.p;
            p_end = p_beg;
            return !divergent_;
        }

        ParamVector p_sharp_init_end, p_init_end;
        ParamVector rho_init       = ParamVector::Zero();
        double log_sum_weight_init = -std::numeric_limits<double>::infinity();
        if (!build_tree(depth - 1, z_propose, p_sharp_beg, p_sharp_init_end, rho_init, p_beg, p_init_end, h0, sign,
                        log_sum_weight_init)) {
            return false;
        }

        PhasePoint z_propose_final = z_;
        ParamVector p_sharp_final_beg, p_final_beg;
        ParamVector rho_final       = ParamVector::Zero();
        double log_sum_weight_final = -std::numeric_limits<double>::infinity();
        if (!build_tree(depth - 1, z_propose_final, p_sharp_final_beg, p_sharp_end, rho_final, p_final_beg, p_end,
                        h0, sign, log_sum_weight_final)) {
            return false;
        }

        const double log_sum_weight_subtree = log_sum_exp(log_sum_weight_init, log_sum_weight_final);
        log_sum_weight                      = log_sum_exp(log_sum_weight, log_sum_weight_subtree);
        if (log_sum_weight_final > log_sum_weight_subtree) {
            z_propose = z_propose_final;
        }
        else if (uniform_(rng_) < std::exp(log_sum_weight_final - log_sum_weight_subtree)) {
            z_propose = z_propose_final;
        }

        const ParamVector rho_subtree = rho_init + rho_final;
        rho += rho_subtree;
        bool persist = no_u_turn(p_sharp_beg, p_sharp_end, rho_subtree);
        persist      = persist && no_u_turn(p_sharp_beg, p_sharp_final_beg, rho_init + p_final_beg);
        persist      = persist && no_u_turn(p_sharp_init_end, p_sharp_end, rho_final + p_init_end);
        return persist;
    }

    const LogDensity& logpost_;
    const SamplerConfig& cfg_;
    Rng rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    PhasePoint z_;
    ParamVector inv_metric_ = ParamVector::Ones();
    double epsilon_         = 1.0;
    int n_leapfrog_         = 0;
    double sum_metro_prob_  = 0.0;
    bool divergent_         = false;
};

} // namespace

DrawMatrix nuts_sample(const LogDensity& logpost, std::span<const ParamVector> init, const SamplerConfig& cfg)
{
    cfg.validate();
    if (init.size() != std::size_t(cfg.chains)) {
        throw ArgumentError("nuts_sample: need exactly one initial point per chain");
    }
    DrawMatrix out;
    out.num_chains  = cfg.chains;
    out.num_samples = cfg.samples;
    const Eigen::Index total = Eigen::Index(cfg.chains) * cfg.samples;
    out.values.resize(total, num_params);
    out.lp.resize(total);
    out.divergent.resize(total);
    out.stepsize.assign(cfg.chains, 0.0);
    out.inv_metric.assign(cfg.chains, ParamVector::Ones());

    std::vector<std::exception_ptr> failures(cfg.chains);
    {
        std::vector<std::jthread> workers;
        workers.reserve(cfg.chains);
        for (int c = 0; c < cfg.chains; ++c) {
            workers.emplace_back([&, c] {
                try {
                    NutsChain chain(logpost, cfg, make_rng(cfg.seed, std::uint64_t(c)));
                    chain.run(init[c], c, out);
                }
                catch (...) {
                    failures[c] = std::current_exception();
                }
            });
        }
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    if (out.divergence_count() > 0.9 * double(total)) {
        throw SamplerError("nuts: more than 90% of post-warmup transitions diverged");
    }
    return out;
}

DrawMatrix fit_posterior(const DeathSeries& series, const PriorSpec& prior, const SamplerConfig& cfg)
{
    cfg.validate();
    const LogDensity logpost = make_logpost(series, prior);
    Rng init_rng             = make_rng(cfg.seed, streams::initial_values);
    const auto inits         = sample_initials(prior, cfg.chains, init_rng);
    DrawMatrix draws         = nuts_sample(logpost, inits, cfg);
    draws.values.col(LogBeta) = draws.values.col(LogBeta).array().exp().matrix();
    return draws;
}

} // namespace skewcast
