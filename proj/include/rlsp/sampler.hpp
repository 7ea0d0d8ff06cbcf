#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "rlsp/errors.hpp"
#include "rlsp/likelihood.hpp"

namespace rlsp {

struct SamplerConfig {
    double proposal_std = 0.2;   // isotropic Gaussian random-walk scale
    int num_samples = 20000;     // retained draws, after burn-in
    int burn_in = 2000;          // discarded leading steps
    uint64_t seed = 0;
    bool reuse_workspace = true; // reuse planner buffers across evaluations
};

struct PosteriorSamples {
    std::vector<Eigen::VectorXd> samples;
    double acceptance_rate = 0.0;  // over all proposals, burn-in included
    uint64_t seed = 0;
};

// Random-walk Metropolis-Hastings over theta targeting
// p(theta | s0) proportional to p(s0 | theta) N(theta; mean, std^2 I).
//
// The chain starts from a draw of the prior, retrying (up to 100 times) past
// thetas that give the evidence probability zero; the symmetric proposal
// theta' = theta + proposal_std * N(0, I) is accepted in log space, and -inf
// likelihoods are rejected for free. Exactly num_samples draws are returned;
// burn-in never leaks into the output. The workspace toggle only controls
// buffer reuse, so results for a fixed seed are identical either way.
inline PosteriorSamples mcmc_sample(const TabularMdp& mdp, const RlspConfig& config, int s0,
                                    const SamplerConfig& sampler) {
    detail::check_rlsp_config(mdp, config);
    if (sampler.num_samples < 0 || sampler.burn_in < 0)
        throw std::invalid_argument("mcmc_sample: negative sample counts");
    if (!(sampler.proposal_std > 0.0))
        throw std::invalid_argument("mcmc_sample: proposal_std must be > 0");
    const int F = mdp.num_features();
    if (config.theta_mean.size() != F)
        throw std::invalid_argument("mcmc_sample: theta_mean length != F");

    std::mt19937_64 rng(sampler.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double neg_inf = -std::numeric_limits<double>::infinity();

    std::unique_ptr<RlspEngine> shared;
    if (sampler.reuse_workspace) shared = std::make_unique<RlspEngine>(mdp, config);
    auto log_post = [&](const Eigen::VectorXd& theta) {
        double ll = sampler.reuse_workspace
                        ? shared->log_likelihood(theta, s0)
                        : RlspEngine(mdp, config).log_likelihood(theta, s0);
        if (!std::isfinite(ll)) return neg_inf;
        return ll + detail::log_gaussian_prior(theta, config.theta_mean, config.theta_std);
    };

    Eigen::VectorXd theta(F);
    double post = neg_inf;
    bool started = false;
    for (int attempt = 0; attempt < 100 && !started; ++attempt) {
        for (int f = 0; f < F; ++f)
            theta[f] = config.theta_mean[f] + config.theta_std * normal(rng);
        post = log_post(theta);
        started = std::isfinite(post);
    }
    if (!started)
        throw ImpossibleEvidenceError(
            "mcmc_sample: no prior draw explains the evidence (100 attempts)");

    PosteriorSamples out;
    out.seed = sampler.seed;
    out.samples.reserve(sampler.num_samples);

    const int total = sampler.burn_in + sampler.num_samples;
    long accepted = 0;
    Eigen::VectorXd proposal(F);
    for (int step = 0; step < total; ++step) {
        for (int f = 0; f < F; ++f)
            proposal[f] = theta[f] + sampler.proposal_std * normal(rng);
        double cand = log_post(proposal);
        if (std::isfinite(cand) && std::log(unif(rng)) < cand - post) {
            theta = proposal;
            post = cand;
            ++accepted;
        }
        if (step >= sampler.burn_in) out.samples.push_back(theta);
    }
    out.acceptance_rate = total > 0 ? (double)accepted / total : 0.0;
    return out;
}

inline Eigen::VectorXd posterior_mean(const PosteriorSamples& samples) {
    if (samples.samples.empty())
        throw std::invalid_argument("posterior_mean: no samples");
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(samples.samples[0].size());
    for (const auto& s : samples.samples) mean += s;
    return mean / (double)samples.samples.size();
}

}  // namespace rlsp
