#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "rlsp/likelihood.hpp"
#include "rlsp/mdp.hpp"

namespace rlsp {

// Additive tradeoff between the inferred human reward and the operator's
// specified reward: theta_alice + lambda * theta_spec. lambda = 0 trusts the
// inference alone; growing lambda recovers plain task optimization.
inline Eigen::VectorXd combine_additive(const Eigen::VectorXd& theta_alice,
                                        const Eigen::VectorXd& theta_spec, double lambda) {
    if (theta_alice.size() != theta_spec.size())
        throw std::invalid_argument("combine_additive: dimension mismatch (" +
                                    std::to_string(theta_alice.size()) + " vs " +
                                    std::to_string(theta_spec.size()) + ")");
    return theta_alice + lambda * theta_spec;
}

// Bayesian alternative to the additive tradeoff: treat theta_spec as the
// mean of the Gaussian prior and run MAP inference as usual. sigma plays the
// tradeoff role: tiny sigma pins the answer to theta_spec, huge sigma washes
// the specification out and leaves the likelihood in charge.
inline InferredReward infer_with_spec_prior(const TabularMdp& mdp, const RlspConfig& config,
                                            int s0, const Eigen::VectorXd& theta_spec,
                                            double sigma) {
    if (theta_spec.size() != mdp.num_features())
        throw std::invalid_argument("infer_with_spec_prior: theta_spec length != F");
    if (!(sigma > 0.0))
        throw std::invalid_argument("infer_with_spec_prior: sigma must be > 0");
    RlspConfig cfg = config;
    cfg.theta_mean = theta_spec;
    cfg.theta_std = sigma;
    return rlsp_infer(mdp, cfg, s0);
}

}  // namespace rlsp
