#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlsp/errors.hpp"
#include "rlsp/feature_expectations.hpp"
#include "rlsp/mdp.hpp"
#include "rlsp/planning.hpp"
#include "rlsp/rollout.hpp"

namespace rlsp {

// Everything the past-simulation likelihood needs besides theta: how many
// steps of history to explain, where that history may have started, and the
// Gaussian prior/optimizer settings for MAP inference.
struct RlspConfig {
    int horizon = 1;                  // steps of unobserved history before s0
    StateDistribution start_prior;    // over the state horizon steps ago
    Eigen::VectorXd theta_mean;       // Gaussian prior mean on theta
    double theta_std = 1.0;
    double step_size = 0.1;
    int max_iterations = 500;
    double tolerance = 1e-5;          // sup-norm of the posterior gradient
};

struct GradientResult {
    Eigen::VectorXd gradient;  // d/dtheta ln p(s0 | theta)
    double log_likelihood = 0.0;
};

struct InferredReward {
    Eigen::VectorXd theta;
    double log_posterior = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // accepted log-posterior values, start included
};

namespace detail {

inline void check_rlsp_config(const TabularMdp& mdp, const RlspConfig& cfg) {
    if (cfg.horizon < 1) throw std::invalid_argument("RlspConfig: horizon must be >= 1");
    validate_distribution(cfg.start_prior, mdp.num_states());
}

inline double log_gaussian_prior(const Eigen::VectorXd& theta, const Eigen::VectorXd& mean,
                                 double std_dev) {
    const double n = (double)theta.size();
    const double var = std_dev * std_dev;
    return -0.5 * (theta - mean).squaredNorm() / var -
           0.5 * n * std::log(2.0 * M_PI * var);
}

inline Eigen::VectorXd log_gaussian_prior_grad(const Eigen::VectorXd& theta,
                                               const Eigen::VectorXd& mean, double std_dev) {
    return (mean - theta) / (std_dev * std_dev);
}

}  // namespace detail

// Shared workspace for repeated likelihood/gradient evaluations against one
// (mdp, config) pair. Reusing an engine only reuses allocations; results are
// bitwise identical to a fresh engine.
class RlspEngine {
public:
    RlspEngine(const TabularMdp& mdp, const RlspConfig& config)
        : mdp_(&mdp), cfg_(config) {
        detail::check_rlsp_config(mdp, config);
    }

    const RlspConfig& config() const { return cfg_; }

    // ln p(s0 | theta): soft value iteration at temperature 1 over the
    // history horizon, then the forward marginal of s0. The final-timestep
    // action marginalizes out of the observation likelihood.
    double log_likelihood(const RewardParams& theta, int s0) {
        run_policy(theta);
        double p = marg_.back()[s0];
        return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    }

    // Exact gradient of ln p(s0 | theta) by dynamic programming. With T the
    // history horizon and k = 0..T indexing history time (k = T is the
    // observation), propagate alongside the marginals p_k:
    //
    //   G_0(s) = 0
    //   g_k(s,a) = f(s) + E_{s'|s,a} Fcal[k+1][s'] - Fcal[k][s]
    //   G_{k+1}(s') = sum_{s,a} T(s'|s,a) pi_k(a|s) (p_k(s) g_k(s,a) + G_k(s))
    //
    // and read off grad = G_T(s0) / p_T(s0). Throws ImpossibleEvidenceError
    // when p_T(s0) = 0, where the gradient is undefined.
    GradientResult gradient(const RewardParams& theta, int s0) {
        run_policy(theta);
        const int T = cfg_.horizon;
        double p0 = marg_.back()[s0];
        if (p0 <= 0.0)
            throw ImpossibleEvidenceError(
                "rlsp_gradient: observed state has zero probability for this theta");

        fcal_ = feature_expectations(*mdp_, plan_.policy);
        const int S = mdp_->num_states(), A = mdp_->num_actions(), F = mdp_->num_features();
        const int* nx = mdp_->next().data();
        const double* pr = mdp_->prob().data();
        const FeatureMatrix& feat = mdp_->features();

        g_cur_.assign((size_t)S * F, 0.0);
        g_next_.assign((size_t)S * F, 0.0);
        active_cur_.assign(S, 0);
        active_next_.assign(S, 0);
        for (int s = 0; s < S; ++s) active_cur_[s] = marg_[0][s] > 0.0;

        std::vector<double> gsa(F), base(F);
        for (int k = 0; k < T; ++k) {
            std::fill(g_next_.begin(), g_next_.end(), 0.0);
            std::fill(active_next_.begin(), active_next_.end(), 0);
            const double* fplane_k = fcal_.data.data() + (size_t)k * S * F;
            const double* fplane_k1 = fcal_.data.data() + (size_t)(k + 1) * S * F;
            for (int s = 0; s < S; ++s) {
                if (!active_cur_[s]) continue;
                const double ps = marg_[k][s];
                const double* gk = g_cur_.data() + (size_t)s * F;
                const double* prow = plan_.policy.row(k, s);
                for (int a = 0; a < A; ++a) {
                    double w = prow[a];
                    if (w == 0.0) continue;
                    for (int f = 0; f < F; ++f) gsa[f] = feat(s, f) - fplane_k[(size_t)s * F + f];
                    for (size_t i = mdp_->row_begin(s, a); i < mdp_->row_end(s, a); ++i) {
                        const double* src = fplane_k1 + (size_t)nx[i] * F;
                        for (int f = 0; f < F; ++f) gsa[f] += pr[i] * src[f];
                    }
                    for (int f = 0; f < F; ++f) base[f] = ps * gsa[f] + gk[f];
                    for (size_t i = mdp_->row_begin(s, a); i < mdp_->row_end(s, a); ++i) {
                        double wp = w * pr[i];
                        double* dst = g_next_.data() + (size_t)nx[i] * F;
                        for (int f = 0; f < F; ++f) dst[f] += wp * base[f];
                        active_next_[nx[i]] = 1;
                    }
                }
            }
            std::swap(g_cur_, g_next_);
            std::swap(active_cur_, active_next_);
        }

        GradientResult res;
        res.log_likelihood = std::log(p0);
        res.gradient = Eigen::Map<const Eigen::VectorXd>(g_cur_.data() + (size_t)s0 * F, F) / p0;
        return res;
    }

    // Accumulated-gradient table at the final step, before conditioning on
    // s0. Exposed for normalization checks: its rows sum to zero exactly in
    // expectation because each g_k has zero mean under the policy.
    Eigen::MatrixXd final_gradient_table(const RewardParams& theta) {
        // Run against an arbitrary feasible s0 to fill the tables.
        run_policy(theta);
        int s0 = 0;
        for (int s = 0; s < mdp_->num_states(); ++s)
            if (marg_.back()[s] > 0.0) { s0 = s; break; }
        gradient(theta, s0);
        const int S = mdp_->num_states(), F = mdp_->num_features();
        Eigen::MatrixXd table(S, F);
        for (int s = 0; s < S; ++s)
            for (int f = 0; f < F; ++f) table(s, f) = g_cur_[(size_t)s * F + f];
        return table;
    }

    const std::vector<StateDistribution>& marginals() const { return marg_; }
    const SoftPlan& plan() const { return plan_; }

private:
    // Planning and marginals depend on theta alone (the config is fixed per
    // engine), so consecutive calls with the same theta reuse the tables.
    void run_policy(const RewardParams& theta) {
        if (have_plan_ && theta.size() == last_theta_.size() && theta == last_theta_) return;
        plan_ = soft_value_iteration(*mdp_, theta, cfg_.horizon, 1.0);
        marg_ = forward_marginals(*mdp_, plan_.policy, cfg_.start_prior, cfg_.horizon);
        last_theta_ = theta;
        have_plan_ = true;
    }
    const TabularMdp* mdp_;
    RlspConfig cfg_;
    Eigen::VectorXd last_theta_;
    bool have_plan_ = false;
    SoftPlan plan_;
    std::vector<StateDistribution> marg_;
    FeatureExpectations fcal_;
    std::vector<double> g_cur_, g_next_;
    std::vector<uint8_t> active_cur_, active_next_;
};

inline double log_likelihood_s0(const TabularMdp& mdp, const RewardParams& theta,
                                const RlspConfig& config, int s0) {
    RlspEngine engine(mdp, config);
    return engine.log_likelihood(theta, s0);
}

inline GradientResult rlsp_gradient(const TabularMdp& mdp, const RewardParams& theta,
                                    const RlspConfig& config, int s0) {
    RlspEngine engine(mdp, config);
    return engine.gradient(theta, s0);
}

namespace detail {

template <typename Visit>
inline void enumerate_histories(const TabularMdp& mdp, const SoftPolicy& policy, int horizon,
                                int t, int s, double prob, std::vector<int>& states,
                                std::vector<int>& actions, Visit&& visit) {
    if (t == horizon) {
        visit(states, actions, prob);
        return;
    }
    for (int a = 0; a < mdp.num_actions(); ++a) {
        double pa = policy.pi(t, s, a);
        if (pa == 0.0) continue;
        for (size_t i = mdp.row_begin(s, a); i < mdp.row_end(s, a); ++i) {
            actions.push_back(a);
            states.push_back(mdp.next()[i]);
            enumerate_histories(mdp, policy, horizon, t + 1, mdp.next()[i],
                                prob * pa * mdp.prob()[i], states, actions, visit);
            states.pop_back();
            actions.pop_back();
        }
    }
}

}  // namespace detail

// Reference likelihood by explicit enumeration of every length-T history
// ending anywhere, summing the probability of those that end in s0. The
// final action is not part of the event, matching log_likelihood_s0.
// Exponential in T; guarded for use on small test MDPs only.
inline double brute_force_log_likelihood(const TabularMdp& mdp, const RewardParams& theta,
                                         const RlspConfig& config, int s0) {
    detail::check_rlsp_config(mdp, config);
    double paths = std::pow((double)mdp.num_actions() * mdp.num_states(), config.horizon) *
                   mdp.num_states();
    if (paths > 5e7)
        throw std::invalid_argument("brute_force_log_likelihood: state space too large");

    SoftPlan plan = soft_value_iteration(mdp, theta, config.horizon, 1.0);
    double total = 0.0;
    std::vector<int> states, actions;
    for (int s = 0; s < mdp.num_states(); ++s) {
        if (config.start_prior[s] == 0.0) continue;
        states.assign(1, s);
        actions.clear();
        detail::enumerate_histories(
            mdp, plan.policy, config.horizon, 0, s, config.start_prior[s], states, actions,
            [&](const std::vector<int>& st, const std::vector<int>&, double p) {
                if (st.back() == s0) total += p;
            });
    }
    return total > 0.0 ? std::log(total) : -std::numeric_limits<double>::infinity();
}

// Reference gradient: the exact DP above computes
// E[grad ln p(history) | history ends at s0]; here the expectation is done
// literally, weighting each enumerated history's trajectory_gradient by its
// posterior probability. Also exponential in T.
inline Eigen::VectorXd brute_force_gradient(const TabularMdp& mdp, const RewardParams& theta,
                                            const RlspConfig& config, int s0) {
    detail::check_rlsp_config(mdp, config);
    SoftPlan plan = soft_value_iteration(mdp, theta, config.horizon, 1.0);
    FeatureExpectations fcal = feature_expectations(mdp, plan.policy);

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(mdp.num_features());
    double total = 0.0;
    std::vector<int> states, actions;
    for (int s = 0; s < mdp.num_states(); ++s) {
        if (config.start_prior[s] == 0.0) continue;
        states.assign(1, s);
        actions.clear();
        detail::enumerate_histories(
            mdp, plan.policy, config.horizon, 0, s, config.start_prior[s], states, actions,
            [&](const std::vector<int>& st, const std::vector<int>& ac, double p) {
                if (st.back() != s0) return;
                Trajectory traj{st, ac};
                traj.actions.push_back(0);  // placeholder final action, unused by the sum
                acc += p * trajectory_gradient(mdp, plan.policy, traj, fcal);
                total += p;
            });
    }
    if (total <= 0.0)
        throw ImpossibleEvidenceError("brute_force_gradient: zero evidence probability");
    return acc / total;
}

// MAP inference of theta by fixed-step gradient ascent on
// ln p(s0|theta) + ln N(theta; mean, std^2 I), halving the step while a
// proposal would lower the posterior. Starts at the prior mean.
inline InferredReward rlsp_infer(const TabularMdp& mdp, const RlspConfig& config, int s0) {
    detail::check_rlsp_config(mdp, config);
    if (config.theta_mean.size() != mdp.num_features())
        throw std::invalid_argument("rlsp_infer: theta_mean length != F");

    RlspEngine engine(mdp, config);
    const double neg_inf = -std::numeric_limits<double>::infinity();

    InferredReward out;
    out.theta = config.theta_mean;

    GradientResult g = engine.gradient(out.theta, s0);  // throws if evidence impossible
    double post = g.log_likelihood +
                  detail::log_gaussian_prior(out.theta, config.theta_mean, config.theta_std);
    out.trace.push_back(post);

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        Eigen::VectorXd ascent =
            g.gradient +
            detail::log_gaussian_prior_grad(out.theta, config.theta_mean, config.theta_std);
        if (ascent.lpNorm<Eigen::Infinity>() <= config.tolerance) {
            out.converged = true;
            break;
        }
        out.iterations = iter;

        double step = config.step_size;
        Eigen::VectorXd candidate;
        double cand_post = neg_inf;
        bool accepted = false;
        while (step >= 1e-14) {
            candidate = out.theta + step * ascent;
            double ll = engine.log_likelihood(candidate, s0);
            cand_post = std::isfinite(ll)
                            ? ll + detail::log_gaussian_prior(candidate, config.theta_mean,
                                                              config.theta_std)
                            : neg_inf;
            if (cand_post > post) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow below 1e-14: report not converged

        out.theta = candidate;
        post = cand_post;
        out.trace.push_back(post);
        g = engine.gradient(out.theta, s0);
    }

    out.log_posterior = post;
    return out;
}

}  // namespace rlsp
