#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rlsp/mdp.hpp"

namespace rlsp {

// Time-indexed stochastic policy pi_t(a|s), t = 0..horizon inclusive.
// Stored flat as (horizon+1) * S * A row-major probabilities.
struct SoftPolicy {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    double temperature = 1.0;
    std::vector<double> probs;

    const double* row(int t, int s) const {
        return probs.data() + ((size_t)t * num_states + s) * num_actions;
    }
    double* row(int t, int s) {
        return probs.data() + ((size_t)t * num_states + s) * num_actions;
    }
    double pi(int t, int s, int a) const { return row(t, s)[a]; }
};

// Q and V tables matching a SoftPolicy: V_t = tau * logsumexp(Q_t / tau).
struct ValueTable {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> q;  // (horizon+1) * S * A
    std::vector<double> v;  // (horizon+1) * S

    double q_at(int t, int s, int a) const {
        return q[((size_t)t * num_states + s) * num_actions + a];
    }
    double v_at(int t, int s) const { return v[(size_t)t * num_states + s]; }
};

struct SoftPlan {
    SoftPolicy policy;
    ValueTable values;
};

// Deterministic time-indexed policy; actions flat (horizon+1) * S.
struct DeterministicPolicy {
    int horizon = 0;
    int num_states = 0;
    std::vector<int32_t> actions;

    int action(int t, int s) const { return actions[(size_t)t * num_states + s]; }
};

struct HardPlan {
    DeterministicPolicy policy;
    std::vector<double> v;  // (horizon+1) * S, value-to-go including r_t(s)
    int num_states = 0;

    double v_at(int t, int s) const { return v[(size_t)t * num_states + s]; }
};

namespace detail {

// logsumexp with the max shifted out, so one saturated entry cannot overflow
// the rest. Values may be -inf; an all -inf row yields -inf.
inline double log_sum_exp(const double* x, int n) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) m = std::max(m, x[i]);
    if (!std::isfinite(m)) return m;
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += std::exp(x[i] - m);
    return m + std::log(total);
}

}  // namespace detail

// Finite-horizon soft (maximum entropy) value iteration.
//
//   Q_t(s,a) = r(s) + sum_s' T(s'|s,a) V_{t+1}(s'),   V_{horizon+1} = 0
//   V_t(s)   = tau * logsumexp_a(Q_t(s,a) / tau)
//   pi_t(a|s) = exp((Q_t(s,a) - V_t(s)) / tau)
//
// tau must be positive; the tau -> 0 limit is hard_value_iteration.
inline SoftPlan soft_value_iteration(const TabularMdp& mdp, const RewardParams& theta,
                                     int horizon, double temperature = 1.0) {
    if (horizon < 0) throw std::invalid_argument("soft_value_iteration: horizon < 0");
    if (!(temperature > 0.0))
        throw std::invalid_argument(
            "soft_value_iteration: temperature must be > 0 (use hard_value_iteration)");
    const int S = mdp.num_states(), A = mdp.num_actions();
    const Eigen::VectorXd reward = mdp.state_rewards(theta);
    const double tau = temperature;

    SoftPlan plan;
    plan.policy = {horizon, S, A, tau, std::vector<double>((size_t)(horizon + 1) * S * A)};
    plan.values = {horizon, S, A, std::vector<double>((size_t)(horizon + 1) * S * A),
                   std::vector<double>((size_t)(horizon + 1) * S)};

    const int* nx = mdp.next().data();
    const double* pr = mdp.prob().data();
    std::vector<double> scratch(A);

    for (int t = horizon; t >= 0; --t) {
        const double* vnext =
            (t == horizon) ? nullptr : plan.values.v.data() + (size_t)(t + 1) * S;
        for (int s = 0; s < S; ++s) {
            double* qrow = plan.values.q.data() + ((size_t)t * S + s) * A;
            for (int a = 0; a < A; ++a) {
                double ev = 0.0;
                if (vnext) {
                    for (size_t i = mdp.row_begin(s, a); i < mdp.row_end(s, a); ++i)
                        ev += pr[i] * vnext[nx[i]];
                }
                qrow[a] = reward[s] + ev;
            }
            for (int a = 0; a < A; ++a) scratch[a] = qrow[a] / tau;
            double v = tau * detail::log_sum_exp(scratch.data(), A);
            plan.values.v[(size_t)t * S + s] = v;
            double* prow = plan.policy.row(t, s);
            for (int a = 0; a < A; ++a) prow[a] = std::exp((qrow[a] - v) / tau);
        }
    }
    return plan;
}

// Finite-horizon deterministic value iteration with per-timestep state
// rewards. Ties pick the lowest action index (strict improvement required to
// switch), which pins down the argmax exactly and keeps runs reproducible.
inline HardPlan hard_value_iteration(const TabularMdp& mdp,
                                     const std::vector<Eigen::VectorXd>& rewards,
                                     int horizon) {
    if (horizon < 0) throw std::invalid_argument("hard_value_iteration: horizon < 0");
    if ((int)rewards.size() != horizon + 1)
        throw std::invalid_argument("hard_value_iteration: need horizon+1 reward vectors");
    const int S = mdp.num_states(), A = mdp.num_actions();
    for (const auto& r : rewards)
        if ((int)r.size() != S)
            throw std::invalid_argument("hard_value_iteration: reward length != S");

    HardPlan plan;
    plan.num_states = S;
    plan.policy = {horizon, S, std::vector<int32_t>((size_t)(horizon + 1) * S, 0)};
    plan.v.assign((size_t)(horizon + 1) * S, 0.0);

    const int* nx = mdp.next().data();
    const double* pr = mdp.prob().data();

    for (int t = horizon; t >= 0; --t) {
        const double* vnext = (t == horizon) ? nullptr : plan.v.data() + (size_t)(t + 1) * S;
        for (int s = 0; s < S; ++s) {
            int best_a = 0;
            double best_ev = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < A; ++a) {
                double ev = 0.0;
                if (vnext) {
                    for (size_t i = mdp.row_begin(s, a); i < mdp.row_end(s, a); ++i)
                        ev += pr[i] * vnext[nx[i]];
                }
                if (ev > best_ev) {
                    best_ev = ev;
                    best_a = a;
                }
            }
            if (!vnext) best_ev = 0.0;
            plan.policy.actions[(size_t)t * S + s] = best_a;
            plan.v[(size_t)t * S + s] = rewards[t][s] + best_ev;
        }
    }
    return plan;
}

inline HardPlan hard_value_iteration(const TabularMdp& mdp, const Eigen::VectorXd& reward,
                                     int horizon) {
    return hard_value_iteration(
        mdp, std::vector<Eigen::VectorXd>((size_t)horizon + 1, reward), horizon);
}

// Deterministic policy viewed as a SoftPolicy with one-hot rows. The
// temperature field is set to 0 as a marker; rows are exact delta
// distributions so downstream rollout code needs no special casing.
inline SoftPolicy to_soft_policy(const DeterministicPolicy& det, int num_actions) {
    SoftPolicy sp;
    sp.horizon = det.horizon;
    sp.num_states = det.num_states;
    sp.num_actions = num_actions;
    sp.temperature = 0.0;
    sp.probs.assign((size_t)(det.horizon + 1) * det.num_states * num_actions, 0.0);
    for (int t = 0; t <= det.horizon; ++t)
        for (int s = 0; s < det.num_states; ++s)
            sp.row(t, s)[det.action(t, s)] = 1.0;
    return sp;
}

}  // namespace rlsp
