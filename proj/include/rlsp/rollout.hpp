#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "rlsp/mdp.hpp"
#include "rlsp/planning.hpp"

namespace rlsp {

// State marginals p_0..p_horizon under a time-indexed policy, p_0 = initial.
// horizon may be at most policy.horizon; the policy's final-step action
// distribution never influences the marginals.
inline std::vector<StateDistribution> forward_marginals(const TabularMdp& mdp,
                                                        const SoftPolicy& policy,
                                                        const StateDistribution& initial,
                                                        int horizon) {
    if (horizon < 0 || horizon > policy.horizon)
        throw std::invalid_argument("forward_marginals: horizon out of range");
    validate_distribution(initial, mdp.num_states());
    const int S = mdp.num_states(), A = mdp.num_actions();
    const int* nx = mdp.next().data();
    const double* pr = mdp.prob().data();

    std::vector<StateDistribution> marg;
    marg.reserve(horizon + 1);
    marg.push_back(initial);
    for (int t = 0; t < horizon; ++t) {
        StateDistribution out = StateDistribution::Zero(S);
        const StateDistribution& cur = marg.back();
        for (int s = 0; s < S; ++s) {
            double ps = cur[s];
            if (ps == 0.0) continue;
            const double* prow = policy.row(t, s);
            for (int a = 0; a < A; ++a) {
                double w = ps * prow[a];
                if (w == 0.0) continue;
                for (size_t i = mdp.row_begin(s, a); i < mdp.row_end(s, a); ++i)
                    out[nx[i]] += w * pr[i];
            }
        }
        marg.push_back(std::move(out));
    }
    return marg;
}

// Log-probability of a full trajectory, final action included:
//
//   ln p = ln initial(s_0) + sum_t [ln pi_t(a_t|s_t) + ln T(s_{t+1}|s_t,a_t)]
//          + ln pi_H(a_H|s_H)
//
// Infeasible trajectories return -inf rather than raising; callers that need
// to distinguish logical errors validate the trajectory themselves.
inline double trajectory_log_prob(const TabularMdp& mdp, const SoftPolicy& policy,
                                  const Trajectory& traj, const StateDistribution& initial) {
    traj.validate(mdp);
    if (traj.horizon() != policy.horizon)
        throw std::invalid_argument("trajectory_log_prob: trajectory/policy horizon mismatch");
    validate_distribution(initial, mdp.num_states());
    const double neg_inf = -std::numeric_limits<double>::infinity();
    const int H = traj.horizon();

    double lp = initial[traj.states[0]] > 0.0 ? std::log(initial[traj.states[0]]) : neg_inf;
    for (int t = 0; t <= H && std::isfinite(lp); ++t) {
        double pa = policy.pi(t, traj.states[t], traj.actions[t]);
        if (pa <= 0.0) return neg_inf;
        lp += std::log(pa);
        if (t < H) {
            double pt = mdp.transition(traj.states[t], traj.actions[t], traj.states[t + 1]);
            if (pt <= 0.0) return neg_inf;
            lp += std::log(pt);
        }
    }
    return lp;
}

namespace detail {

inline int sample_index(const double* w, int n, double u) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += w[i];
        if (u < acc) return i;
    }
    // Round-off can leave u marginally above the total; return the last
    // index with positive mass.
    for (int i = n - 1; i >= 0; --i)
        if (w[i] > 0.0) return i;
    throw std::runtime_error("sample_index: all-zero weights");
}

}  // namespace detail

// Draws one trajectory of length policy.horizon (H+1 states, H+1 actions,
// final action sampled from pi_H). Deterministic in the seed.
inline Trajectory sample_trajectory(const TabularMdp& mdp, const SoftPolicy& policy,
                                    const StateDistribution& initial, uint64_t seed) {
    validate_distribution(initial, mdp.num_states());
    const int H = policy.horizon;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Trajectory traj;
    traj.states.reserve(H + 1);
    traj.actions.reserve(H + 1);
    traj.states.push_back(
        detail::sample_index(initial.data(), mdp.num_states(), unif(rng)));
    for (int t = 0; t <= H; ++t) {
        int s = traj.states.back();
        int a = detail::sample_index(policy.row(t, s), policy.num_actions, unif(rng));
        traj.actions.push_back(a);
        if (t == H) break;
        size_t b = mdp.row_begin(s, a), e = mdp.row_end(s, a);
        int k = detail::sample_index(mdp.prob().data() + b, (int)(e - b), unif(rng));
        traj.states.push_back(mdp.next()[b + k]);
    }
    return traj;
}

}  // namespace rlsp
