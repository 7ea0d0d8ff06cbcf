#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlsp/errors.hpp"
#include "rlsp/gridworld.hpp"
#include "rlsp/mdp.hpp"
#include "rlsp/planning.hpp"

namespace rlsp {

// Which states stay reachable from each state within a step budget. Row s is
// a bitset over destinations z: bit set iff z can be reached from s by some
// positive-probability action sequence of length <= horizon_cap. Every state
// reaches itself (length 0), and rows only grow as the cap grows.
class ReachabilityCache {
public:
    ReachabilityCache(int num_states, int horizon_cap)
        : num_states_(num_states),
          horizon_cap_(horizon_cap),
          words_((num_states + 63) / 64),
          bits_((size_t)num_states * words_, 0) {
        if (num_states < 1) throw std::invalid_argument("ReachabilityCache: empty state space");
        if (horizon_cap < 0) throw std::invalid_argument("ReachabilityCache: negative cap");
    }

    int num_states() const { return num_states_; }
    int horizon_cap() const { return horizon_cap_; }

    bool reachable(int from, int to) const {
        return (row(from)[(size_t)to >> 6] >> (to & 63)) & 1u;
    }

    // Coverage shortfall of s relative to a baseline state b: the fraction of
    // states reachable from b that are no longer reachable from s,
    //   d(s, b) = (1/|S|) * |{z : reach(b, z) and not reach(s, z)}|.
    // d(s, s) = 0 and d >= 0 by construction.
    double shortfall(int s, int baseline) const {
        const uint64_t* rs = row(s);
        const uint64_t* rb = row(baseline);
        long long lost = 0;
        for (int w = 0; w < words_; ++w) lost += __builtin_popcountll(rb[w] & ~rs[w]);
        return (double)lost / (double)num_states_;
    }

    const uint64_t* row(int s) const { return bits_.data() + (size_t)s * words_; }
    uint64_t* row(int s) { return bits_.data() + (size_t)s * words_; }
    void set(int from, int to) { row(from)[(size_t)to >> 6] |= uint64_t(1) << (to & 63); }

private:
    int num_states_ = 0;
    int horizon_cap_ = 0;
    int words_ = 0;
    std::vector<uint64_t> bits_;
};

// Breadth-first closure of the positive-probability transition graph, depth
// limited to horizon_cap, from every state. Visited marks are epoch-stamped
// so the scratch arrays are shared across sources without clearing.
inline ReachabilityCache reachability_coverage(const TabularMdp& mdp, int horizon_cap) {
    const int S = mdp.num_states(), A = mdp.num_actions();
    ReachabilityCache cache(S, horizon_cap);

    const int* nx = mdp.next().data();
    std::vector<uint32_t> stamp(S, 0);
    std::vector<int> frontier, next;
    frontier.reserve(S);
    next.reserve(S);

    for (int src = 0; src < S; ++src) {
        const uint32_t ep = (uint32_t)src + 1;
        frontier.clear();
        frontier.push_back(src);
        stamp[src] = ep;
        cache.set(src, src);
        for (int depth = 0; depth < horizon_cap && !frontier.empty(); ++depth) {
            next.clear();
            for (int s : frontier) {
                for (int a = 0; a < A; ++a) {
                    for (size_t i = mdp.row_begin(s, a); i < mdp.row_end(s, a); ++i) {
                        int z = nx[i];
                        if (stamp[z] == ep) continue;
                        stamp[z] = ep;
                        cache.set(src, z);
                        next.push_back(z);
                    }
                }
            }
            frontier.swap(next);
        }
    }
    return cache;
}

// Plain task planner: deterministic value iteration on the specified reward
// over the robot's horizon. The other planners reduce to this at lambda = 0.
inline HardPlan plan_spec(const ScenarioBundle& scenario) {
    const TabularMdp& m = scenario.env.mdp;
    return hard_value_iteration(m, m.state_rewards(scenario.theta_spec),
                                scenario.robot_horizon);
}

// Penalize feature-space deviation from the observed state: the per-state
// reward is theta_spec . f(s) - lambda * ||f(s) - f(s0)||_1.
inline HardPlan plan_deviation(const ScenarioBundle& scenario, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("plan_deviation: lambda < 0");
    const TabularMdp& m = scenario.env.mdp;
    Eigen::VectorXd r = m.state_rewards(scenario.theta_spec);
    const Eigen::RowVectorXd f0 = m.features().row(scenario.s0);
    Eigen::VectorXd dev = (m.features().rowwise() - f0).cwiseAbs().rowwise().sum();
    return hard_value_iteration(m, r - lambda * dev, scenario.robot_horizon);
}

// The state sequence the environment would pass through if the robot only
// ever took the no-op action from s0. This is the inaction baseline for the
// reachability penalty. A stochastic no-op rollout has no single such
// sequence; rather than pick one arbitrarily, refuse.
inline std::vector<int> inaction_rollout(const ScenarioBundle& scenario) {
    const TabularMdp& m = scenario.env.mdp;
    const int H = scenario.robot_horizon;
    const int noop = scenario.env.noop_action;
    std::vector<int> base((size_t)H + 1);
    base[0] = scenario.s0;
    for (int t = 0; t < H; ++t) {
        int s = base[t];
        size_t lo = m.row_begin(s, noop), hi = m.row_end(s, noop);
        if (hi - lo != 1)
            throw BaselineRefusalError(
                "no-op rollout is stochastic at step " + std::to_string(t) + " (state " +
                std::to_string(s) + "); there is no single inaction baseline");
        base[t + 1] = m.next()[lo];
    }
    return base;
}

// Penalize lost reachability relative to the inaction baseline: at step t the
// reward is theta_spec . f(s) - lambda * d(s, b_t), where b_t is the state of
// inaction_rollout and d is ReachabilityCache::shortfall. The reachability
// budget covers the robot's own horizon plus the human horizon that produced
// s0, so "reachable" means reachable within the episode's total footprint.
//
// At lambda = 0 the penalty vanishes and no baseline is needed, so planning
// short-circuits to plan_spec (identical tie-breaking, hence identical
// action choices).
//
// `shared` may carry a cache built by reachability_coverage with the exact
// cap this scenario needs; anything else is ignored and a fresh closure is
// computed.
inline HardPlan plan_reachability(const ScenarioBundle& scenario, double lambda,
                                  const ReachabilityCache* shared = nullptr) {
    if (lambda < 0.0) throw std::invalid_argument("plan_reachability: lambda < 0");
    if (lambda == 0.0) return plan_spec(scenario);

    const TabularMdp& m = scenario.env.mdp;
    const int S = m.num_states();
    const int H = scenario.robot_horizon;
    const std::vector<int> base = inaction_rollout(scenario);

    const int cap = scenario.robot_horizon + scenario.alice_horizon;
    std::optional<ReachabilityCache> owned;
    const ReachabilityCache* rc = shared;
    if (rc == nullptr || rc->num_states() != S || rc->horizon_cap() != cap) {
        owned.emplace(reachability_coverage(m, cap));
        rc = &*owned;
    }

    const Eigen::VectorXd spec_r = m.state_rewards(scenario.theta_spec);
    std::map<int, Eigen::VectorXd> penalty;  // baseline state -> d(., b)
    std::vector<Eigen::VectorXd> rewards((size_t)H + 1);
    for (int t = 0; t <= H; ++t) {
        auto it = penalty.find(base[t]);
        if (it == penalty.end()) {
            Eigen::VectorXd d(S);
            for (int s = 0; s < S; ++s) d[s] = rc->shortfall(s, base[t]);
            it = penalty.emplace(base[t], std::move(d)).first;
        }
        rewards[t] = spec_r - lambda * it->second;
    }
    return hard_value_iteration(m, rewards, H);
}

}  // namespace rlsp
