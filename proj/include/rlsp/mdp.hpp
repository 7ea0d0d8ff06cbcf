#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rlsp {

using RewardParams = Eigen::VectorXd;        // one weight per feature
using StateDistribution = Eigen::VectorXd;   // nonnegative, sums to 1
using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Successor distribution for one (state, action) pair.
using Successors = std::vector<std::pair<int, double>>;

/**
 * Finite tabular MDP with feature-based rewards.
 *
 * Transitions are stored sparsely in CSR layout indexed by s * A + a; rows
 * are validated to sum to 1 within 1e-12 with nonnegative entries. Rewards
 * are state-based: r(s) = theta . features(s). State names are optional and
 * used only for rendering and serialization.
 */
class TabularMdp {
public:
    TabularMdp() = default;

    TabularMdp(int num_states, int num_actions,
               std::vector<std::vector<Successors>> transitions,
               FeatureMatrix features,
               std::vector<std::string> state_names = {})
        : num_states_(num_states),
          num_actions_(num_actions),
          features_(std::move(features)),
          state_names_(std::move(state_names)) {
        if (num_states_ <= 0 || num_actions_ <= 0)
            throw std::invalid_argument("TabularMdp: empty state or action set");
        if ((int)transitions.size() != num_states_)
            throw std::invalid_argument("TabularMdp: transitions outer size != S");
        if (features_.rows() != num_states_)
            throw std::invalid_argument("TabularMdp: feature rows != S");
        if (!state_names_.empty() && (int)state_names_.size() != num_states_)
            throw std::invalid_argument("TabularMdp: state_names size != S");

        offsets_.assign((size_t)num_states_ * num_actions_ + 1, 0);
        size_t nnz = 0;
        for (int s = 0; s < num_states_; ++s) {
            if ((int)transitions[s].size() != num_actions_)
                throw std::invalid_argument("TabularMdp: transitions inner size != A");
            for (int a = 0; a < num_actions_; ++a)
                nnz += transitions[s][a].size();
        }
        next_.reserve(nnz);
        prob_.reserve(nnz);
        for (int s = 0; s < num_states_; ++s) {
            for (int a = 0; a < num_actions_; ++a) {
                double total = 0.0;
                for (auto [sn, p] : transitions[s][a]) {
                    if (sn < 0 || sn >= num_states_)
                        throw std::invalid_argument("TabularMdp: successor out of range");
                    if (p < 0.0)
                        throw std::invalid_argument("TabularMdp: negative probability");
                    total += p;
                    if (p > 0.0) {
                        next_.push_back(sn);
                        prob_.push_back(p);
                    }
                }
                if (std::abs(total - 1.0) > 1e-12)
                    throw std::invalid_argument(
                        "TabularMdp: transition row does not sum to 1");
                offsets_[(size_t)s * num_actions_ + a + 1] = next_.size();
            }
        }
    }

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    int num_features() const { return (int)features_.cols(); }

    const FeatureMatrix& features() const { return features_; }
    const std::vector<std::string>& state_names() const { return state_names_; }

    // CSR row [begin, end) into next()/prob() for pair (s, a).
    size_t row_begin(int s, int a) const { return offsets_[(size_t)s * num_actions_ + a]; }
    size_t row_end(int s, int a) const { return offsets_[(size_t)s * num_actions_ + a + 1]; }
    const std::vector<int>& next() const { return next_; }
    const std::vector<double>& prob() const { return prob_; }

    // Probability of s -> sn under action a; zero when absent from the row.
    double transition(int s, int a, int sn) const {
        for (size_t i = row_begin(s, a); i < row_end(s, a); ++i)
            if (next_[i] == sn) return prob_[i];
        return 0.0;
    }

    // True when every (s, a) row has a single successor with probability 1.
    bool is_deterministic() const {
        for (int s = 0; s < num_states_; ++s)
            for (int a = 0; a < num_actions_; ++a) {
                size_t b = row_begin(s, a), e = row_end(s, a);
                if (e - b != 1 || std::abs(prob_[b] - 1.0) > 1e-12) return false;
            }
        return true;
    }

    // State rewards r = F theta for a weight vector of length num_features.
    Eigen::VectorXd state_rewards(const RewardParams& theta) const {
        if (theta.size() != features_.cols())
            throw std::invalid_argument("state_rewards: theta length != F");
        return features_ * theta;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["num_states"] = num_states_;
        j["num_actions"] = num_actions_;
        auto trans = nlohmann::json::array();
        for (int s = 0; s < num_states_; ++s) {
            auto row_s = nlohmann::json::array();
            for (int a = 0; a < num_actions_; ++a) {
                auto row = nlohmann::json::array();
                for (size_t i = row_begin(s, a); i < row_end(s, a); ++i)
                    row.push_back({next_[i], prob_[i]});
                row_s.push_back(std::move(row));
            }
            trans.push_back(std::move(row_s));
        }
        j["transitions"] = std::move(trans);
        auto feats = nlohmann::json::array();
        for (int s = 0; s < num_states_; ++s) {
            auto row = nlohmann::json::array();
            for (int f = 0; f < features_.cols(); ++f) row.push_back(features_(s, f));
            feats.push_back(std::move(row));
        }
        j["features"] = std::move(feats);
        j["state_names"] = state_names_;
        return j;
    }

    // Accepts both sparse rows ([[s', p], ...]) and dense rows (S floats),
    // telling them apart by the element type.
    static TabularMdp from_json(const nlohmann::json& j) {
        int S = j.at("num_states").get<int>();
        int A = j.at("num_actions").get<int>();
        const auto& trans = j.at("transitions");
        if ((int)trans.size() != S)
            throw std::invalid_argument("from_json: transitions outer size != S");
        std::vector<std::vector<Successors>> t(S, std::vector<Successors>(A));
        for (int s = 0; s < S; ++s) {
            if ((int)trans[s].size() != A)
                throw std::invalid_argument("from_json: transitions inner size != A");
            for (int a = 0; a < A; ++a) {
                const auto& row = trans[s][a];
                if (!row.empty() && row[0].is_array()) {
                    for (const auto& e : row)
                        t[s][a].emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
                } else {
                    if ((int)row.size() != S)
                        throw std::invalid_argument("from_json: dense row size != S");
                    for (int sn = 0; sn < S; ++sn) {
                        double p = row[sn].get<double>();
                        if (p != 0.0) t[s][a].emplace_back(sn, p);
                    }
                }
            }
        }
        const auto& feats = j.at("features");
        if ((int)feats.size() != S)
            throw std::invalid_argument("from_json: feature rows != S");
        int F = feats.empty() ? 0 : (int)feats[0].size();
        FeatureMatrix features(S, F);
        for (int s = 0; s < S; ++s) {
            if ((int)feats[s].size() != F)
                throw std::invalid_argument("from_json: ragged feature rows");
            for (int f = 0; f < F; ++f) features(s, f) = feats[s][f].get<double>();
        }
        std::vector<std::string> names;
        if (j.contains("state_names") && !j["state_names"].is_null())
            names = j["state_names"].get<std::vector<std::string>>();
        return TabularMdp(S, A, std::move(t), std::move(features), std::move(names));
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open for write: " + path);
        out << to_json().dump(2) << "\n";
    }

    static TabularMdp load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open for read: " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }

private:
    int num_states_ = 0;
    int num_actions_ = 0;
    std::vector<size_t> offsets_;  // S*A + 1 row offsets
    std::vector<int> next_;        // successor states, CSR
    std::vector<double> prob_;     // matching probabilities
    FeatureMatrix features_;       // S x F, row major
    std::vector<std::string> state_names_;
};

// Trajectory of length H: H+1 states and H+1 actions (one action per visited
// state, including the last). actions.size() == states.size() always.
struct Trajectory {
    std::vector<int> states;
    std::vector<int> actions;

    int horizon() const { return (int)states.size() - 1; }

    void validate(const TabularMdp& mdp) const {
        if (states.empty() || states.size() != actions.size())
            throw std::invalid_argument("Trajectory: need H+1 states and H+1 actions");
        for (int s : states)
            if (s < 0 || s >= mdp.num_states())
                throw std::invalid_argument("Trajectory: state out of range");
        for (int a : actions)
            if (a < 0 || a >= mdp.num_actions())
                throw std::invalid_argument("Trajectory: action out of range");
    }
};

inline void validate_distribution(const StateDistribution& d, int num_states) {
    if ((int)d.size() != num_states)
        throw std::invalid_argument("distribution length != S");
    double total = 0.0;
    for (int s = 0; s < num_states; ++s) {
        if (d[s] < 0.0) throw std::invalid_argument("distribution has negative mass");
        total += d[s];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("distribution does not sum to 1");
}

inline StateDistribution delta_distribution(int num_states, int s) {
    if (s < 0 || s >= num_states)
        throw std::invalid_argument("delta_distribution: state out of range");
    StateDistribution d = StateDistribution::Zero(num_states);
    d[s] = 1.0;
    return d;
}

inline StateDistribution uniform_distribution(int num_states) {
    return StateDistribution::Constant(num_states, 1.0 / num_states);
}

// Three-state chain used throughout the tests: states 0,1,2; action 0 stays
// put, action 1 moves right saturating at 2; features are one-hot state
// indicators.
inline TabularMdp make_chain3() {
    int S = 3, A = 2;
    std::vector<std::vector<Successors>> t(S, std::vector<Successors>(A));
    for (int s = 0; s < S; ++s) {
        t[s][0] = {{s, 1.0}};
        t[s][1] = {{std::min(s + 1, 2), 1.0}};
    }
    FeatureMatrix f = FeatureMatrix::Identity(3, 3);
    return TabularMdp(S, A, std::move(t), std::move(f), {"s0", "s1", "s2"});
}

}  // namespace rlsp
