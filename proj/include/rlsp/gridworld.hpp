#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlsp/mdp.hpp"

namespace rlsp {

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
};

// Action indices shared by every environment; HARVEST/DEPOSIT exist only
// where the action set includes them. Moves into walls or out of bounds are
// no-ops, and NOOP is always available.
enum Action : int {
    ACT_UP = 0,
    ACT_DOWN = 1,
    ACT_LEFT = 2,
    ACT_RIGHT = 3,
    ACT_NOOP = 4,
    ACT_HARVEST = 5,
    ACT_DEPOSIT = 6,
};

inline std::vector<std::string> move_action_names() {
    return {"UP", "DOWN", "LEFT", "RIGHT", "NOOP"};
}
inline std::vector<std::string> apple_action_names() {
    return {"UP", "DOWN", "LEFT", "RIGHT", "NOOP", "HARVEST", "DEPOSIT"};
}

// Rectangular grid with blocked cells and a compact index over the passable
// ones. y grows upward; UP is +y.
class GridGeom {
public:
    GridGeom(int width, int height, std::vector<Cell> blocked_cells)
        : width_(width), height_(height), blocked_(width * height, 0) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("GridGeom: empty grid");
        for (const Cell& c : blocked_cells) {
            if (!in_bounds(c)) throw std::invalid_argument("GridGeom: blocked cell outside");
            blocked_[raw(c)] = 1;
        }
        id_of_.assign(width * height, -1);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                Cell c{x, y};
                if (!blocked_[raw(c)]) {
                    id_of_[raw(c)] = (int)cells_.size();
                    cells_.push_back(c);
                }
            }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int num_cells() const { return (int)cells_.size(); }

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
    }
    bool passable(Cell c) const { return in_bounds(c) && !blocked_[raw(c)]; }
    int cell_id(Cell c) const { return in_bounds(c) ? id_of_[raw(c)] : -1; }
    Cell cell(int id) const { return cells_.at(id); }

    // Movement actions shift by one cell when the target is passable;
    // everything else (including HARVEST/DEPOSIT/NOOP) stays put.
    Cell move(Cell from, int action) const {
        Cell to = from;
        switch (action) {
            case ACT_UP: to.y += 1; break;
            case ACT_DOWN: to.y -= 1; break;
            case ACT_LEFT: to.x -= 1; break;
            case ACT_RIGHT: to.x += 1; break;
            default: return from;
        }
        return passable(to) ? to : from;
    }

private:
    int raw(Cell c) const { return c.y * width_ + c.x; }

    int width_, height_;
    std::vector<uint8_t> blocked_;
    std::vector<int> id_of_;
    std::vector<Cell> cells_;
};

// Union of per-environment world descriptions; each environment reads only
// the fields it defines. Kept flat so encode/decode stay trivial to audit.
struct WorldConfig {
    Cell agent;
    int vase_broken = 0;       // room, far-away-vase, train
    int train_phase = 0;       // train (loop index), batteries
    int train_broken = 0;      // train
    int carrying = 0;          // apples
    int tree_mask = 0;         // apples: bit i set = tree i has an apple
    int basket = 0;            // apples
    int charge = 0;            // batteries: 0..10
    int battery0 = 0;          // batteries: 0 on map, 1 carried, 2 consumed
    int battery1 = 0;
};

struct EnvInstance {
    std::string name;
    TabularMdp mdp;
    std::vector<std::string> feature_names;
    std::vector<std::string> action_names;
    int noop_action = ACT_NOOP;
    std::function<int(const WorldConfig&)> encode;
    std::function<WorldConfig(int)> decode;
    nlohmann::json layout;  // object placements, for serialization and docs
};

struct ScenarioBundle {
    std::string name;
    EnvInstance env;
    int s_minus_t = 0;                  // Alice's start, known-prior mode
    StateDistribution s_minus_t_prior;  // delta at s_minus_t unless overridden
    int s0 = 0;                         // robot deployment state
    RewardParams theta_spec;
    RewardParams theta_true;
    int alice_horizon = 1;
    int robot_horizon = 20;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["name"] = name;
        j["layout"] = env.layout;
        j["feature_names"] = env.feature_names;
        j["action_names"] = env.action_names;
        j["s_minus_t"] = s_minus_t;
        j["s0"] = s0;
        j["alice_horizon"] = alice_horizon;
        j["robot_horizon"] = robot_horizon;
        j["theta_spec"] = std::vector<double>(theta_spec.data(),
                                              theta_spec.data() + theta_spec.size());
        j["theta_true"] = std::vector<double>(theta_true.data(),
                                              theta_true.data() + theta_true.size());
        return j;
    }
};

namespace detail {

// Assembles a TabularMdp by enumerating every state id, decoding it, and
// asking the environment for successor configurations and features.
template <typename StepFn, typename FeatureFn, typename NameFn>
TabularMdp compile_mdp(int num_states, int num_actions, StepFn&& step, FeatureFn&& features,
                       NameFn&& state_name, int num_features) {
    std::vector<std::vector<Successors>> trans(num_states,
                                               std::vector<Successors>(num_actions));
    FeatureMatrix feat(num_states, num_features);
    std::vector<std::string> names(num_states);
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) trans[s][a] = step(s, a);
        Eigen::VectorXd f = features(s);
        for (int k = 0; k < num_features; ++k) feat(s, k) = f[k];
        names[s] = state_name(s);
    }
    return TabularMdp(num_states, num_actions, std::move(trans), std::move(feat),
                      std::move(names));
}

inline nlohmann::json cells_json(const std::vector<Cell>& cells) {
    nlohmann::json j = nlohmann::json::array();
    for (const Cell& c : cells) j.push_back({c.x, c.y});
    return j;
}

}  // namespace detail

}  // namespace rlsp
