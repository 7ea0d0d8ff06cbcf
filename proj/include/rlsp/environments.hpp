#pragma once

#include <array>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlsp/gridworld.hpp"
#include "rlsp/mdp.hpp"

namespace rlsp {

namespace detail {

inline std::string cell_str(Cell c) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "(%d,%d)", c.x, c.y);
    return buf;
}

inline bool adjacent(Cell a, Cell b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Room with vase. A 5x4 room; walking onto the vase cell breaks it for good.
// Two carpet cells sit on the fast lane between the doors, so trajectories
// reveal how much the owner cares about carpets versus detours.
// ---------------------------------------------------------------------------
inline ScenarioBundle build_room_with_vase() {
    const GridGeom geom(5, 4, {{2, 3}, {3, 3}, {2, 2}, {0, 1}});
    const Cell vase{2, 1};
    const std::vector<Cell> carpets{{1, 2}, {3, 2}};
    const Cell black{0, 3}, purple{4, 3};

    const int C = geom.num_cells();
    const int S = C * 2;

    auto encode = [geom](const WorldConfig& w) {
        int cid = geom.cell_id(w.agent);
        if (cid < 0) throw std::invalid_argument("room: agent cell not passable");
        return cid * 2 + (w.vase_broken ? 1 : 0);
    };
    auto decode = [geom](int s) {
        WorldConfig w;
        w.agent = geom.cell(s / 2);
        w.vase_broken = s % 2;
        return w;
    };

    auto on_carpet = [carpets](Cell c) {
        for (Cell k : carpets)
            if (k == c) return 1;
        return 0;
    };
    auto features = [=](int s) {
        WorldConfig w = decode(s);
        Eigen::VectorXd f(4);
        f << w.vase_broken, on_carpet(w.agent), w.agent == black ? 1 : 0,
            w.agent == purple ? 1 : 0;
        return f;
    };
    auto step = [=](int s, int a) {
        WorldConfig w = decode(s);
        w.agent = geom.move(w.agent, a);
        if (w.agent == vase) w.vase_broken = 1;
        return Successors{{encode(w), 1.0}};
    };
    auto name = [=](int s) {
        WorldConfig w = decode(s);
        return detail::cell_str(w.agent) + (w.vase_broken ? " v1" : " v0");
    };

    EnvInstance env;
    env.name = "room";
    env.mdp = detail::compile_mdp(S, 5, step, features, name, 4);
    env.feature_names = {"broken_vases", "on_carpet", "at_black_door", "at_purple_door"};
    env.action_names = move_action_names();
    env.encode = encode;
    env.decode = decode;
    env.layout = {{"width", 5},
                  {"height", 4},
                  {"walls", detail::cells_json({{2, 3}, {3, 3}, {2, 2}, {0, 1}})},
                  {"vase", {vase.x, vase.y}},
                  {"carpets", detail::cells_json(carpets)},
                  {"black_door", {black.x, black.y}},
                  {"purple_door", {purple.x, purple.y}},
                  {"alice_start", {2, 0}}};

    ScenarioBundle b;
    b.name = "room";
    b.env = std::move(env);
    WorldConfig start;  // Alice begins mid-room, vase intact
    start.agent = {2, 0};
    b.s_minus_t = encode(start);
    WorldConfig obs;  // she is observed at the black door, vase still intact
    obs.agent = black;
    b.s0 = encode(obs);
    b.s_minus_t_prior = delta_distribution(S, b.s_minus_t);
    b.theta_true = (Eigen::VectorXd(4) << -2, 0, 0, 1).finished();
    b.theta_spec = (Eigen::VectorXd(4) << 0, 0, 0, 1).finished();
    b.alice_horizon = 7;
    b.robot_horizon = 20;
    return b;
}

// ---------------------------------------------------------------------------
// Far-away vase. Same mechanics as the room, but the vase sits well off
// Alice's short walk to her door while lying on the robot's fast route.
// ---------------------------------------------------------------------------
inline ScenarioBundle build_far_away_vase() {
    const GridGeom geom(7, 3, {{4, 2}});
    const Cell vase{4, 1};
    const Cell black{0, 2}, purple{6, 1};

    const int C = geom.num_cells();
    const int S = C * 2;

    auto encode = [geom](const WorldConfig& w) {
        int cid = geom.cell_id(w.agent);
        if (cid < 0) throw std::invalid_argument("far-away-vase: agent cell not passable");
        return cid * 2 + (w.vase_broken ? 1 : 0);
    };
    auto decode = [geom](int s) {
        WorldConfig w;
        w.agent = geom.cell(s / 2);
        w.vase_broken = s % 2;
        return w;
    };
    auto features = [=](int s) {
        WorldConfig w = decode(s);
        Eigen::VectorXd f(4);
        f << w.vase_broken, 0, w.agent == black ? 1 : 0, w.agent == purple ? 1 : 0;
        return f;
    };
    auto step = [=](int s, int a) {
        WorldConfig w = decode(s);
        w.agent = geom.move(w.agent, a);
        if (w.agent == vase) w.vase_broken = 1;
        return Successors{{encode(w), 1.0}};
    };
    auto name = [=](int s) {
        WorldConfig w = decode(s);
        return detail::cell_str(w.agent) + (w.vase_broken ? " v1" : " v0");
    };

    EnvInstance env;
    env.name = "far-away-vase";
    env.mdp = detail::compile_mdp(S, 5, step, features, name, 4);
    env.feature_names = {"broken_vases", "on_carpet", "at_black_door", "at_purple_door"};
    env.action_names = move_action_names();
    env.encode = encode;
    env.decode = decode;
    env.layout = {{"width", 7},
                  {"height", 3},
                  {"walls", detail::cells_json({{4, 2}})},
                  {"vase", {vase.x, vase.y}},
                  {"carpets", nlohmann::json::array()},
                  {"black_door", {black.x, black.y}},
                  {"purple_door", {purple.x, purple.y}},
                  {"alice_start", {0, 0}}};

    ScenarioBundle b;
    b.name = "far-away-vase";
    b.env = std::move(env);
    WorldConfig start;
    start.agent = {0, 0};
    b.s_minus_t = encode(start);
    WorldConfig obs;
    obs.agent = black;
    b.s0 = encode(obs);
    b.s_minus_t_prior = delta_distribution(S, b.s_minus_t);
    b.theta_true = (Eigen::VectorXd(4) << -2, 0, 0, 1).finished();
    b.theta_spec = (Eigen::VectorXd(4) << 0, 0, 0, 1).finished();
    b.alice_horizon = 10;
    b.robot_horizon = 20;
    return b;
}

// ---------------------------------------------------------------------------
// Toy train. A train circles an 8-cell loop, one cell per step. Stepping
// onto the train (or meeting it head-on) wrecks it and freezes it in place.
// The purple door sits inside the loop, so getting there means either timing
// a dodge around the passing train or wrecking it.
// ---------------------------------------------------------------------------
namespace detail {
inline const std::array<Cell, 8>& train_loop() {
    static const std::array<Cell, 8> loop{
        {{2, 2}, {3, 2}, {4, 2}, {4, 3}, {4, 4}, {3, 4}, {2, 4}, {2, 3}}};
    return loop;
}
}  // namespace detail

inline ScenarioBundle build_toy_train() {
    const GridGeom geom(6, 6, {{1, 5}, {2, 5}, {3, 5}, {4, 5}});
    const auto& loop = detail::train_loop();
    const Cell vase{1, 2}, carpet{1, 4};
    const Cell black{0, 5}, purple{3, 3};

    const int C = geom.num_cells();
    const int S = C * 2 * 2 * 8;  // agent x vase x broken x phase

    auto encode = [geom](const WorldConfig& w) {
        int cid = geom.cell_id(w.agent);
        if (cid < 0) throw std::invalid_argument("train: agent cell not passable");
        return ((cid * 2 + w.vase_broken) * 2 + w.train_broken) * 8 + w.train_phase;
    };
    auto decode = [geom](int s) {
        WorldConfig w;
        w.train_phase = s % 8;
        s /= 8;
        w.train_broken = s % 2;
        s /= 2;
        w.vase_broken = s % 2;
        w.agent = geom.cell(s / 2);
        return w;
    };
    auto features = [=](int s) {
        WorldConfig w = decode(s);
        Eigen::VectorXd f = Eigen::VectorXd::Zero(13);
        f[0] = w.vase_broken;
        f[1] = w.agent == carpet ? 1 : 0;
        f[2] = w.agent == black ? 1 : 0;
        f[3] = w.agent == purple ? 1 : 0;
        f[4] = w.train_broken;
        f[5 + w.train_phase] = 1;  // one-hot; frozen at the wreck site
        return f;
    };
    auto step = [=](int s, int a) {
        WorldConfig w = decode(s);
        Cell prev = w.agent;
        w.agent = geom.move(w.agent, a);
        if (w.agent == vase) w.vase_broken = 1;
        if (!w.train_broken) {
            int p_new = (w.train_phase + 1) % 8;
            if (w.agent == loop[p_new]) {
                w.train_broken = 1;  // run over / walked into the moving train
                w.train_phase = p_new;
            } else if (w.agent == loop[w.train_phase] && prev == loop[p_new]) {
                w.train_broken = 1;  // head-on exchange counts as a crash
            } else {
                w.train_phase = p_new;
            }
        }
        return Successors{{encode(w), 1.0}};
    };
    auto name = [=](int s) {
        WorldConfig w = decode(s);
        char buf[40];
        std::snprintf(buf, sizeof(buf), "(%d,%d) v%d t%d%s", w.agent.x, w.agent.y,
                      w.vase_broken, w.train_phase, w.train_broken ? "x" : "");
        return std::string(buf);
    };

    EnvInstance env;
    env.name = "train";
    env.mdp = detail::compile_mdp(S, 5, step, features, name, 13);
    env.feature_names = {"broken_vases", "on_carpet",  "at_black_door", "at_purple_door",
                         "train_broken", "train_at_0", "train_at_1",    "train_at_2",
                         "train_at_3",   "train_at_4", "train_at_5",    "train_at_6",
                         "train_at_7"};
    env.action_names = move_action_names();
    env.encode = encode;
    env.decode = decode;
    nlohmann::json loop_json = nlohmann::json::array();
    for (Cell c : loop) loop_json.push_back({c.x, c.y});
    env.layout = {{"width", 6},
                  {"height", 6},
                  {"walls", detail::cells_json({{1, 5}, {2, 5}, {3, 5}, {4, 5}})},
                  {"train_loop", loop_json},
                  {"vase", {vase.x, vase.y}},
                  {"carpets", detail::cells_json({carpet})},
                  {"black_door", {black.x, black.y}},
                  {"purple_door", {purple.x, purple.y}},
                  {"alice_start", {purple.x, purple.y}}};

    ScenarioBundle b;
    b.name = "train";
    b.env = std::move(env);
    WorldConfig start;  // Alice camps at the purple door before heading out
    start.agent = purple;
    start.train_phase = 7;
    b.s_minus_t = encode(start);
    WorldConfig obs;
    obs.agent = black;
    obs.train_phase = 3;
    b.s0 = encode(obs);
    b.s_minus_t_prior = delta_distribution(S, b.s_minus_t);
    Eigen::VectorXd t_true = Eigen::VectorXd::Zero(13);
    t_true[0] = -2;
    t_true[3] = 1;
    t_true[4] = -2;
    Eigen::VectorXd t_spec = Eigen::VectorXd::Zero(13);
    t_spec[3] = 1;
    b.theta_true = t_true;
    b.theta_spec = t_spec;
    b.alice_horizon = 12;
    b.robot_horizon = 20;
    return b;
}

// ---------------------------------------------------------------------------
// Apple collection. Three trees at the corners regrow apples (p = 0.1 per
// empty tree per step); a basket sits in the middle. HARVEST picks from the
// lowest-indexed adjacent full tree; DEPOSIT drops a carried apple into an
// adjacent basket. The task reward is identically zero.
// ---------------------------------------------------------------------------
inline ScenarioBundle build_apple_collection() {
    const std::vector<Cell> trees{{0, 0}, {0, 4}, {4, 0}};
    const Cell basket{2, 2};
    const GridGeom geom(5, 5, {{0, 0}, {0, 4}, {4, 0}, {2, 2}});
    constexpr int kBasketCap = 10;
    constexpr double kRegrow = 0.1;

    const int C = geom.num_cells();            // 21
    const int S = C * 2 * 8 * (kBasketCap + 1);  // agent x carrying x tree mask x basket

    auto encode = [geom](const WorldConfig& w) {
        int cid = geom.cell_id(w.agent);
        if (cid < 0) throw std::invalid_argument("apples: agent cell not passable");
        return ((cid * 2 + w.carrying) * 8 + w.tree_mask) * (kBasketCap + 1) + w.basket;
    };
    auto decode = [geom](int s) {
        WorldConfig w;
        w.basket = s % (kBasketCap + 1);
        s /= (kBasketCap + 1);
        w.tree_mask = s % 8;
        s /= 8;
        w.carrying = s % 2;
        w.agent = geom.cell(s / 2);
        return w;
    };
    auto features = [=](int s) {
        WorldConfig w = decode(s);
        Eigen::VectorXd f = Eigen::VectorXd::Zero(3 + C);
        f[0] = w.basket;
        f[1] = (w.tree_mask & 1) + ((w.tree_mask >> 1) & 1) + ((w.tree_mask >> 2) & 1);
        f[2] = w.carrying;
        f[3 + geom.cell_id(w.agent)] = 1;
        return f;
    };
    auto step = [=](int s, int a) {
        WorldConfig w = decode(s);
        if (a == ACT_HARVEST) {
            if (!w.carrying) {
                for (int i = 0; i < 3; ++i) {
                    if ((w.tree_mask >> i & 1) && detail::adjacent(w.agent, trees[i])) {
                        w.tree_mask &= ~(1 << i);
                        w.carrying = 1;
                        break;
                    }
                }
            }
        } else if (a == ACT_DEPOSIT) {
            if (w.carrying && detail::adjacent(w.agent, basket) && w.basket < kBasketCap) {
                w.basket += 1;
                w.carrying = 0;
            }
        } else {
            w.agent = geom.move(w.agent, a);
        }
        // Independent regrowth on every tree that is empty after the action.
        std::vector<int> empty;
        for (int i = 0; i < 3; ++i)
            if (!(w.tree_mask >> i & 1)) empty.push_back(i);
        Successors out;
        int n = (int)empty.size();
        for (int z = 0; z < (1 << n); ++z) {
            WorldConfig w2 = w;
            double p = 1.0;
            for (int i = 0; i < n; ++i) {
                if (z >> i & 1) {
                    w2.tree_mask |= 1 << empty[i];
                    p *= kRegrow;
                } else {
                    p *= 1.0 - kRegrow;
                }
            }
            out.push_back({encode(w2), p});
        }
        return out;
    };
    auto name = [=](int s) {
        WorldConfig w = decode(s);
        char buf[48];
        std::snprintf(buf, sizeof(buf), "(%d,%d) c%d t%d%d%d b%d", w.agent.x, w.agent.y,
                      w.carrying, w.tree_mask & 1, w.tree_mask >> 1 & 1,
                      w.tree_mask >> 2 & 1, w.basket);
        return std::string(buf);
    };

    EnvInstance env;
    env.name = "apples";
    env.mdp = detail::compile_mdp(S, 7, step, features, name, 3 + C);
    env.feature_names = {"basket_apples", "trees_with_apples", "carrying"};
    for (int i = 0; i < C; ++i) {
        Cell c = geom.cell(i);
        char buf[24];
        std::snprintf(buf, sizeof(buf), "at_%d_%d", c.x, c.y);
        env.feature_names.push_back(buf);
    }
    env.action_names = apple_action_names();
    env.encode = encode;
    env.decode = decode;
    env.layout = {{"width", 5},
                  {"height", 5},
                  {"walls", nlohmann::json::array()},
                  {"trees", detail::cells_json(trees)},
                  {"basket", {basket.x, basket.y}},
                  {"basket_capacity", kBasketCap},
                  {"regrow_probability", kRegrow},
                  {"alice_start", {2, 1}}};

    ScenarioBundle b;
    b.name = "apples";
    b.env = std::move(env);
    WorldConfig start;  // all trees full, basket empty
    start.agent = {2, 1};
    start.tree_mask = 7;
    b.s_minus_t = encode(start);
    WorldConfig obs;  // three apples banked, the nearest tree freshly emptied
    obs.agent = {2, 1};
    obs.tree_mask = 6;
    obs.basket = 3;
    b.s0 = encode(obs);
    b.s_minus_t_prior = delta_distribution(S, b.s_minus_t);
    Eigen::VectorXd t_true = Eigen::VectorXd::Zero(3 + C);
    t_true[0] = 1;
    b.theta_true = t_true;
    b.theta_spec = Eigen::VectorXd::Zero(3 + C);
    b.alice_horizon = 20;
    b.robot_horizon = 20;
    return b;
}

// ---------------------------------------------------------------------------
// Batteries. The train loop again, but the train is indestructible and runs
// on charge: 10 steps per battery. Walking over a battery picks it up;
// walking onto the train while carrying one recharges it to 10 and consumes
// the battery. Battery state: 0 = on the map, 1 = carried, 2 = consumed.
// ---------------------------------------------------------------------------
inline ScenarioBundle build_batteries(bool hard) {
    const GridGeom geom(6, 6, {{1, 5}, {2, 5}, {3, 5}, {4, 5}});
    const auto& loop = detail::train_loop();
    const std::array<Cell, 2> battery_cells{{{0, 2}, {5, 0}}};
    const Cell black{0, 5}, purple{5, 5};
    constexpr int kFullCharge = 10;

    const int C = geom.num_cells();
    const int S = C * 8 * (kFullCharge + 1) * 3 * 3;

    auto encode = [geom](const WorldConfig& w) {
        int cid = geom.cell_id(w.agent);
        if (cid < 0) throw std::invalid_argument("batteries: agent cell not passable");
        return (((cid * 8 + w.train_phase) * (kFullCharge + 1) + w.charge) * 3 +
                w.battery0) * 3 + w.battery1;
    };
    auto decode = [geom](int s) {
        WorldConfig w;
        w.battery1 = s % 3;
        s /= 3;
        w.battery0 = s % 3;
        s /= 3;
        w.charge = s % (kFullCharge + 1);
        s /= (kFullCharge + 1);
        w.train_phase = s % 8;
        w.agent = geom.cell(s / 8);
        return w;
    };
    auto features = [=](int s) {
        WorldConfig w = decode(s);
        Eigen::VectorXd f = Eigen::VectorXd::Zero(12);
        f[0] = (w.battery0 == 0 ? 1 : 0) + (w.battery1 == 0 ? 1 : 0);
        f[1] = w.charge > 0 ? 1 : 0;
        f[2 + w.train_phase] = 1;
        f[10] = w.agent == black ? 1 : 0;
        f[11] = w.agent == purple ? 1 : 0;
        return f;
    };
    auto step = [=](int s, int a) {
        WorldConfig w = decode(s);
        w.agent = geom.move(w.agent, a);
        if (w.battery0 == 0 && w.agent == battery_cells[0]) w.battery0 = 1;
        if (w.battery1 == 0 && w.agent == battery_cells[1]) w.battery1 = 1;
        if (w.charge > 0) {
            w.train_phase = (w.train_phase + 1) % 8;
            w.charge -= 1;
        }
        if (w.agent == loop[w.train_phase]) {
            if (w.battery0 == 1) {
                w.battery0 = 2;
                w.charge = kFullCharge;
            } else if (w.battery1 == 1) {
                w.battery1 = 2;
                w.charge = kFullCharge;
            }
        }
        return Successors{{encode(w), 1.0}};
    };
    auto name = [=](int s) {
        WorldConfig w = decode(s);
        char buf[48];
        std::snprintf(buf, sizeof(buf), "(%d,%d) t%d q%d b%d%d", w.agent.x, w.agent.y,
                      w.train_phase, w.charge, w.battery0, w.battery1);
        return std::string(buf);
    };

    EnvInstance env;
    env.name = hard ? "batteries-hard" : "batteries-easy";
    env.mdp = detail::compile_mdp(S, 5, step, features, name, 12);
    env.feature_names = {"batteries_on_map", "train_operational", "train_at_0",
                         "train_at_1",       "train_at_2",        "train_at_3",
                         "train_at_4",       "train_at_5",        "train_at_6",
                         "train_at_7",       "at_black_door",     "at_purple_door"};
    env.action_names = move_action_names();
    env.encode = encode;
    env.decode = decode;
    nlohmann::json loop_json = nlohmann::json::array();
    for (Cell c : loop) loop_json.push_back({c.x, c.y});
    env.layout = {{"width", 6},
                  {"height", 6},
                  {"walls", detail::cells_json({{1, 5}, {2, 5}, {3, 5}, {4, 5}})},
                  {"train_loop", loop_json},
                  {"batteries", detail::cells_json({battery_cells[0], battery_cells[1]})},
                  {"full_charge", kFullCharge},
                  {"black_door", {black.x, black.y}},
                  {"purple_door", {purple.x, purple.y}},
                  {"alice_start", {4, 0}}};

    ScenarioBundle b;
    b.name = env.name;
    b.env = std::move(env);
    WorldConfig start;  // both batteries on the map, train charged for 8 steps
    start.agent = {4, 0};
    start.train_phase = 6;
    start.charge = 8;
    b.s_minus_t = encode(start);
    WorldConfig obs;  // one battery left; the other went into the train
    obs.agent = black;
    obs.train_phase = 7;
    obs.charge = 1;
    obs.battery1 = 2;
    b.s0 = encode(obs);
    b.s_minus_t_prior = delta_distribution(S, b.s_minus_t);
    Eigen::VectorXd t_true = Eigen::VectorXd::Zero(12);
    t_true[1] = 1;
    t_true[11] = 1;
    b.theta_true = t_true;
    if (hard) {
        Eigen::VectorXd t_spec = Eigen::VectorXd::Zero(12);
        t_spec[11] = 1;
        b.theta_spec = t_spec;
    } else {
        b.theta_spec = t_true;
    }
    b.alice_horizon = 20;
    b.robot_horizon = 20;
    return b;
}

inline std::vector<std::string> scenario_names() {
    return {"room", "train", "apples", "batteries-easy", "batteries-hard", "far-away-vase"};
}

inline ScenarioBundle make_scenario(const std::string& name) {
    if (name == "room") return build_room_with_vase();
    if (name == "train") return build_toy_train();
    if (name == "apples") return build_apple_collection();
    if (name == "batteries-easy") return build_batteries(false);
    if (name == "batteries-hard") return build_batteries(true);
    if (name == "far-away-vase") return build_far_away_vase();
    throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace rlsp
