#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rlsp/baselines.hpp"
#include "rlsp/combine.hpp"
#include "rlsp/environments.hpp"
#include "rlsp/errors.hpp"
#include "rlsp/gridworld.hpp"
#include "rlsp/likelihood.hpp"
#include "rlsp/mdp.hpp"
#include "rlsp/planning.hpp"
#include "rlsp/rollout.hpp"
#include "rlsp/sampler.hpp"

namespace rlsp {

// Thresholded grade of a fraction-of-optimal score. The bands are fixed so
// that policies that do the right thing land at kPass and anything that
// gives up a fifth of the achievable reward or more lands at kFail.
enum class Verdict { kPass, kApprox, kFail };

inline Verdict verdict_of(double fraction) {
    if (fraction >= 0.95) return Verdict::kPass;
    if (fraction >= 0.80) return Verdict::kApprox;
    return Verdict::kFail;
}

inline const char* verdict_glyph(Verdict v) {
    switch (v) {
        case Verdict::kPass: return "✓";
        case Verdict::kApprox: return "≈";
        default: return "✗";
    }
}

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::kPass: return "pass";
        case Verdict::kApprox: return "approx";
        default: return "fail";
    }
}

// Default hyperparameter grids. Tuning picks the best true-reward fraction,
// ties going to the smallest value.
inline const std::vector<double>& lambda_grid() {
    static const std::vector<double> g{0.1, 0.3, 1.0, 3.0, 10.0};
    return g;
}
inline const std::vector<double>& sigma_grid() {
    static const std::vector<double> g{0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
    return g;
}
inline const std::vector<int>& horizon_grid() {
    static const std::vector<int> g{1, 2, 5, 7, 10, 20, 50, 100};
    return g;
}

struct EvalReport {
    std::string scenario;
    std::string algorithm;
    std::string prior_mode = "known";
    std::string tuned_param = "none";  // "lambda", "sigma", or "none"
    double tuned_value = 0.0;
    double fraction = 0.0;
    Verdict verdict = Verdict::kFail;
    Eigen::VectorXd theta;       // inferred reward, empty for pure planners
    std::vector<int> trajectory;  // robot states from s0 under the seed below
    uint64_t seed = 0;
    std::string note;  // diagnostics, e.g. a refused penalty falling back

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["scenario"] = scenario;
        j["algorithm"] = algorithm;
        j["prior_mode"] = prior_mode;
        j["tuned_param"] = tuned_param;
        j["tuned_value"] = tuned_value;
        j["fraction"] = fraction;
        j["verdict"] = verdict_name(verdict);
        j["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
        j["trajectory"] = trajectory;
        j["seed"] = seed;
        j["note"] = note;
        return j;
    }
};

struct RunOptions {
    std::string prior_mode = "known";  // where Alice may have started: "known" or "uniform"
    std::vector<double> tuning_grid;   // empty = the algorithm's default grid
    uint64_t seed = 0;
    SamplerConfig sampler;             // sampler-additive only; seed is overridden by `seed`
    const ReachabilityCache* reach = nullptr;    // optional prebuilt closure
    const Eigen::VectorXd* theta_alice = nullptr;  // optional precomputed inference
};

inline const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> g{"spec",          "deviation",
                                            "reachability",  "rlsp-additive",
                                            "rlsp-bayesian", "sampler-additive"};
    return g;
}

// Inference settings implied by a scenario: explain alice_horizon steps of
// history starting from either the scenario's pinned start or anywhere.
inline RlspConfig scenario_inference_config(const ScenarioBundle& sc,
                                            const std::string& prior_mode) {
    if (prior_mode != "known" && prior_mode != "uniform")
        throw std::invalid_argument("prior_mode must be \"known\" or \"uniform\", got \"" +
                                    prior_mode + "\"");
    RlspConfig cfg;
    cfg.horizon = sc.alice_horizon;
    cfg.start_prior = prior_mode == "uniform"
                          ? uniform_distribution(sc.env.mdp.num_states())
                          : sc.s_minus_t_prior;
    cfg.theta_mean = Eigen::VectorXd::Zero(sc.env.mdp.num_features());
    return cfg;
}

// Exact expected true return of a (possibly stochastic) policy from s0,
// rewards collected at every step 0..robot_horizon inclusive. Computed by
// forward dynamic programming, so there is no evaluation variance.
inline double policy_true_return(const ScenarioBundle& sc, const SoftPolicy& policy) {
    const TabularMdp& m = sc.env.mdp;
    if (policy.horizon != sc.robot_horizon)
        throw std::invalid_argument("policy_true_return: policy horizon != robot horizon");
    auto marginals = forward_marginals(m, policy, delta_distribution(m.num_states(), sc.s0),
                                       sc.robot_horizon);
    const Eigen::VectorXd r = m.state_rewards(sc.theta_true);
    double total = 0.0;
    for (const auto& p : marginals) total += p.dot(r);
    return total;
}

inline double optimal_true_return(const ScenarioBundle& sc) {
    const TabularMdp& m = sc.env.mdp;
    return hard_value_iteration(m, m.state_rewards(sc.theta_true), sc.robot_horizon)
        .v_at(0, sc.s0);
}

// Fraction of the optimal true return achieved by the policy. The metric is
// undefined when the optimum is not positive; that never happens in the
// bundled scenarios, so it is refused rather than renormalized.
inline double evaluate_policy(const ScenarioBundle& sc, const SoftPolicy& policy,
                              double optimal_hint = std::numeric_limits<double>::quiet_NaN()) {
    double v_opt = std::isnan(optimal_hint) ? optimal_true_return(sc) : optimal_hint;
    if (!(v_opt > 0.0)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", v_opt);
        throw MetricUndefinedError("evaluate_policy: optimal true return is " +
                                   std::string(buf) +
                                   "; the fraction metric needs a positive denominator");
    }
    return policy_true_return(sc, policy) / v_opt;
}

inline double evaluate_policy(const ScenarioBundle& sc, const DeterministicPolicy& policy,
                              double optimal_hint = std::numeric_limits<double>::quiet_NaN()) {
    return evaluate_policy(sc, to_soft_policy(policy, sc.env.mdp.num_actions()),
                           optimal_hint);
}

// One seeded rollout of a deterministic policy through the (possibly
// stochastic) environment; the only randomness is successor sampling.
inline std::vector<int> sample_trajectory(const ScenarioBundle& sc,
                                          const DeterministicPolicy& policy, uint64_t seed) {
    const TabularMdp& m = sc.env.mdp;
    if (policy.horizon != sc.robot_horizon)
        throw std::invalid_argument("sample_trajectory: policy horizon != robot horizon");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> states{sc.s0};
    for (int t = 0; t < sc.robot_horizon; ++t) {
        int s = states.back();
        int a = policy.action(t, s);
        size_t lo = m.row_begin(s, a), hi = m.row_end(s, a);
        int chosen = m.next()[hi - 1];
        if (hi - lo > 1) {
            double u = unif(rng), acc = 0.0;
            for (size_t i = lo; i < hi; ++i) {
                acc += m.prob()[i];
                if (u < acc) {
                    chosen = m.next()[i];
                    break;
                }
            }
        } else {
            chosen = m.next()[lo];
        }
        states.push_back(chosen);
    }
    return states;
}

// Run one algorithm on one scenario: infer if the algorithm calls for it,
// plan at every grid point, keep the best true-reward fraction. Deterministic
// given opts.seed.
inline EvalReport run_scenario(const ScenarioBundle& sc, const std::string& algorithm,
                               const RunOptions& opts = {}) {
    const TabularMdp& m = sc.env.mdp;
    EvalReport rep;
    rep.scenario = sc.name;
    rep.algorithm = algorithm;
    rep.prior_mode = opts.prior_mode;
    rep.seed = opts.seed;

    const double v_opt = optimal_true_return(sc);
    if (!(v_opt > 0.0))
        throw MetricUndefinedError("run_scenario: optimal true return is not positive in " +
                                   sc.name);

    int chosen = -1;
    auto tune = [&](const std::vector<double>& grid, auto&& make_plan,
                    const char* param) -> HardPlan {
        if (grid.empty()) throw std::invalid_argument("run_scenario: empty tuning grid");
        HardPlan best_plan;
        std::vector<double> fractions;
        fractions.reserve(grid.size());
        double best = 0.0;
        for (size_t i = 0; i < grid.size(); ++i) {
            HardPlan plan = make_plan(grid[i]);
            double f = evaluate_policy(sc, plan.policy, v_opt);
            fractions.push_back(f);
            if (chosen < 0 || f > best) {
                best = f;
                chosen = (int)i;
                best_plan = std::move(plan);
            }
        }
        for (double f : fractions)
            if (best < f) throw std::logic_error("run_scenario: tuning lost monotonicity");
        rep.tuned_param = param;
        rep.tuned_value = grid[chosen];
        rep.fraction = best;
        return best_plan;
    };

    auto plan_additive = [&](const Eigen::VectorXd& theta_alice, double lambda) {
        Eigen::VectorXd theta = combine_additive(theta_alice, sc.theta_spec, lambda);
        return hard_value_iteration(m, m.state_rewards(theta), sc.robot_horizon);
    };

    auto infer_alice = [&]() -> Eigen::VectorXd {
        if (opts.theta_alice != nullptr) return *opts.theta_alice;
        RlspConfig cfg = scenario_inference_config(sc, opts.prior_mode);
        try {
            return rlsp_infer(m, cfg, sc.s0).theta;
        } catch (const ImpossibleEvidenceError& e) {
            throw ImpossibleEvidenceError(std::string(e.what()) + " (scenario " + sc.name +
                                          ", prior " + opts.prior_mode + ", T " +
                                          std::to_string(sc.alice_horizon) + ")");
        }
    };

    const std::vector<double>& lgrid =
        opts.tuning_grid.empty() ? lambda_grid() : opts.tuning_grid;
    const std::vector<double>& sgrid =
        opts.tuning_grid.empty() ? sigma_grid() : opts.tuning_grid;

    HardPlan final_plan;
    if (algorithm == "spec") {
        final_plan = plan_spec(sc);
        rep.fraction = evaluate_policy(sc, final_plan.policy, v_opt);
    } else if (algorithm == "deviation") {
        final_plan = tune(lgrid, [&](double l) { return plan_deviation(sc, l); }, "lambda");
    } else if (algorithm == "reachability") {
        bool refused = false;
        std::string why;
        try {
            (void)inaction_rollout(sc);
        } catch (const BaselineRefusalError& e) {
            refused = true;
            why = e.what();
        }
        if (refused) {
            // No inaction baseline exists, so no penalty can be charged; the
            // honest fallback is the unpenalized planner (lambda = 0).
            final_plan = plan_spec(sc);
            rep.fraction = evaluate_policy(sc, final_plan.policy, v_opt);
            rep.tuned_param = "lambda";
            rep.tuned_value = 0.0;
            rep.note = why + "; fell back to lambda = 0";
        } else {
            const int cap = sc.robot_horizon + sc.alice_horizon;
            std::optional<ReachabilityCache> owned;
            const ReachabilityCache* rc = opts.reach;
            if (rc == nullptr || rc->num_states() != m.num_states() ||
                rc->horizon_cap() != cap) {
                owned.emplace(reachability_coverage(m, cap));
                rc = &*owned;
            }
            final_plan = tune(
                lgrid, [&](double l) { return plan_reachability(sc, l, rc); }, "lambda");
        }
    } else if (algorithm == "rlsp-additive") {
        Eigen::VectorXd theta_alice = infer_alice();
        rep.theta = theta_alice;
        final_plan =
            tune(lgrid, [&](double l) { return plan_additive(theta_alice, l); }, "lambda");
    } else if (algorithm == "rlsp-bayesian") {
        RlspConfig cfg = scenario_inference_config(sc, opts.prior_mode);
        std::vector<Eigen::VectorXd> thetas;
        thetas.reserve(sgrid.size());
        final_plan = tune(
            sgrid,
            [&](double s) {
                try {
                    thetas.push_back(
                        infer_with_spec_prior(m, cfg, sc.s0, sc.theta_spec, s).theta);
                } catch (const ImpossibleEvidenceError& e) {
                    throw ImpossibleEvidenceError(std::string(e.what()) + " (scenario " +
                                                  sc.name + ", prior " + opts.prior_mode +
                                                  ")");
                }
                return hard_value_iteration(m, m.state_rewards(thetas.back()),
                                            sc.robot_horizon);
            },
            "sigma");
        rep.theta = thetas[chosen];
    } else if (algorithm == "sampler-additive") {
        Eigen::VectorXd theta_alice;
        if (opts.theta_alice != nullptr) {
            theta_alice = *opts.theta_alice;
        } else {
            RlspConfig cfg = scenario_inference_config(sc, opts.prior_mode);
            SamplerConfig sco = opts.sampler;
            sco.seed = opts.seed;
            theta_alice = posterior_mean(mcmc_sample(m, cfg, sc.s0, sco));
        }
        rep.theta = theta_alice;
        final_plan =
            tune(lgrid, [&](double l) { return plan_additive(theta_alice, l); }, "lambda");
    } else {
        std::string names;
        for (const auto& n : algorithm_names()) names += (names.empty() ? "" : ", ") + n;
        throw std::invalid_argument("run_scenario: unknown algorithm \"" + algorithm +
                                    "\"; valid: " + names);
    }

    rep.verdict = verdict_of(rep.fraction);
    rep.trajectory = sample_trajectory(sc, final_plan.policy, opts.seed);
    return rep;
}

struct Table1Result {
    std::string prior_mode;
    uint64_t seed = 0;
    std::vector<std::string> algorithms;  // row labels
    std::vector<std::string> scenarios;   // column labels
    std::vector<std::vector<EvalReport>> cells;  // [row][column]

    const EvalReport& cell(const std::string& algorithm, const std::string& scenario) const {
        for (size_t r = 0; r < algorithms.size(); ++r)
            for (size_t c = 0; c < scenarios.size(); ++c)
                if (algorithms[r] == algorithm && scenarios[c] == scenario)
                    return cells[r][c];
        throw std::out_of_range("Table1Result::cell: no such cell");
    }

    std::string text() const {
        size_t label_w = std::string("algorithm").size();
        for (const auto& a : algorithms) label_w = std::max(label_w, a.size());
        std::vector<size_t> col_w(scenarios.size());
        for (size_t c = 0; c < scenarios.size(); ++c) col_w[c] = scenarios[c].size();

        std::string out = "verdicts (prior=" + prior_mode + ", seed=" +
                          std::to_string(seed) + ")\n\n";
        auto pad = [&](const std::string& s, size_t display, size_t width) {
            return s + std::string(width > display ? width - display : 0, ' ');
        };
        out += pad("algorithm", 9, label_w);
        for (size_t c = 0; c < scenarios.size(); ++c)
            out += "  " + pad(scenarios[c], scenarios[c].size(), col_w[c]);
        out += "\n";
        for (size_t r = 0; r < algorithms.size(); ++r) {
            out += pad(algorithms[r], algorithms[r].size(), label_w);
            for (size_t c = 0; c < scenarios.size(); ++c)
                out += "  " + pad(verdict_glyph(cells[r][c].verdict), 1, col_w[c]);
            out += "\n";
        }

        out += "\nfractions\n";
        char buf[160];
        for (size_t r = 0; r < algorithms.size(); ++r)
            for (size_t c = 0; c < scenarios.size(); ++c) {
                const EvalReport& e = cells[r][c];
                std::snprintf(buf, sizeof(buf), "%-14s %-16s %.4f  %s=%g\n",
                              algorithms[r].c_str(), scenarios[c].c_str(), e.fraction,
                              e.tuned_param.c_str(), e.tuned_value);
                out += buf;
            }
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["kind"] = "table1";
        j["prior_mode"] = prior_mode;
        j["seed"] = seed;
        j["algorithms"] = algorithms;
        j["scenarios"] = scenarios;
        auto rows = nlohmann::json::array();
        for (const auto& row : cells) {
            auto cols = nlohmann::json::array();
            for (const auto& e : row) cols.push_back(e.to_json());
            rows.push_back(cols);
        }
        j["cells"] = rows;
        return j;
    }

    std::string csv() const {
        std::string out = "scenario,algorithm,prior_mode,param,value,fraction,verdict\n";
        char buf[200];
        for (size_t r = 0; r < algorithms.size(); ++r)
            for (size_t c = 0; c < scenarios.size(); ++c) {
                const EvalReport& e = cells[r][c];
                std::snprintf(buf, sizeof(buf), "%s,%s,%s,%s,%g,%.6f,%s\n",
                              scenarios[c].c_str(), algorithms[r].c_str(),
                              prior_mode.c_str(), e.tuned_param.c_str(), e.tuned_value,
                              e.fraction, verdict_name(e.verdict));
                out += buf;
            }
        return out;
    }
};

// The full benchmark: four planners by six scenarios. The expensive per-
// scenario artifacts (the reachability closure and the inferred reward) are
// computed once per environment family; the two batteries scenarios share
// identical dynamics, observation, and prior, so they reuse each other's.
inline Table1Result table1(const std::string& prior_mode, uint64_t seed = 0) {
    Table1Result out;
    out.prior_mode = prior_mode;
    out.seed = seed;
    out.algorithms = {"spec", "deviation", "reachability", "rlsp"};
    out.scenarios = scenario_names();
    out.cells.assign(out.algorithms.size(),
                     std::vector<EvalReport>(out.scenarios.size()));

    auto family = [](const std::string& name) {
        return name.rfind("batteries", 0) == 0 ? std::string("batteries") : name;
    };
    std::map<std::string, ReachabilityCache> reach_by_family;
    std::map<std::string, Eigen::VectorXd> theta_by_family;

    for (size_t c = 0; c < out.scenarios.size(); ++c) {
        ScenarioBundle sc = make_scenario(out.scenarios[c]);
        const std::string fam = family(sc.name);

        RunOptions opts;
        opts.prior_mode = prior_mode;
        opts.seed = seed;

        bool has_baseline = true;
        try {
            (void)inaction_rollout(sc);
        } catch (const BaselineRefusalError&) {
            has_baseline = false;
        }
        if (has_baseline) {
            auto it = reach_by_family.find(fam);
            if (it == reach_by_family.end()) {
                const int cap = sc.robot_horizon + sc.alice_horizon;
                it = reach_by_family
                         .emplace(fam, reachability_coverage(sc.env.mdp, cap))
                         .first;
            }
            opts.reach = &it->second;
        }

        auto it = theta_by_family.find(fam);
        if (it == theta_by_family.end()) {
            RlspConfig cfg = scenario_inference_config(sc, prior_mode);
            it = theta_by_family.emplace(fam, rlsp_infer(sc.env.mdp, cfg, sc.s0).theta)
                     .first;
        }
        opts.theta_alice = &it->second;

        out.cells[0][c] = run_scenario(sc, "spec", opts);
        out.cells[1][c] = run_scenario(sc, "deviation", opts);
        out.cells[2][c] = run_scenario(sc, "reachability", opts);
        out.cells[3][c] = run_scenario(sc, "rlsp-additive", opts);
        out.cells[3][c].algorithm = "rlsp-additive";
    }
    return out;
}

struct SweepResult {
    std::string param;               // swept parameter name, e.g. "T" or "sigma"
    std::vector<double> values;      // ascending
    std::vector<std::string> envs;   // column labels
    std::vector<std::vector<double>> fractions;  // [value index][env index]

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["kind"] = "sweep";
        j["param"] = param;
        j["values"] = values;
        j["envs"] = envs;
        j["fractions"] = fractions;
        return j;
    }

    // Long-form rows, one per (value, env) pair.
    std::string csv() const {
        std::string out = "param,env,fraction\n";
        char buf[160];
        for (size_t i = 0; i < values.size(); ++i)
            for (size_t e = 0; e < envs.size(); ++e) {
                std::snprintf(buf, sizeof(buf), "%g,%s,%.6f\n", values[i],
                              envs[e].c_str(), fractions[i][e]);
                out += buf;
            }
        return out;
    }
};

// How the inference degrades when the assumed human horizon is wrong: rerun
// the additive pipeline for each T with a uniform start prior (the pinned
// start is tied to the scenario's true T, so assuming another T has to drop
// it) and record the tuned fraction.
inline SweepResult horizon_sweep(const ScenarioBundle& sc, const std::vector<int>& t_grid,
                                 uint64_t seed = 0) {
    if (t_grid.empty()) throw std::invalid_argument("horizon_sweep: empty grid");
    std::vector<int> grid = t_grid;
    std::sort(grid.begin(), grid.end());

    SweepResult out;
    out.param = "T";
    out.envs = {sc.name};
    for (int t : grid) {
        if (t < 1) throw std::invalid_argument("horizon_sweep: T must be >= 1");
        ScenarioBundle mod = sc;
        mod.alice_horizon = t;
        RunOptions opts;
        opts.prior_mode = "uniform";
        opts.seed = seed;
        EvalReport rep = run_scenario(mod, "rlsp-additive", opts);
        out.values.push_back((double)t);
        out.fractions.push_back({rep.fraction});
    }
    return out;
}

// Additive-versus-Bayesian tradeoff curves. For each scenario and robot
// planning temperature, sweep the prior width sigma: the additive arm infers
// with a zero-centered prior of width sigma and plans on theta + 1.0 *
// theta_spec; the Bayesian arm centers the prior at theta_spec instead and
// plans on the inference alone. Temperature 0 plans deterministically;
// positive temperatures use the matching softmax policy. Columns are labeled
// env:method:tau=<t>. The apples scenario is skipped by protocol (its
// theta_spec is all zeros, which makes the tradeoff degenerate).
inline SweepResult combiner_compare(const std::vector<ScenarioBundle>& suite,
                                    const std::vector<double>& sigmas,
                                    const std::vector<double>& temperatures,
                                    uint64_t seed = 0) {
    (void)seed;  // the pipeline is deterministic; kept for interface symmetry
    if (sigmas.empty()) throw std::invalid_argument("combiner_compare: empty sigma grid");
    bool has_zero = false;
    for (double t : temperatures) {
        if (t < 0.0) throw std::invalid_argument("combiner_compare: negative temperature");
        has_zero |= t == 0.0;
    }
    if (!has_zero)
        throw std::invalid_argument("combiner_compare: temperatures must include 0");

    std::vector<double> grid = sigmas;
    std::sort(grid.begin(), grid.end());

    SweepResult out;
    out.param = "sigma";
    out.values = grid;

    char label[96];
    for (const ScenarioBundle& sc : suite) {
        if (sc.name == "apples") continue;
        const TabularMdp& m = sc.env.mdp;
        const double v_opt = optimal_true_return(sc);
        const RlspConfig base = scenario_inference_config(sc, "known");

        // fraction achieved planning on theta at each temperature
        auto fractions_at = [&](const Eigen::VectorXd& theta) {
            std::vector<double> fr;
            fr.reserve(temperatures.size());
            for (double tau : temperatures) {
                if (tau == 0.0) {
                    HardPlan p = hard_value_iteration(m, m.state_rewards(theta),
                                                      sc.robot_horizon);
                    fr.push_back(evaluate_policy(sc, p.policy, v_opt));
                } else {
                    SoftPlan p = soft_value_iteration(m, theta, sc.robot_horizon, tau);
                    fr.push_back(evaluate_policy(sc, p.policy, v_opt));
                }
            }
            return fr;
        };

        std::vector<std::vector<double>> additive(grid.size());
        std::vector<std::vector<double>> bayesian(grid.size());
        for (size_t i = 0; i < grid.size(); ++i) {
            RlspConfig cfg = base;
            cfg.theta_std = grid[i];
            Eigen::VectorXd alice = rlsp_infer(m, cfg, sc.s0).theta;
            additive[i] = fractions_at(combine_additive(alice, sc.theta_spec, 1.0));
            bayesian[i] = fractions_at(
                infer_with_spec_prior(m, base, sc.s0, sc.theta_spec, grid[i]).theta);
        }

        for (size_t k = 0; k < temperatures.size(); ++k) {
            for (const char* method : {"additive", "bayesian"}) {
                std::snprintf(label, sizeof(label), "%s:%s:tau=%g", sc.name.c_str(),
                              method, temperatures[k]);
                out.envs.emplace_back(label);
            }
        }
        if (out.fractions.empty()) out.fractions.assign(grid.size(), {});
        for (size_t i = 0; i < grid.size(); ++i)
            for (size_t k = 0; k < temperatures.size(); ++k) {
                out.fractions[i].push_back(additive[i][k]);
                out.fractions[i].push_back(bayesian[i][k]);
            }
    }
    return out;
}

}  // namespace rlsp
