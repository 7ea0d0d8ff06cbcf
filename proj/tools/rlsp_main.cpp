// Command-line front end: reproducible runs of the side-effects benchmark.
//
// Subcommands:
//   run        one (environment, algorithm) evaluation -> report
//   table1     the full planner-by-environment verdict grid
//   sweep      horizon or combiner curves -> CSV/JSON
//   list-envs  registered environment names
//   dump-env   environment as JSON (transitions, features, scenario block)
//
// Exit codes: 0 success, 2 configuration error (unknown names, bad flags),
// 3 impossible evidence (the observation cannot be explained under the
// requested settings).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rlsp/environments.hpp"
#include "rlsp/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitImpossible = 3;

struct RunConfig {
    std::string env;
    std::string algorithm;
    std::string prior_mode = "known";
    std::optional<int> alice_horizon;   // override the scenario's T
    std::optional<int> robot_horizon;   // override the robot's horizon
    std::optional<double> lambda;       // fixed value: skip tuning
    std::optional<double> sigma;        // fixed value: skip tuning
    uint64_t seed = 0;
    std::string output_path;            // empty: stdout
    std::string format = "json";        // json | csv | text
    rlsp::SamplerConfig sampler;
};

// Fields absent from the JSON file keep their current values; command-line
// flags are applied after this, so flags override the file.
void apply_config_file(const nlohmann::json& j, RunConfig& cfg) {
    if (j.contains("env")) cfg.env = j.at("env").get<std::string>();
    if (j.contains("algorithm")) cfg.algorithm = j.at("algorithm").get<std::string>();
    if (j.contains("prior_mode")) cfg.prior_mode = j.at("prior_mode").get<std::string>();
    if (j.contains("T")) cfg.alice_horizon = j.at("T").get<int>();
    if (j.contains("robot_horizon")) cfg.robot_horizon = j.at("robot_horizon").get<int>();
    if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
    if (j.contains("sigma")) cfg.sigma = j.at("sigma").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
    if (j.contains("samples")) cfg.sampler.num_samples = j.at("samples").get<int>();
    if (j.contains("burn_in")) cfg.sampler.burn_in = j.at("burn_in").get<int>();
    if (j.contains("proposal_std"))
        cfg.sampler.proposal_std = j.at("proposal_std").get<double>();
}

int write_output(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::fputs(payload.c_str(), stdout);
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "error: cannot open output file %s\n", path.c_str());
        return kExitConfig;
    }
    out << payload;
    return kExitOk;
}

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

bool known_env(const std::string& name) {
    for (const auto& n : rlsp::scenario_names())
        if (n == name) return true;
    return false;
}

bool known_algorithm(const std::string& name) {
    for (const auto& n : rlsp::algorithm_names())
        if (n == name) return true;
    return false;
}

std::string report_text(const rlsp::EvalReport& rep) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "scenario   %s\nalgorithm  %s\nprior      %s\n",
                  rep.scenario.c_str(), rep.algorithm.c_str(), rep.prior_mode.c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf), "fraction   %.6f\nverdict    %s %s\n", rep.fraction,
                  rlsp::verdict_glyph(rep.verdict), rlsp::verdict_name(rep.verdict));
    out += buf;
    std::snprintf(buf, sizeof(buf), "tuned      %s=%g\nseed       %llu\n",
                  rep.tuned_param.c_str(), rep.tuned_value,
                  (unsigned long long)rep.seed);
    out += buf;
    if (rep.theta.size() > 0) {
        out += "theta     ";
        for (int i = 0; i < rep.theta.size(); ++i) {
            std::snprintf(buf, sizeof(buf), " %.6f", rep.theta[i]);
            out += buf;
        }
        out += "\n";
    }
    if (!rep.note.empty()) out += "note       " + rep.note + "\n";
    return out;
}

std::string report_csv(const rlsp::EvalReport& rep) {
    char buf[256];
    std::string out = "scenario,algorithm,prior_mode,param,value,fraction,verdict\n";
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%s,%g,%.6f,%s\n", rep.scenario.c_str(),
                  rep.algorithm.c_str(), rep.prior_mode.c_str(), rep.tuned_param.c_str(),
                  rep.tuned_value, rep.fraction, rlsp::verdict_name(rep.verdict));
    return out + buf;
}

int cmd_run(const RunConfig& cfg) {
    if (!known_env(cfg.env)) {
        std::fprintf(stderr, "error: unknown env \"%s\"; valid: %s\n", cfg.env.c_str(),
                     join(rlsp::scenario_names()).c_str());
        return kExitConfig;
    }
    if (!known_algorithm(cfg.algorithm)) {
        std::fprintf(stderr, "error: unknown algorithm \"%s\"; valid: %s\n",
                     cfg.algorithm.c_str(), join(rlsp::algorithm_names()).c_str());
        return kExitConfig;
    }
    if (cfg.prior_mode != "known" && cfg.prior_mode != "uniform") {
        std::fprintf(stderr, "error: prior must be known or uniform\n");
        return kExitConfig;
    }
    if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "text") {
        std::fprintf(stderr, "error: format must be json, csv, or text\n");
        return kExitConfig;
    }
    if ((cfg.alice_horizon && *cfg.alice_horizon < 1) ||
        (cfg.robot_horizon && *cfg.robot_horizon < 1)) {
        std::fprintf(stderr, "error: horizon overrides must be >= 1\n");
        return kExitConfig;
    }

    rlsp::ScenarioBundle sc = rlsp::make_scenario(cfg.env);
    if (cfg.alice_horizon) sc.alice_horizon = *cfg.alice_horizon;
    if (cfg.robot_horizon) sc.robot_horizon = *cfg.robot_horizon;

    rlsp::RunOptions opts;
    opts.prior_mode = cfg.prior_mode;
    opts.seed = cfg.seed;
    opts.sampler = cfg.sampler;
    // A fixed hyperparameter collapses the tuning grid to one point. The
    // Bayesian pipeline is tuned by sigma, everything else by lambda.
    if (cfg.algorithm == "rlsp-bayesian") {
        if (cfg.sigma) opts.tuning_grid = {*cfg.sigma};
    } else if (cfg.lambda) {
        opts.tuning_grid = {*cfg.lambda};
    }

    rlsp::EvalReport rep;
    try {
        rep = rlsp::run_scenario(sc, cfg.algorithm, opts);
    } catch (const rlsp::ImpossibleEvidenceError& e) {
        std::fprintf(stderr, "error: impossible evidence: %s\n", e.what());
        return kExitImpossible;
    }

    std::string payload;
    if (cfg.format == "json")
        payload = rep.to_json().dump(2) + "\n";
    else if (cfg.format == "csv")
        payload = report_csv(rep);
    else
        payload = report_text(rep);
    return write_output(cfg.output_path, payload);
}

int cmd_table1(const std::string& prior_mode, uint64_t seed, const std::string& format,
               const std::string& output_path) {
    if (prior_mode != "known" && prior_mode != "uniform") {
        std::fprintf(stderr, "error: prior must be known or uniform\n");
        return kExitConfig;
    }
    if (format != "json" && format != "csv" && format != "text") {
        std::fprintf(stderr, "error: format must be json, csv, or text\n");
        return kExitConfig;
    }
    rlsp::Table1Result result = rlsp::table1(prior_mode, seed);
    std::string payload;
    if (format == "json")
        payload = result.to_json().dump(2) + "\n";
    else if (format == "csv")
        payload = result.csv();
    else
        payload = result.text();
    return write_output(output_path, payload);
}

int cmd_sweep(const std::string& kind, std::vector<std::string> envs,
              std::vector<double> values, std::vector<double> temps, uint64_t seed,
              const std::string& format, const std::string& output_path) {
    if (format != "json" && format != "csv") {
        std::fprintf(stderr, "error: sweep format must be csv or json\n");
        return kExitConfig;
    }
    if (envs.empty()) envs = rlsp::scenario_names();
    for (const auto& e : envs)
        if (!known_env(e)) {
            std::fprintf(stderr, "error: unknown env \"%s\"; valid: %s\n", e.c_str(),
                         join(rlsp::scenario_names()).c_str());
            return kExitConfig;
        }

    rlsp::SweepResult merged;
    if (kind == "horizon") {
        std::vector<int> grid;
        if (values.empty()) {
            grid = rlsp::horizon_grid();
        } else {
            for (double v : values) {
                if (v < 1.0 || v != (int)v) {
                    std::fprintf(stderr, "error: horizon values must be integers >= 1\n");
                    return kExitConfig;
                }
                grid.push_back((int)v);
            }
        }
        for (size_t i = 0; i < envs.size(); ++i) {
            rlsp::SweepResult one =
                rlsp::horizon_sweep(rlsp::make_scenario(envs[i]), grid, seed);
            if (i == 0) {
                merged = one;
            } else {
                merged.envs.push_back(one.envs[0]);
                for (size_t v = 0; v < merged.values.size(); ++v)
                    merged.fractions[v].push_back(one.fractions[v][0]);
            }
        }
    } else if (kind == "combiner") {
        if (values.empty()) values = rlsp::sigma_grid();
        if (temps.empty()) temps = {0.0};
        std::vector<rlsp::ScenarioBundle> suite;
        for (const auto& e : envs) suite.push_back(rlsp::make_scenario(e));
        try {
            merged = rlsp::combiner_compare(suite, values, temps, seed);
        } catch (const std::invalid_argument& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kExitConfig;
        }
    } else {
        std::fprintf(stderr, "error: sweep kind must be horizon or combiner\n");
        return kExitConfig;
    }

    std::string payload =
        format == "json" ? merged.to_json().dump(2) + "\n" : merged.csv();
    return write_output(output_path, payload);
}

int cmd_list_envs() {
    for (const auto& n : rlsp::scenario_names()) std::printf("%s\n", n.c_str());
    return kExitOk;
}

int cmd_dump_env(const std::string& env, const std::string& output_path) {
    if (!known_env(env)) {
        std::fprintf(stderr, "error: unknown env \"%s\"; valid: %s\n", env.c_str(),
                     join(rlsp::scenario_names()).c_str());
        return kExitConfig;
    }
    rlsp::ScenarioBundle sc = rlsp::make_scenario(env);
    // The transition/feature block round-trips through the library's own
    // parser; the scenario block is carried alongside under its own key.
    nlohmann::json j = sc.env.mdp.to_json();
    j["scenario"] = sc.to_json();
    return write_output(output_path, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Side-effects benchmark: reward inference from an observed state"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto* run = app.add_subcommand("run", "evaluate one algorithm on one environment");
    run->add_option("--config", config_path, "JSON config file; flags override it");
    auto* o_env = run->add_option("--env", cfg.env, "environment name");
    auto* o_alg = run->add_option("--alg", cfg.algorithm, "algorithm name");
    auto* o_prior = run->add_option("--prior", cfg.prior_mode, "known | uniform");
    int t_override = 0, rh_override = 0;
    auto* o_t = run->add_option("--T", t_override, "assumed human horizon override");
    auto* o_rh =
        run->add_option("--robot-horizon", rh_override, "robot horizon override");
    double lambda_v = 0.0, sigma_v = 0.0;
    auto* o_lambda =
        run->add_option("--lambda", lambda_v, "fixed tradeoff value (skips tuning)");
    auto* o_sigma =
        run->add_option("--sigma", sigma_v, "fixed prior width (skips tuning)");
    auto* o_seed = run->add_option("--seed", cfg.seed, "random seed");
    auto* o_out = run->add_option("--output", cfg.output_path, "output file");
    auto* o_fmt = run->add_option("--format", cfg.format, "json | csv | text");
    int samples_v = 0, burnin_v = 0;
    double prop_v = 0.0;
    auto* o_samples =
        run->add_option("--samples", samples_v, "posterior samples (sampler-additive)");
    auto* o_burnin = run->add_option("--burn-in", burnin_v, "discarded leading samples");
    auto* o_prop = run->add_option("--proposal-std", prop_v, "random-walk proposal scale");

    std::string t_prior = "known", t_format = "text", t_output;
    uint64_t t_seed = 0;
    auto* table = app.add_subcommand("table1", "full verdict grid");
    table->add_option("--prior", t_prior, "known | uniform");
    table->add_option("--seed", t_seed, "random seed");
    table->add_option("--format", t_format, "text | json | csv");
    table->add_option("--output", t_output, "output file");

    std::string s_kind, s_format = "csv", s_output;
    std::vector<std::string> s_envs;
    std::vector<double> s_values, s_temps;
    uint64_t s_seed = 0;
    auto* sweep = app.add_subcommand("sweep", "horizon or combiner curves");
    sweep->add_option("--kind", s_kind, "horizon | combiner")->required();
    sweep->add_option("--env", s_envs, "environments (default: all)");
    sweep->add_option("--values", s_values, "swept grid (default: built-in)");
    sweep->add_option("--temps", s_temps, "planning temperatures (combiner; default 0)");
    sweep->add_option("--seed", s_seed, "random seed");
    sweep->add_option("--format", s_format, "csv | json");
    sweep->add_option("--output", s_output, "output file");

    app.add_subcommand("list-envs", "print environment names");

    std::string d_env, d_output;
    auto* dump = app.add_subcommand("dump-env", "environment as JSON");
    dump->add_option("--env", d_env, "environment name")->required();
    dump->add_option("--output", d_output, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) {
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) {
                    std::fprintf(stderr, "error: cannot read config file %s\n",
                                 config_path.c_str());
                    return kExitConfig;
                }
                nlohmann::json j;
                try {
                    in >> j;
                } catch (const nlohmann::json::exception& e) {
                    std::fprintf(stderr, "error: bad config JSON: %s\n", e.what());
                    return kExitConfig;
                }
                RunConfig file_cfg;
                try {
                    apply_config_file(j, file_cfg);
                } catch (const nlohmann::json::exception& e) {
                    std::fprintf(stderr, "error: bad config value: %s\n", e.what());
                    return kExitConfig;
                }
                // a field comes from the file only when its flag was absent
                if (o_env->count() == 0) cfg.env = file_cfg.env;
                if (o_alg->count() == 0) cfg.algorithm = file_cfg.algorithm;
                if (o_prior->count() == 0) cfg.prior_mode = file_cfg.prior_mode;
                if (o_seed->count() == 0) cfg.seed = file_cfg.seed;
                if (o_out->count() == 0) cfg.output_path = file_cfg.output_path;
                if (o_fmt->count() == 0) cfg.format = file_cfg.format;
                if (o_t->count() == 0) cfg.alice_horizon = file_cfg.alice_horizon;
                if (o_rh->count() == 0) cfg.robot_horizon = file_cfg.robot_horizon;
                if (o_lambda->count() == 0) cfg.lambda = file_cfg.lambda;
                if (o_sigma->count() == 0) cfg.sigma = file_cfg.sigma;
                if (o_samples->count() == 0)
                    cfg.sampler.num_samples = file_cfg.sampler.num_samples;
                if (o_burnin->count() == 0)
                    cfg.sampler.burn_in = file_cfg.sampler.burn_in;
                if (o_prop->count() == 0)
                    cfg.sampler.proposal_std = file_cfg.sampler.proposal_std;
            }
            if (o_t->count()) cfg.alice_horizon = t_override;
            if (o_rh->count()) cfg.robot_horizon = rh_override;
            if (o_lambda->count()) cfg.lambda = lambda_v;
            if (o_sigma->count()) cfg.sigma = sigma_v;
            if (o_samples->count()) cfg.sampler.num_samples = samples_v;
            if (o_burnin->count()) cfg.sampler.burn_in = burnin_v;
            if (o_prop->count()) cfg.sampler.proposal_std = prop_v;
            return cmd_run(cfg);
        }
        if (table->parsed()) return cmd_table1(t_prior, t_seed, t_format, t_output);
        if (sweep->parsed())
            return cmd_sweep(s_kind, s_envs, s_values, s_temps, s_seed, s_format,
                             s_output);
        if (app.get_subcommand("list-envs")->parsed()) return cmd_list_envs();
        if (dump->parsed()) return cmd_dump_env(d_env, d_output);
    } catch (const rlsp::ImpossibleEvidenceError& e) {
        std::fprintf(stderr, "error: impossible evidence: %s\n", e.what());
        return kExitImpossible;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
