#include "banditsim/experiment_io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "banditsim/csv.hpp"

namespace banditsim::io {

namespace {

gbt::LossMetric loss_metric_from_string(const std::string& name) {
    if (name == "squared") return gbt::LossMetric::squared;
    if (name == "log") return gbt::LossMetric::log;
    throw std::runtime_error("config: loss_metric must be 'squared' or 'log', got '" + name + "'");
}

std::string to_string(gbt::LossMetric metric) {
    return metric == gbt::LossMetric::squared ? "squared" : "log";
}

run::EstimatorMode estimator_from_string(const std::string& name) {
    if (name == "early_stop") return run::EstimatorMode::early_stop;
    if (name == "fixed") return run::EstimatorMode::fixed_iterations;
    throw std::runtime_error("config: estimator must be 'early_stop' or 'fixed', got '" + name + "'");
}

std::string to_string(run::EstimatorMode mode) {
    return mode == run::EstimatorMode::early_stop ? "early_stop" : "fixed";
}

}  // namespace

void apply_preset(run::ExperimentConfig& config, const std::string& name) {
    env::EnvironmentConfig& e = config.environment;
    if (name == "simple-stationary" || name == "simple-drift" || name == "flat-stationary") {
        e.context_dim = 2;
        e.action_dim = 5;
        e.n_actions = 18;
        e.pool_size = 200;
        e.target_mean = 0.3;
    } else if (name == "large-stationary" || name == "large-drift") {
        e.context_dim = 20;
        e.action_dim = 10;
        e.n_actions = 50;
        e.pool_size = 400;
        e.target_mean = 0.06;
    } else {
        throw std::runtime_error("config: unknown preset '" + name + "'");
    }
    e.flat = name == "flat-stationary";
    e.stationary = name.find("drift") == std::string::npos;
    if (e.stationary) {
        config.epochs = 100;
        config.window_capacity = 0;  // burn-in data is retained for good
    } else {
        config.epochs = 150;
        config.window_capacity = 4500;
    }
}

ResolvedExperiment resolve_experiment(ConfigMap cfg, ConfigKind kind) {
    ResolvedExperiment resolved;
    run::ExperimentConfig& config = resolved.config;

    resolved.preset = cfg.require_string("preset");
    apply_preset(config, resolved.preset);

    config.master_seed = cfg.get_seed("seed", 1);
    config.environment.seed = cfg.get_seed("env_seed", config.environment.seed);
    config.environment.pool_size =
        static_cast<int>(cfg.get_long("pool_size", config.environment.pool_size));
    config.burn_in = static_cast<int>(cfg.get_long("burn_in", config.burn_in));
    resolved.out = cfg.get_string("out", "");

    gbt::TrainConfig& train = config.train;
    train.learning_rate = cfg.get_double("learning_rate", train.learning_rate);
    train.max_rounds = static_cast<int>(cfg.get_long("max_rounds", train.max_rounds));
    train.patience = static_cast<int>(cfg.get_long("patience", train.patience));
    train.validation_fraction = cfg.get_double("validation_fraction", train.validation_fraction);
    train.max_depth = static_cast<int>(cfg.get_long("max_depth", train.max_depth));
    train.min_samples_leaf =
        static_cast<int>(cfg.get_long("min_samples_leaf", train.min_samples_leaf));
    train.loss_metric =
        loss_metric_from_string(cfg.get_string("loss_metric", to_string(train.loss_metric)));
    train.clip_epsilon = cfg.get_double("clip_epsilon", train.clip_epsilon);

    if (kind == ConfigKind::simulate) {
        config.epochs = static_cast<int>(cfg.get_long("epochs", config.epochs));
        config.epoch_size = static_cast<int>(cfg.get_long("epoch_size", config.epoch_size));
        config.window_capacity = cfg.get_long("window", config.window_capacity);
        config.replications = static_cast<int>(cfg.get_long("replications", config.replications));
        config.estimator_mode = estimator_from_string(
            cfg.get_string("estimator", to_string(config.estimator_mode)));
        config.fixed_iterations =
            static_cast<int>(cfg.get_long("fixed_iterations", config.fixed_iterations));

        policy::PolicyConfig& pol = config.policy;
        pol.kind = policy::policy_kind_from_string(
            cfg.get_string("policy", policy::to_string(pol.kind)));
        pol.epsilon = cfg.get_double("epsilon", pol.epsilon);
        pol.falcon_c = cfg.get_double("falcon_c", pol.falcon_c);
        pol.exp_temperature = cfg.get_double("exp_temperature", pol.exp_temperature);
        pol.ts_prior_alpha = cfg.get_double("ts_prior_alpha", pol.ts_prior_alpha);
        pol.ts_prior_beta = cfg.get_double("ts_prior_beta", pol.ts_prior_beta);
        resolved.export_label_table = cfg.get_string("export_label_table", "");
    } else {
        resolved.n_fits = static_cast<int>(cfg.get_long("n_fits", resolved.n_fits));
        resolved.analysis_iterations =
            static_cast<int>(cfg.get_long("analysis_iterations", resolved.analysis_iterations));
        resolved.eval_contexts =
            static_cast<int>(cfg.get_long("eval_contexts", resolved.eval_contexts));
    }

    cfg.finish();
    run::validate(config);
    return resolved;
}

std::vector<std::pair<std::string, std::string>> manifest_entries(const ResolvedExperiment& resolved) {
    const run::ExperimentConfig& config = resolved.config;
    std::vector<std::pair<std::string, std::string>> entries;
    entries.emplace_back("preset", resolved.preset);
    entries.emplace_back("seed", std::to_string(config.master_seed));
    entries.emplace_back("env_seed", std::to_string(config.environment.seed));
    entries.emplace_back("pool_size", std::to_string(config.environment.pool_size));
    entries.emplace_back("burn_in", std::to_string(config.burn_in));
    entries.emplace_back("epochs", std::to_string(config.epochs));
    entries.emplace_back("epoch_size", std::to_string(config.epoch_size));
    entries.emplace_back("window", std::to_string(config.window_capacity));
    entries.emplace_back("replications", std::to_string(config.replications));
    entries.emplace_back("estimator", to_string(config.estimator_mode));
    entries.emplace_back("fixed_iterations", std::to_string(config.fixed_iterations));
    entries.emplace_back("policy", policy::to_string(config.policy.kind));
    entries.emplace_back("epsilon", format_double(config.policy.epsilon));
    entries.emplace_back("falcon_c", format_double(config.policy.falcon_c));
    entries.emplace_back("exp_temperature", format_double(config.policy.exp_temperature));
    entries.emplace_back("ts_prior_alpha", format_double(config.policy.ts_prior_alpha));
    entries.emplace_back("ts_prior_beta", format_double(config.policy.ts_prior_beta));
    entries.emplace_back("learning_rate", format_double(config.train.learning_rate));
    entries.emplace_back("max_rounds", std::to_string(config.train.max_rounds));
    entries.emplace_back("patience", std::to_string(config.train.patience));
    entries.emplace_back("validation_fraction", format_double(config.train.validation_fraction));
    entries.emplace_back("max_depth", std::to_string(config.train.max_depth));
    entries.emplace_back("min_samples_leaf", std::to_string(config.train.min_samples_leaf));
    entries.emplace_back("loss_metric", to_string(config.train.loss_metric));
    entries.emplace_back("clip_epsilon", format_double(config.train.clip_epsilon));
    return entries;
}

void write_manifest(const std::string& path, const std::string& subcommand,
                    std::vector<std::pair<std::string, std::string>> entries) {
    entries.emplace_back("tool_version", kToolVersion);
    entries.emplace_back("subcommand", subcommand);
    std::sort(entries.begin(), entries.end());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "# banditsim run manifest\n";
    for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
}

void write_metrics_csv(const std::string& path, const std::vector<run::MetricsLog>& logs) {
    CsvWriter csv(path);
    csv.header({"replication", "epoch", "cum_reward", "cum_regret", "mean_regret", "stop_iteration"});
    for (std::size_t r = 0; r < logs.size(); ++r) {
        for (const run::EpochMetrics& m : logs[r].epochs) {
            csv.cell(static_cast<long>(r))
                .cell(m.epoch)
                .cell(m.cum_reward)
                .cell(m.cum_regret)
                .cell(m.mean_regret)
                .cell(m.stop_iteration);
            csv.end_row();
        }
    }
}

void write_summary_csv(const std::string& path, const run::AggregateCurves& curves) {
    CsvWriter csv(path);
    csv.header({"epoch", "cum_reward_mean", "cum_reward_stderr", "cum_regret_mean",
                "cum_regret_stderr", "mean_regret_mean", "mean_regret_stderr",
                "stop_iteration_mean", "stop_iteration_stderr"});
    for (std::size_t e = 0; e < curves.epoch.size(); ++e) {
        csv.cell(curves.epoch[e])
            .cell(curves.cum_reward.mean[e])
            .cell(curves.cum_reward.stderr_[e])
            .cell(curves.cum_regret.mean[e])
            .cell(curves.cum_regret.stderr_[e])
            .cell(curves.mean_regret.mean[e])
            .cell(curves.mean_regret.stderr_[e])
            .cell(curves.stop_iteration.mean[e])
            .cell(curves.stop_iteration.stderr_[e]);
        csv.end_row();
    }
}

void write_label_table_csv(const std::string& path, const env::Environment& environment) {
    if (environment.table.labels.size() == 0)
        throw std::runtime_error("this environment has no label table (flat preset)");
    CsvWriter csv(path);
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < environment.table.features.cols(); ++j)
        names.push_back("f" + std::to_string(j));
    names.emplace_back("latent_prob");
    names.emplace_back("label");
    csv.header(names);
    for (Eigen::Index i = 0; i < environment.table.labels.size(); ++i) {
        for (Eigen::Index j = 0; j < environment.table.features.cols(); ++j)
            csv.cell(environment.table.features(i, j));
        csv.cell(environment.table.latent_probs[i]);
        csv.cell(environment.table.labels[i]);
        csv.end_row();
    }
}

std::string derived_path(const std::string& out, const std::string& suffix) {
    const auto dot = out.find_last_of('.');
    const auto slash = out.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out + suffix;
    return out.substr(0, dot) + suffix + out.substr(dot);
}

}  // namespace banditsim::io
