#include "banditsim/runner.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "banditsim/stats.hpp"

namespace banditsim::run {

namespace {

// Per-action success/total tallies for the Thompson policy.
struct ArmTallies {
    std::vector<long> successes;
    std::vector<long> failures;

    explicit ArmTallies(std::size_t k) : successes(k, 0), failures(k, 0) {}

    void add(int action, int reward) {
        if (reward > 0) {
            ++successes[static_cast<std::size_t>(action)];
        } else {
            ++failures[static_cast<std::size_t>(action)];
        }
    }
};

ArmTallies tally_buffer(const HistoryBuffer& buffer, std::size_t k) {
    ArmTallies tallies(k);
    for (const InteractionRecord& record : buffer.records()) tallies.add(record.action, record.reward);
    return tallies;
}

int choose_action(const env::Environment& environment, int t,
                  const Eigen::Ref<const Eigen::VectorXd>& context,
                  const Eigen::VectorXd& estimates, const policy::PolicyConfig& config,
                  long buffer_size, const ArmTallies& tallies, Rng& rng) {
    using policy::PolicyKind;
    switch (config.kind) {
        case PolicyKind::greedy:
            return policy::sample_action(policy::greedy_distribution(estimates), rng);
        case PolicyKind::epsilon_greedy:
            return policy::sample_action(
                policy::epsilon_greedy_distribution(estimates, config.epsilon), rng);
        case PolicyKind::falcon: {
            const double gamma = policy::falcon_gamma(buffer_size,
                                                      static_cast<int>(estimates.size()),
                                                      config.falcon_c);
            return policy::sample_action(policy::falcon_distribution(estimates, gamma), rng);
        }
        case PolicyKind::exp:
            return policy::sample_action(
                policy::exp_distribution(estimates, config.exp_temperature), rng);
        case PolicyKind::thompson:
            return policy::sample_thompson_action(tallies.successes, tallies.failures,
                                                  config.ts_prior_alpha, config.ts_prior_beta, rng);
        case PolicyKind::oracle:
            return env::oracle_best(environment.schedule, t, context, environment.bank).first;
    }
    throw std::logic_error("choose_action: unhandled policy kind");
}

}  // namespace

void HistoryBuffer::push(InteractionRecord record) {
    records_.push_back(std::move(record));
    if (capacity_ > 0) {
        while (static_cast<long>(records_.size()) > capacity_) records_.pop_front();
    }
}

void HistoryBuffer::apply_window(long capacity) {
    if (capacity < 0) throw std::invalid_argument("apply_window: capacity must be >= 0");
    capacity_ = capacity;
    if (capacity_ > 0) {
        while (static_cast<long>(records_.size()) > capacity_) records_.pop_front();
    }
}

gbt::Dataset HistoryBuffer::to_dataset(const env::ActionBank& bank) const {
    if (records_.empty()) throw std::invalid_argument("HistoryBuffer: empty buffer");
    const Eigen::Index context_dim = records_.front().context.size();
    gbt::Dataset data;
    data.features.resize(static_cast<Eigen::Index>(records_.size()), context_dim + bank.dim());
    data.rewards.resize(static_cast<Eigen::Index>(records_.size()));
    Eigen::Index row = 0;
    for (const InteractionRecord& record : records_) {
        data.features.row(row) << record.context.transpose(), bank.actions.row(record.action);
        data.rewards[row] = static_cast<double>(record.reward);
        ++row;
    }
    return data;
}

void validate(const ExperimentConfig& config) {
    if (config.burn_in < 1) throw std::invalid_argument("ExperimentConfig: burn_in must be >= 1");
    if (config.epochs < 0) throw std::invalid_argument("ExperimentConfig: epochs must be >= 0");
    if (config.epoch_size < 1)
        throw std::invalid_argument("ExperimentConfig: epoch_size must be >= 1");
    if (config.window_capacity < 0)
        throw std::invalid_argument("ExperimentConfig: window capacity must be >= 0");
    if (config.fixed_iterations < 0)
        throw std::invalid_argument("ExperimentConfig: fixed_iterations must be >= 0");
    if (config.replications < 1)
        throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
    gbt::validate(config.train);
}

HistoryBuffer run_burn_in(const env::Environment& environment, const ExperimentConfig& config,
                          Rng& rng, MetricsLog* log) {
    HistoryBuffer buffer(config.window_capacity);
    const auto k = static_cast<std::uint64_t>(environment.bank.size());
    for (int i = 0; i < config.burn_in; ++i) {
        const auto ctx_index = static_cast<Eigen::Index>(rng.uniform_index(environment.pool.size()));
        const Eigen::VectorXd context = environment.pool.contexts.row(ctx_index).transpose();
        const int action = static_cast<int>(rng.uniform_index(k));
        const Eigen::VectorXd action_features = environment.bank.actions.row(action).transpose();
        const int reward = env::sample_reward(environment.schedule, 0, context, action_features, rng);
        if (log != nullptr && config.keep_round_log) {
            const double chosen = env::mean_reward(environment.schedule, 0, context, action_features);
            const double best = env::oracle_best(environment.schedule, 0, context, environment.bank).second;
            log->rounds.push_back(RoundLogEntry{0, reward, chosen, best});
        }
        buffer.push(InteractionRecord{0, context, action, reward});
    }
    return buffer;
}

std::pair<gbt::BoostedModel, int> train_epoch_model(const HistoryBuffer& buffer,
                                                    EstimatorMode mode, int fixed_iterations,
                                                    gbt::TrainConfig train, Rng& rng,
                                                    const env::ActionBank& bank) {
    const gbt::Dataset data = buffer.to_dataset(bank);
    if (mode == EstimatorMode::early_stop) {
        // Practitioner early stopping: a fresh random validation split picks
        // the stopping iteration, then the model is retrained on the whole
        // buffer for exactly that many rounds (iteration multiplier 1). The
        // split randomness reaches the played policy through the iteration
        // count.
        train.seed = rng.next_u64();
        const gbt::TrainResult result = gbt::train_early_stopping(data, train);
        gbt::BoostedModel model =
            train_fixed_rounds(data, result.trace.best_iteration, train);
        return {std::move(model), result.trace.best_iteration};
    }
    gbt::BoostedModel model = gbt::train_fixed_rounds(data, fixed_iterations, train);
    return {std::move(model), fixed_iterations};
}

EpochMetrics run_epoch(const env::Environment& environment, int t,
                       const gbt::BoostedModel& model, const policy::PolicyConfig& policy_config,
                       const ExperimentConfig& config, HistoryBuffer& buffer, Rng& rng,
                       MetricsLog* log) {
    const auto k = environment.bank.size();
    ArmTallies tallies = policy_config.kind == policy::PolicyKind::thompson
                             ? tally_buffer(buffer, static_cast<std::size_t>(k))
                             : ArmTallies(static_cast<std::size_t>(k));

    EpochMetrics metrics;
    metrics.epoch = t;
    Eigen::VectorXd estimates(k);
    for (int round = 0; round < config.epoch_size; ++round) {
        const auto ctx_index = static_cast<Eigen::Index>(rng.uniform_index(environment.pool.size()));
        const Eigen::VectorXd context = environment.pool.contexts.row(ctx_index).transpose();
        for (Eigen::Index a = 0; a < k; ++a) {
            estimates[a] = model.predict(environment.feature_row(context, static_cast<int>(a)),
                                         config.train.clip_epsilon);
        }
        const int action = choose_action(environment, t, context, estimates, policy_config,
                                         static_cast<long>(buffer.size()), tallies, rng);

        const Eigen::VectorXd action_features = environment.bank.actions.row(action).transpose();
        const double chosen_mean = env::mean_reward(environment.schedule, t, context, action_features);
        const double best_mean =
            env::oracle_best(environment.schedule, t, context, environment.bank).second;
        const int reward = rng.bernoulli(chosen_mean) ? 1 : 0;

        metrics.cum_reward += static_cast<double>(reward);
        metrics.cum_regret += best_mean - chosen_mean;
        if (log != nullptr && config.keep_round_log)
            log->rounds.push_back(RoundLogEntry{t, reward, chosen_mean, best_mean});
        if (policy_config.kind == policy::PolicyKind::thompson) tallies.add(action, reward);
        buffer.push(InteractionRecord{t, context, action, reward});
    }
    metrics.mean_regret = metrics.cum_regret / static_cast<double>(config.epoch_size);
    return metrics;
}

MetricsLog run_experiment(const env::Environment& environment, const ExperimentConfig& config,
                          std::uint64_t seed) {
    validate(config);
    Rng rng(seed);
    MetricsLog log;
    HistoryBuffer buffer = run_burn_in(environment, config, rng, &log);

    double cum_reward = 0.0;
    double cum_regret = 0.0;
    for (int t = 1; t <= config.epochs; ++t) {
        auto [model, stop_iteration] = train_epoch_model(buffer, config.estimator_mode,
                                                         config.fixed_iterations, config.train,
                                                         rng, environment.bank);
        EpochMetrics metrics =
            run_epoch(environment, t, model, config.policy, config, buffer, rng, &log);
        buffer.apply_window(config.window_capacity);

        cum_reward += metrics.cum_reward;
        cum_regret += metrics.cum_regret;
        metrics.cum_reward = cum_reward;
        metrics.cum_regret = cum_regret;
        metrics.stop_iteration = stop_iteration;
        log.epochs.push_back(metrics);
    }
    return log;
}

std::vector<MetricsLog> run_replications(const ExperimentConfig& config) {
    validate(config);
    const env::Environment environment = env::make_environment(config.environment);
    std::vector<MetricsLog> logs(static_cast<std::size_t>(config.replications));

    const unsigned n_threads =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(config.replications));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= config.replications) return;
            logs[static_cast<std::size_t>(r)] = run_experiment(
                environment, config, derive_seed(config.master_seed, static_cast<std::uint64_t>(r)));
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) threads.emplace_back(worker);
        for (std::thread& thread : threads) thread.join();
    }
    return logs;
}

AggregateCurves aggregate_replications(const std::vector<MetricsLog>& logs) {
    if (logs.empty()) throw std::invalid_argument("aggregate_replications: no replications");
    const std::size_t n_epochs = logs.front().epochs.size();
    for (const MetricsLog& log : logs) {
        if (log.epochs.size() != n_epochs)
            throw std::invalid_argument("aggregate_replications: replication length mismatch");
    }

    AggregateCurves curves;
    auto fill = [&](auto value_of, SeriesCurve& series) {
        series.mean.resize(n_epochs);
        series.stderr_.resize(n_epochs);
        std::vector<double> values(logs.size());
        for (std::size_t e = 0; e < n_epochs; ++e) {
            for (std::size_t r = 0; r < logs.size(); ++r) values[r] = value_of(logs[r].epochs[e]);
            series.mean[e] = mean_of(values);
            series.stderr_[e] = stderr_of_mean(values);
        }
    };
    curves.epoch.resize(n_epochs);
    for (std::size_t e = 0; e < n_epochs; ++e) curves.epoch[e] = logs.front().epochs[e].epoch;
    fill([](const EpochMetrics& m) { return m.cum_reward; }, curves.cum_reward);
    fill([](const EpochMetrics& m) { return m.cum_regret; }, curves.cum_regret);
    fill([](const EpochMetrics& m) { return m.mean_regret; }, curves.mean_regret);
    fill([](const EpochMetrics& m) { return static_cast<double>(m.stop_iteration); },
         curves.stop_iteration);
    return curves;
}

TruncationCurve evaluate_truncations(const gbt::BoostedModel& full_model,
                                     const env::Environment& environment, int t, int n_contexts,
                                     std::uint64_t seed) {
    std::vector<Eigen::Index> context_rows(static_cast<std::size_t>(environment.pool.size()));
    std::iota(context_rows.begin(), context_rows.end(), Eigen::Index{0});
    if (n_contexts > 0 && n_contexts < static_cast<int>(context_rows.size())) {
        Rng rng(seed);
        rng.shuffle(context_rows);
        context_rows.resize(static_cast<std::size_t>(n_contexts));
    }

    const auto k = environment.bank.size();
    const auto n_stages = static_cast<int>(full_model.stages.size());
    const double clip = 1e-6;

    TruncationCurve curve;
    curve.mse.assign(static_cast<std::size_t>(n_stages) + 1, 0.0);
    curve.regret.assign(static_cast<std::size_t>(n_stages) + 1, 0.0);

    Eigen::VectorXd raw(k);
    Eigen::VectorXd truth(k);
    Eigen::VectorXd estimates(k);
    const double n_pairs = static_cast<double>(context_rows.size()) * static_cast<double>(k);
    for (const Eigen::Index row : context_rows) {
        const Eigen::VectorXd context = environment.pool.contexts.row(row).transpose();
        double best_mean = -1.0;
        for (Eigen::Index a = 0; a < k; ++a) {
            truth[a] = env::mean_reward(environment.schedule, t, context,
                                        environment.bank.actions.row(a).transpose());
            best_mean = std::max(best_mean, truth[a]);
            raw[a] = full_model.initial_prediction;
        }
        for (int m = 0; m <= n_stages; ++m) {
            if (m > 0) {
                const gbt::RegressionTree& tree = full_model.stages[static_cast<std::size_t>(m - 1)];
                for (Eigen::Index a = 0; a < k; ++a)
                    raw[a] += full_model.learning_rate *
                              tree.predict(environment.feature_row(context, static_cast<int>(a)));
            }
            double sq = 0.0;
            for (Eigen::Index a = 0; a < k; ++a) {
                estimates[a] = std::min(1.0 - clip, std::max(clip, raw[a]));
                const double e = estimates[a] - truth[a];
                sq += e * e;
            }
            curve.mse[static_cast<std::size_t>(m)] += sq / n_pairs;

            const Eigen::VectorXd greedy = policy::greedy_distribution(estimates);
            const double expected = greedy.dot(truth);
            curve.regret[static_cast<std::size_t>(m)] +=
                (best_mean - expected) / static_cast<double>(context_rows.size());
        }
    }
    return curve;
}

}  // namespace banditsim::run
