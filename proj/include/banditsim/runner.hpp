#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

#include "banditsim/boosting.hpp"
#include "banditsim/env.hpp"
#include "banditsim/policies.hpp"
#include "banditsim/rng.hpp"

namespace banditsim::run {

struct InteractionRecord {
    int epoch = 0;  // 0 = burn-in
    Eigen::VectorXd context;
    int action = 0;
    int reward = 0;
};

// Arrival-ordered history with optional sliding-window retention.
class HistoryBuffer {
public:
    HistoryBuffer() = default;
    explicit HistoryBuffer(long capacity) : capacity_(capacity) {}

    void push(InteractionRecord record);
    // Drops the oldest records until at most `capacity` remain (0 = unlimited).
    void apply_window(long capacity);
    void apply_window() { apply_window(capacity_); }

    std::size_t size() const { return records_.size(); }
    long capacity() const { return capacity_; }
    const std::deque<InteractionRecord>& records() const { return records_; }

    // Training matrix: each record becomes (context features, action features).
    gbt::Dataset to_dataset(const env::ActionBank& bank) const;

private:
    std::deque<InteractionRecord> records_;
    long capacity_ = 0;  // 0 = unlimited
};

enum class EstimatorMode { early_stop, fixed_iterations };

struct ExperimentConfig {
    int burn_in = 1000;
    int epochs = 100;
    int epoch_size = 100;
    long window_capacity = 0;  // 0 = unlimited
    EstimatorMode estimator_mode = EstimatorMode::early_stop;
    int fixed_iterations = 30;
    policy::PolicyConfig policy;
    env::EnvironmentConfig environment;
    gbt::TrainConfig train;
    int replications = 1;
    std::uint64_t master_seed = 1;
    bool keep_round_log = false;
};

void validate(const ExperimentConfig& config);

struct EpochMetrics {
    int epoch = 0;
    double cum_reward = 0.0;
    double cum_regret = 0.0;
    double mean_regret = 0.0;
    int stop_iteration = 0;
};

struct RoundLogEntry {
    int epoch = 0;
    int reward = 0;
    double chosen_mean = 0.0;
    double best_mean = 0.0;
};

struct MetricsLog {
    std::vector<EpochMetrics> epochs;
    std::vector<RoundLogEntry> rounds;  // populated when keep_round_log is set
};

// Uniformly random actions for `burn_in` rounds at environment time t = 0.
HistoryBuffer run_burn_in(const env::Environment& environment, const ExperimentConfig& config,
                          Rng& rng, MetricsLog* log = nullptr);

// early_stop: the full cross-validated procedure; reported iteration is the
// best (returned) iteration. fixed_iterations: exactly `fixed_iterations`
// rounds on the whole buffer with no validation gate.
std::pair<gbt::BoostedModel, int> train_epoch_model(const HistoryBuffer& buffer,
                                                    EstimatorMode mode, int fixed_iterations,
                                                    gbt::TrainConfig train, Rng& rng,
                                                    const env::ActionBank& bank);

// Plays one epoch at environment time t, appending records to the buffer.
// Regret is pseudo-regret: best scheduled mean minus the chosen action's mean.
EpochMetrics run_epoch(const env::Environment& environment, int t,
                       const gbt::BoostedModel& model, const policy::PolicyConfig& policy,
                       const ExperimentConfig& config, HistoryBuffer& buffer, Rng& rng,
                       MetricsLog* log = nullptr);

MetricsLog run_experiment(const env::Environment& environment, const ExperimentConfig& config,
                          std::uint64_t seed);

// One environment (built from config.environment), `replications` runs with
// seeds derive_seed(master_seed, r). Replications run on a small thread pool;
// results are indexed by replication, so the output is schedule-independent.
std::vector<MetricsLog> run_replications(const ExperimentConfig& config);

struct SeriesCurve {
    std::vector<double> mean;
    std::vector<double> stderr_;
};

struct AggregateCurves {
    std::vector<int> epoch;
    SeriesCurve cum_reward;
    SeriesCurve cum_regret;
    SeriesCurve mean_regret;
    SeriesCurve stop_iteration;
};

// Pointwise mean and standard error across replications.
AggregateCurves aggregate_replications(const std::vector<MetricsLog>& logs);

struct TruncationCurve {
    std::vector<double> mse;     // vs ground-truth means, length stages + 1
    std::vector<double> regret;  // expected greedy pseudo-regret, same length
};

// Evaluates every prefix of `full_model` against the scheduled ground truth
// at time t: MSE over (context, action) pairs and the expected pseudo-regret
// of uniform-tie greedy selection. Contexts are the first `n_contexts` of a
// seeded shuffle of the pool (0 = whole pool).
TruncationCurve evaluate_truncations(const gbt::BoostedModel& full_model,
                                     const env::Environment& environment, int t, int n_contexts,
                                     std::uint64_t seed);

}  // namespace banditsim::run
