#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "banditsim/dataset.hpp"
#include "banditsim/tree.hpp"

namespace banditsim::gbt {

enum class LossMetric { squared, log };

struct TrainConfig {
    double learning_rate = 0.1;
    int max_rounds = 200;
    int patience = 5;
    double validation_fraction = 0.5;
    LossMetric loss_metric = LossMetric::squared;
    int max_depth = 3;
    int min_samples_leaf = 5;
    double clip_epsilon = 1e-6;
    std::uint64_t seed = 0;
};

void validate(const TrainConfig& config);

// Additive stage model: score(x) = initial_prediction + lr * sum_k stage_k(x).
struct BoostedModel {
    double initial_prediction = 0.0;
    double learning_rate = 1.0;
    Eigen::Index n_features = 0;
    std::vector<RegressionTree> stages;

    double raw_score(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    // raw_score clipped into [clip_epsilon, 1 - clip_epsilon].
    double predict(const Eigen::Ref<const Eigen::VectorXd>& x, double clip_epsilon) const;
};

struct ValidationTrace {
    std::vector<double> losses;  // index 0 = constant model
    int best_iteration = 0;
    int stop_iteration = 0;
};

struct TrainResult {
    BoostedModel model;  // truncated at best_iteration
    ValidationTrace trace;
};

// Boosting with a random train/validation split and patience-based early
// stopping: stage m fits the training residuals by least squares, the
// validation loss is tracked with strict-improvement semantics, training
// halts once `patience` rounds pass without a new best, and the model
// truncated at the best iteration is returned.
TrainResult train_early_stopping(const Dataset& history, const TrainConfig& config);

// Same boosting loop on the full dataset with no validation gate; runs
// exactly `rounds` stages. Used as the unregularized baseline.
BoostedModel train_fixed_rounds(const Dataset& history, int rounds, const TrainConfig& config);

// Mean per-example loss over `data`. Squared loss evaluates the raw additive
// score; log loss evaluates clipped predictions (it is undefined at 0/1).
double validation_loss(const BoostedModel& model, const Dataset& data, LossMetric metric,
                       double clip_epsilon);

// Prefix model keeping the first `iteration` stages.
BoostedModel truncate(const BoostedModel& model, int iteration);

}  // namespace banditsim::gbt
