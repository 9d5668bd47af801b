#include "banditsim/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace banditsim::gbt {

namespace {

double clip_unit(double v, double eps) { return std::min(1.0 - eps, std::max(eps, v)); }

double loss_of_predictions(const Eigen::VectorXd& raw, const Eigen::VectorXd& rewards,
                           LossMetric metric, double clip_epsilon) {
    const auto n = raw.size();
    double total = 0.0;
    if (metric == LossMetric::squared) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = rewards[i] - raw[i];
            total += e * e;
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = clip_unit(raw[i], clip_epsilon);
            total += -(rewards[i] * std::log(p) + (1.0 - rewards[i]) * std::log(1.0 - p));
        }
    }
    return total / static_cast<double>(n);
}

void add_stage_predictions(const RegressionTree& tree, const Eigen::MatrixXd& features,
                           double learning_rate, Eigen::VectorXd& raw) {
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        raw[i] += learning_rate * tree.predict(features.row(i).transpose());
    }
}

}  // namespace

void validate(const TrainConfig& config) {
    if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0))
        throw std::invalid_argument("TrainConfig: learning_rate must lie in (0, 1]");
    if (config.max_rounds < 0) throw std::invalid_argument("TrainConfig: max_rounds must be >= 0");
    if (config.patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
    if (!(config.validation_fraction > 0.0 && config.validation_fraction < 1.0))
        throw std::invalid_argument("TrainConfig: validation_fraction must lie in (0, 1)");
    if (config.max_depth < 1) throw std::invalid_argument("TrainConfig: max_depth must be >= 1");
    if (config.min_samples_leaf < 1)
        throw std::invalid_argument("TrainConfig: min_samples_leaf must be >= 1");
    if (!(config.clip_epsilon > 0.0 && config.clip_epsilon < 0.5))
        throw std::invalid_argument("TrainConfig: clip_epsilon must lie in (0, 0.5)");
}

double BoostedModel::raw_score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (n_features > 0 && x.size() != n_features)
        throw std::invalid_argument("BoostedModel: feature length mismatch");
    double score = initial_prediction;
    for (const RegressionTree& tree : stages) score += learning_rate * tree.predict(x);
    return score;
}

double BoostedModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x, double clip_epsilon) const {
    return clip_unit(raw_score(x), clip_epsilon);
}

TrainResult train_early_stopping(const Dataset& history, const TrainConfig& config) {
    validate(config);
    const auto [train, val] = split_train_val(history, config.validation_fraction, config.seed);

    BoostedModel model;
    model.initial_prediction = train.rewards.mean();
    model.learning_rate = config.learning_rate;
    model.n_features = history.dim();

    Eigen::VectorXd train_raw = Eigen::VectorXd::Constant(train.size(), model.initial_prediction);
    Eigen::VectorXd val_raw = Eigen::VectorXd::Constant(val.size(), model.initial_prediction);

    ValidationTrace trace;
    trace.losses.push_back(loss_of_predictions(val_raw, val.rewards, config.loss_metric,
                                               config.clip_epsilon));
    double best_loss = trace.losses[0];
    int wait = 0;

    TreeFitter fitter(train.features, config.max_depth, config.min_samples_leaf);
    for (int m = 1; m <= config.max_rounds; ++m) {
        const Eigen::VectorXd residuals = train.rewards - train_raw;
        RegressionTree tree = fitter.fit(residuals);
        add_stage_predictions(tree, train.features, config.learning_rate, train_raw);
        add_stage_predictions(tree, val.features, config.learning_rate, val_raw);
        model.stages.push_back(std::move(tree));

        const double loss = loss_of_predictions(val_raw, val.rewards, config.loss_metric,
                                                config.clip_epsilon);
        trace.losses.push_back(loss);
        trace.stop_iteration = m;
        if (loss < best_loss) {
            best_loss = loss;
            trace.best_iteration = m;
            wait = 0;
        } else {
            ++wait;
        }
        if (wait >= config.patience) break;
    }

    return TrainResult{truncate(model, trace.best_iteration), trace};
}

BoostedModel train_fixed_rounds(const Dataset& history, int rounds, const TrainConfig& config) {
    validate(config);
    validate(history);
    if (rounds < 0) throw std::invalid_argument("train_fixed_rounds: rounds must be >= 0");

    BoostedModel model;
    model.initial_prediction = history.rewards.mean();
    model.learning_rate = config.learning_rate;
    model.n_features = history.dim();

    Eigen::VectorXd raw = Eigen::VectorXd::Constant(history.size(), model.initial_prediction);
    TreeFitter fitter(history.features, config.max_depth, config.min_samples_leaf);
    for (int m = 1; m <= rounds; ++m) {
        const Eigen::VectorXd residuals = history.rewards - raw;
        RegressionTree tree = fitter.fit(residuals);
        add_stage_predictions(tree, history.features, config.learning_rate, raw);
        model.stages.push_back(std::move(tree));
    }
    return model;
}

double validation_loss(const BoostedModel& model, const Dataset& data, LossMetric metric,
                       double clip_epsilon) {
    if (data.size() == 0) throw std::invalid_argument("validation_loss: empty dataset");
    Eigen::VectorXd raw(data.size());
    for (Eigen::Index i = 0; i < data.size(); ++i)
        raw[i] = model.raw_score(data.features.row(i).transpose());
    return loss_of_predictions(raw, data.rewards, metric, clip_epsilon);
}

BoostedModel truncate(const BoostedModel& model, int iteration) {
    if (iteration < 0 || iteration > static_cast<int>(model.stages.size()))
        throw std::invalid_argument("truncate: iteration out of range");
    BoostedModel out;
    out.initial_prediction = model.initial_prediction;
    out.learning_rate = model.learning_rate;
    out.n_features = model.n_features;
    out.stages.assign(model.stages.begin(), model.stages.begin() + iteration);
    return out;
}

}  // namespace banditsim::gbt
