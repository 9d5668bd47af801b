#include "banditsim/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace banditsim::env {

namespace {

// Latent conversion probability: a handful of seeded threshold-gated
// context-action products plus weak linear terms, squashed through a
// logistic link. The intercept is calibrated afterwards.
// Latent conversion probability with structure at two scales. A strong
// main effect (threshold on a random projection of the action features)
// splits the bank into a weak and a strong tier, which a model can learn
// from the burn-in alone. Within the strong tier the winner per context is
// decided by threshold-gated context-action interaction terms whose
// amplitude is controlled by interaction_scale; keeping those near the
// Bernoulli noise floor is what makes exploration matter.
struct LatentScore {
    struct Interaction {
        int context_index;
        int action_index;
        double threshold;
        double weight;
    };
    std::vector<Interaction> interactions;
    Eigen::VectorXd context_weights;
    Eigen::VectorXd tier_direction;
    double tier_cut = 0.0;
    double tier_penalty = 1.2;
    double interaction_scale = 1.0;

    static LatentScore make(const EnvironmentConfig& config, Rng& rng,
                            const Eigen::MatrixXd& bank_actions) {
        LatentScore score;
        score.interaction_scale = config.interaction_scale;
        const int n_terms = 6 * config.context_dim;
        score.interactions.reserve(static_cast<std::size_t>(n_terms));
        for (int j = 0; j < n_terms; ++j) {
            Interaction term;
            term.context_index = static_cast<int>(rng.uniform_index(config.context_dim));
            term.action_index = static_cast<int>(rng.uniform_index(config.action_dim));
            term.threshold = 0.2 + 0.6 * rng.uniform();
            term.weight = 2.0 * rng.uniform() - 1.0;
            score.interactions.push_back(term);
        }
        score.context_weights.resize(config.context_dim);
        for (int j = 0; j < config.context_dim; ++j)
            score.context_weights[j] = rng.uniform() - 0.5;

        score.tier_direction.resize(config.action_dim);
        for (int j = 0; j < config.action_dim; ++j)
            score.tier_direction[j] = 2.0 * rng.uniform() - 1.0;
        // Cut at the bank median so roughly half the actions land in the
        // weak tier.
        std::vector<double> projections;
        projections.reserve(static_cast<std::size_t>(bank_actions.rows()));
        for (Eigen::Index a = 0; a < bank_actions.rows(); ++a)
            projections.push_back(bank_actions.row(a).dot(score.tier_direction));
        std::nth_element(projections.begin(), projections.begin() + projections.size() / 2,
                         projections.end());
        score.tier_cut = projections[projections.size() / 2];
        return score;
    }

    double operator()(const Eigen::Ref<const Eigen::VectorXd>& context,
                      const Eigen::Ref<const Eigen::VectorXd>& action) const {
        double g = context.dot(context_weights);
        if (action.dot(tier_direction) < tier_cut) g -= tier_penalty;
        for (const Interaction& term : interactions) {
            if (context[term.context_index] > term.threshold)
                g += interaction_scale * term.weight * (action[term.action_index] - 0.5);
        }
        return g;
    }
};

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Intercept b such that mean_i logistic(score_i - b) == target, by bisection.
double calibrate_intercept(const Eigen::VectorXd& scores, double target) {
    double lo = -50.0;
    double hi = 50.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        double mean = 0.0;
        for (Eigen::Index i = 0; i < scores.size(); ++i) mean += logistic(scores[i] - mid);
        mean /= static_cast<double>(scores.size());
        if (mean > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Ground-truth fits run deeper and more patiently than the in-loop learner:
// the fitted truth should retain the latent's context-action interactions
// rather than smooth them away.
gbt::TrainConfig truth_fit_config(std::uint64_t seed) {
    gbt::TrainConfig config;
    config.max_depth = 5;
    config.max_rounds = 400;
    config.patience = 20;
    config.min_samples_leaf = 10;
    config.seed = seed;
    return config;
}

}  // namespace

double GroundTruthModel::mean_reward(const Eigen::Ref<const Eigen::VectorXd>& context,
                                     const Eigen::Ref<const Eigen::VectorXd>& action) const {
    Eigen::VectorXd features(context.size() + action.size());
    features << context, action;
    return model.predict(features, clip_epsilon);
}

void validate(const EnvironmentConfig& config) {
    if (config.context_dim < 1 || config.action_dim < 1)
        throw std::invalid_argument("EnvironmentConfig: feature dimensions must be positive");
    if (config.n_actions < 2) throw std::invalid_argument("EnvironmentConfig: need K >= 2 actions");
    if (config.pool_size < 2) throw std::invalid_argument("EnvironmentConfig: pool too small");
    if (!(config.flip_fraction >= 0.0 && config.flip_fraction <= 1.0))
        throw std::invalid_argument("EnvironmentConfig: flip fraction must lie in [0, 1]");
    if (!(config.target_mean > 0.0 && config.target_mean < 1.0))
        throw std::invalid_argument("EnvironmentConfig: target mean must lie in (0, 1)");
    if (!(config.signal_scale > 0.0))
        throw std::invalid_argument("EnvironmentConfig: signal scale must be positive");
}

SyntheticTruth build_synthetic_truth(const EnvironmentConfig& config) {
    validate(config);
    Rng rng(config.seed);

    SyntheticTruth truth;
    truth.pool.contexts.resize(config.pool_size, config.context_dim);
    for (Eigen::Index i = 0; i < truth.pool.contexts.rows(); ++i)
        for (Eigen::Index j = 0; j < truth.pool.contexts.cols(); ++j)
            truth.pool.contexts(i, j) = rng.uniform();

    truth.bank.actions.resize(config.n_actions, config.action_dim);
    for (Eigen::Index i = 0; i < truth.bank.actions.rows(); ++i)
        for (Eigen::Index j = 0; j < truth.bank.actions.cols(); ++j)
            truth.bank.actions(i, j) = rng.uniform();

    const LatentScore latent = LatentScore::make(config, rng, truth.bank.actions);
    // One decision instance per pool context and pass: a context paired with
    // a uniformly drawn action, the way campaign logs look.
    const Eigen::Index passes = 3;
    const Eigen::Index rows = truth.pool.size() * passes;
    truth.table.features.resize(rows, config.context_dim + config.action_dim);
    Eigen::VectorXd scores(rows);
    Eigen::Index row = 0;
    for (Eigen::Index pass = 0; pass < passes; ++pass) {
        for (Eigen::Index c = 0; c < truth.pool.size(); ++c, ++row) {
            const auto a = static_cast<Eigen::Index>(rng.uniform_index(truth.bank.size()));
            truth.table.features.row(row) << truth.pool.contexts.row(c), truth.bank.actions.row(a);
            scores[row] = latent(truth.pool.contexts.row(c).transpose(),
                                 truth.bank.actions.row(a).transpose());
        }
    }

    scores *= config.signal_scale;
    const double intercept = calibrate_intercept(scores, config.target_mean);
    truth.table.latent_probs.resize(rows);
    truth.table.labels.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        truth.table.latent_probs[i] = logistic(scores[i] - intercept);
        truth.table.labels[i] = rng.bernoulli(truth.table.latent_probs[i]) ? 1.0 : 0.0;
    }

    truth.model = fit_truth_model(truth.table, derive_seed(config.seed, 1));
    return truth;
}

Eigen::VectorXd flip_labels(const Eigen::VectorXd& labels, double q, std::uint64_t seed) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("flip_labels: q must lie in [0, 1]");
    std::vector<Eigen::Index> positives;
    std::vector<Eigen::Index> negatives;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        (labels[i] > 0.5 ? positives : negatives).push_back(i);
    }
    const auto n_flip = static_cast<std::size_t>(
        std::floor(q * static_cast<double>(positives.size())));
    if (n_flip > negatives.size())
        throw std::invalid_argument("flip_labels: not enough negatives to absorb reassignments");

    Rng rng(seed);
    rng.shuffle(positives);
    rng.shuffle(negatives);
    Eigen::VectorXd out = labels;
    for (std::size_t i = 0; i < n_flip; ++i) {
        out[positives[i]] = 0.0;
        out[negatives[i]] = 1.0;
    }
    return out;
}

GroundTruthModel fit_truth_model(const LabelTable& table, std::uint64_t seed) {
    gbt::Dataset data{table.features, table.labels};
    GroundTruthModel truth;
    truth.model = gbt::train_early_stopping(data, truth_fit_config(seed)).model;
    return truth;
}

GroundTruthModel make_drifted_truth(const LabelTable& table, double q, std::uint64_t seed) {
    LabelTable drifted = table;
    drifted.labels = flip_labels(table.labels, q, seed);
    return fit_truth_model(drifted, derive_seed(seed, 2));
}

double mean_reward(const DriftSchedule& schedule, int t,
                   const Eigen::Ref<const Eigen::VectorXd>& context,
                   const Eigen::Ref<const Eigen::VectorXd>& action) {
    if (t < schedule.t_start) return schedule.f0.mean_reward(context, action);
    if (t > schedule.t_end) return schedule.f1.mean_reward(context, action);
    const double span = static_cast<double>(schedule.t_end - schedule.t_start);
    const double w0 = static_cast<double>(schedule.t_end - t);
    const double w1 = static_cast<double>(t - schedule.t_start);
    return (schedule.f0.mean_reward(context, action) * w0 +
            schedule.f1.mean_reward(context, action) * w1) /
           span;
}

int sample_reward(const DriftSchedule& schedule, int t,
                  const Eigen::Ref<const Eigen::VectorXd>& context,
                  const Eigen::Ref<const Eigen::VectorXd>& action, Rng& rng) {
    return rng.bernoulli(mean_reward(schedule, t, context, action)) ? 1 : 0;
}

std::pair<int, double> oracle_best(const DriftSchedule& schedule, int t,
                                   const Eigen::Ref<const Eigen::VectorXd>& context,
                                   const ActionBank& bank) {
    int best = 0;
    double best_mean = -1.0;
    for (Eigen::Index a = 0; a < bank.size(); ++a) {
        const double m = mean_reward(schedule, t, context, bank.actions.row(a).transpose());
        if (m > best_mean) {
            best_mean = m;
            best = static_cast<int>(a);
        }
    }
    return {best, best_mean};
}

Eigen::VectorXd Environment::feature_row(const Eigen::Ref<const Eigen::VectorXd>& context,
                                         int action) const {
    Eigen::VectorXd features(context.size() + bank.dim());
    features << context, bank.actions.row(action).transpose();
    return features;
}

Environment make_environment(const EnvironmentConfig& config) {
    if (config.flat) return make_flat_environment(config, config.target_mean);
    SyntheticTruth truth = build_synthetic_truth(config);
    Environment environment;
    environment.pool = std::move(truth.pool);
    environment.bank = std::move(truth.bank);
    environment.schedule.f1 = truth.model;
    environment.schedule.f0 =
        config.stationary
            ? truth.model
            : make_drifted_truth(truth.table, config.flip_fraction, derive_seed(config.seed, 3));
    environment.table = std::move(truth.table);
    return environment;
}

Environment make_flat_environment(const EnvironmentConfig& config, double mean) {
    validate(config);
    if (!(mean > 0.0 && mean < 1.0))
        throw std::invalid_argument("make_flat_environment: mean must lie in (0, 1)");
    Rng rng(config.seed);
    Environment environment;
    environment.pool.contexts.resize(config.pool_size, config.context_dim);
    for (Eigen::Index i = 0; i < environment.pool.contexts.rows(); ++i)
        for (Eigen::Index j = 0; j < environment.pool.contexts.cols(); ++j)
            environment.pool.contexts(i, j) = rng.uniform();
    environment.bank.actions.resize(config.n_actions, config.action_dim);
    for (Eigen::Index i = 0; i < environment.bank.actions.rows(); ++i)
        for (Eigen::Index j = 0; j < environment.bank.actions.cols(); ++j)
            environment.bank.actions(i, j) = rng.uniform();

    GroundTruthModel constant;
    constant.model.initial_prediction = mean;
    constant.model.learning_rate = 1.0;
    constant.model.n_features = config.context_dim + config.action_dim;
    environment.schedule.f0 = constant;
    environment.schedule.f1 = constant;
    return environment;
}

}  // namespace banditsim::env
