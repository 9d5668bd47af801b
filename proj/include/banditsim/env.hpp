#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "banditsim/boosting.hpp"
#include "banditsim/rng.hpp"

namespace banditsim::env {

// Finite context distribution: rows are context feature vectors, sampled
// uniformly with replacement.
struct ContextPool {
    Eigen::MatrixXd contexts;

    Eigen::Index size() const { return contexts.rows(); }
    Eigen::Index dim() const { return contexts.cols(); }
};

// Rows are action feature vectors; row index is the action id.
struct ActionBank {
    Eigen::MatrixXd actions;

    Eigen::Index size() const { return actions.rows(); }
    Eigen::Index dim() const { return actions.cols(); }
};

// Mean-reward function backed by a boosted model over concatenated
// (context, action) features; outputs are clipped into (0, 1).
struct GroundTruthModel {
    gbt::BoostedModel model;
    double clip_epsilon = 1e-6;

    double mean_reward(const Eigen::Ref<const Eigen::VectorXd>& context,
                       const Eigen::Ref<const Eigen::VectorXd>& action) const;
};

// Piecewise-linear transition from f0 to f1: pure f0 before t_start, pure f1
// after t_end, linear blend with weights (t_end - t, t - t_start) inside.
struct DriftSchedule {
    GroundTruthModel f0;
    GroundTruthModel f1;
    int t_start = 45;
    int t_end = 60;
};

struct EnvironmentConfig {
    int context_dim = 2;
    int action_dim = 5;
    int n_actions = 18;
    int pool_size = 200;
    double flip_fraction = 0.5;
    // Marginal label rate the latent probability is calibrated to.
    double target_mean = 0.3;
    // Multiplier on the latent score before the logistic link; smaller values
    // compress the spread of true means, so action gaps shrink relative to
    // Bernoulli noise and exploration matters more.
    double signal_scale = 1.0;
    // Weight of the thresholded context-action interaction terms relative to
    // the action main effects. Main effects separate good from bad actions
    // and are learnable from the burn-in alone; the interactions decide which
    // near-optimal action wins per context and sit near the noise floor, so
    // ranking them is where exploration pays.
    double interaction_scale = 1.0;
    bool stationary = true;
    // Constant-mean truth at target_mean; no learnable structure.
    bool flat = false;
    std::uint64_t seed = 9001;
};

void validate(const EnvironmentConfig& config);

// The tabular dataset the ground-truth models are fitted to: one row per
// synthetic decision instance (a pool context paired with one bank action).
struct LabelTable {
    Eigen::MatrixXd features;
    Eigen::VectorXd labels;
    Eigen::VectorXd latent_probs;
};

struct SyntheticTruth {
    ContextPool pool;
    ActionBank bank;
    LabelTable table;
    GroundTruthModel model;
};

// Draws the context pool and action bank, evaluates a fixed nonlinear latent
// probability built from thresholded context-action interaction terms
// (calibrated so the mean label rate hits config.target_mean), samples
// Bernoulli labels, and fits a boosted model to them.
SyntheticTruth build_synthetic_truth(const EnvironmentConfig& config);

// Drift construction: flips floor(q * #positives) positive labels to zero and
// promotes the same number of negatives, preserving the total positive count.
Eigen::VectorXd flip_labels(const Eigen::VectorXd& labels, double q, std::uint64_t seed);

GroundTruthModel fit_truth_model(const LabelTable& table, std::uint64_t seed);

GroundTruthModel make_drifted_truth(const LabelTable& table, double q, std::uint64_t seed);

double mean_reward(const DriftSchedule& schedule, int t,
                   const Eigen::Ref<const Eigen::VectorXd>& context,
                   const Eigen::Ref<const Eigen::VectorXd>& action);

int sample_reward(const DriftSchedule& schedule, int t,
                  const Eigen::Ref<const Eigen::VectorXd>& context,
                  const Eigen::Ref<const Eigen::VectorXd>& action, Rng& rng);

// Best action under the scheduled mean reward; ties go to the lowest index.
std::pair<int, double> oracle_best(const DriftSchedule& schedule, int t,
                                   const Eigen::Ref<const Eigen::VectorXd>& context,
                                   const ActionBank& bank);

struct Environment {
    ContextPool pool;
    ActionBank bank;
    DriftSchedule schedule;
    LabelTable table;

    Eigen::VectorXd feature_row(const Eigen::Ref<const Eigen::VectorXd>& context,
                                int action) const;
};

// Stationary config: f0 = f1 = fitted truth. Drifting config: f1 is the
// fitted truth and f0 the label-flipped refit.
Environment make_environment(const EnvironmentConfig& config);

// Constant-mean environment (no learnable structure); used as the zero-signal
// baseline.
Environment make_flat_environment(const EnvironmentConfig& config, double mean);

}  // namespace banditsim::env
