#pragma once

#include <cstdint>
#include <vector>

namespace banditsim::twoarm {

// Per-arm success/total counts at a decision point. Totals must be even so
// the history splits into equal train/validation halves per arm.
struct TwoArmCounts {
    long successes_1 = 0;
    long total_1 = 0;
    long successes_2 = 0;
    long total_2 = 0;

    long half_1() const { return total_1 / 2; }
    long half_2() const { return total_2 / 2; }
};

void validate(const TwoArmCounts& counts);

// With binary rewards, an even train/validation split of each arm's history
// is fully characterized by how many of that arm's successes land in the
// training half.
struct BalancedSplit {
    long train_successes_1 = 0;
    long train_successes_2 = 0;
};

void validate(const BalancedSplit& split, const TwoArmCounts& counts);

// Feasible range of train successes for one arm: k in
// [max(0, s - n), min(s, n)] with n = total / 2.
long split_min_train_successes(long successes, long total);
long split_max_train_successes(long successes, long total);

struct SplitStats {
    double delta = 0.0;      // full-sample mean difference, arm 1 minus arm 2
    double delta_tr = 0.0;
    double delta_val = 0.0;
    double rbar_tr = 0.0;    // pooled training mean
    double rbar_tr_1 = 0.0;
    double rbar_tr_2 = 0.0;
    double rbar_val_1 = 0.0;
    double rbar_val_2 = 0.0;
};

SplitStats split_stats(const TwoArmCounts& counts, const BalancedSplit& split);

// Two-step boosted predictor: the constant root prediction plus a one-step
// shift toward the per-arm training means.
struct TwoStepModel {
    double tree0_prediction = 0.0;
    double p_1 = 0.0;
    double p_2 = 0.0;
    double learning_rate = 0.0;
};

TwoStepModel build_two_step(const BalancedSplit& split, const TwoArmCounts& counts, double eta);

// Mean log loss over both validation halves for per-arm predictions p_1, p_2
// (counting s_val_i successes out of n_i per arm). Predictions must lie
// strictly inside (0, 1).
double two_arm_log_loss(double p_1, double p_2, long val_successes_1, long val_successes_2,
                        long n_1, long n_2);

// True iff the one-step model strictly reduces validation log loss over the
// constant model. Ties reject (training stops).
bool accept_tree1(const BalancedSplit& split, const TwoArmCounts& counts, double eta);

// The three equivalent acceptance characterizations: the log-loss test, the
// train/validation sign agreement, and the open-interval condition on the
// training difference (delta_tr in (0, 2*delta) for delta > 0, mirrored for
// delta < 0). Sign and interval indicators use exact integer arithmetic.
struct Prop1Indicators {
    bool accepted = false;
    bool signs_agree = false;
    bool in_interval = false;
};

Prop1Indicators check_prop1(const BalancedSplit& split, const TwoArmCounts& counts, double eta);

// d/d(delta) of the validation log loss at delta = 0, where delta is the
// first-order prediction shift on arm 1 and arm 2 moves by -(n_1/n_2)*delta:
//   n_1 / ((n_1 + n_2) * rbar_tr * (1 - rbar_tr)) * (rbar_val_2 - rbar_val_1).
double loss_derivative_at_zero(const SplitStats& stats, long n_1, long n_2);

struct ArmAllocation {
    double p_arm1 = 0.0;
    double p_arm2 = 0.0;
};

// Allocation probabilities induced by early stopping: enumerate every
// balanced split weighted by its hypergeometric probability; acceptance
// plays the arm with the larger training mean, rejection explores uniformly.
ArmAllocation allocation_prob_exhaustive(const TwoArmCounts& counts, double eta);

// Same quantity by Monte Carlo over uniformly random balanced splits.
ArmAllocation allocation_prob_montecarlo(const TwoArmCounts& counts, double eta, long n_sims,
                                         std::uint64_t seed);

// P(arm optimal) under independent Beta(prior_alpha + successes,
// prior_beta + failures) posteriors, by Monte Carlo.
ArmAllocation ts_allocation_prob(const TwoArmCounts& counts, double prior_alpha, double prior_beta,
                                 long n_sims, std::uint64_t seed);

struct HypothesisParams {
    double mu_1 = 0.5;
    double mu_2 = 0.5;
    long n_total_1 = 0;
    long n_total_2 = 0;
};

// sqrt(mu_1(1-mu_1)/N_1 + mu_2(1-mu_2)/N_2).
double sigma_delta(double mu_1, double mu_2, long n_total_1, long n_total_2);

// Draws of (delta_tr - delta) / sigma_delta under Bernoulli arms: sample each
// arm's full history, split it at random into balanced halves, standardize.
std::vector<double> sample_standardized_delta_tr(const HypothesisParams& params, long n_sims,
                                                 std::uint64_t seed);

// 2 * Phi(-|delta| / sigma).
double two_sided_pvalue(double delta, double sigma);

// Per-round cumulative mean reward, averaged over replications, for two
// players of a Bernoulli two-armed bandit with true means (mu_1, mu_2):
//   earlystop - per round, re-split the full history into per-arm halves at
//     random, accept the one-step model iff it lowers validation log loss,
//     then play greedily on its predictions (uniformly on rejection);
//   thompson - Beta(prior_alpha, prior_beta) posterior sampling.
// Until both arms hold 2 observations the less-sampled arm is played (ties
// at random). Odd arm histories put the extra sample on the training side.
struct RewardCurves {
    std::vector<double> earlystop;
    std::vector<double> thompson;
};

RewardCurves reward_comparison(double mu_1, double mu_2, long horizon, long replications,
                               double eta, double prior_alpha, double prior_beta,
                               std::uint64_t seed);

}  // namespace banditsim::twoarm
