#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "banditsim/rng.hpp"

namespace banditsim::policy {

// A probability vector over the K actions: entries >= 0, summing to 1
// within 1e-9.
bool is_valid_distribution(const Eigen::Ref<const Eigen::VectorXd>& probs, double tol = 1e-9);

// All mass shared uniformly by the argmax set.
Eigen::VectorXd greedy_distribution(const Eigen::Ref<const Eigen::VectorXd>& estimates);

// epsilon * uniform + (1 - epsilon) * greedy.
Eigen::VectorXd epsilon_greedy_distribution(const Eigen::Ref<const Eigen::VectorXd>& estimates,
                                            double epsilon);

// Inverse-gap weighting scale: c * sqrt(K * n), n = records in the training
// buffer.
double falcon_gamma(long n, int n_actions, double c);

// Inverse-gap weighting: every non-best action a gets
// 1 / (K + gamma * (max - estimate_a)); the best action (lowest index among
// the argmax set) absorbs the residual mass.
Eigen::VectorXd falcon_distribution(const Eigen::Ref<const Eigen::VectorXd>& estimates,
                                    double gamma);

// Softmax over temperature * estimates, max-subtracted for stability.
Eigen::VectorXd exp_distribution(const Eigen::Ref<const Eigen::VectorXd>& estimates,
                                 double temperature);

// Monte-Carlo estimate of P(arm optimal) under independent
// Beta(prior_alpha + successes, prior_beta + failures) posteriors.
Eigen::VectorXd thompson_mab_distribution(const std::vector<long>& successes,
                                          const std::vector<long>& failures, double prior_alpha,
                                          double prior_beta, long n_draws, std::uint64_t seed);

// Single posterior draw per arm, returns the argmax. The online play mode of
// Thompson sampling.
int sample_thompson_action(const std::vector<long>& successes, const std::vector<long>& failures,
                           double prior_alpha, double prior_beta, Rng& rng);

// Inverse-CDF sample from a distribution using one uniform variate.
int sample_action(const Eigen::Ref<const Eigen::VectorXd>& distribution, Rng& rng);

enum class PolicyKind { greedy, epsilon_greedy, falcon, exp, thompson, oracle };

PolicyKind policy_kind_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

struct PolicyConfig {
    PolicyKind kind = PolicyKind::greedy;
    double epsilon = 0.1;
    double falcon_c = 1.0;
    // Softmax inverse temperature on the raw reward scale; unrelated to the
    // boosting learning rate.
    double exp_temperature = 10.0;
    double ts_prior_alpha = 1.0;
    double ts_prior_beta = 1.0;
};

}  // namespace banditsim::policy
