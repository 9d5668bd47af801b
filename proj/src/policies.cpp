#include "banditsim/policies.hpp"

#include <cmath>
#include <stdexcept>

namespace banditsim::policy {

namespace {

void require_nonempty(const Eigen::Ref<const Eigen::VectorXd>& estimates) {
    if (estimates.size() == 0) throw std::invalid_argument("policy: empty estimates");
    for (Eigen::Index i = 0; i < estimates.size(); ++i) {
        if (!std::isfinite(estimates[i]))
            throw std::invalid_argument("policy: non-finite estimate");
    }
}

}  // namespace

bool is_valid_distribution(const Eigen::Ref<const Eigen::VectorXd>& probs, double tol) {
    if (probs.size() == 0) return false;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) return false;
        sum += probs[i];
    }
    return std::abs(sum - 1.0) <= tol;
}

Eigen::VectorXd greedy_distribution(const Eigen::Ref<const Eigen::VectorXd>& estimates) {
    require_nonempty(estimates);
    const double best = estimates.maxCoeff();
    Eigen::VectorXd probs = Eigen::VectorXd::Zero(estimates.size());
    long ties = 0;
    for (Eigen::Index i = 0; i < estimates.size(); ++i)
        if (estimates[i] == best) ++ties;
    const double share = 1.0 / static_cast<double>(ties);
    for (Eigen::Index i = 0; i < estimates.size(); ++i)
        if (estimates[i] == best) probs[i] = share;
    return probs;
}

Eigen::VectorXd epsilon_greedy_distribution(const Eigen::Ref<const Eigen::VectorXd>& estimates,
                                            double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("epsilon_greedy_distribution: epsilon must lie in [0, 1]");
    const double k = static_cast<double>(estimates.size() == 0 ? 1 : estimates.size());
    return epsilon / k + (1.0 - epsilon) * greedy_distribution(estimates).array();
}

double falcon_gamma(long n, int n_actions, double c) {
    if (n < 0 || n_actions < 1 || !(c > 0.0))
        throw std::invalid_argument("falcon_gamma: invalid parameters");
    return c * std::sqrt(static_cast<double>(n_actions) * static_cast<double>(n));
}

Eigen::VectorXd falcon_distribution(const Eigen::Ref<const Eigen::VectorXd>& estimates,
                                    double gamma) {
    require_nonempty(estimates);
    if (!(gamma >= 0.0)) throw std::invalid_argument("falcon_distribution: gamma must be >= 0");
    const auto k = estimates.size();
    const double best = estimates.maxCoeff();
    Eigen::Index best_index = 0;
    while (estimates[best_index] != best) ++best_index;

    Eigen::VectorXd probs(k);
    double others = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (i == best_index) continue;
        probs[i] = 1.0 / (static_cast<double>(k) + gamma * (best - estimates[i]));
        others += probs[i];
    }
    // Each other-action term is at most 1/K, so the residual cannot go
    // negative for gamma >= 0.
    probs[best_index] = 1.0 - others;
    return probs;
}

Eigen::VectorXd exp_distribution(const Eigen::Ref<const Eigen::VectorXd>& estimates,
                                 double temperature) {
    require_nonempty(estimates);
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw std::invalid_argument("exp_distribution: temperature must be finite and >= 0");
    const double best = estimates.maxCoeff();
    Eigen::VectorXd weights = (temperature * (estimates.array() - best)).exp();
    return weights / weights.sum();
}

Eigen::VectorXd thompson_mab_distribution(const std::vector<long>& successes,
                                          const std::vector<long>& failures, double prior_alpha,
                                          double prior_beta, long n_draws, std::uint64_t seed) {
    if (successes.empty() || successes.size() != failures.size())
        throw std::invalid_argument("thompson_mab_distribution: count vectors must match");
    if (!(prior_alpha > 0.0 && prior_beta > 0.0))
        throw std::invalid_argument("thompson_mab_distribution: priors must be positive");
    if (n_draws < 1) throw std::invalid_argument("thompson_mab_distribution: n_draws must be >= 1");

    Rng rng(seed);
    const auto k = static_cast<Eigen::Index>(successes.size());
    Eigen::VectorXd probs = Eigen::VectorXd::Zero(k);
    const double w = 1.0 / static_cast<double>(n_draws);
    std::vector<double> theta(successes.size());
    for (long d = 0; d < n_draws; ++d) {
        int best = 0;
        for (std::size_t i = 0; i < successes.size(); ++i) {
            theta[i] = rng.beta(prior_alpha + static_cast<double>(successes[i]),
                                prior_beta + static_cast<double>(failures[i]));
            if (theta[i] > theta[best]) best = static_cast<int>(i);
        }
        probs[best] += w;
    }
    return probs;
}

int sample_thompson_action(const std::vector<long>& successes, const std::vector<long>& failures,
                           double prior_alpha, double prior_beta, Rng& rng) {
    if (successes.empty() || successes.size() != failures.size())
        throw std::invalid_argument("sample_thompson_action: count vectors must match");
    int best = 0;
    double best_theta = -1.0;
    for (std::size_t i = 0; i < successes.size(); ++i) {
        const double theta = rng.beta(prior_alpha + static_cast<double>(successes[i]),
                                      prior_beta + static_cast<double>(failures[i]));
        if (theta > best_theta) {
            best_theta = theta;
            best = static_cast<int>(i);
        }
    }
    return best;
}

int sample_action(const Eigen::Ref<const Eigen::VectorXd>& distribution, Rng& rng) {
    if (!is_valid_distribution(distribution))
        throw std::invalid_argument("sample_action: invalid distribution");
    const double u = rng.uniform();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < distribution.size(); ++i) {
        acc += distribution[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(distribution.size() - 1);
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "greedy") return PolicyKind::greedy;
    if (name == "epsilon_greedy") return PolicyKind::epsilon_greedy;
    if (name == "falcon") return PolicyKind::falcon;
    if (name == "exp") return PolicyKind::exp;
    if (name == "thompson") return PolicyKind::thompson;
    if (name == "oracle") return PolicyKind::oracle;
    throw std::invalid_argument("unknown policy kind: " + name);
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::greedy: return "greedy";
        case PolicyKind::epsilon_greedy: return "epsilon_greedy";
        case PolicyKind::falcon: return "falcon";
        case PolicyKind::exp: return "exp";
        case PolicyKind::thompson: return "thompson";
        case PolicyKind::oracle: return "oracle";
    }
    return "unknown";
}

}  // namespace banditsim::policy
