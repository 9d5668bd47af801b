#include "banditsim/two_arm.hpp"

#include <cmath>
#include <stdexcept>

#include "banditsim/rng.hpp"
#include "banditsim/stats.hpp"

namespace banditsim::twoarm {

namespace {

constexpr double kClip = 1e-6;

double clip_unit(double p) { return std::min(1.0 - kClip, std::max(kClip, p)); }

int sign_of(long v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Allocation contribution of one split outcome: exploit the larger training
// mean on acceptance, split evenly on rejection or ties.
void accumulate_split(const TwoArmCounts& counts, const BalancedSplit& split, double eta,
                      double weight, double& arm1, double& arm2) {
    if (accept_tree1(split, counts, eta)) {
        const long lhs = split.train_successes_1 * counts.half_2();
        const long rhs = split.train_successes_2 * counts.half_1();
        if (lhs > rhs) {
            arm1 += weight;
        } else if (lhs < rhs) {
            arm2 += weight;
        } else {
            arm1 += 0.5 * weight;
            arm2 += 0.5 * weight;
        }
    } else {
        arm1 += 0.5 * weight;
        arm2 += 0.5 * weight;
    }
}

}  // namespace

void validate(const TwoArmCounts& counts) {
    if (counts.total_1 <= 0 || counts.total_2 <= 0)
        throw std::invalid_argument("TwoArmCounts: totals must be positive");
    if (counts.total_1 % 2 != 0 || counts.total_2 % 2 != 0)
        throw std::invalid_argument("TwoArmCounts: totals must be even for a balanced split");
    if (counts.successes_1 < 0 || counts.successes_1 > counts.total_1 ||
        counts.successes_2 < 0 || counts.successes_2 > counts.total_2)
        throw std::invalid_argument("TwoArmCounts: successes out of range");
}

long split_min_train_successes(long successes, long total) {
    return std::max(0L, successes - total / 2);
}

long split_max_train_successes(long successes, long total) {
    return std::min(successes, total / 2);
}

void validate(const BalancedSplit& split, const TwoArmCounts& counts) {
    validate(counts);
    if (split.train_successes_1 < split_min_train_successes(counts.successes_1, counts.total_1) ||
        split.train_successes_1 > split_max_train_successes(counts.successes_1, counts.total_1) ||
        split.train_successes_2 < split_min_train_successes(counts.successes_2, counts.total_2) ||
        split.train_successes_2 > split_max_train_successes(counts.successes_2, counts.total_2))
        throw std::invalid_argument("BalancedSplit: train successes outside the feasible range");
}

SplitStats split_stats(const TwoArmCounts& counts, const BalancedSplit& split) {
    validate(split, counts);
    const double n1 = static_cast<double>(counts.half_1());
    const double n2 = static_cast<double>(counts.half_2());
    SplitStats s;
    s.rbar_tr_1 = static_cast<double>(split.train_successes_1) / n1;
    s.rbar_tr_2 = static_cast<double>(split.train_successes_2) / n2;
    s.rbar_val_1 = static_cast<double>(counts.successes_1 - split.train_successes_1) / n1;
    s.rbar_val_2 = static_cast<double>(counts.successes_2 - split.train_successes_2) / n2;
    s.rbar_tr = static_cast<double>(split.train_successes_1 + split.train_successes_2) / (n1 + n2);
    s.delta = static_cast<double>(counts.successes_1) / static_cast<double>(counts.total_1) -
              static_cast<double>(counts.successes_2) / static_cast<double>(counts.total_2);
    s.delta_tr = s.rbar_tr_1 - s.rbar_tr_2;
    s.delta_val = s.rbar_val_1 - s.rbar_val_2;
    return s;
}

TwoStepModel build_two_step(const BalancedSplit& split, const TwoArmCounts& counts, double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("build_two_step: eta must lie in (0, 1]");
    const SplitStats s = split_stats(counts, split);
    TwoStepModel model;
    model.tree0_prediction = s.rbar_tr;
    model.p_1 = s.rbar_tr + eta * (s.rbar_tr_1 - s.rbar_tr);
    model.p_2 = s.rbar_tr + eta * (s.rbar_tr_2 - s.rbar_tr);
    model.learning_rate = eta;
    return model;
}

double two_arm_log_loss(double p_1, double p_2, long val_successes_1, long val_successes_2,
                        long n_1, long n_2) {
    if (!(p_1 > 0.0 && p_1 < 1.0 && p_2 > 0.0 && p_2 < 1.0))
        throw std::invalid_argument("two_arm_log_loss: predictions must lie strictly in (0, 1)");
    if (n_1 <= 0 || n_2 <= 0 || val_successes_1 < 0 || val_successes_1 > n_1 ||
        val_successes_2 < 0 || val_successes_2 > n_2)
        throw std::invalid_argument("two_arm_log_loss: invalid validation counts");
    const double s1 = static_cast<double>(val_successes_1);
    const double s2 = static_cast<double>(val_successes_2);
    const double total = static_cast<double>(n_1 + n_2);
    const double sum = s1 * std::log(p_1) + (static_cast<double>(n_1) - s1) * std::log(1.0 - p_1) +
                       s2 * std::log(p_2) + (static_cast<double>(n_2) - s2) * std::log(1.0 - p_2);
    return -sum / total;
}

bool accept_tree1(const BalancedSplit& split, const TwoArmCounts& counts, double eta) {
    const TwoStepModel model = build_two_step(split, counts, eta);
    const long val_s1 = counts.successes_1 - split.train_successes_1;
    const long val_s2 = counts.successes_2 - split.train_successes_2;
    const double p0 = clip_unit(model.tree0_prediction);
    const double loss0 = two_arm_log_loss(p0, p0, val_s1, val_s2, counts.half_1(), counts.half_2());
    const double loss1 = two_arm_log_loss(clip_unit(model.p_1), clip_unit(model.p_2), val_s1,
                                          val_s2, counts.half_1(), counts.half_2());
    return loss1 < loss0;
}

Prop1Indicators check_prop1(const BalancedSplit& split, const TwoArmCounts& counts, double eta) {
    validate(split, counts);
    const long n1 = counts.half_1();
    const long n2 = counts.half_2();
    const long k1 = split.train_successes_1;
    const long k2 = split.train_successes_2;
    const long v1 = counts.successes_1 - k1;
    const long v2 = counts.successes_2 - k2;

    // All three quantities share the positive scale n1*n2, so only the
    // integer cross products matter for signs. With N_i = 2*n_i the interval
    // endpoint 2*delta scales to s1*n2 - s2*n1.
    const long tr = k1 * n2 - k2 * n1;
    const long val = v1 * n2 - v2 * n1;
    const long full2 = counts.successes_1 * n2 - counts.successes_2 * n1;

    Prop1Indicators out;
    out.accepted = accept_tree1(split, counts, eta);
    out.signs_agree = sign_of(tr) != 0 && sign_of(tr) == sign_of(val);
    if (full2 > 0) {
        out.in_interval = tr > 0 && tr < full2;
    } else if (full2 < 0) {
        out.in_interval = tr < 0 && tr > full2;
    } else {
        out.in_interval = false;
    }
    return out;
}

double loss_derivative_at_zero(const SplitStats& stats, long n_1, long n_2) {
    if (n_1 <= 0 || n_2 <= 0)
        throw std::invalid_argument("loss_derivative_at_zero: sizes must be positive");
    if (!(stats.rbar_tr > 0.0 && stats.rbar_tr < 1.0))
        throw std::invalid_argument("loss_derivative_at_zero: degenerate pooled training mean");
    const double n1 = static_cast<double>(n_1);
    const double n2 = static_cast<double>(n_2);
    return n1 / ((n1 + n2) * stats.rbar_tr * (1.0 - stats.rbar_tr)) *
           (stats.rbar_val_2 - stats.rbar_val_1);
}

ArmAllocation allocation_prob_exhaustive(const TwoArmCounts& counts, double eta) {
    validate(counts);
    double arm1 = 0.0;
    double arm2 = 0.0;
    const long lo1 = split_min_train_successes(counts.successes_1, counts.total_1);
    const long hi1 = split_max_train_successes(counts.successes_1, counts.total_1);
    const long lo2 = split_min_train_successes(counts.successes_2, counts.total_2);
    const long hi2 = split_max_train_successes(counts.successes_2, counts.total_2);
    for (long k1 = lo1; k1 <= hi1; ++k1) {
        const double w1 = hypergeometric_pmf(k1, counts.total_1, counts.successes_1, counts.half_1());
        for (long k2 = lo2; k2 <= hi2; ++k2) {
            const double w2 =
                hypergeometric_pmf(k2, counts.total_2, counts.successes_2, counts.half_2());
            accumulate_split(counts, BalancedSplit{k1, k2}, eta, w1 * w2, arm1, arm2);
        }
    }
    return ArmAllocation{arm1, arm2};
}

ArmAllocation allocation_prob_montecarlo(const TwoArmCounts& counts, double eta, long n_sims,
                                         std::uint64_t seed) {
    validate(counts);
    if (n_sims < 1) throw std::invalid_argument("allocation_prob_montecarlo: n_sims must be >= 1");
    Rng rng(seed);
    double arm1 = 0.0;
    double arm2 = 0.0;
    const double w = 1.0 / static_cast<double>(n_sims);
    for (long i = 0; i < n_sims; ++i) {
        BalancedSplit split;
        split.train_successes_1 =
            rng.hypergeometric(counts.total_1, counts.successes_1, counts.half_1());
        split.train_successes_2 =
            rng.hypergeometric(counts.total_2, counts.successes_2, counts.half_2());
        accumulate_split(counts, split, eta, w, arm1, arm2);
    }
    return ArmAllocation{arm1, arm2};
}

ArmAllocation ts_allocation_prob(const TwoArmCounts& counts, double prior_alpha, double prior_beta,
                                 long n_sims, std::uint64_t seed) {
    // Posterior sampling has no balanced-split step, so odd totals are fine.
    if (counts.total_1 < 0 || counts.total_2 < 0 || counts.successes_1 < 0 ||
        counts.successes_1 > counts.total_1 || counts.successes_2 < 0 ||
        counts.successes_2 > counts.total_2)
        throw std::invalid_argument("ts_allocation_prob: successes out of range");
    if (!(prior_alpha > 0.0 && prior_beta > 0.0))
        throw std::invalid_argument("ts_allocation_prob: prior parameters must be positive");
    if (n_sims < 1) throw std::invalid_argument("ts_allocation_prob: n_sims must be >= 1");
    Rng rng(seed);
    const double a1 = prior_alpha + static_cast<double>(counts.successes_1);
    const double b1 = prior_beta + static_cast<double>(counts.total_1 - counts.successes_1);
    const double a2 = prior_alpha + static_cast<double>(counts.successes_2);
    const double b2 = prior_beta + static_cast<double>(counts.total_2 - counts.successes_2);
    double arm1 = 0.0;
    double arm2 = 0.0;
    const double w = 1.0 / static_cast<double>(n_sims);
    for (long i = 0; i < n_sims; ++i) {
        const double t1 = rng.beta(a1, b1);
        const double t2 = rng.beta(a2, b2);
        if (t1 > t2) {
            arm1 += w;
        } else if (t2 > t1) {
            arm2 += w;
        } else {
            arm1 += 0.5 * w;
            arm2 += 0.5 * w;
        }
    }
    return ArmAllocation{arm1, arm2};
}

double sigma_delta(double mu_1, double mu_2, long n_total_1, long n_total_2) {
    if (n_total_1 <= 0 || n_total_2 <= 0)
        throw std::invalid_argument("sigma_delta: totals must be positive");
    if (!(mu_1 >= 0.0 && mu_1 <= 1.0 && mu_2 >= 0.0 && mu_2 <= 1.0))
        throw std::invalid_argument("sigma_delta: means must lie in [0, 1]");
    return std::sqrt(mu_1 * (1.0 - mu_1) / static_cast<double>(n_total_1) +
                     mu_2 * (1.0 - mu_2) / static_cast<double>(n_total_2));
}

std::vector<double> sample_standardized_delta_tr(const HypothesisParams& params, long n_sims,
                                                 std::uint64_t seed) {
    if (params.n_total_1 <= 0 || params.n_total_2 <= 0 || params.n_total_1 % 2 != 0 ||
        params.n_total_2 % 2 != 0)
        throw std::invalid_argument("sample_standardized_delta_tr: totals must be positive and even");
    if (n_sims < 1)
        throw std::invalid_argument("sample_standardized_delta_tr: n_sims must be >= 1");
    const double sigma = sigma_delta(params.mu_1, params.mu_2, params.n_total_1, params.n_total_2);
    if (!(sigma > 0.0))
        throw std::invalid_argument("sample_standardized_delta_tr: zero-variance arms");

    Rng rng(seed);
    const long half1 = params.n_total_1 / 2;
    const long half2 = params.n_total_2 / 2;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_sims));
    for (long i = 0; i < n_sims; ++i) {
        long s1 = 0;
        for (long j = 0; j < params.n_total_1; ++j) s1 += rng.bernoulli(params.mu_1) ? 1 : 0;
        long s2 = 0;
        for (long j = 0; j < params.n_total_2; ++j) s2 += rng.bernoulli(params.mu_2) ? 1 : 0;
        const long k1 = rng.hypergeometric(params.n_total_1, s1, half1);
        const long k2 = rng.hypergeometric(params.n_total_2, s2, half2);
        const double delta_tr = static_cast<double>(k1) / static_cast<double>(half1) -
                                static_cast<double>(k2) / static_cast<double>(half2);
        const double delta = static_cast<double>(s1) / static_cast<double>(params.n_total_1) -
                             static_cast<double>(s2) / static_cast<double>(params.n_total_2);
        out.push_back((delta_tr - delta) / sigma);
    }
    return out;
}

double two_sided_pvalue(double delta, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("two_sided_pvalue: sigma must be positive");
    return 2.0 * normal_cdf(-std::abs(delta) / sigma);
}

namespace {

// One round of the retrain-and-select step for the early-stopping player.
// Returns the arm to play given per-arm (successes, totals) so far.
int earlystop_play(const long s[2], const long n[2], double eta, Rng& rng) {
    if (n[0] < 2 || n[1] < 2) {
        // Nothing to validate against yet; feed the less-sampled arm.
        if (n[0] == n[1]) return static_cast<int>(rng.uniform_index(2));
        return n[0] < n[1] ? 0 : 1;
    }
    long train_total[2];
    long train_success[2];
    long val_total[2];
    long val_success[2];
    for (int i = 0; i < 2; ++i) {
        val_total[i] = n[i] / 2;  // extra sample of an odd history trains
        train_total[i] = n[i] - val_total[i];
        train_success[i] = rng.hypergeometric(n[i], s[i], train_total[i]);
        val_success[i] = s[i] - train_success[i];
    }
    const double tr1 = static_cast<double>(train_success[0]) / static_cast<double>(train_total[0]);
    const double tr2 = static_cast<double>(train_success[1]) / static_cast<double>(train_total[1]);
    const double pooled = static_cast<double>(train_success[0] + train_success[1]) /
                          static_cast<double>(train_total[0] + train_total[1]);
    const double p0 = clip_unit(pooled);
    const double p1 = clip_unit(pooled + eta * (tr1 - pooled));
    const double p2 = clip_unit(pooled + eta * (tr2 - pooled));
    const double loss0 =
        two_arm_log_loss(p0, p0, val_success[0], val_success[1], val_total[0], val_total[1]);
    const double loss1 =
        two_arm_log_loss(p1, p2, val_success[0], val_success[1], val_total[0], val_total[1]);
    if (loss1 < loss0) {
        if (tr1 > tr2) return 0;
        if (tr2 > tr1) return 1;
    }
    return static_cast<int>(rng.uniform_index(2));
}

}  // namespace

RewardCurves reward_comparison(double mu_1, double mu_2, long horizon, long replications,
                               double eta, double prior_alpha, double prior_beta,
                               std::uint64_t seed) {
    if (horizon < 1 || replications < 1)
        throw std::invalid_argument("reward_comparison: horizon and replications must be >= 1");
    if (!(mu_1 >= 0.0 && mu_1 <= 1.0 && mu_2 >= 0.0 && mu_2 <= 1.0))
        throw std::invalid_argument("reward_comparison: means must lie in [0, 1]");
    const double mu[2] = {mu_1, mu_2};

    RewardCurves curves;
    curves.earlystop.assign(static_cast<std::size_t>(horizon), 0.0);
    curves.thompson.assign(static_cast<std::size_t>(horizon), 0.0);
    const double w = 1.0 / static_cast<double>(replications);

    for (long rep = 0; rep < replications; ++rep) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));

        long es_s[2] = {0, 0};
        long es_n[2] = {0, 0};
        double es_total = 0.0;
        long ts_s[2] = {0, 0};
        long ts_n[2] = {0, 0};
        double ts_total = 0.0;
        for (long t = 0; t < horizon; ++t) {
            const int es_arm = earlystop_play(es_s, es_n, eta, rng);
            const int es_reward = rng.bernoulli(mu[es_arm]) ? 1 : 0;
            es_s[es_arm] += es_reward;
            es_n[es_arm] += 1;
            es_total += es_reward;
            curves.earlystop[static_cast<std::size_t>(t)] +=
                w * es_total / static_cast<double>(t + 1);

            const double theta1 = rng.beta(prior_alpha + static_cast<double>(ts_s[0]),
                                           prior_beta + static_cast<double>(ts_n[0] - ts_s[0]));
            const double theta2 = rng.beta(prior_alpha + static_cast<double>(ts_s[1]),
                                           prior_beta + static_cast<double>(ts_n[1] - ts_s[1]));
            const int ts_arm = theta1 >= theta2 ? 0 : 1;
            const int ts_reward = rng.bernoulli(mu[ts_arm]) ? 1 : 0;
            ts_s[ts_arm] += ts_reward;
            ts_n[ts_arm] += 1;
            ts_total += ts_reward;
            curves.thompson[static_cast<std::size_t>(t)] +=
                w * ts_total / static_cast<double>(t + 1);
        }
    }
    return curves;
}

}  // namespace banditsim::twoarm
