#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "banditsim/policies.hpp"
#include "banditsim/rng.hpp"

using namespace banditsim;
using namespace banditsim::policy;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

Eigen::VectorXd random_estimates(Rng& rng, Eigen::Index k) {
    Eigen::VectorXd v(k);
    for (Eigen::Index i = 0; i < k; ++i) v[i] = rng.uniform();
    return v;
}

}  // namespace

TEST_CASE("greedy_distribution worked examples") {
    CHECK(greedy_distribution(vec({0.2, 0.9, 0.1})) == vec({0.0, 1.0, 0.0}));
    CHECK(greedy_distribution(vec({0.5, 0.5})) == vec({0.5, 0.5}));

    const Eigen::VectorXd estimates = vec({0.1, 0.7, 0.3});
    const Eigen::VectorXd shifted = estimates.array() + 3.25;
    CHECK(greedy_distribution(estimates) == greedy_distribution(shifted));

    Eigen::VectorXd empty(0);
    CHECK_THROWS(greedy_distribution(empty));
}

TEST_CASE("epsilon_greedy_distribution interpolates between greedy and uniform") {
    const Eigen::VectorXd estimates = vec({0.9, 0.1});
    CHECK(epsilon_greedy_distribution(estimates, 1.0) == vec({0.5, 0.5}));
    CHECK(epsilon_greedy_distribution(estimates, 0.0) == greedy_distribution(estimates));

    const Eigen::VectorXd mixed = epsilon_greedy_distribution(estimates, 0.2);
    CHECK(mixed[0] == doctest::Approx(0.9));
    CHECK(mixed[1] == doctest::Approx(0.1));

    // Pointwise linear in epsilon.
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd est = random_estimates(rng, 5);
        const double eps = rng.uniform();
        const Eigen::VectorXd left = epsilon_greedy_distribution(est, 0.0);
        const Eigen::VectorXd right = epsilon_greedy_distribution(est, 1.0);
        const Eigen::VectorXd mid = epsilon_greedy_distribution(est, eps);
        for (Eigen::Index i = 0; i < 5; ++i)
            CHECK(mid[i] == doctest::Approx((1.0 - eps) * left[i] + eps * right[i]));
    }

    CHECK_THROWS(epsilon_greedy_distribution(estimates, -0.1));
    CHECK_THROWS(epsilon_greedy_distribution(estimates, 1.1));
}

TEST_CASE("falcon_gamma worked examples") {
    CHECK(falcon_gamma(0, 4, 1.0) == doctest::Approx(0.0));
    CHECK(falcon_gamma(100, 4, 1.0) == doctest::Approx(20.0));
    CHECK(falcon_gamma(100, 4, 2.5) == doctest::Approx(2.5 * falcon_gamma(100, 4, 1.0)));
    CHECK_THROWS(falcon_gamma(-1, 4, 1.0));
    CHECK_THROWS(falcon_gamma(10, 4, 0.0));
}

TEST_CASE("falcon_distribution worked examples") {
    for (Eigen::Index k = 1; k <= 6; ++k) {
        Rng rng(40 + static_cast<std::uint64_t>(k));
        const Eigen::VectorXd probs = falcon_distribution(random_estimates(rng, k), 0.0);
        for (Eigen::Index i = 0; i < k; ++i)
            CHECK(probs[i] == doctest::Approx(1.0 / static_cast<double>(k)));
    }

    const Eigen::VectorXd probs = falcon_distribution(vec({1.0, 0.5, 0.5}), 4.0);
    CHECK(probs[0] == doctest::Approx(3.0 / 5.0));
    CHECK(probs[1] == doctest::Approx(1.0 / 5.0));
    CHECK(probs[2] == doctest::Approx(1.0 / 5.0));
}

TEST_CASE("falcon invariants: residual mass, gap monotonicity, gamma monotonicity") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd est = random_estimates(rng, 6);
        const double gamma_small = 10.0 * rng.uniform();
        const double gamma_large = gamma_small + 10.0 * rng.uniform();
        const Eigen::VectorXd small = falcon_distribution(est, gamma_small);
        const Eigen::VectorXd large = falcon_distribution(est, gamma_large);
        CHECK(is_valid_distribution(small));
        CHECK(small.sum() == doctest::Approx(1.0));  // exact residual construction
        CHECK(small.maxCoeff() >= 1.0 / 6.0 - 1e-12);

        const double best = est.maxCoeff();
        for (Eigen::Index i = 0; i < 6; ++i) {
            if (est[i] == best) continue;
            CHECK(large[i] <= small[i] + 1e-12);  // more exploitation with larger gamma
        }
        // Suboptimal probability non-increasing in the gap.
        for (Eigen::Index i = 0; i < 6; ++i) {
            for (Eigen::Index j = 0; j < 6; ++j) {
                if (est[i] == best || est[j] == best) continue;
                if (est[i] <= est[j]) CHECK(small[i] <= small[j] + 1e-12);
            }
        }
    }
}

TEST_CASE("exp_distribution worked examples") {
    const Eigen::VectorXd uniform = exp_distribution(vec({0.9, 0.2, 0.4}), 0.0);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(uniform[i] == doctest::Approx(1.0 / 3.0));

    const Eigen::VectorXd two_one = exp_distribution(vec({1.0, 0.0}), std::log(2.0));
    CHECK(two_one[0] == doctest::Approx(2.0 / 3.0));
    CHECK(two_one[1] == doctest::Approx(1.0 / 3.0));

    Rng rng(5);
    const Eigen::VectorXd est = random_estimates(rng, 4);
    const Eigen::VectorXd shifted = est.array() + 11.0;
    const Eigen::VectorXd a = exp_distribution(est, 2.0);
    const Eigen::VectorXd b = exp_distribution(shifted, 2.0);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]));

    Eigen::VectorXd bad = vec({0.1, 0.2});
    bad[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS(exp_distribution(bad, 1.0));
}

TEST_CASE("thompson_mab_distribution worked examples") {
    const Eigen::VectorXd sym = thompson_mab_distribution({3, 3, 3}, {4, 4, 4}, 1.0, 1.0, 30000, 7);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(sym[i] == doctest::Approx(1.0 / 3.0).epsilon(0.05));

    const Eigen::VectorXd known = thompson_mab_distribution({1, 0}, {0, 1}, 1.0, 1.0, 200000, 8);
    CHECK(known[0] == doctest::Approx(5.0 / 6.0).epsilon(0.01));

    const Eigen::VectorXd sure = thompson_mab_distribution({1000, 0}, {0, 1000}, 1.0, 1.0, 20000, 9);
    CHECK(sure[0] > 0.999);
}

TEST_CASE("all families produce valid distributions on random inputs") {
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const auto k = static_cast<Eigen::Index>(1 + rng.uniform_index(8));
        const Eigen::VectorXd est = random_estimates(rng, k);
        CHECK(is_valid_distribution(greedy_distribution(est)));
        CHECK(is_valid_distribution(epsilon_greedy_distribution(est, rng.uniform())));
        CHECK(is_valid_distribution(falcon_distribution(est, 50.0 * rng.uniform())));
        CHECK(is_valid_distribution(exp_distribution(est, 20.0 * rng.uniform())));
    }
}

TEST_CASE("sample_action: one-hot, frequencies, determinism") {
    Rng rng(10);
    CHECK(sample_action(vec({0.0, 1.0, 0.0}), rng) == 1);

    const Eigen::VectorXd quarter = vec({0.25, 0.25, 0.25, 0.25});
    std::vector<long> counts(4, 0);
    const long n = 100000;
    for (long i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_action(quarter, rng))];
    const double tol = 3.0 * std::sqrt(0.25 * 0.75 / static_cast<double>(n));
    for (long c : counts)
        CHECK(std::abs(static_cast<double>(c) / static_cast<double>(n) - 0.25) < tol);

    Rng a(123);
    Rng b(123);
    const Eigen::VectorXd dist = vec({0.3, 0.4, 0.3});
    for (int i = 0; i < 100; ++i) CHECK(sample_action(dist, a) == sample_action(dist, b));

    CHECK_THROWS(sample_action(vec({0.7, 0.7}), rng));
}

TEST_CASE("sample_thompson_action concentrates with strong evidence") {
    Rng rng(11);
    int hits = 0;
    for (int i = 0; i < 200; ++i)
        hits += sample_thompson_action({500, 0}, {0, 500}, 1.0, 1.0, rng) == 0 ? 1 : 0;
    CHECK(hits >= 198);
}
