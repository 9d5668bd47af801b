#include "banditsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "banditsim/rng.hpp"

namespace banditsim::gbt {

void validate(const Dataset& data) {
    if (data.size() == 0) throw std::invalid_argument("dataset: empty");
    if (data.rewards.size() != data.size())
        throw std::invalid_argument("dataset: features/rewards length mismatch");
    for (Eigen::Index i = 0; i < data.rewards.size(); ++i) {
        const double r = data.rewards[i];
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("dataset: reward outside [0, 1]");
    }
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>
split_indices(Eigen::Index n, double fraction, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("split_indices: empty dataset");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split_indices: fraction must lie in (0, 1)");
    const auto n_val = static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(n)));
    if (n_val <= 0 || n_val >= n)
        throw std::invalid_argument("split_indices: degenerate partition (one side empty)");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<Eigen::Index> val(order.begin(), order.begin() + n_val);
    std::vector<Eigen::Index> train(order.begin() + n_val, order.end());
    std::sort(val.begin(), val.end());
    std::sort(train.begin(), train.end());
    return {std::move(train), std::move(val)};
}

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
    out.rewards.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(rows[i]);
        out.rewards[static_cast<Eigen::Index>(i)] = data.rewards[rows[i]];
    }
    return out;
}

std::pair<Dataset, Dataset> split_train_val(const Dataset& history, double fraction,
                                            std::uint64_t seed) {
    validate(history);
    const auto [train_idx, val_idx] = split_indices(history.size(), fraction, seed);
    return {take_rows(history, train_idx), take_rows(history, val_idx)};
}

}  // namespace banditsim::gbt
