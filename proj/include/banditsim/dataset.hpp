#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace banditsim::gbt {

// Rows are examples: `features` holds the concatenated context/action vector,
// `rewards` the observed outcome in [0, 1].
struct Dataset {
    Eigen::MatrixXd features;
    Eigen::VectorXd rewards;

    Eigen::Index size() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }
};

// Throws unless features/rewards agree in length and rewards lie in [0, 1].
void validate(const Dataset& data);

// Deterministic random partition of [0, n): round(fraction * n) indices go to
// the validation side, the rest to training. Both parts keep ascending order.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>
split_indices(Eigen::Index n, double fraction, std::uint64_t seed);

std::pair<Dataset, Dataset> split_train_val(const Dataset& history, double fraction,
                                            std::uint64_t seed);

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows);

}  // namespace banditsim::gbt
