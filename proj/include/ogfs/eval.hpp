#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ogfs/dataset.hpp"

namespace ogfs {

struct EvalReport {
    double accuracy = 0.0;
    std::size_t n_selected = 0;
    std::vector<double> fold_accuracies;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::size_t k_nn = 1;
    /// True when nothing was selected and every fold predicted its training
    /// majority class.
    bool majority_fallback = false;
};

/// k-nearest-neighbour labels under Euclidean distance. Rows are samples.
/// Distance ties go to the lower training index; vote ties to the smaller
/// label. k is clamped to the training size.
std::vector<int> knn_predict(const Eigen::MatrixXd& train_x, std::span<const int> train_y,
                             const Eigen::MatrixXd& query_x, std::size_t k = 1);

/// Fold id per sample. Each class is shuffled with the seed and dealt
/// round-robin; the dealing position carries over between classes so total
/// fold sizes stay balanced too.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds,
                                          std::uint64_t seed);

/// Per-column z-score fitted on training rows. Zero-spread columns get scale 1.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& rows);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
};

/// Test-only hook: sees the scaler fitted for each fold.
using FoldObserver = std::function<void(std::size_t fold, const Standardizer&)>;

struct CvOptions {
    std::size_t folds = 10;
    std::size_t k_nn = 1;
    std::uint64_t seed = 0;
    FoldObserver observer;
};

/// Stratified k-fold CV of a k-NN classifier restricted to `selected`
/// columns. Accuracy is the mean of the fold accuracies.
EvalReport cross_validate(const LabeledDataset& data, std::span<const std::size_t> selected,
                          const CvOptions& options);

/// Same with an explicit fold assignment (values in [0, folds)).
EvalReport cross_validate_assigned(const LabeledDataset& data,
                                   std::span<const std::size_t> selected,
                                   std::span<const std::size_t> fold_of, std::size_t folds,
                                   std::size_t k_nn, const FoldObserver& observer = {});

struct BestOfReport {
    EvalReport best;
    std::vector<EvalReport> per_k;  // in k_grid order
};

/// Runs CV once per k in the grid on shared folds; best is the highest
/// accuracy (first k wins ties).
BestOfReport cross_validate_best(const LabeledDataset& data, std::span<const std::size_t> selected,
                                 std::size_t folds, std::span<const std::size_t> k_grid,
                                 std::uint64_t seed);

}  // namespace ogfs
