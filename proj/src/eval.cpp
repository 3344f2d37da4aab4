#include "ogfs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "ogfs/error.hpp"
#include "ogfs/random.hpp"

namespace ogfs {

namespace {

// For each query row, indices of the `kmax` nearest training rows ordered by
// (squared distance, index).
std::vector<std::vector<std::size_t>> nearest(const Eigen::MatrixXd& train_x,
                                              const Eigen::MatrixXd& query_x, std::size_t kmax) {
    const auto n_train = static_cast<std::size_t>(train_x.rows());
    kmax = std::min(kmax, n_train);
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(query_x.rows()));
    std::vector<std::pair<double, std::size_t>> dist(n_train);
    for (Eigen::Index q = 0; q < query_x.rows(); ++q) {
        for (std::size_t t = 0; t < n_train; ++t) {
            dist[t] = {(train_x.row(static_cast<Eigen::Index>(t)) - query_x.row(q)).squaredNorm(), t};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kmax), dist.end());
        auto& row = out[static_cast<std::size_t>(q)];
        row.reserve(kmax);
        for (std::size_t r = 0; r < kmax; ++r) {
            row.push_back(dist[r].second);
        }
    }
    return out;
}

int vote(std::span<const std::size_t> neighbors, std::span<const int> train_y, std::size_t k) {
    std::map<int, std::size_t> tally;
    const std::size_t used = std::min(k, neighbors.size());
    for (std::size_t r = 0; r < used; ++r) {
        ++tally[train_y[neighbors[r]]];
    }
    int best = 0;
    std::size_t best_count = 0;
    for (const auto& [label, count] : tally) {  // ascending label, so ties keep the smaller
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

int majority_label(std::span<const int> labels) {
    std::map<int, std::size_t> tally;
    for (int y : labels) {
        ++tally[y];
    }
    int best = 0;
    std::size_t best_count = 0;
    for (const auto& [label, count] : tally) {
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

void check_selection(const LabeledDataset& data, std::span<const std::size_t> selected) {
    for (std::size_t j : selected) {
        if (j >= data.cols()) {
            throw InvalidInput("selected feature " + std::to_string(j) + " out of range");
        }
    }
}

Eigen::MatrixXd gather(const LabeledDataset& data, std::span<const std::size_t> rows,
                       std::span<const std::size_t> cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto src = data.column(cols[c]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = src[rows[r]];
        }
    }
    return out;
}

// Accuracy per fold for every k in the grid; [k][fold].
std::vector<std::vector<double>> fold_accuracies(const LabeledDataset& data,
                                                 std::span<const std::size_t> selected,
                                                 std::span<const std::size_t> fold_of,
                                                 std::size_t folds,
                                                 std::span<const std::size_t> k_grid,
                                                 const FoldObserver& observer) {
    if (fold_of.size() != data.rows()) {
        throw InvalidInput("fold assignment length does not match sample count");
    }
    const std::size_t kmax = *std::max_element(k_grid.begin(), k_grid.end());
    std::vector<std::vector<double>> acc(k_grid.size(), std::vector<double>(folds, 0.0));
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < fold_of.size(); ++i) {
            if (fold_of[i] >= folds) {
                throw InvalidInput("fold id out of range");
            }
            (fold_of[i] == f ? test_rows : train_rows).push_back(i);
        }
        if (test_rows.empty() || train_rows.empty()) {
            throw InvalidInput("fold " + std::to_string(f) + " has no test or no training rows");
        }
        std::vector<int> train_y;
        train_y.reserve(train_rows.size());
        for (std::size_t i : train_rows) {
            train_y.push_back(data.labels[i]);
        }

        std::vector<int> predicted_single;
        std::vector<std::vector<std::size_t>> neigh;
        if (selected.empty()) {
            predicted_single.assign(test_rows.size(), majority_label(train_y));
        } else {
            const Eigen::MatrixXd train_raw = gather(data, train_rows, selected);
            const Standardizer scaler = Standardizer::fit(train_raw);
            if (observer) {
                observer(f, scaler);
            }
            const Eigen::MatrixXd train_x = scaler.apply(train_raw);
            const Eigen::MatrixXd test_x = scaler.apply(gather(data, test_rows, selected));
            neigh = nearest(train_x, test_x, kmax);
        }
        for (std::size_t g = 0; g < k_grid.size(); ++g) {
            std::size_t correct = 0;
            for (std::size_t r = 0; r < test_rows.size(); ++r) {
                const int pred = selected.empty() ? predicted_single[r] : vote(neigh[r], train_y, k_grid[g]);
                correct += pred == data.labels[test_rows[r]] ? 1 : 0;
            }
            acc[g][f] = static_cast<double>(correct) / static_cast<double>(test_rows.size());
        }
    }
    return acc;
}

EvalReport make_report(std::vector<double> fold_acc, std::size_t n_selected, std::size_t folds,
                       std::uint64_t seed, std::size_t k) {
    EvalReport r;
    r.accuracy = std::accumulate(fold_acc.begin(), fold_acc.end(), 0.0) /
                 static_cast<double>(fold_acc.size());
    r.fold_accuracies = std::move(fold_acc);
    r.n_selected = n_selected;
    r.folds = folds;
    r.seed = seed;
    r.k_nn = k;
    r.majority_fallback = n_selected == 0;
    return r;
}

}  // namespace

std::vector<int> knn_predict(const Eigen::MatrixXd& train_x, std::span<const int> train_y,
                             const Eigen::MatrixXd& query_x, std::size_t k) {
    if (train_x.rows() == 0) {
        throw InvalidInput("knn training set is empty");
    }
    if (static_cast<std::size_t>(train_x.rows()) != train_y.size()) {
        throw InvalidInput("knn training rows and labels differ in length");
    }
    if (train_x.cols() != query_x.cols()) {
        throw InvalidInput("knn query has " + std::to_string(query_x.cols()) +
                           " columns, training set has " + std::to_string(train_x.cols()));
    }
    if (k < 1) {
        throw InvalidInput("k must be at least 1");
    }
    const auto neigh = nearest(train_x, query_x, k);
    std::vector<int> out;
    out.reserve(neigh.size());
    for (const auto& row : neigh) {
        out.push_back(vote(row, train_y, k));
    }
    return out;
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds,
                                          std::uint64_t seed) {
    if (folds < 2) {
        throw InvalidInput("need at least 2 folds");
    }
    if (folds > labels.size()) {
        throw InvalidInput("cannot make " + std::to_string(folds) + " folds from " +
                           std::to_string(labels.size()) + " samples");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i]].push_back(i);
    }
    Rng rng(seed);
    std::vector<std::size_t> fold_of(labels.size(), 0);
    std::size_t next = 0;
    for (auto& [label, members] : by_class) {
        shuffle_in_place(std::span<std::size_t>(members), rng);
        for (std::size_t i : members) {
            fold_of[i] = next;
            next = (next + 1) % folds;
        }
    }
    return fold_of;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
    Standardizer s;
    const double n = static_cast<double>(rows.rows());
    s.mean = rows.colwise().mean();
    s.scale = ((rows.rowwise() - s.mean).array().square().colwise().sum() / n).sqrt().matrix();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
        if (!(s.scale(j) > 0.0)) {
            s.scale(j) = 1.0;
        }
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& rows) const {
    return (rows.rowwise() - mean).array().rowwise() / scale.array();
}

EvalReport cross_validate_assigned(const LabeledDataset& data,
                                   std::span<const std::size_t> selected,
                                   std::span<const std::size_t> fold_of, std::size_t folds,
                                   std::size_t k_nn, const FoldObserver& observer) {
    check_selection(data, selected);
    if (k_nn < 1) {
        throw InvalidInput("k must be at least 1");
    }
    const std::size_t grid[] = {k_nn};
    auto acc = fold_accuracies(data, selected, fold_of, folds, grid, observer);
    return make_report(std::move(acc[0]), selected.size(), folds, 0, k_nn);
}

EvalReport cross_validate(const LabeledDataset& data, std::span<const std::size_t> selected,
                          const CvOptions& options) {
    const auto fold_of = stratified_folds(data.labels, options.folds, options.seed);
    auto r = cross_validate_assigned(data, selected, fold_of, options.folds, options.k_nn,
                                     options.observer);
    r.seed = options.seed;
    return r;
}

BestOfReport cross_validate_best(const LabeledDataset& data, std::span<const std::size_t> selected,
                                 std::size_t folds, std::span<const std::size_t> k_grid,
                                 std::uint64_t seed) {
    check_selection(data, selected);
    if (k_grid.empty()) {
        throw InvalidInput("k grid is empty");
    }
    for (std::size_t k : k_grid) {
        if (k < 1) {
            throw InvalidInput("k must be at least 1");
        }
    }
    const auto fold_of = stratified_folds(data.labels, folds, seed);
    auto acc = fold_accuracies(data, selected, fold_of, folds, k_grid, {});
    BestOfReport out;
    for (std::size_t g = 0; g < k_grid.size(); ++g) {
        out.per_k.push_back(make_report(std::move(acc[g]), selected.size(), folds, seed, k_grid[g]));
    }
    out.best = out.per_k.front();
    for (const auto& r : out.per_k) {
        if (r.accuracy > out.best.accuracy) {
            out.best = r;
        }
    }
    return out;
}

}  // namespace ogfs
