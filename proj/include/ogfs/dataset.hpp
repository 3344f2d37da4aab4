#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ogfs {

/// Label tokens remapped onto the dense range 1..c.
struct DenseLabels {
    std::vector<int> labels;               // one entry per sample, values in 1..c
    std::vector<std::string> class_names;  // class_names[k] is the token mapped to k+1
    int class_count = 0;
};

/// Remaps arbitrary label tokens to 1..c. Tokens sort numerically when every
/// token parses as a number, lexicographically otherwise.
DenseLabels densify_labels(std::span<const std::string> tokens);

/// n samples x d features with dense class labels. Features are stored
/// column-major so a feature column is contiguous.
struct LabeledDataset {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    int class_count = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }

    std::span<const double> column(std::size_t j) const {
        return {features.col(static_cast<Eigen::Index>(j)).data(), rows()};
    }

    /// Throws InvalidInput unless shapes agree, labels lie in 1..c and every
    /// feature value is finite.
    void validate() const;
};

/// Builds a dataset from raw label tokens, densifying them. Feature names
/// default to f0..f{d-1}.
LabeledDataset make_dataset(Eigen::MatrixXd features, std::span<const std::string> label_tokens,
                            std::vector<std::string> feature_names = {});

/// Same, for labels that are already integers (any values; densified).
LabeledDataset make_dataset(Eigen::MatrixXd features, std::span<const int> raw_labels,
                            std::vector<std::string> feature_names = {});

/// Stable 64-bit FNV-1a digest of shape, labels and feature bits, as 16 hex
/// characters. Used to tie selection files to the dataset they came from.
std::string dataset_fingerprint(const LabeledDataset& data);

}  // namespace ogfs
