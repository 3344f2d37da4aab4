#pragma once

// Class-structured scatter for supervised spectral feature scoring.
//
// The between-class affinity has entries 1/n - 1/n_c inside class c and 1/n
// across classes; the within-class affinity has 1/n_c inside class c and 0
// across. Rows of the first sum to 0 and rows of the second to 1, so the
// Laplacians are L_b = -S_b and L_w = I - S_w. For a feature f this gives
//
//   f' L_b f = sum_c n_c (mu_c - mu)^2          (between-class scatter)
//   f' L_w f = sum_c sum_{i in c} (f_i - mu_c)^2 (within-class scatter)
//
// Everything here works from those rank-structured forms in O(n) per
// feature; no n x n matrix is formed.

#include <cstddef>
#include <span>
#include <vector>

namespace ogfs {

/// Floor applied to within-class scatter before dividing.
inline constexpr double kScatterFloor = 1e-12;

class ClassPartition {
public:
    /// Groups samples by label. Labels may be any integers; classes are
    /// indexed in ascending label order. Throws InvalidInput when empty.
    static ClassPartition from_labels(std::span<const int> labels);

    std::size_t class_count() const { return counts_.size(); }
    std::size_t total() const { return class_of_.size(); }
    const std::vector<std::vector<std::size_t>>& members() const { return members_; }
    const std::vector<std::size_t>& counts() const { return counts_; }
    /// Zero-based class index of each sample.
    const std::vector<std::size_t>& class_of() const { return class_of_; }
    /// Label of sample i remapped to 1..c.
    int dense_label(std::size_t i) const { return static_cast<int>(class_of_[i]) + 1; }

private:
    std::vector<std::vector<std::size_t>> members_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> class_of_;
};

inline ClassPartition partition_classes(std::span<const int> labels) {
    return ClassPartition::from_labels(labels);
}

/// S_b v without forming S_b.
std::vector<double> affinity_between_apply(std::span<const double> v, const ClassPartition& p);

/// S_w v without forming S_w.
std::vector<double> affinity_within_apply(std::span<const double> v, const ClassPartition& p);

struct FeatureScatter {
    double between = 0.0;
    double within = 0.0;
    double score = 0.0;
};

/// Ratio with the degeneracy policy: 0 when between is 0, otherwise
/// between / max(within, kScatterFloor).
double scatter_ratio(double between, double within);

/// Between/within scatter and score of one feature column.
FeatureScatter scatter_stats(std::span<const double> feature, const ClassPartition& p);

/// Running sums for the subset trace ratio plus the score ledger used by the
/// t-test. Single writer.
class SubsetTraceState {
public:
    SubsetTraceState() = default;

    /// Rebuilds from scratch over the given selected features.
    static SubsetTraceState from_scatters(std::span<const FeatureScatter> selected);

    void add(const FeatureScatter& s);

    double num_sum() const { return num_sum_; }
    double den_sum() const { return den_sum_; }
    std::size_t count() const { return ledger_.size(); }
    bool empty() const { return ledger_.empty(); }
    const std::vector<double>& score_ledger() const { return ledger_; }

    /// Running mean of the ledger scores; 0 when empty.
    double score_mean() const { return mean_; }
    /// Sample (n-1) standard deviation of the ledger; 0 below two entries.
    double score_stddev() const;

private:
    double num_sum_ = 0.0;
    double den_sum_ = 0.0;
    std::vector<double> ledger_;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Trace ratio of the selected subset, with F(empty) = 0.
double subset_criterion(const SubsetTraceState& state);

/// Trace ratio of `state` with one more feature, without mutating it.
double subset_criterion_with(const SubsetTraceState& state, const FeatureScatter& extra);

}  // namespace ogfs
