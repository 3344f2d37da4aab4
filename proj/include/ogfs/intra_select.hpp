#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "ogfs/dataset.hpp"
#include "ogfs/spectral.hpp"

namespace ogfs {

/// Direction of the t-statistic used by the significance test.
enum class TSign {
    paper_literal,     // t = (mean - s) / (sd / sqrt(|U|))
    score_above_mean,  // t = (s - mean) / (sd / sqrt(|U|))
};

std::string_view to_string(TSign s);
TSign parse_t_sign(std::string_view s);

struct SelectorConfig {
    double epsilon = 0.001;
    double t_threshold = 0.05;
    std::size_t min_ledger = 2;
    TSign t_sign = TSign::paper_literal;

    void validate() const;
};

/// Trace-ratio gain test: F(state + cand) - F(state) > epsilon.
bool criterion1_accept(const SubsetTraceState& state, const FeatureScatter& cand,
                       const SelectorConfig& cfg);

/// One-sample t-statistic of `cand_score` against the ledger; empty when the
/// ledger is shorter than cfg.min_ledger or has zero spread.
std::optional<double> t_statistic(const SubsetTraceState& state, double cand_score,
                                  const SelectorConfig& cfg);

/// Significance test: t_statistic(...) > cfg.t_threshold.
bool criterion2_accept(const SubsetTraceState& state, double cand_score, const SelectorConfig& cfg);

struct FeatureGroup {
    std::size_t group_id = 0;
    std::vector<std::size_t> feature_indices;
    std::string name;
};

struct IntraDecision {
    std::size_t feature = 0;
    FeatureScatter scatter;
    bool by_gain = false;          // criterion 1
    bool by_significance = false;  // criterion 2
};

struct IntraResult {
    std::vector<std::size_t> accepted;  // arrival order
    std::vector<FeatureScatter> accepted_scatter;
    SubsetTraceState group_state;
    std::vector<IntraDecision> decisions;  // one per arriving feature
};

/// Filters one arriving group feature by feature. The gain test runs against
/// the group's own running subset; the significance test runs against the
/// ledger of the globally selected set. Either one admits the feature.
IntraResult intra_group_select(const FeatureGroup& group, const SubsetTraceState& global_state,
                               const LabeledDataset& data, const ClassPartition& partition,
                               const SelectorConfig& cfg);

}  // namespace ogfs
