#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ogfs/dataset.hpp"
#include "ogfs/intra_select.hpp"
#include "ogfs/lasso.hpp"
#include "ogfs/spectral.hpp"

namespace ogfs {

enum class LayoutSource { synthetic, file };

/// Ordered feature groups in stream order.
struct GroupLayout {
    std::vector<FeatureGroup> groups;
    LayoutSource source = LayoutSource::synthetic;
    std::size_t group_size = 0;  // m, for synthetic layouts
    std::optional<std::uint64_t> shuffle_seed;

    /// Throws InvalidInput when a group is empty, groups overlap, or an index
    /// is >= d.
    void validate(std::size_t d) const;
    std::size_t feature_count() const;
};

bool operator==(const FeatureGroup& a, const FeatureGroup& b);

/// Consecutive blocks of m features (last block may be shorter). With a seed,
/// the feature order is permuted deterministically first.
GroupLayout partition_into_groups(std::size_t d, std::size_t m,
                                  std::optional<std::uint64_t> shuffle_seed = std::nullopt);

enum class InterMode {
    refilter_u,   // Lasso support over U and the new survivors replaces U
    append_only,  // U keeps everything; only new survivors can be added
};

std::string_view to_string(InterMode m);
InterMode parse_inter_mode(std::string_view s);

struct InterResult {
    std::vector<std::size_t> selected;
    std::vector<std::size_t> group_kept;  // survivors from the new group, arrival order
    bool fitted = false;
    bool converged = true;
    std::size_t sweeps = 0;
    double kkt_residual = 0.0;
};

/// Joint Lasso re-selection over the columns U followed by G'. The regression
/// target is the dense label vector.
InterResult inter_group_select(std::span<const std::size_t> selected,
                               std::span<const std::size_t> intra_kept, const LabeledDataset& data,
                               const LassoConfig& cfg, InterMode mode);

struct StoppingPolicy {
    std::optional<std::size_t> max_features;
    std::optional<double> target_accuracy;

    void validate() const;
};

enum class StopReason { exhausted, k_reached, accuracy_reached };

std::string_view to_string(StopReason r);

/// Checks the feature budget, then the accuracy target, then exhaustion.
std::pair<bool, std::optional<StopReason>> stopping_satisfied(
    std::size_t selected_count, bool stream_exhausted, const StoppingPolicy& policy,
    std::optional<double> latest_accuracy);

struct GroupRecord {
    std::size_t group_id = 0;
    std::size_t arrived = 0;
    std::size_t intra_kept = 0;
    std::size_t inter_kept = 0;  // features of this group present in U afterwards
    std::size_t selected_after = 0;
    double f_value = 0.0;  // trace ratio of U after the group
    bool lasso_converged = true;
    std::size_t lasso_sweeps = 0;
    std::optional<double> accuracy;
    // Wall-clock timings; reported but never serialized into audits.
    double intra_seconds = 0.0;
    double inter_seconds = 0.0;
};

struct SelectionResult {
    std::vector<std::size_t> selected;
    std::vector<GroupRecord> per_group;
    StopReason stop_reason = StopReason::exhausted;
    SubsetTraceState state;
};

/// Accuracy of a candidate subset, used only for the accuracy stopping rule.
using EvalHook = std::function<double(std::span<const std::size_t>)>;

struct OgfsOptions {
    SelectorConfig selector;
    LassoConfig lasso;
    StoppingPolicy stopping;
    InterMode mode = InterMode::refilter_u;
};

/// Runs the two-phase selection over the group stream in order.
SelectionResult ogfs_run(const LabeledDataset& data, const GroupLayout& layout,
                         const OgfsOptions& options, const EvalHook& eval_hook = {});

}  // namespace ogfs
