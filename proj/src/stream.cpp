#include "ogfs/stream.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "ogfs/error.hpp"
#include "ogfs/random.hpp"

namespace ogfs {

bool operator==(const FeatureGroup& a, const FeatureGroup& b) {
    return a.group_id == b.group_id && a.feature_indices == b.feature_indices && a.name == b.name;
}

void GroupLayout::validate(std::size_t d) const {
    std::unordered_set<std::size_t> seen;
    for (const auto& g : groups) {
        if (g.feature_indices.empty()) {
            throw InvalidInput("group " + std::to_string(g.group_id) + " is empty");
        }
        for (std::size_t j : g.feature_indices) {
            if (j >= d) {
                throw InvalidInput("group " + std::to_string(g.group_id) + " references feature " +
                                   std::to_string(j) + " but the dataset has " + std::to_string(d));
            }
            if (!seen.insert(j).second) {
                throw InvalidInput("feature " + std::to_string(j) + " appears in more than one group");
            }
        }
    }
}

std::size_t GroupLayout::feature_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) {
        n += g.feature_indices.size();
    }
    return n;
}

GroupLayout partition_into_groups(std::size_t d, std::size_t m,
                                  std::optional<std::uint64_t> shuffle_seed) {
    if (d < 1) {
        throw InvalidInput("cannot partition zero features");
    }
    if (m < 1) {
        throw InvalidInput("group size must be at least 1");
    }
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle_seed) {
        Rng rng(*shuffle_seed);
        shuffle_in_place(std::span<std::size_t>(order), rng);
    }
    GroupLayout layout;
    layout.source = LayoutSource::synthetic;
    layout.group_size = m;
    layout.shuffle_seed = shuffle_seed;
    for (std::size_t start = 0; start < d; start += m) {
        FeatureGroup g;
        g.group_id = layout.groups.size();
        g.name = "G" + std::to_string(g.group_id + 1);
        const std::size_t stop = std::min(d, start + m);
        g.feature_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                                 order.begin() + static_cast<std::ptrdiff_t>(stop));
        layout.groups.push_back(std::move(g));
    }
    return layout;
}

std::string_view to_string(InterMode m) {
    return m == InterMode::refilter_u ? "refilter_u" : "append_only";
}

InterMode parse_inter_mode(std::string_view s) {
    if (s == "refilter_u") {
        return InterMode::refilter_u;
    }
    if (s == "append_only") {
        return InterMode::append_only;
    }
    throw InvalidInput("unknown inter-group mode '" + std::string(s) + "'");
}

InterResult inter_group_select(std::span<const std::size_t> selected,
                               std::span<const std::size_t> intra_kept, const LabeledDataset& data,
                               const LassoConfig& cfg, InterMode mode) {
    InterResult out;
    out.selected.assign(selected.begin(), selected.end());
    if (selected.empty() && intra_kept.empty()) {
        return out;
    }
    std::vector<std::size_t> combined(selected.begin(), selected.end());
    combined.insert(combined.end(), intra_kept.begin(), intra_kept.end());

    const auto n = static_cast<Eigen::Index>(data.rows());
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(combined.size()));
    for (std::size_t k = 0; k < combined.size(); ++k) {
        if (combined[k] >= data.cols()) {
            throw InvalidInput("column " + std::to_string(combined[k]) + " out of range");
        }
        design.col(static_cast<Eigen::Index>(k)) =
            data.features.col(static_cast<Eigen::Index>(combined[k]));
    }
    Eigen::VectorXd target(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        target(i) = static_cast<double>(data.labels[static_cast<std::size_t>(i)]);
    }

    const LassoModel model = lasso_fit(design, target, cfg);
    out.fitted = true;
    out.converged = model.converged;
    out.sweeps = model.sweeps_used;
    out.kkt_residual = model.kkt_residual;

    const auto keep = support(model);
    const std::size_t prior = selected.size();
    for (std::size_t k : keep) {
        if (k >= prior) {
            out.group_kept.push_back(combined[k]);
        }
    }
    if (mode == InterMode::refilter_u) {
        out.selected.clear();
        for (std::size_t k : keep) {
            out.selected.push_back(combined[k]);
        }
    } else {
        out.selected.insert(out.selected.end(), out.group_kept.begin(), out.group_kept.end());
    }
    return out;
}

void StoppingPolicy::validate() const {
    if (max_features && *max_features < 1) {
        throw InvalidInput("max_features must be at least 1");
    }
    if (target_accuracy && !(*target_accuracy > 0.0 && *target_accuracy <= 1.0)) {
        throw InvalidInput("target_accuracy must lie in (0, 1]");
    }
}

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::exhausted:
            return "exhausted";
        case StopReason::k_reached:
            return "k_reached";
        case StopReason::accuracy_reached:
            return "accuracy_reached";
    }
    return "exhausted";
}

std::pair<bool, std::optional<StopReason>> stopping_satisfied(
    std::size_t selected_count, bool stream_exhausted, const StoppingPolicy& policy,
    std::optional<double> latest_accuracy) {
    if (policy.max_features && selected_count >= *policy.max_features) {
        return {true, StopReason::k_reached};
    }
    if (policy.target_accuracy && latest_accuracy && *latest_accuracy >= *policy.target_accuracy) {
        return {true, StopReason::accuracy_reached};
    }
    if (stream_exhausted) {
        return {true, StopReason::exhausted};
    }
    return {false, std::nullopt};
}

SelectionResult ogfs_run(const LabeledDataset& data, const GroupLayout& layout,
                         const OgfsOptions& options, const EvalHook& eval_hook) {
    data.validate();
    layout.validate(data.cols());
    options.selector.validate();
    options.lasso.validate();
    options.stopping.validate();

    using clock = std::chrono::steady_clock;
    const auto partition = ClassPartition::from_labels(data.labels);
    std::unordered_map<std::size_t, FeatureScatter> scatter_of;

    SelectionResult result;
    if (layout.groups.empty()) {
        result.stop_reason = StopReason::exhausted;
        return result;
    }
    for (std::size_t gi = 0; gi < layout.groups.size(); ++gi) {
        const FeatureGroup& group = layout.groups[gi];
        GroupRecord rec;
        rec.group_id = group.group_id;
        rec.arrived = group.feature_indices.size();

        const auto t0 = clock::now();
        const IntraResult intra =
            intra_group_select(group, result.state, data, partition, options.selector);
        const auto t1 = clock::now();
        for (std::size_t k = 0; k < intra.accepted.size(); ++k) {
            scatter_of[intra.accepted[k]] = intra.accepted_scatter[k];
        }
        const InterResult inter =
            inter_group_select(result.selected, intra.accepted, data, options.lasso, options.mode);
        const auto t2 = clock::now();

        if (options.mode == InterMode::refilter_u) {
            std::vector<FeatureScatter> live;
            live.reserve(inter.selected.size());
            for (std::size_t j : inter.selected) {
                live.push_back(scatter_of.at(j));
            }
            result.state = SubsetTraceState::from_scatters(live);
        } else {
            for (std::size_t j : inter.group_kept) {
                result.state.add(scatter_of.at(j));
            }
        }
        result.selected = inter.selected;

        rec.intra_kept = intra.accepted.size();
        rec.inter_kept = inter.group_kept.size();
        rec.selected_after = result.selected.size();
        rec.f_value = subset_criterion(result.state);
        rec.lasso_converged = inter.converged;
        rec.lasso_sweeps = inter.sweeps;
        rec.intra_seconds = std::chrono::duration<double>(t1 - t0).count();
        rec.inter_seconds = std::chrono::duration<double>(t2 - t1).count();

        const bool exhausted = gi + 1 == layout.groups.size();
        if (options.stopping.target_accuracy && eval_hook) {
            rec.accuracy = eval_hook(result.selected);
        }
        result.per_group.push_back(rec);

        const auto [stop, reason] =
            stopping_satisfied(result.selected.size(), exhausted, options.stopping, rec.accuracy);
        if (stop) {
            result.stop_reason = *reason;
            break;
        }
    }
    return result;
}

}  // namespace ogfs
