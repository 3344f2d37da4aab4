#include "ogfs/intra_select.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "ogfs/error.hpp"

namespace ogfs {

std::string_view to_string(TSign s) {
    switch (s) {
        case TSign::paper_literal:
            return "paper_literal";
        case TSign::score_above_mean:
            return "score_above_mean";
    }
    return "paper_literal";
}

TSign parse_t_sign(std::string_view s) {
    if (s == "paper_literal") {
        return TSign::paper_literal;
    }
    if (s == "score_above_mean") {
        return TSign::score_above_mean;
    }
    throw InvalidInput("unknown t_sign '" + std::string(s) + "'");
}

void SelectorConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw InvalidInput("epsilon must be a positive finite number");
    }
    if (!std::isfinite(t_threshold)) {
        throw InvalidInput("t_threshold must be finite");
    }
    if (min_ledger < 2) {
        throw InvalidInput("min_ledger must be at least 2");
    }
}

bool criterion1_accept(const SubsetTraceState& state, const FeatureScatter& cand,
                       const SelectorConfig& cfg) {
    const double gain = subset_criterion_with(state, cand) - subset_criterion(state);
    return gain > cfg.epsilon;
}

std::optional<double> t_statistic(const SubsetTraceState& state, double cand_score,
                                  const SelectorConfig& cfg) {
    if (state.count() < cfg.min_ledger) {
        return std::nullopt;
    }
    const double sd = state.score_stddev();
    if (!(sd > 0.0)) {
        return std::nullopt;
    }
    const double se = sd / std::sqrt(static_cast<double>(state.count()));
    const double diff = cfg.t_sign == TSign::paper_literal ? state.score_mean() - cand_score
                                                           : cand_score - state.score_mean();
    return diff / se;
}

bool criterion2_accept(const SubsetTraceState& state, double cand_score, const SelectorConfig& cfg) {
    const auto t = t_statistic(state, cand_score, cfg);
    return t.has_value() && *t > cfg.t_threshold;
}

IntraResult intra_group_select(const FeatureGroup& group, const SubsetTraceState& global_state,
                               const LabeledDataset& data, const ClassPartition& partition,
                               const SelectorConfig& cfg) {
    if (group.feature_indices.empty()) {
        throw InvalidInput("group " + std::to_string(group.group_id) + " is empty");
    }
    for (std::size_t j : group.feature_indices) {
        if (j >= data.cols()) {
            throw InvalidInput("group " + std::to_string(group.group_id) + " references column " +
                               std::to_string(j) + " of " + std::to_string(data.cols()));
        }
    }

    IntraResult out;
    out.decisions.reserve(group.feature_indices.size());
    std::unordered_set<std::size_t> seen;
    for (std::size_t j : group.feature_indices) {
        if (!seen.insert(j).second) {
            continue;
        }
        IntraDecision d;
        d.feature = j;
        d.scatter = scatter_stats(data.column(j), partition);
        d.by_gain = criterion1_accept(out.group_state, d.scatter, cfg);
        d.by_significance = criterion2_accept(global_state, d.scatter.score, cfg);
        if (d.by_gain || d.by_significance) {
            out.accepted.push_back(j);
            out.accepted_scatter.push_back(d.scatter);
            out.group_state.add(d.scatter);
        }
        out.decisions.push_back(d);
    }
    return out;
}

}  // namespace ogfs
