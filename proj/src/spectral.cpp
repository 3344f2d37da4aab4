#include "ogfs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ogfs/error.hpp"

namespace ogfs {

namespace {

void check_length(std::size_t got, const ClassPartition& p) {
    if (got != p.total()) {
        throw InvalidInput("vector length " + std::to_string(got) + " does not match " +
                           std::to_string(p.total()) + " samples");
    }
}

std::vector<double> class_sums(std::span<const double> v, const ClassPartition& p) {
    std::vector<double> sums(p.class_count(), 0.0);
    const auto& cls = p.class_of();
    for (std::size_t i = 0; i < v.size(); ++i) {
        sums[cls[i]] += v[i];
    }
    return sums;
}

}  // namespace

ClassPartition ClassPartition::from_labels(std::span<const int> labels) {
    if (labels.empty()) {
        throw InvalidInput("label vector is empty");
    }
    std::map<int, std::size_t> index;
    for (int y : labels) {
        index.emplace(y, 0);
    }
    std::size_t next = 0;
    for (auto& [label, k] : index) {
        k = next++;
    }
    ClassPartition p;
    p.members_.resize(index.size());
    p.class_of_.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::size_t k = index[labels[i]];
        p.class_of_.push_back(k);
        p.members_[k].push_back(i);
    }
    p.counts_.reserve(p.members_.size());
    for (const auto& m : p.members_) {
        p.counts_.push_back(m.size());
    }
    return p;
}

std::vector<double> affinity_between_apply(std::span<const double> v, const ClassPartition& p) {
    check_length(v.size(), p);
    // S_b = (1/n) 11' - sum_c (1/n_c) 1_c 1_c'
    const auto sums = class_sums(v, p);
    double total = 0.0;
    for (double s : sums) {
        total += s;
    }
    const double global = total / static_cast<double>(p.total());
    std::vector<double> out(v.size());
    const auto& cls = p.class_of();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t c = cls[i];
        out[i] = global - sums[c] / static_cast<double>(p.counts()[c]);
    }
    return out;
}

std::vector<double> affinity_within_apply(std::span<const double> v, const ClassPartition& p) {
    check_length(v.size(), p);
    const auto sums = class_sums(v, p);
    std::vector<double> out(v.size());
    const auto& cls = p.class_of();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t c = cls[i];
        out[i] = sums[c] / static_cast<double>(p.counts()[c]);
    }
    return out;
}

double scatter_ratio(double between, double within) {
    if (between == 0.0) {
        return 0.0;
    }
    return between / std::max(within, kScatterFloor);
}

FeatureScatter scatter_stats(std::span<const double> feature, const ClassPartition& p) {
    check_length(feature.size(), p);
    if (p.total() == 0) {
        throw InvalidInput("feature is empty");
    }
    for (double x : feature) {
        if (!std::isfinite(x)) {
            throw InvalidInput("feature contains non-finite values");
        }
    }
    FeatureScatter out;
    const auto [lo, hi] = std::minmax_element(feature.begin(), feature.end());
    if (*lo == *hi) {
        return out;
    }

    // Two-pass: shift by the global mean first so the class sums carry no
    // large common offset.
    double mean = 0.0;
    for (double x : feature) {
        mean += x;
    }
    mean /= static_cast<double>(feature.size());

    const std::size_t c = p.class_count();
    std::vector<double> class_mean(c, 0.0);
    const auto& cls = p.class_of();
    for (std::size_t i = 0; i < feature.size(); ++i) {
        class_mean[cls[i]] += feature[i] - mean;
    }
    for (std::size_t k = 0; k < c; ++k) {
        class_mean[k] /= static_cast<double>(p.counts()[k]);
    }
    // Residual mean of the shifted values; zero up to rounding.
    double shift = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        shift += static_cast<double>(p.counts()[k]) * class_mean[k];
    }
    shift /= static_cast<double>(feature.size());

    for (std::size_t k = 0; k < c; ++k) {
        const double d = class_mean[k] - shift;
        out.between += static_cast<double>(p.counts()[k]) * d * d;
    }
    for (std::size_t i = 0; i < feature.size(); ++i) {
        const double d = feature[i] - mean - class_mean[cls[i]];
        out.within += d * d;
    }
    out.score = scatter_ratio(out.between, out.within);
    return out;
}

SubsetTraceState SubsetTraceState::from_scatters(std::span<const FeatureScatter> selected) {
    SubsetTraceState s;
    for (const auto& f : selected) {
        s.add(f);
    }
    return s;
}

void SubsetTraceState::add(const FeatureScatter& s) {
    num_sum_ += s.between;
    den_sum_ += s.within;
    ledger_.push_back(s.score);
    // Welford update
    const double delta = s.score - mean_;
    mean_ += delta / static_cast<double>(ledger_.size());
    m2_ += delta * (s.score - mean_);
}

double SubsetTraceState::score_stddev() const {
    if (ledger_.size() < 2) {
        return 0.0;
    }
    return std::sqrt(std::max(m2_, 0.0) / static_cast<double>(ledger_.size() - 1));
}

double subset_criterion(const SubsetTraceState& state) {
    if (state.empty()) {
        return 0.0;
    }
    return state.num_sum() / std::max(state.den_sum(), kScatterFloor);
}

double subset_criterion_with(const SubsetTraceState& state, const FeatureScatter& extra) {
    return (state.num_sum() + extra.between) / std::max(state.den_sum() + extra.within, kScatterFloor);
}

}  // namespace ogfs
