#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ogfs/dataset.hpp"

namespace ogfs {

/// Balanced two-class Gaussian data: informative features have unit variance
/// and class means `separation` apart; noise features are N(0, 1) regardless
/// of class.
struct SyntheticSpec {
    std::size_t samples = 200;
    std::size_t informative = 5;
    std::size_t noise = 45;
    double separation = 2.0;
    std::uint64_t seed = 0;
    /// Scatter informative columns among the noise; otherwise they come first.
    bool shuffle_columns = true;
};

struct SyntheticData {
    LabeledDataset data;
    std::vector<std::size_t> informative;  // ascending column indices
};

SyntheticData make_synthetic(const SyntheticSpec& spec);

}  // namespace ogfs
