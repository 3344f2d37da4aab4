#include "ogfs/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include "ogfs/error.hpp"
#include "ogfs/random.hpp"

namespace ogfs {

SyntheticData make_synthetic(const SyntheticSpec& spec) {
    const std::size_t d = spec.informative + spec.noise;
    if (spec.samples < 2 || d == 0) {
        throw InvalidInput("synthetic data needs at least 2 samples and 1 feature");
    }
    Rng rng(spec.seed);

    std::vector<int> labels(spec.samples);
    for (std::size_t i = 0; i < spec.samples; ++i) {
        labels[i] = i < spec.samples / 2 ? 1 : 2;
    }
    shuffle_in_place(std::span<int>(labels), rng);

    std::vector<std::size_t> columns(d);
    std::iota(columns.begin(), columns.end(), std::size_t{0});
    if (spec.shuffle_columns) {
        shuffle_in_place(std::span<std::size_t>(columns), rng);
    }
    SyntheticData out;
    out.informative.assign(columns.begin(), columns.begin() + static_cast<std::ptrdiff_t>(spec.informative));
    std::sort(out.informative.begin(), out.informative.end());

    std::vector<bool> is_informative(d, false);
    for (std::size_t j : out.informative) {
        is_informative[j] = true;
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(spec.samples), static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < spec.samples; ++i) {
            double v = standard_normal(rng);
            if (is_informative[j] && labels[i] == 2) {
                v += spec.separation;
            }
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    out.data = make_dataset(std::move(x), std::span<const int>(labels));
    return out;
}

}  // namespace ogfs
