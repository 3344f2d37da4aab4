#include "ogfs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <string_view>

#include "ogfs/error.hpp"

namespace ogfs {

namespace {

bool parse_number(std::string_view s, double& out) {
    if (s.empty()) {
        return false;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string> default_names(std::size_t d) {
    std::vector<std::string> names;
    names.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
        names.push_back("f" + std::to_string(j));
    }
    return names;
}

}  // namespace

DenseLabels densify_labels(std::span<const std::string> tokens) {
    if (tokens.empty()) {
        throw InvalidInput("label vector is empty");
    }
    std::vector<double> values(tokens.size());
    bool numeric = true;
    for (std::size_t i = 0; i < tokens.size() && numeric; ++i) {
        numeric = parse_number(tokens[i], values[i]);
    }

    DenseLabels out;
    out.labels.reserve(tokens.size());
    if (numeric) {
        // Keyed by value so "+1" and "1" are one class; the first spelling names it.
        std::map<double, std::string> names;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            names.emplace(values[i], tokens[i]);
        }
        std::map<double, int> index;
        for (const auto& [v, name] : names) {
            index.emplace(v, static_cast<int>(index.size()) + 1);
            out.class_names.push_back(name);
        }
        for (double v : values) {
            out.labels.push_back(index.at(v));
        }
    } else {
        std::map<std::string, int, std::less<>> index;
        for (const auto& t : tokens) {
            index.emplace(t, 0);
        }
        for (auto& [name, id] : index) {
            id = static_cast<int>(out.class_names.size()) + 1;
            out.class_names.push_back(name);
        }
        for (const auto& t : tokens) {
            out.labels.push_back(index.find(t)->second);
        }
    }
    out.class_count = static_cast<int>(out.class_names.size());
    return out;
}

void LabeledDataset::validate() const {
    if (labels.size() != rows()) {
        throw InvalidInput("label count " + std::to_string(labels.size()) + " does not match " +
                           std::to_string(rows()) + " rows");
    }
    if (class_count < 1 && !labels.empty()) {
        throw InvalidInput("class_count must be at least 1");
    }
    for (int y : labels) {
        if (y < 1 || y > class_count) {
            throw InvalidInput("label " + std::to_string(y) + " outside 1.." +
                               std::to_string(class_count));
        }
    }
    if (!feature_names.empty() && feature_names.size() != cols()) {
        throw InvalidInput("feature name count does not match column count");
    }
    if (!features.allFinite()) {
        throw InvalidInput("dataset contains non-finite feature values");
    }
}

LabeledDataset make_dataset(Eigen::MatrixXd features, std::span<const std::string> label_tokens,
                            std::vector<std::string> feature_names) {
    if (static_cast<std::size_t>(features.rows()) != label_tokens.size()) {
        throw InvalidInput("feature rows and label count differ");
    }
    auto dense = densify_labels(label_tokens);
    LabeledDataset data;
    data.features = std::move(features);
    data.labels = std::move(dense.labels);
    data.class_count = dense.class_count;
    data.class_names = std::move(dense.class_names);
    data.feature_names =
        feature_names.empty() ? default_names(data.cols()) : std::move(feature_names);
    data.validate();
    return data;
}

LabeledDataset make_dataset(Eigen::MatrixXd features, std::span<const int> raw_labels,
                            std::vector<std::string> feature_names) {
    std::vector<std::string> tokens;
    tokens.reserve(raw_labels.size());
    for (int y : raw_labels) {
        tokens.push_back(std::to_string(y));
    }
    return make_dataset(std::move(features), tokens, std::move(feature_names));
}

std::string dataset_fingerprint(const LabeledDataset& data) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](const void* bytes, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(bytes);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    const std::uint64_t shape[2] = {data.rows(), data.cols()};
    mix(shape, sizeof(shape));
    for (int y : data.labels) {
        const auto v = static_cast<std::int32_t>(y);
        mix(&v, sizeof(v));
    }
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
        for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
            double v = data.features(i, j);
            if (v == 0.0) {
                v = 0.0;  // fold -0.0
            }
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof(bits));
            mix(&bits, sizeof(bits));
        }
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = hex[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace ogfs
