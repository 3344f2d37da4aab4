#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ogfs/dataset.hpp"
#include "ogfs/io.hpp"
#include "ogfs/stream.hpp"

namespace ogfs {

enum class DataFormat { csv, libsvm };

std::string_view to_string(DataFormat f);
DataFormat parse_data_format(std::string_view s);

/// Everything needed to replay a selection run. Output paths are kept apart
/// (see CliOutputs) so they never leak into an audit snapshot.
struct RunConfig {
    std::string data_path;
    DataFormat format = DataFormat::csv;
    DatasetSchema schema;

    std::size_t group_size = 8;
    std::optional<std::uint64_t> shuffle_seed;
    std::optional<std::string> group_spec;  // overrides group_size when set

    OgfsOptions options;

    std::size_t folds = 10;
    std::vector<std::size_t> k_grid{1, 3, 5};
    std::uint64_t seed = 42;

    /// Throws InvalidInput on out-of-range knobs or missing input files.
    void validate() const;
};

using Json = nlohmann::ordered_json;

Json to_json(const RunConfig& cfg);

/// Accepts either a bare config object or an audit file (uses its "config"
/// member). Unknown keys are rejected. Missing keys keep their defaults.
RunConfig run_config_from_json(const Json& j);

LabeledDataset load_dataset(const RunConfig& cfg);
GroupLayout build_layout(const RunConfig& cfg, std::size_t feature_count);

}  // namespace ogfs
