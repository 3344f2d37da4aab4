#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ogfs/dataset.hpp"
#include "ogfs/stream.hpp"

namespace ogfs {

enum class MissingPolicy { error, drop_row };

std::string_view to_string(MissingPolicy p);
MissingPolicy parse_missing_policy(std::string_view s);

/// Column holding the class label: a header name, or a 0-based index where
/// negative values count from the end (-1 is the last column).
using LabelColumn = std::variant<std::string, long>;

struct DatasetSchema {
    LabelColumn label_column = -1L;
    char delimiter = ',';
    bool has_header = true;
    MissingPolicy missing_policy = MissingPolicy::error;
};

/// Reads a delimited text table. Empty cells and "?" count as missing.
/// Throws ParseError (with the 1-based line) on ragged rows, non-numeric
/// feature cells, missing cells under MissingPolicy::error, or an unknown
/// label column.
LabeledDataset read_csv(std::istream& in, const DatasetSchema& schema);
LabeledDataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema);

/// Reads "label idx:val ..." lines with 1-based, strictly increasing indices.
/// Absent entries are 0; d is the largest index seen. Blank lines and lines
/// starting with '#' are skipped.
LabeledDataset read_libsvm(std::istream& in);
LabeledDataset load_libsvm(const std::filesystem::path& path);

/// Reads "name: i,j,k-l" lines (0-based, inclusive ranges). When
/// `feature_count` is given, indices must be below it. Throws SpecError.
GroupLayout read_group_spec(std::istream& in, std::optional<std::size_t> feature_count = {});
GroupLayout load_group_spec(const std::filesystem::path& path,
                            std::optional<std::size_t> feature_count = {});

/// Inverse of read_group_spec; runs of consecutive indices become ranges.
std::string format_group_spec(const GroupLayout& layout);

}  // namespace ogfs
