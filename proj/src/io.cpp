#include "ogfs/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "ogfs/error.hpp"

namespace ogfs {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return false;
    }
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    if (s.empty()) {
        return false;
    }
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool is_missing(std::string_view cell) { return cell.empty() || cell == "?"; }

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(0, "cannot open '" + path.string() + "'");
    }
    return in;
}

LabeledDataset assemble(std::vector<std::vector<double>> rows, std::vector<std::string> labels,
                        std::size_t d, std::vector<std::string> names) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                j < rows[i].size() ? rows[i][j] : 0.0;
        }
    }
    if (rows.empty()) {
        throw ParseError(0, "no data rows");
    }
    return make_dataset(std::move(x), labels, std::move(names));
}

}  // namespace

std::string_view to_string(MissingPolicy p) {
    return p == MissingPolicy::error ? "error" : "drop_row";
}

MissingPolicy parse_missing_policy(std::string_view s) {
    if (s == "error") {
        return MissingPolicy::error;
    }
    if (s == "drop_row") {
        return MissingPolicy::drop_row;
    }
    throw InvalidInput("unknown missing policy '" + std::string(s) + "'");
}

LabeledDataset read_csv(std::istream& in, const DatasetSchema& schema) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    std::size_t label_idx = 0;
    bool resolved = false;
    std::vector<std::string> header;

    const auto resolve = [&](std::size_t w) {
        width = w;
        if (const auto* name = std::get_if<std::string>(&schema.label_column)) {
            auto it = std::find(header.begin(), header.end(), *name);
            if (it == header.end()) {
                throw ParseError(line_no, "label column '" + *name + "' not found in header");
            }
            label_idx = static_cast<std::size_t>(it - header.begin());
        } else {
            const long idx = std::get<long>(schema.label_column);
            const long norm = idx < 0 ? static_cast<long>(w) + idx : idx;
            if (norm < 0 || norm >= static_cast<long>(w)) {
                throw ParseError(line_no, "label column index " + std::to_string(idx) +
                                              " out of range for " + std::to_string(w) + " columns");
            }
            label_idx = static_cast<std::size_t>(norm);
        }
        if (w < 2) {
            throw ParseError(line_no, "need at least one feature column besides the label");
        }
        resolved = true;
    };

    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto cells = split(line, schema.delimiter);
        if (schema.has_header && header.empty() && !resolved) {
            for (auto c : cells) {
                header.emplace_back(c);
            }
            resolve(cells.size());
            continue;
        }
        if (!resolved) {
            resolve(cells.size());
        }
        if (cells.size() != width) {
            throw ParseError(line_no, "expected " + std::to_string(width) + " fields, found " +
                                          std::to_string(cells.size()));
        }
        bool missing = false;
        std::vector<double> row;
        row.reserve(width - 1);
        for (std::size_t j = 0; j < width; ++j) {
            if (is_missing(cells[j])) {
                missing = true;
                continue;
            }
            if (j == label_idx) {
                continue;
            }
            double v;
            if (!parse_double(cells[j], v)) {
                throw ParseError(line_no, "non-numeric value '" + std::string(cells[j]) +
                                              "' in column " + std::to_string(j + 1));
            }
            row.push_back(v);
        }
        if (missing) {
            if (schema.missing_policy == MissingPolicy::error) {
                throw ParseError(line_no, "missing value");
            }
            continue;
        }
        rows.push_back(std::move(row));
        labels.emplace_back(cells[label_idx]);
    }
    if (!resolved) {
        throw ParseError(line_no, "file is empty");
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != label_idx) {
            names.push_back(header[j]);
        }
    }
    return assemble(std::move(rows), std::move(labels), width - 1, std::move(names));
}

LabeledDataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema) {
    auto in = open_or_throw(path);
    return read_csv(in, schema);
}

LabeledDataset read_libsvm(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t d = 0;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        std::istringstream tokens{std::string(body)};
        std::string label;
        tokens >> label;
        double label_value;
        if (!parse_double(label, label_value)) {
            throw ParseError(line_no, "label '" + label + "' is not numeric");
        }
        std::vector<double> row;
        std::size_t last = 0;
        std::string item;
        while (tokens >> item) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) {
                throw ParseError(line_no, "expected idx:value, got '" + item + "'");
            }
            std::size_t idx;
            double v;
            if (!parse_int(std::string_view(item).substr(0, colon), idx)) {
                throw ParseError(line_no, "bad feature index in '" + item + "'");
            }
            if (idx == 0) {
                throw ParseError(line_no, "feature indices are 1-based; got 0");
            }
            if (idx <= last) {
                throw ParseError(line_no, "feature indices must increase; " + std::to_string(idx) +
                                              " follows " + std::to_string(last));
            }
            if (!parse_double(std::string_view(item).substr(colon + 1), v)) {
                throw ParseError(line_no, "bad feature value in '" + item + "'");
            }
            row.resize(idx, 0.0);
            row[idx - 1] = v;
            last = idx;
        }
        d = std::max(d, row.size());
        rows.push_back(std::move(row));
        labels.push_back(label);
    }
    if (d == 0 && !rows.empty()) {
        d = 1;  // every row empty: keep a single all-zero column
    }
    return assemble(std::move(rows), std::move(labels), d, {});
}

LabeledDataset load_libsvm(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return read_libsvm(in);
}

GroupLayout read_group_spec(std::istream& in, std::optional<std::size_t> feature_count) {
    GroupLayout layout;
    layout.source = LayoutSource::file;
    std::unordered_set<std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;

    const auto parse_index = [&](std::string_view s) {
        std::size_t v;
        if (!parse_int(s, v)) {
            throw SpecError(line_no, "bad index '" + std::string(s) + "'");
        }
        if (feature_count && v >= *feature_count) {
            throw SpecError(line_no, "index " + std::to_string(v) + " out of range for " +
                                         std::to_string(*feature_count) + " features");
        }
        return v;
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        const auto colon = body.find(':');
        if (colon == std::string_view::npos) {
            throw SpecError(line_no, "expected 'name: indices'");
        }
        FeatureGroup g;
        g.group_id = layout.groups.size();
        g.name = std::string(trim(body.substr(0, colon)));
        if (g.name.empty()) {
            throw SpecError(line_no, "group name is empty");
        }
        const auto list = trim(body.substr(colon + 1));
        if (list.empty()) {
            throw SpecError(line_no, "group '" + g.name + "' lists no indices");
        }
        for (auto item : split(list, ',')) {
            if (item.empty()) {
                throw SpecError(line_no, "empty index entry");
            }
            std::size_t lo, hi;
            const auto dash = item.find('-');
            if (dash == std::string_view::npos) {
                lo = hi = parse_index(item);
            } else {
                lo = parse_index(trim(item.substr(0, dash)));
                hi = parse_index(trim(item.substr(dash + 1)));
                if (hi < lo) {
                    throw SpecError(line_no, "descending range '" + std::string(item) + "'");
                }
            }
            for (std::size_t j = lo; j <= hi; ++j) {
                if (!seen.insert(j).second) {
                    throw SpecError(line_no, "index " + std::to_string(j) + " listed twice");
                }
                g.feature_indices.push_back(j);
            }
        }
        layout.groups.push_back(std::move(g));
    }
    if (layout.groups.empty()) {
        throw SpecError(line_no, "group spec defines no groups");
    }
    return layout;
}

GroupLayout load_group_spec(const std::filesystem::path& path,
                            std::optional<std::size_t> feature_count) {
    std::ifstream in(path);
    if (!in) {
        throw SpecError(0, "cannot open '" + path.string() + "'");
    }
    return read_group_spec(in, feature_count);
}

std::string format_group_spec(const GroupLayout& layout) {
    std::ostringstream out;
    for (const auto& g : layout.groups) {
        out << (g.name.empty() ? "G" + std::to_string(g.group_id + 1) : g.name) << ": ";
        const auto& idx = g.feature_indices;
        for (std::size_t k = 0; k < idx.size();) {
            std::size_t end = k;
            while (end + 1 < idx.size() && idx[end + 1] == idx[end] + 1) {
                ++end;
            }
            if (k > 0) {
                out << ',';
            }
            out << idx[k];
            if (end > k) {
                out << '-' << idx[end];
            }
            k = end + 1;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace ogfs
