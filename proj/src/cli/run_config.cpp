#include "ogfs/run_config.hpp"

#include <algorithm>
#include <filesystem>
#include <initializer_list>

#include "ogfs/error.hpp"

namespace ogfs {

namespace {

void reject_unknown(const Json& obj, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) {
        throw InvalidInput("config: '" + std::string(where) + "' must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw InvalidInput("config: unknown key '" + std::string(where) + "." + key + "'");
        }
    }
}

template <class T>
void read_if(const Json& obj, const char* key, T& out) {
    if (obj.contains(key) && !obj.at(key).is_null()) {
        out = obj.at(key).get<T>();
    }
}

template <class T>
void read_if(const Json& obj, const char* key, std::optional<T>& out) {
    if (obj.contains(key)) {
        if (obj.at(key).is_null()) {
            out.reset();
        } else {
            out = obj.at(key).get<T>();
        }
    }
}

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::string_view to_string(DataFormat f) { return f == DataFormat::csv ? "csv" : "libsvm"; }

DataFormat parse_data_format(std::string_view s) {
    if (s == "csv") {
        return DataFormat::csv;
    }
    if (s == "libsvm") {
        return DataFormat::libsvm;
    }
    throw InvalidInput("unknown data format '" + std::string(s) + "' (expected csv or libsvm)");
}

void RunConfig::validate() const {
    if (data_path.empty()) {
        throw InvalidInput("no dataset given");
    }
    if (!std::filesystem::is_regular_file(data_path)) {
        throw InvalidInput("dataset file '" + data_path + "' does not exist");
    }
    if (group_spec && !std::filesystem::is_regular_file(*group_spec)) {
        throw InvalidInput("group spec file '" + *group_spec + "' does not exist");
    }
    if (!group_spec && group_size < 1) {
        throw InvalidInput("group size must be at least 1");
    }
    options.selector.validate();
    options.lasso.validate();
    options.stopping.validate();
    if (folds < 2) {
        throw InvalidInput("folds must be at least 2");
    }
    if (k_grid.empty()) {
        throw InvalidInput("k grid is empty");
    }
    for (std::size_t k : k_grid) {
        if (k < 1) {
            throw InvalidInput("k must be at least 1");
        }
    }
}

Json to_json(const RunConfig& c) {
    Json data;
    data["path"] = c.data_path;
    data["format"] = to_string(c.format);
    if (const auto* name = std::get_if<std::string>(&c.schema.label_column)) {
        data["label"] = *name;
    } else {
        data["label"] = std::get<long>(c.schema.label_column);
    }
    data["delimiter"] = std::string(1, c.schema.delimiter);
    data["header"] = c.schema.has_header;
    data["missing"] = to_string(c.schema.missing_policy);

    Json groups;
    if (c.group_spec) {
        groups["spec"] = *c.group_spec;
    } else {
        groups["size"] = c.group_size;
        groups["shuffle_seed"] = optional_json(c.shuffle_seed);
    }

    const auto& o = c.options;
    Json j;
    j["data"] = std::move(data);
    j["groups"] = std::move(groups);
    j["selector"] = {{"epsilon", o.selector.epsilon},
                     {"t_threshold", o.selector.t_threshold},
                     {"min_ledger", o.selector.min_ledger},
                     {"t_sign", to_string(o.selector.t_sign)}};
    j["lasso"] = {{"lambda", o.lasso.lambda},
                  {"tol", o.lasso.tol},
                  {"max_sweeps", o.lasso.max_sweeps},
                  {"center", o.lasso.center},
                  {"standardize", o.lasso.standardize}};
    j["mode"] = to_string(o.mode);
    j["stopping"] = {{"max_features", optional_json(o.stopping.max_features)},
                     {"target_accuracy", optional_json(o.stopping.target_accuracy)}};
    j["eval"] = {{"folds", c.folds}, {"k", c.k_grid}};
    j["seed"] = c.seed;
    return j;
}

RunConfig run_config_from_json(const Json& root) {
    const Json& j = root.contains("config") && root.contains("format") ? root.at("config") : root;
    RunConfig c;
    try {
        reject_unknown(j, "config",
                       {"data", "groups", "selector", "lasso", "mode", "stopping", "eval", "seed"});
        if (j.contains("data")) {
            const auto& d = j.at("data");
            reject_unknown(d, "data", {"path", "format", "label", "delimiter", "header", "missing"});
            read_if(d, "path", c.data_path);
            if (d.contains("format")) {
                c.format = parse_data_format(d.at("format").get<std::string>());
            }
            if (d.contains("label")) {
                const auto& l = d.at("label");
                if (l.is_number_integer()) {
                    c.schema.label_column = l.get<long>();
                } else {
                    c.schema.label_column = l.get<std::string>();
                }
            }
            if (d.contains("delimiter")) {
                const auto s = d.at("delimiter").get<std::string>();
                if (s.size() != 1) {
                    throw InvalidInput("config: delimiter must be a single character");
                }
                c.schema.delimiter = s[0];
            }
            read_if(d, "header", c.schema.has_header);
            if (d.contains("missing")) {
                c.schema.missing_policy = parse_missing_policy(d.at("missing").get<std::string>());
            }
        }
        if (j.contains("groups")) {
            const auto& g = j.at("groups");
            reject_unknown(g, "groups", {"size", "shuffle_seed", "spec"});
            read_if(g, "size", c.group_size);
            read_if(g, "shuffle_seed", c.shuffle_seed);
            read_if(g, "spec", c.group_spec);
        }
        auto& o = c.options;
        if (j.contains("selector")) {
            const auto& s = j.at("selector");
            reject_unknown(s, "selector", {"epsilon", "t_threshold", "min_ledger", "t_sign"});
            read_if(s, "epsilon", o.selector.epsilon);
            read_if(s, "t_threshold", o.selector.t_threshold);
            read_if(s, "min_ledger", o.selector.min_ledger);
            if (s.contains("t_sign")) {
                o.selector.t_sign = parse_t_sign(s.at("t_sign").get<std::string>());
            }
        }
        if (j.contains("lasso")) {
            const auto& l = j.at("lasso");
            reject_unknown(l, "lasso", {"lambda", "tol", "max_sweeps", "center", "standardize"});
            read_if(l, "lambda", o.lasso.lambda);
            read_if(l, "tol", o.lasso.tol);
            read_if(l, "max_sweeps", o.lasso.max_sweeps);
            read_if(l, "center", o.lasso.center);
            read_if(l, "standardize", o.lasso.standardize);
        }
        if (j.contains("mode")) {
            o.mode = parse_inter_mode(j.at("mode").get<std::string>());
        }
        if (j.contains("stopping")) {
            const auto& s = j.at("stopping");
            reject_unknown(s, "stopping", {"max_features", "target_accuracy"});
            read_if(s, "max_features", o.stopping.max_features);
            read_if(s, "target_accuracy", o.stopping.target_accuracy);
        }
        if (j.contains("eval")) {
            const auto& e = j.at("eval");
            reject_unknown(e, "eval", {"folds", "k"});
            read_if(e, "folds", c.folds);
            read_if(e, "k", c.k_grid);
        }
        read_if(j, "seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
    return c;
}

LabeledDataset load_dataset(const RunConfig& cfg) {
    return cfg.format == DataFormat::csv ? load_csv(cfg.data_path, cfg.schema)
                                         : load_libsvm(cfg.data_path);
}

GroupLayout build_layout(const RunConfig& cfg, std::size_t feature_count) {
    if (cfg.group_spec) {
        auto layout = load_group_spec(*cfg.group_spec, feature_count);
        layout.validate(feature_count);
        return layout;
    }
    if (cfg.group_size > feature_count) {
        throw InvalidInput("group size " + std::to_string(cfg.group_size) + " exceeds the " +
                           std::to_string(feature_count) + " features of the dataset");
    }
    return partition_into_groups(feature_count, cfg.group_size, cfg.shuffle_seed);
}

}  // namespace ogfs
