#include "ogfs/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ogfs/error.hpp"
#include "ogfs/oracle.hpp"

namespace ogfs::cli {

namespace {

constexpr const char* kAuditFormat = "ogfs-selection/1";

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string shortest(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string scientific(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// Result rows share one column set across select, eval and bench; fold
// accuracies trail as fold_1..fold_F in the delimited form.
struct ResultRow {
    std::string dataset;
    std::string method;
    std::string group_size;
    std::string lambda;
    std::size_t dims = 0;
    EvalReport report;
    std::string note;
};

void print_rows(std::ostream& out, const std::vector<ResultRow>& rows) {
    std::vector<std::vector<std::string>> cells{{"Dataset", "Method", "m", "lambda", "#dim.", "accu.", "k", "note"}};
    for (const auto& r : rows) {
        cells.push_back({r.dataset, r.method, r.group_size, r.lambda, std::to_string(r.dims),
                         fixed(r.report.accuracy), std::to_string(r.report.k_nn), r.note});
    }
    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            line += row[c];
            if (c + 1 < row.size()) {
                line += std::string(width[c] - row[c].size() + 2, ' ');
            }
        }
        while (!line.empty() && line.back() == ' ') {
            line.pop_back();
        }
        out << line << '\n';
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char ch : s) {
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return q + "\"";
}

void write_rows_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
    std::size_t folds = 0;
    for (const auto& r : rows) {
        folds = std::max(folds, r.report.fold_accuracies.size());
    }
    std::ostringstream s;
    s << "dataset,method,group_size,lambda,dims,accuracy,k,note";
    for (std::size_t f = 0; f < folds; ++f) {
        s << ",fold_" << f + 1;
    }
    s << '\n';
    for (const auto& r : rows) {
        s << csv_field(r.dataset) << ',' << csv_field(r.method) << ',' << r.group_size << ','
          << r.lambda << ',' << r.dims << ',' << fixed(r.report.accuracy, 6) << ',' << r.report.k_nn
          << ',' << csv_field(r.note);
        for (std::size_t f = 0; f < folds; ++f) {
            s << ',';
            if (f < r.report.fold_accuracies.size()) {
                s << fixed(r.report.fold_accuracies[f], 6);
            }
        }
        s << '\n';
    }
    std::ofstream file(path, std::ios::binary);
    if (!(file << s.str())) {
        throw Error("cannot write table '" + path.string() + "'");
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!(file << text)) {
        throw Error("cannot write '" + path.string() + "'");
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::string dataset_name(const RunConfig& cfg) {
    return std::filesystem::path(cfg.data_path).stem().string();
}

std::string group_label(const RunConfig& cfg) {
    return cfg.group_spec ? "spec" : std::to_string(cfg.group_size);
}

std::string note_for(const EvalReport& r) { return r.majority_fallback ? "majority-class fallback" : ""; }

LabelColumn parse_label(const std::string& s) {
    long idx = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, idx);
    if (ec == std::errc{} && ptr == end) {
        return idx;
    }
    return s;
}

char parse_delimiter(const std::string& s) {
    if (s == "tab" || s == "\\t") {
        return '\t';
    }
    if (s.size() != 1) {
        throw InvalidInput("delimiter must be a single character or 'tab'");
    }
    return s[0];
}

// Flags that mirror RunConfig. Only flags actually given override the
// config file.
struct RunFlags {
    std::string config, data, format, label, delimiter, missing, groups, t_sign, mode;
    std::size_t group_size = 0, min_ledger = 0, max_features = 0, folds = 0, max_sweeps = 0;
    std::uint64_t shuffle_seed = 0, seed = 0;
    double lambda = 0, epsilon = 0, t_threshold = 0, target_accuracy = 0, tol = 0;
    bool no_header = false;
    std::vector<std::size_t> k;
    std::map<std::string, CLI::Option*> opt;

    void add(CLI::App* app) {
        opt["config"] = app->add_option("--config", config, "JSON run config (or an audit file)");
        opt["data"] = app->add_option("--data", data, "dataset file");
        opt["format"] = app->add_option("--format", format, "csv | libsvm");
        opt["label"] = app->add_option("--label", label, "label column name, or index (-1 = last)");
        opt["delimiter"] = app->add_option("--delimiter", delimiter, "CSV delimiter (one char or 'tab')");
        opt["no_header"] = app->add_flag("--no-header", no_header, "CSV has no header row");
        opt["missing"] = app->add_option("--missing", missing, "error | drop_row");
        opt["group_size"] = app->add_option("--group-size", group_size, "features per synthetic group (m)");
        opt["groups"] = app->add_option("--groups", groups, "group spec file");
        opt["shuffle_seed"] = app->add_option("--shuffle-seed", shuffle_seed, "permute features before grouping");
        opt["lambda"] = app->add_option("--lambda", lambda, "Lasso penalty");
        opt["tol"] = app->add_option("--tol", tol, "Lasso tolerance");
        opt["max_sweeps"] = app->add_option("--max-sweeps", max_sweeps, "Lasso sweep budget");
        opt["epsilon"] = app->add_option("--epsilon", epsilon, "minimum trace-ratio gain");
        opt["t_threshold"] = app->add_option("--t-threshold", t_threshold, "t-statistic threshold");
        opt["min_ledger"] = app->add_option("--min-ledger", min_ledger, "scores needed before the t-test applies");
        opt["t_sign"] = app->add_option("--t-sign", t_sign, "paper_literal | score_above_mean");
        opt["mode"] = app->add_option("--mode", mode, "refilter_u | append_only");
        opt["max_features"] = app->add_option("--max-features", max_features, "stop once |U| reaches this");
        opt["target_accuracy"] = app->add_option("--target-accuracy", target_accuracy, "stop once CV accuracy reaches this");
        opt["folds"] = app->add_option("--folds", folds, "cross-validation folds");
        opt["k"] = app->add_option("--k", k, "k-NN grid, best reported")->delimiter(',');
        opt["seed"] = app->add_option("--seed", seed, "fold seed");
    }

    bool given(const std::string& name) const { return opt.at(name)->count() > 0; }

    RunConfig build() const {
        RunConfig c;
        if (given("config")) {
            c = run_config_from_json(read_json_file(config));
        }
        if (given("data")) c.data_path = data;
        if (given("format")) c.format = parse_data_format(format);
        if (given("label")) c.schema.label_column = parse_label(label);
        if (given("delimiter")) c.schema.delimiter = parse_delimiter(delimiter);
        if (given("no_header")) c.schema.has_header = false;
        if (given("missing")) c.schema.missing_policy = parse_missing_policy(missing);
        if (given("group_size")) {
            c.group_size = group_size;
            c.group_spec.reset();
        }
        if (given("groups")) c.group_spec = groups;
        if (given("shuffle_seed")) c.shuffle_seed = shuffle_seed;
        auto& o = c.options;
        if (given("lambda")) o.lasso.lambda = lambda;
        if (given("tol")) o.lasso.tol = tol;
        if (given("max_sweeps")) o.lasso.max_sweeps = max_sweeps;
        if (given("epsilon")) o.selector.epsilon = epsilon;
        if (given("t_threshold")) o.selector.t_threshold = t_threshold;
        if (given("min_ledger")) o.selector.min_ledger = min_ledger;
        if (given("t_sign")) o.selector.t_sign = parse_t_sign(t_sign);
        if (given("mode")) o.mode = parse_inter_mode(mode);
        if (given("max_features")) o.stopping.max_features = max_features;
        if (given("target_accuracy")) o.stopping.target_accuracy = target_accuracy;
        if (given("folds")) c.folds = folds;
        if (given("k")) c.k_grid = k;
        if (given("seed")) c.seed = seed;
        c.validate();
        return c;
    }
};

Json eval_json(const BestOfReport& e) {
    Json per_k = Json::array();
    for (const auto& r : e.per_k) {
        per_k.push_back({{"k", r.k_nn}, {"accuracy", r.accuracy}});
    }
    return {{"folds", e.best.folds},
            {"seed", e.best.seed},
            {"k", e.best.k_nn},
            {"accuracy", e.best.accuracy},
            {"fold_accuracies", e.best.fold_accuracies},
            {"majority_fallback", e.best.majority_fallback},
            {"per_k", per_k}};
}

Json make_audit(const RunConfig& cfg, const LabeledDataset& data, const GroupLayout& layout,
                const SelectionResult& r, const BestOfReport& e) {
    Json j;
    j["format"] = kAuditFormat;
    j["config"] = to_json(cfg);
    j["dataset"] = {{"rows", data.rows()},
                    {"cols", data.cols()},
                    {"classes", data.class_count},
                    {"fingerprint", dataset_fingerprint(data)}};
    Json lines = Json::array();
    std::istringstream spec(format_group_spec(layout));
    for (std::string line; std::getline(spec, line);) {
        lines.push_back(line);
    }
    j["layout"] = std::move(lines);
    j["selected"] = r.selected;
    Json names = Json::array();
    for (std::size_t f : r.selected) {
        names.push_back(data.feature_names[f]);
    }
    j["selected_names"] = std::move(names);
    j["stop_reason"] = to_string(r.stop_reason);
    j["groups_processed"] = r.per_group.size();
    j["final_criterion"] = subset_criterion(r.state);
    Json groups = Json::array();
    for (const auto& g : r.per_group) {
        Json row = {{"group", layout.groups[g.group_id].name},
                    {"arrived", g.arrived},
                    {"intra_kept", g.intra_kept},
                    {"inter_kept", g.inter_kept},
                    {"selected_after", g.selected_after},
                    {"criterion", g.f_value},
                    {"lasso_converged", g.lasso_converged},
                    {"lasso_sweeps", g.lasso_sweeps}};
        if (g.accuracy) {
            row["accuracy"] = *g.accuracy;
        }
        groups.push_back(std::move(row));
    }
    j["per_group"] = std::move(groups);
    j["evaluation"] = eval_json(e);
    return j;
}

void print_folds(std::ostream& out, const std::string& label, const EvalReport& r) {
    out << label << " folds (k=" << r.k_nn << "):";
    for (double a : r.fold_accuracies) {
        out << ' ' << fixed(a);
    }
    out << '\n';
}

int cmd_select(const RunFlags& flags, const std::string& audit_path, const std::string& table_path,
               std::ostream& out) {
    const RunConfig cfg = flags.build();
    const LabeledDataset data = load_dataset(cfg);
    const auto run = run_selection(cfg, data);
    write_text(audit_path, dump_audit(run.audit));

    const auto& best = run.evaluation.best;
    std::vector<ResultRow> rows{{dataset_name(cfg), "OGFS", group_label(cfg),
                                 shortest(cfg.options.lasso.lambda), run.result.selected.size(),
                                 best, note_for(best)}};
    print_rows(out, rows);
    out << "selected:";
    for (std::size_t f : run.result.selected) {
        out << ' ' << data.feature_names[f];
    }
    out << "\nstop: " << to_string(run.result.stop_reason) << " after "
        << run.result.per_group.size() << " of " << run.layout.groups.size() << " groups\n";
    out << "audit: " << audit_path << '\n';
    if (!table_path.empty()) {
        write_rows_csv(table_path, rows);
    }
    return kOk;
}

int cmd_eval(const std::string& selection_path, const RunFlags& flags, bool baseline,
             const std::string& table_path, std::ostream& out) {
    const Json audit = read_json_file(selection_path);
    if (!audit.is_object() || audit.value("format", std::string()) != kAuditFormat) {
        throw InvalidInput("'" + selection_path + "' is not an ogfs selection file");
    }
    RunConfig cfg = run_config_from_json(audit);
    if (flags.given("data")) cfg.data_path = flags.data;
    if (flags.given("folds")) cfg.folds = flags.folds;
    if (flags.given("k")) cfg.k_grid = flags.k;
    if (flags.given("seed")) cfg.seed = flags.seed;
    cfg.validate();

    const LabeledDataset data = load_dataset(cfg);
    const std::string recorded = audit.at("dataset").at("fingerprint").get<std::string>();
    if (recorded != dataset_fingerprint(data)) {
        throw InvalidInput("dataset '" + cfg.data_path + "' does not match the selection file (fingerprint " +
                           dataset_fingerprint(data) + ", recorded " + recorded + ")");
    }
    std::vector<std::size_t> selected;
    try {
        selected = audit.at("selected").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("bad 'selected' list: ") + e.what());
    }

    const auto sel = cross_validate_best(data, selected, cfg.folds, cfg.k_grid, cfg.seed);
    std::vector<ResultRow> rows{{dataset_name(cfg), "Selection", group_label(cfg),
                                 shortest(cfg.options.lasso.lambda), selected.size(), sel.best,
                                 note_for(sel.best)}};
    if (baseline) {
        std::vector<std::size_t> all(data.cols());
        for (std::size_t j = 0; j < all.size(); ++j) {
            all[j] = j;
        }
        const auto base = cross_validate_best(data, all, cfg.folds, cfg.k_grid, cfg.seed);
        rows.push_back({dataset_name(cfg), "Baseline", "", "", all.size(), base.best, ""});
    }
    print_rows(out, rows);
    for (const auto& r : rows) {
        print_folds(out, r.method, r.report);
    }
    if (!table_path.empty()) {
        write_rows_csv(table_path, rows);
    }
    return kOk;
}

int cmd_bench(const RunFlags& flags, std::vector<std::size_t> group_sizes, std::vector<double> lambdas,
              const std::string& table_path, std::ostream& out) {
    RunConfig cfg = flags.build();
    if (group_sizes.empty()) {
        group_sizes.push_back(cfg.group_size);
    }
    if (lambdas.empty()) {
        lambdas.push_back(cfg.options.lasso.lambda);
    }
    const LabeledDataset data = load_dataset(cfg);
    const std::string name = dataset_name(cfg);

    std::vector<std::size_t> all(data.cols());
    for (std::size_t j = 0; j < all.size(); ++j) {
        all[j] = j;
    }
    const auto base = cross_validate_best(data, all, cfg.folds, cfg.k_grid, cfg.seed);
    std::vector<ResultRow> rows{{name, "Baseline", "", "", all.size(), base.best, ""}};

    std::optional<std::size_t> best_row;
    for (std::size_t m : group_sizes) {
        for (double lambda : lambdas) {
            RunConfig c = cfg;
            c.group_size = m;
            c.group_spec.reset();
            c.options.lasso.lambda = lambda;
            c.validate();
            const auto run = run_selection(c, data);
            rows.push_back({name, "OGFS", std::to_string(m), shortest(lambda),
                            run.result.selected.size(), run.evaluation.best,
                            note_for(run.evaluation.best)});
            if (!best_row || rows.back().report.accuracy > rows[*best_row].report.accuracy) {
                best_row = rows.size() - 1;
            }
        }
    }
    if (best_row && rows[*best_row].note.empty()) {
        rows[*best_row].note = "best";
    }
    print_rows(out, rows);
    if (!table_path.empty()) {
        write_rows_csv(table_path, rows);
    }
    return kOk;
}

int cmd_oracle(const OracleOptions& options, std::ostream& out) {
    const auto checks = run_oracle_suite(options);
    std::size_t width = 5;
    for (const auto& c : checks) {
        width = std::max(width, c.name.size());
    }
    auto pad = [](std::string s, std::size_t w) { return s + std::string(w - std::min(w, s.size()), ' '); };
    out << pad("check", width) << "  " << pad("cases", 6) << "  " << pad("max_error", 10) << "  "
        << pad("tolerance", 10) << "  result\n";
    std::size_t passed = 0;
    for (const auto& c : checks) {
        out << pad(c.name, width) << "  " << pad(std::to_string(c.cases), 6) << "  "
            << pad(scientific(c.max_error), 10) << "  " << pad(scientific(c.tolerance), 10) << "  "
            << (c.passed ? "PASS" : "FAIL") << '\n';
        passed += c.passed ? 1 : 0;
    }
    out << "oracle: " << passed << "/" << checks.size() << " checks passed (seed " << options.seed << ")\n";
    return passed == checks.size() ? kOk : kRuntimeError;
}

}  // namespace

SelectionRun run_selection(const RunConfig& cfg, const LabeledDataset& data) {
    SelectionRun run;
    run.layout = build_layout(cfg, data.cols());
    EvalHook hook;
    if (cfg.options.stopping.target_accuracy) {
        // Stopping is judged with plain 1-NN, independent of the reporting grid.
        hook = [&](std::span<const std::size_t> u) {
            CvOptions cv;
            cv.folds = cfg.folds;
            cv.k_nn = 1;
            cv.seed = cfg.seed;
            return cross_validate(data, u, cv).accuracy;
        };
    }
    run.result = ogfs_run(data, run.layout, cfg.options, hook);
    run.evaluation = cross_validate_best(data, run.result.selected, cfg.folds, cfg.k_grid, cfg.seed);
    run.audit = make_audit(cfg, data, run.layout, run.result, run.evaluation);
    return run;
}

std::string dump_audit(const Json& audit) { return audit.dump(2) + "\n"; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Online group feature selection"};
    app.name("ogfs");
    app.require_subcommand(1);

    RunFlags select_flags;
    std::string audit_path = "selection.json", select_table;
    auto* select = app.add_subcommand("select", "run selection on a dataset and write an audit file");
    select_flags.add(select);
    select->add_option("--audit", audit_path, "audit output path")->capture_default_str();
    select->add_option("--table", select_table, "write the result row as CSV");

    RunFlags eval_flags;
    std::string selection_path, eval_table;
    bool baseline = false;
    auto* eval = app.add_subcommand("eval", "cross-validate a saved selection");
    eval->add_option("--selection", selection_path, "audit file written by select")->required();
    eval_flags.opt["data"] = eval->add_option("--data", eval_flags.data, "dataset path (default: as recorded)");
    eval_flags.opt["folds"] = eval->add_option("--folds", eval_flags.folds, "cross-validation folds");
    eval_flags.opt["k"] = eval->add_option("--k", eval_flags.k, "k-NN grid")->delimiter(',');
    eval_flags.opt["seed"] = eval->add_option("--seed", eval_flags.seed, "fold seed");
    eval->add_flag("--baseline", baseline, "add a row using every feature");
    eval->add_option("--table", eval_table, "write rows as CSV");

    RunFlags bench_flags;
    std::vector<std::size_t> group_sizes;
    std::vector<double> lambdas;
    std::string bench_table;
    auto* bench = app.add_subcommand("bench", "select + eval over a grid of group sizes and lambdas");
    bench_flags.add(bench);
    bench->add_option("--group-sizes", group_sizes, "list of m")->delimiter(',');
    bench->add_option("--lambdas", lambdas, "list of lambda")->delimiter(',');
    bench->add_option("--table", bench_table, "write rows as CSV");

    OracleOptions oracle_opt;
    auto* oracle = app.add_subcommand("oracle", "check structured kernels against dense references");
    oracle->add_option("--instances", oracle_opt.spectral_instances, "spectral instances")->capture_default_str();
    oracle->add_option("--lasso-instances", oracle_opt.lasso_instances, "Lasso instances")->capture_default_str();
    oracle->add_option("--max-samples", oracle_opt.max_samples, "largest n (spectral)")->capture_default_str();
    oracle->add_option("--max-classes", oracle_opt.max_classes, "largest c")->capture_default_str();
    oracle->add_option("--max-features", oracle_opt.max_features, "largest d (spectral)")->capture_default_str();
    oracle->add_option("--lasso-max-samples", oracle_opt.lasso_max_samples, "largest n (Lasso)")->capture_default_str();
    oracle->add_option("--lasso-max-features", oracle_opt.lasso_max_features, "largest p (Lasso)")->capture_default_str();
    oracle->add_option("--seed", oracle_opt.seed, "instance seed")->capture_default_str();
    oracle->add_flag("--inject-fault", oracle_opt.inject_fault, "perturb results (self-test)")->group("");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "ogfs: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (select->parsed()) {
            return cmd_select(select_flags, audit_path, select_table, out);
        }
        if (eval->parsed()) {
            return cmd_eval(selection_path, eval_flags, baseline, eval_table, out);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_flags, group_sizes, lambdas, bench_table, out);
        }
        if (oracle->parsed()) {
            if (oracle_opt.spectral_instances < 1 || oracle_opt.lasso_instances < 1 ||
                oracle_opt.max_samples < 2 || oracle_opt.max_classes < 1 || oracle_opt.max_features < 1 ||
                oracle_opt.lasso_max_samples < 2 || oracle_opt.lasso_max_features < 1) {
                throw InvalidInput("oracle size limits must be positive (samples at least 2)");
            }
            return cmd_oracle(oracle_opt, out);
        }
    } catch (const InvalidInput& e) {
        err << "ogfs: " << e.what() << '\n';
        return kUsageError;
    } catch (const ParseError& e) {
        err << "ogfs: " << e.what() << '\n';
        return kUsageError;
    } catch (const SpecError& e) {
        err << "ogfs: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "ogfs: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}

}  // namespace ogfs::cli
