// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "ogfs/cli.hpp"
#include "ogfs/io.hpp"
#include "ogfs/oracle.hpp"
#include "ogfs/synthetic.hpp"

namespace fs = std::filesystem;
using namespace ogfs;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << "  [" << id << "] " << title << ": " << detail << std::endl;
    failures += pass ? 0 : 1;
}

// Every benchmark run's selected count against its full dimension.
struct CompactnessLog {
    std::size_t runs = 0;
    std::size_t violations = 0;
    void record(std::size_t selected, std::size_t d) {
        ++runs;
        violations += selected > d ? 1 : 0;
    }
} compactness;

void write_dataset_csv(const LabeledDataset& data, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    for (std::size_t j = 0; j < data.cols(); ++j) {
        out << data.feature_names[j] << ',';
    }
    out << "y\n";
    char buf[40];
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,", data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            out << buf;
        }
        out << data.labels[i] << '\n';
    }
}

SyntheticData recovery_set(std::uint64_t seed) {
    SyntheticSpec s;
    s.samples = 200;
    s.informative = 5;
    s.noise = 45;
    s.separation = 2.0;
    s.seed = seed;
    return make_synthetic(s);
}

SyntheticData microarray_set() {
    SyntheticSpec s;
    s.samples = 80;
    s.informative = 10;
    s.noise = 4990;
    s.separation = 2.0;
    s.seed = 2024;
    return make_synthetic(s);
}

constexpr double kSyntheticLambda = 0.5;
constexpr std::size_t kGroupSize = 8;
const std::vector<double> kLambdaSweep{0.01, 0.05, 0.1, 0.5};

void oracle_criteria() {
    const auto t0 = Clock::now();
    OracleOptions opt;
    opt.spectral_instances = 200;
    opt.lasso_instances = 100;
    const auto checks = run_oracle_suite(opt);
    const double secs = seconds_since(t0);

    auto summarize = [&](bool lasso) {
        bool pass = true;
        std::size_t cases = static_cast<std::size_t>(-1);  // instances: the smallest per-check count
        std::string failed;
        for (const auto& c : checks) {
            if ((c.name.rfind("lasso", 0) == 0) != lasso) {
                continue;
            }
            pass = pass && c.passed;
            cases = std::min(cases, c.cases);
            if (!c.passed) {
                failed += " " + c.name;
            }
        }
        return std::make_tuple(pass, cases, failed);
    };
    // The suite runs both halves together; its total time bounds each.
    {
        auto [pass, cases, failed] = summarize(false);
        report(1, pass && cases >= 200 && secs < 10.0, "spectral oracle suite",
               std::to_string(cases) + " instances, dense vs structured within tolerance" +
                   (failed.empty() ? "" : ", failed:" + failed) + ", " + fmt("%.2f s", secs));
    }
    {
        auto [pass, cases, failed] = summarize(true);
        report(2, pass && cases >= 100 && secs < 10.0, "Lasso suite",
               std::to_string(cases) + " instances, KKT, closed form and zero-above-lambda_max" +
                   (failed.empty() ? "" : ", failed:" + failed) + ", " + fmt("%.2f s", secs));
    }
}

void synthetic_recovery() {
    const auto t0 = Clock::now();
    int good = 0;
    std::string per_seed;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto syn = recovery_set(seed);
        OgfsOptions o;
        o.lasso.lambda = kSyntheticLambda;
        const auto r = ogfs_run(syn.data, partition_into_groups(syn.data.cols(), kGroupSize), o);
        compactness.record(r.selected.size(), syn.data.cols());
        const std::set<std::size_t> truth(syn.informative.begin(), syn.informative.end());
        std::size_t hits = 0;
        for (std::size_t j : r.selected) {
            hits += truth.count(j);
        }
        good += hits >= 3 && r.selected.size() <= 20 ? 1 : 0;
        per_seed += " " + std::to_string(hits) + "/" + std::to_string(r.selected.size());
    }
    const double secs = seconds_since(t0);
    report(3, good >= 8 && secs < 30.0, "synthetic recovery",
           std::to_string(good) + "/10 seeds with >=3 informative and <=20 selected (informative/selected:" +
               per_seed + "), lambda " + fmt("%g", kSyntheticLambda) + ", " + fmt("%.2f s", secs));
}

struct SweepOutcome {
    double best_accuracy = 0.0;
    std::size_t best_count = 0;
    double best_lambda = 0.0;
    std::size_t best_k = 0;
    std::size_t max_count = 0;
    double secs = 0.0;
};

SweepOutcome lambda_sweep(const std::string& file, const std::string& label) {
    const auto t0 = Clock::now();
    RunConfig cfg;
    cfg.data_path = file;
    cfg.schema.label_column = label;
    cfg.group_size = kGroupSize;
    cfg.folds = 10;
    cfg.k_grid = {1, 3, 5};
    cfg.validate();
    const auto data = load_dataset(cfg);
    SweepOutcome s;
    for (double lambda : kLambdaSweep) {
        cfg.options.lasso.lambda = lambda;
        const auto run = cli::run_selection(cfg, data);
        const auto n = run.result.selected.size();
        compactness.record(n, data.cols());
        s.max_count = std::max(s.max_count, n);
        if (run.evaluation.best.accuracy > s.best_accuracy) {
            s.best_accuracy = run.evaluation.best.accuracy;
            s.best_count = n;
            s.best_lambda = lambda;
            s.best_k = run.evaluation.best.k_nn;
        }
    }
    s.secs = seconds_since(t0);
    return s;
}

std::string sweep_detail(const SweepOutcome& s) {
    return "best accuracy " + fmt("%.4f", s.best_accuracy) + " with " + std::to_string(s.best_count) +
           " features (lambda " + fmt("%g", s.best_lambda) + ", k=" + std::to_string(s.best_k) +
           "), largest selection " + std::to_string(s.max_count) + ", " + fmt("%.2f s", s.secs);
}

void uci_criteria() {
    const auto wdbc = lambda_sweep(OGFS_DATA_DIR "/wdbc.csv", "diagnosis");
    report(4, wdbc.max_count <= 31 && wdbc.best_accuracy >= 0.90 && wdbc.secs < 60.0, "Wdbc sweep",
           sweep_detail(wdbc));
    const auto iono = lambda_sweep(OGFS_DATA_DIR "/ionosphere.csv", "class");
    report(5,
           iono.best_accuracy >= 0.85 && iono.best_count >= 1 && iono.best_count <= 34 && iono.secs < 60.0,
           "Ionosphere sweep", sweep_detail(iono));
}

void microarray_compactness() {
    const auto t0 = Clock::now();
    const auto syn = microarray_set();
    OgfsOptions o;
    o.lasso.lambda = kSyntheticLambda;
    const auto r = ogfs_run(syn.data, partition_into_groups(syn.data.cols(), kGroupSize), o);
    compactness.record(r.selected.size(), syn.data.cols());
    const double secs = seconds_since(t0);
    report(6, compactness.violations == 0 && r.selected.size() <= 200 && secs < 120.0, "compactness",
           std::to_string(compactness.runs) + " runs with selected <= d; d=5000 n=80 selects " +
               std::to_string(r.selected.size()) + ", " + fmt("%.2f s", secs));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism() {
    const auto t0 = Clock::now();
    const fs::path dir = fs::temp_directory_path() / ("ogfs_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    struct Case {
        std::string file, label;
        std::vector<double> lambdas;
    };
    std::vector<Case> cases{{OGFS_DATA_DIR "/wdbc.csv", "diagnosis", kLambdaSweep},
                            {OGFS_DATA_DIR "/ionosphere.csv", "class", kLambdaSweep}};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto path = dir / ("recovery_" + std::to_string(seed) + ".csv");
        write_dataset_csv(recovery_set(seed).data, path);
        cases.push_back({path.string(), "y", {kSyntheticLambda}});
    }
    const auto micro = dir / "microarray.csv";
    write_dataset_csv(microarray_set().data, micro);
    cases.push_back({micro.string(), "y", {kSyntheticLambda}});

    std::size_t runs = 0, identical = 0;
    std::string problem;
    for (const auto& c : cases) {
        for (double lambda : c.lambdas) {
            std::vector<std::string> args{"select", "--data", c.file, "--label", c.label, "--group-size",
                                          std::to_string(kGroupSize), "--lambda", fmt("%g", lambda),
                                          "--seed", "42", "--audit"};
            std::ostringstream sink;
            auto a = args, b = args;
            a.push_back((dir / "first.json").string());
            b.push_back((dir / "second.json").string());
            const int ca = cli::run(a, sink, sink);
            const int cb = cli::run(b, sink, sink);
            ++runs;
            if (ca == 0 && cb == 0 && slurp(dir / "first.json") == slurp(dir / "second.json")) {
                ++identical;
            } else if (problem.empty()) {
                problem = ", first mismatch: " + fs::path(c.file).filename().string() + " lambda " + fmt("%g", lambda);
            }
        }
    }
    fs::remove_all(dir);
    report(7, runs > 0 && identical == runs, "determinism",
           std::to_string(identical) + "/" + std::to_string(runs) + " select commands gave byte-identical audits" +
               problem + ", " + fmt("%.2f s", seconds_since(t0)));
}

void intra_scaling() {
    // Each group arrives once, as in a real stream: one pass over 6400
    // distinct columns (10 MB, beyond L2) per timing. Re-timing one small
    // group would keep its columns cache-hot and flatter small m.
    SyntheticSpec s;
    s.samples = 200;
    s.informative = 5;
    s.noise = 6395;
    s.seed = 99;
    const auto syn = make_synthetic(s);
    const auto partition = ClassPartition::from_labels(syn.data.labels);
    SubsetTraceState global;
    for (std::size_t j = 0; j < 10; ++j) {
        global.add(scatter_stats(syn.data.column(j), partition));
    }
    const SelectorConfig cfg;

    auto per_group = [&](std::size_t m) {
        const auto layout = partition_into_groups(syn.data.cols(), m);
        double best = 1e300;
        std::size_t kept = 0;
        for (int trial = 0; trial < 7; ++trial) {
            const auto t0 = Clock::now();
            for (const auto& g : layout.groups) {
                kept += intra_group_select(g, global, syn.data, partition, cfg).accepted.size();
            }
            best = std::min(best, seconds_since(t0) / static_cast<double>(layout.groups.size()));
        }
        return std::make_pair(best, kept);
    };
    const double t50 = per_group(50).first, t100 = per_group(100).first, t200 = per_group(200).first;
    const double r1 = t100 / t50, r2 = t200 / t100;
    report(8, r1 <= 2.5 && r2 <= 2.5, "intra-group scaling",
           "m=50/100/200 take " + fmt("%.1f", t50 * 1e6) + "/" + fmt("%.1f", t100 * 1e6) + "/" +
               fmt("%.1f", t200 * 1e6) + " us per group, doubling ratios " + fmt("%.2f", r1) + " and " +
               fmt("%.2f", r2));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> steps{oracle_criteria, synthetic_recovery, uci_criteria,
                                                    microarray_compactness, determinism, intra_scaling};
    for (const auto& step : steps) {
        try {
            step();
        } catch (const std::exception& e) {
            std::cout << "FAIL  error: " << e.what() << std::endl;
            ++failures;
        }
    }
    std::cout << (failures == 0 ? "acceptance: all criteria passed" : "acceptance: " + std::to_string(failures) + " failing")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
