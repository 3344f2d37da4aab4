#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ogfs/eval.hpp"
#include "ogfs/run_config.hpp"

namespace ogfs::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// Runs a subcommand; `args` excludes the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SelectionRun {
    GroupLayout layout;
    SelectionResult result;
    BestOfReport evaluation;
    Json audit;
};

/// select without the I/O: runs the stream and evaluates the final subset.
SelectionRun run_selection(const RunConfig& cfg, const LabeledDataset& data);

/// Serialized audit: two runs with the same config and data produce the same
/// bytes.
std::string dump_audit(const Json& audit);

}  // namespace ogfs::cli
