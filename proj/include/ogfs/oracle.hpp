#pragma once

// Dense reference implementations and the randomized equivalence checks run
// by `ogfs oracle`. The dense side materializes the n x n affinity matrices
// and the indicator selector; it shares no code with the structured path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ogfs::dense {

Eigen::MatrixXd between_affinity(std::span<const int> labels);
Eigen::MatrixXd within_affinity(std::span<const int> labels);

/// diag(S 1) - S
Eigen::MatrixXd laplacian(const Eigen::MatrixXd& affinity);

/// Trace ratio of the selected columns of `x` (n x d, samples as rows),
/// built with an explicit 0/1 selector matrix.
double trace_ratio(const Eigen::MatrixXd& x, std::span<const int> labels,
                   std::span<const std::size_t> selected);

}  // namespace ogfs::dense

namespace ogfs {

struct OracleOptions {
    std::size_t spectral_instances = 200;
    std::size_t max_samples = 40;
    std::size_t max_classes = 5;
    std::size_t max_features = 20;
    std::size_t lasso_instances = 100;
    std::size_t lasso_max_samples = 30;
    std::size_t lasso_max_features = 20;
    std::uint64_t seed = 1;
    /// Perturbs the structured results so every check must fail.
    bool inject_fault = false;
};

struct OracleCheck {
    std::string name;
    std::size_t cases = 0;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

std::vector<OracleCheck> run_oracle_suite(const OracleOptions& options);

}  // namespace ogfs
