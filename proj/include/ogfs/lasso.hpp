#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ogfs {

struct LassoConfig {
    double lambda = 0.1;
    double tol = 1e-7;  // max absolute coefficient change per sweep
    std::size_t max_sweeps = 10000;
    bool center = true;
    bool standardize = true;
    bool track_objective = false;

    void validate() const;
};

struct LassoModel {
    Eigen::VectorXd beta;  // on the input scale
    std::size_t sweeps_used = 0;
    bool converged = false;
    /// Max KKT violation of the working (centered/standardized) problem.
    double kkt_residual = 0.0;
    /// Objective after each sweep, working scale; filled when track_objective.
    std::vector<double> objective_history;
};

/// Soft-thresholding operator sign(z) max(|z| - t, 0).
double soft_threshold(double z, double t);

/// Minimizes (1/2)||y - Z b||^2 + lambda ||b||_1 by cyclic coordinate descent.
/// With `center`, y and the columns are mean-centered first (an implicit
/// intercept); with `standardize`, columns are scaled to unit 2-norm and the
/// coefficients mapped back afterwards. Zero-norm columns get beta = 0.
///
/// Throws InvalidInput on empty or non-finite input. Hitting max_sweeps is
/// not an error; the model comes back with converged = false.
LassoModel lasso_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                     const LassoConfig& cfg);

/// ||Z'y||_inf on the working scale: the smallest lambda whose solution is 0.
double lambda_max(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                  const LassoConfig& cfg);

/// Indices j with |beta_j| > zero_tol, ascending.
std::vector<std::size_t> support(const LassoModel& model, double zero_tol = 1e-10);

/// Max KKT violation of beta for (1/2)||y - Z b||^2 + lambda ||b||_1, on the
/// problem exactly as given (no centering or scaling).
double kkt_violation(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                     const Eigen::VectorXd& beta, double lambda);

/// Value of (1/2)||y - Z b||^2 + lambda ||b||_1.
double lasso_objective(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                       const Eigen::VectorXd& beta, double lambda);

}  // namespace ogfs
