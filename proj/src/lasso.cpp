#include "ogfs/lasso.hpp"

#include <algorithm>
#include <cmath>

#include "ogfs/error.hpp"

namespace ogfs {

namespace {

constexpr std::size_t kPolishInterval = 25;

struct WorkingProblem {
    Eigen::MatrixXd z;
    Eigen::VectorXd y;
    Eigen::VectorXd col_scale;  // divide working beta by this to get input-scale beta
    Eigen::VectorXd col_sqnorm;
    std::vector<bool> live;
};

void check_inputs(const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
    if (design.rows() < 1 || design.cols() < 1) {
        throw InvalidInput("lasso design must be at least 1x1");
    }
    if (design.rows() != target.size()) {
        throw InvalidInput("lasso design has " + std::to_string(design.rows()) +
                           " rows but target has " + std::to_string(target.size()));
    }
    if (!design.allFinite() || !target.allFinite()) {
        throw InvalidInput("lasso input contains non-finite values");
    }
}

WorkingProblem prepare(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                       const LassoConfig& cfg) {
    check_inputs(design, target);
    WorkingProblem w;
    w.z = design;
    w.y = target;
    const auto p = design.cols();
    if (cfg.center) {
        w.z.rowwise() -= w.z.colwise().mean();
        w.y.array() -= w.y.mean();
    }
    w.col_scale = Eigen::VectorXd::Ones(p);
    w.col_sqnorm.resize(p);
    w.live.assign(static_cast<std::size_t>(p), true);
    const double rows = static_cast<double>(design.rows());
    for (Eigen::Index j = 0; j < p; ++j) {
        const double norm = w.z.col(j).norm();
        // A centered constant column is zero up to rounding of its mean.
        const double floor = 1e-12 * std::sqrt(rows) * std::max(1.0, design.col(j).cwiseAbs().maxCoeff());
        if (!(norm > floor)) {
            w.z.col(j).setZero();
            w.col_sqnorm(j) = 0.0;
            w.live[static_cast<std::size_t>(j)] = false;
            continue;
        }
        if (cfg.standardize) {
            w.z.col(j) /= norm;
            w.col_scale(j) = norm;
            w.col_sqnorm(j) = 1.0;
        } else {
            w.col_sqnorm(j) = norm * norm;
        }
    }
    return w;
}

double working_kkt(const WorkingProblem& w, const Eigen::VectorXd& beta, double lambda) {
    const Eigen::VectorXd residual = w.y - w.z * beta;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (!w.live[static_cast<std::size_t>(j)]) {
            continue;
        }
        const double g = -w.z.col(j).dot(residual);
        const double v = beta(j) == 0.0 ? std::max(0.0, std::abs(g) - lambda)
                                         : std::abs(g + std::copysign(lambda, beta(j)));
        worst = std::max(worst, v);
    }
    return worst;
}

// With the active set and signs fixed, the optimum solves
// Z_A'Z_A b_A = Z_A'y - lambda sign(b_A). Returns the candidate only if it
// keeps the signs and passes the KKT check, so a wrong guess costs nothing.
bool polish(const WorkingProblem& w, Eigen::VectorXd& beta, double lambda, double kkt_target) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta(j) != 0.0) {
            active.push_back(j);
        }
    }
    if (active.empty() || active.size() > static_cast<std::size_t>(w.z.rows())) {
        return false;
    }
    const auto k = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd za(w.z.rows(), k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        za.col(a) = w.z.col(active[static_cast<std::size_t>(a)]);
    }
    const Eigen::VectorXd signs = Eigen::VectorXd::NullaryExpr(k, [&](Eigen::Index a) {
        return std::copysign(1.0, beta(active[static_cast<std::size_t>(a)]));
    });
    rhs = za.transpose() * w.y - lambda * signs;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(za.transpose() * za);
    if (ldlt.info() != Eigen::Success) {
        return false;
    }
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    if (!sol.allFinite()) {
        return false;
    }
    Eigen::VectorXd candidate = Eigen::VectorXd::Zero(beta.size());
    for (Eigen::Index a = 0; a < k; ++a) {
        if (sol(a) * signs(a) <= 0.0) {
            return false;
        }
        candidate(active[static_cast<std::size_t>(a)]) = sol(a);
    }
    if (working_kkt(w, candidate, lambda) > kkt_target) {
        return false;
    }
    beta = candidate;
    return true;
}

}  // namespace

void LassoConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidInput("lambda must be a finite non-negative number");
    }
    if (!(tol > 0.0)) {
        throw InvalidInput("tol must be positive");
    }
    if (max_sweeps < 1) {
        throw InvalidInput("max_sweeps must be at least 1");
    }
}

double soft_threshold(double z, double t) {
    if (z > t) {
        return z - t;
    }
    if (z < -t) {
        return z + t;
    }
    return 0.0;
}

LassoModel lasso_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                     const LassoConfig& cfg) {
    cfg.validate();
    const WorkingProblem w = prepare(design, target, cfg);
    const auto p = w.z.cols();
    const double lambda = cfg.lambda;

    double corr_scale = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        corr_scale = std::max(corr_scale, std::abs(w.z.col(j).dot(w.y)));
    }
    const double kkt_target = cfg.tol * std::max(1.0, corr_scale);

    LassoModel model;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd residual = w.y;
    for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (!w.live[static_cast<std::size_t>(j)]) {
                continue;
            }
            const double nsq = w.col_sqnorm(j);
            const double partial = w.z.col(j).dot(residual) + beta(j) * nsq;
            const double updated = soft_threshold(partial, lambda) / nsq;
            const double delta = updated - beta(j);
            if (delta != 0.0) {
                residual.noalias() -= delta * w.z.col(j);
                beta(j) = updated;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        model.sweeps_used = sweep + 1;
        if (cfg.track_objective) {
            model.objective_history.push_back(0.5 * residual.squaredNorm() +
                                              lambda * beta.lpNorm<1>());
        }
        if (max_change < cfg.tol) {
            // Refresh the residual to shed accumulated update error.
            residual = w.y - w.z * beta;
            if (working_kkt(w, beta, lambda) <= kkt_target) {
                model.converged = true;
                break;
            }
        }
        // Ill-conditioned designs converge slowly once the support is
        // settled; try finishing exactly.
        if ((max_change < cfg.tol || model.sweeps_used % kPolishInterval == 0) &&
            polish(w, beta, lambda, kkt_target)) {
            residual = w.y - w.z * beta;
            if (cfg.track_objective) {
                model.objective_history.push_back(0.5 * residual.squaredNorm() +
                                                  lambda * beta.lpNorm<1>());
            }
            model.converged = true;
            break;
        }
    }
    model.kkt_residual = working_kkt(w, beta, lambda);

    model.beta = beta;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (beta(j) != 0.0) {
            model.beta(j) = beta(j) / w.col_scale(j);
        }
    }
    return model;
}

double lambda_max(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                  const LassoConfig& cfg) {
    const WorkingProblem w = prepare(design, target, cfg);
    double out = 0.0;
    for (Eigen::Index j = 0; j < w.z.cols(); ++j) {
        if (w.live[static_cast<std::size_t>(j)]) {
            out = std::max(out, std::abs(w.z.col(j).dot(w.y)));
        }
    }
    return out;
}

std::vector<std::size_t> support(const LassoModel& model, double zero_tol) {
    std::vector<std::size_t> out;
    for (Eigen::Index j = 0; j < model.beta.size(); ++j) {
        if (std::abs(model.beta(j)) > zero_tol) {
            out.push_back(static_cast<std::size_t>(j));
        }
    }
    return out;
}

double kkt_violation(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                     const Eigen::VectorXd& beta, double lambda) {
    const Eigen::VectorXd grad = design.transpose() * (design * beta - target);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double v = beta(j) == 0.0 ? std::max(0.0, std::abs(grad(j)) - lambda)
                                        : std::abs(grad(j) + std::copysign(lambda, beta(j)));
        worst = std::max(worst, v);
    }
    return worst;
}

double lasso_objective(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                       const Eigen::VectorXd& beta, double lambda) {
    return 0.5 * (target - design * beta).squaredNorm() + lambda * beta.lpNorm<1>();
}

}  // namespace ogfs
