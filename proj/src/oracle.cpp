#include "ogfs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ogfs/lasso.hpp"
#include "ogfs/random.hpp"
#include "ogfs/spectral.hpp"

namespace ogfs::dense {

Eigen::MatrixXd between_affinity(std::span<const int> labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto n_i = std::count(labels.begin(), labels.end(), labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < n; ++j) {
            const bool same = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
            s(i, j) = same ? 1.0 / static_cast<double>(n) - 1.0 / static_cast<double>(n_i)
                           : 1.0 / static_cast<double>(n);
        }
    }
    return s;
}

Eigen::MatrixXd within_affinity(std::span<const int> labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto n_i = std::count(labels.begin(), labels.end(), labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < n; ++j) {
            const bool same = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
            s(i, j) = same ? 1.0 / static_cast<double>(n_i) : 0.0;
        }
    }
    return s;
}

Eigen::MatrixXd laplacian(const Eigen::MatrixXd& affinity) {
    Eigen::MatrixXd degree = (affinity * Eigen::VectorXd::Ones(affinity.cols())).asDiagonal();
    return degree - affinity;
}

double trace_ratio(const Eigen::MatrixXd& x, std::span<const int> labels,
                   std::span<const std::size_t> selected) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(x.cols(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t k = 0; k < selected.size(); ++k) {
        w(static_cast<Eigen::Index>(selected[k]), static_cast<Eigen::Index>(k)) = 1.0;
    }
    const Eigen::MatrixXd lb = laplacian(between_affinity(labels));
    const Eigen::MatrixXd lw = laplacian(within_affinity(labels));
    // Samples are rows here, so the feature-major X L X' becomes x' L x.
    const double num = (w.transpose() * x.transpose() * lb * x * w).trace();
    const double den = (w.transpose() * x.transpose() * lw * x * w).trace();
    return scatter_ratio(num, den);
}

}  // namespace ogfs::dense

namespace ogfs {

namespace {

struct Instance {
    std::vector<int> labels;
    Eigen::MatrixXd x;
};

std::size_t draw(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(uniform_index(rng, hi - lo + 1));
}

Instance random_instance(Rng& rng, const OracleOptions& o) {
    Instance inst;
    const std::size_t n = draw(rng, 2, std::max<std::size_t>(2, o.max_samples));
    const std::size_t c = draw(rng, 1, std::min(o.max_classes, n));
    const std::size_t d = draw(rng, 1, o.max_features);
    inst.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Every class gets at least one sample; labels are sparse on purpose.
        inst.labels[i] = 3 * static_cast<int>(i < c ? i : uniform_index(rng, c)) + 2;
    }
    shuffle_in_place(std::span<int>(inst.labels), rng);
    inst.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index j = 0; j < inst.x.cols(); ++j) {
        const double offset = 10.0 * (uniform_open(rng) - 0.5);
        const double scale = 0.1 + 3.0 * uniform_open(rng);
        for (Eigen::Index i = 0; i < inst.x.rows(); ++i) {
            inst.x(i, j) = offset + scale * standard_normal(rng);
        }
    }
    return inst;
}

Eigen::VectorXd normal_vector(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = standard_normal(rng);
    }
    return v;
}

Eigen::MatrixXd normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        m.col(j) = normal_vector(rng, rows);
    }
    return m;
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

void spectral_checks(const OracleOptions& o, std::vector<OracleCheck>& out) {
    OracleCheck rows{"affinity_degree_structure", 0, 0.0, 1e-12};
    OracleCheck sb{"between_affinity_apply", 0, 0.0, 1e-10};
    OracleCheck sw{"within_affinity_apply", 0, 0.0, 1e-10};
    OracleCheck between{"between_scatter", 0, 0.0, 1e-9};
    OracleCheck within{"within_scatter", 0, 0.0, 1e-9};
    OracleCheck score{"feature_score", 0, 0.0, 1e-9};
    OracleCheck subset{"subset_trace_ratio", 0, 0.0, 1e-9};
    const double fault = o.inject_fault ? 1e-6 : 0.0;

    Rng rng(o.seed);
    for (std::size_t t = 0; t < o.spectral_instances; ++t) {
        const Instance inst = random_instance(rng, o);
        const auto n = static_cast<Eigen::Index>(inst.labels.size());
        const auto p = ClassPartition::from_labels(inst.labels);
        const Eigen::MatrixXd dense_b = dense::between_affinity(inst.labels);
        const Eigen::MatrixXd dense_w = dense::within_affinity(inst.labels);
        const Eigen::MatrixXd lb = dense::laplacian(dense_b);
        const Eigen::MatrixXd lw = dense::laplacian(dense_w);
        const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);

        // Degree matrices: D_b = 0 and D_w = I.
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        double structural = (dense_b * ones).cwiseAbs().maxCoeff();
        structural = std::max(structural, (dense_w * ones - ones).cwiseAbs().maxCoeff());
        structural = std::max(structural, (lb + dense_b).cwiseAbs().maxCoeff());
        structural = std::max(structural, (lw - (identity - dense_w)).cwiseAbs().maxCoeff());
        rows.max_error = std::max(rows.max_error, structural + fault);
        ++rows.cases;

        const Eigen::VectorXd v = normal_vector(rng, n);
        const auto v_span = std::span<const double>(v.data(), static_cast<std::size_t>(n));
        const auto got_b = affinity_between_apply(v_span, p);
        const auto got_w = affinity_within_apply(v_span, p);
        const Eigen::VectorXd want_b = dense_b * v;
        const Eigen::VectorXd want_w = dense_w * v;
        for (Eigen::Index i = 0; i < n; ++i) {
            sb.max_error = std::max(sb.max_error, std::abs(got_b[static_cast<std::size_t>(i)] + fault - want_b(i)));
            sw.max_error = std::max(sw.max_error, std::abs(got_w[static_cast<std::size_t>(i)] + fault - want_w(i)));
        }
        ++sb.cases;
        ++sw.cases;

        std::vector<FeatureScatter> stats;
        for (Eigen::Index j = 0; j < inst.x.cols(); ++j) {
            const Eigen::VectorXd f = inst.x.col(j);
            const auto s = scatter_stats(std::span<const double>(f.data(), static_cast<std::size_t>(n)), p);
            const double want_between = f.dot(lb * f);
            const double want_within = f.dot(lw * f);
            between.max_error = std::max(between.max_error, rel_err(s.between + fault, want_between));
            within.max_error = std::max(within.max_error, rel_err(s.within + fault, want_within));
            score.max_error = std::max(score.max_error,
                                       rel_err(s.score + fault, scatter_ratio(want_between, want_within)));
            ++between.cases;
            ++within.cases;
            ++score.cases;
            stats.push_back(s);
        }

        std::vector<std::size_t> all(static_cast<std::size_t>(inst.x.cols()));
        std::iota(all.begin(), all.end(), std::size_t{0});
        shuffle_in_place(std::span<std::size_t>(all), rng);
        const std::size_t size = draw(rng, 1, all.size());
        std::vector<std::size_t> chosen(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
        std::vector<FeatureScatter> chosen_stats;
        for (std::size_t j : chosen) {
            chosen_stats.push_back(stats[j]);
        }
        const double got = subset_criterion(SubsetTraceState::from_scatters(chosen_stats));
        const double want = dense::trace_ratio(inst.x, inst.labels, chosen);
        subset.max_error = std::max(subset.max_error, rel_err(got + fault, want));
        ++subset.cases;
    }
    for (auto* c : {&rows, &sb, &sw, &between, &within, &score, &subset}) {
        c->passed = c->max_error <= c->tolerance;
        out.push_back(*c);
    }
}

void lasso_checks(const OracleOptions& o, std::vector<OracleCheck>& out) {
    OracleCheck kkt{"lasso_kkt_certificate", 0, 0.0, 1e-6};
    OracleCheck closed{"lasso_orthonormal_closed_form", 0, 0.0, 1e-8};
    OracleCheck zero{"lasso_zero_above_lambda_max", 0, 0.0, 0.0};
    const double fault = o.inject_fault ? 1e-5 : 0.0;
    const double lambdas[] = {0.01, 0.1, 0.5};

    Rng rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t t = 0; t < o.lasso_instances; ++t) {
        const auto n = static_cast<Eigen::Index>(draw(rng, 5, std::max<std::size_t>(5, o.lasso_max_samples)));
        const auto p = static_cast<Eigen::Index>(draw(rng, 1, o.lasso_max_features));
        const double lambda = lambdas[t % 3];
        const Eigen::MatrixXd z = normal_matrix(rng, n, p);
        const Eigen::VectorXd y = normal_vector(rng, n);

        // KKT on the centered, unit-norm problem the solver works on, rebuilt
        // here independently.
        LassoConfig cfg;
        cfg.lambda = lambda;
        const LassoModel model = lasso_fit(z, y, cfg);
        Eigen::MatrixXd zw = z.rowwise() - z.colwise().mean();
        const Eigen::VectorXd norms = zw.colwise().norm().transpose();
        for (Eigen::Index j = 0; j < p; ++j) {
            zw.col(j) /= norms(j);
        }
        const Eigen::VectorXd yw = y.array() - y.mean();
        const Eigen::VectorXd bw = model.beta.cwiseProduct(norms);
        double v = kkt_violation(zw, yw, bw, lambda);
        if (!model.converged) {
            v = std::max(v, 1.0);
        }
        kkt.max_error = std::max(kkt.max_error, v + fault);
        ++kkt.cases;

        // Orthonormal design, raw problem: beta_j = S(q_j'y, lambda).
        const Eigen::Index q_rows = std::max(n, p);
        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(normal_matrix(rng, q_rows, p))
                                      .householderQ() *
                                  Eigen::MatrixXd::Identity(q_rows, p);
        const Eigen::VectorXd yq = normal_vector(rng, q_rows);
        LassoConfig raw;
        raw.lambda = lambda;
        raw.center = false;
        raw.standardize = false;
        const LassoModel orth = lasso_fit(q, yq, raw);
        for (Eigen::Index j = 0; j < p; ++j) {
            const double want = soft_threshold(q.col(j).dot(yq), lambda);
            closed.max_error = std::max(closed.max_error, std::abs(orth.beta(j) + fault - want));
        }
        ++closed.cases;

        for (double factor : {1.0, 1.5}) {
            LassoConfig big = cfg;
            big.lambda = factor * lambda_max(z, y, cfg);
            const LassoModel m = lasso_fit(z, y, big);
            zero.max_error = std::max(zero.max_error, m.beta.cwiseAbs().maxCoeff() + fault);
            ++zero.cases;
        }
    }
    for (auto* c : {&kkt, &closed, &zero}) {
        c->passed = c->max_error <= c->tolerance;
        out.push_back(*c);
    }
}

}  // namespace

std::vector<OracleCheck> run_oracle_suite(const OracleOptions& options) {
    std::vector<OracleCheck> out;
    spectral_checks(options, out);
    lasso_checks(options, out);
    return out;
}

}  // namespace ogfs
