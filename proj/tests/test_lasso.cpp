#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "ogfs/error.hpp"
#include "ogfs/lasso.hpp"
#include "ogfs/random.hpp"

using namespace ogfs;

namespace {

LassoConfig raw_config(double lambda) {
    LassoConfig c;
    c.lambda = lambda;
    c.center = false;
    c.standardize = false;
    return c;
}

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
        for (Eigen::Index i = 0; i < r; ++i) {
            m(i, j) = standard_normal(rng);
        }
    }
    return m;
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n) { return random_matrix(rng, n, 1).col(0); }

}  // namespace

TEST_CASE("soft_threshold") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-1.0, 1.0) == 0.0);
}

TEST_CASE("lasso_fit on the identity design") {
    const Eigen::MatrixXd z = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::VectorXd y = (Eigen::VectorXd(2) << 3.0, 0.5).finished();

    SUBCASE("soft-threshold closed form") {
        const auto m = lasso_fit(z, y, raw_config(1.0));
        CHECK(m.converged);
        CHECK(m.beta(0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(m.beta(1) == 0.0);
        CHECK(support(m) == std::vector<std::size_t>{0});
    }
    SUBCASE("no penalty gives least squares") {
        const auto m = lasso_fit(z, y, raw_config(0.0));
        CHECK(m.beta(0) == doctest::Approx(3.0));
        CHECK(m.beta(1) == doctest::Approx(0.5));
    }
    SUBCASE("lambda at lambda_max zeroes everything") {
        CHECK(lambda_max(z, y, raw_config(0.0)) == 3.0);
        for (double lambda : {3.0, 3.5, 100.0}) {
            const auto m = lasso_fit(z, y, raw_config(lambda));
            CHECK(m.beta.cwiseAbs().maxCoeff() == 0.0);
            CHECK(support(m).empty());
        }
    }
}

TEST_CASE("lambda_max") {
    const Eigen::MatrixXd z = Eigen::MatrixXd::Identity(2, 2);
    CHECK(lambda_max(z, Eigen::VectorXd::Zero(2), raw_config(0.1)) == 0.0);

    // A constant column is zero once centered.
    Eigen::MatrixXd c(3, 1);
    c << 4.0, 4.0, 4.0;
    const Eigen::VectorXd y = (Eigen::VectorXd(3) << 1.0, 2.0, 6.0).finished();
    LassoConfig centered;
    CHECK(lambda_max(c, y, centered) == 0.0);
    const auto m = lasso_fit(c, y, centered);
    CHECK(m.beta(0) == 0.0);
    CHECK(m.converged);

    Eigen::MatrixXd two(3, 2);
    two << 4.0, 1.0, 4.0, 0.0, 4.0, -1.0;
    // centered y = (-2, -1, 3); unit column 2 = (1, 0, -1)/sqrt 2
    CHECK(lambda_max(two, y, centered) == doctest::Approx(5.0 / std::sqrt(2.0)));
}

TEST_CASE("support threshold") {
    LassoModel m;
    m.beta = (Eigen::VectorXd(2) << 2.0, 0.0).finished();
    CHECK(support(m) == std::vector<std::size_t>{0});
    m.beta = Eigen::VectorXd::Zero(2);
    CHECK(support(m).empty());
    m.beta = (Eigen::VectorXd(2) << 0.9, 1e-13).finished();
    CHECK(support(m) == std::vector<std::size_t>{0});
}

TEST_CASE("lasso input errors and budget") {
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(2);
    LassoConfig cfg;
    z(0, 1) = NAN;
    CHECK_THROWS_AS(lasso_fit(z, y, cfg), InvalidInput);
    CHECK_THROWS_AS(lasso_fit(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(3), cfg),
                    InvalidInput);
    CHECK_THROWS_AS(lasso_fit(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0), cfg), InvalidInput);
    cfg.lambda = -1.0;
    CHECK_THROWS_AS(lasso_fit(Eigen::MatrixXd::Identity(2, 2), y, cfg), InvalidInput);

    // Highly correlated columns need many sweeps; one is not enough.
    Rng rng(3);
    Eigen::MatrixXd corr = random_matrix(rng, 20, 1).replicate(1, 3);
    corr += 0.01 * random_matrix(rng, 20, 3);
    LassoConfig tight;
    tight.lambda = 0.01;
    tight.max_sweeps = 1;
    const auto m = lasso_fit(corr, random_vector(rng, 20), tight);
    CHECK_FALSE(m.converged);
    CHECK(m.sweeps_used == 1);
}

TEST_CASE("objective is non-increasing across sweeps") {
    Rng rng(11);
    for (int t = 0; t < 30; ++t) {
        const auto n = static_cast<Eigen::Index>(5 + uniform_index(rng, 26));
        const auto p = static_cast<Eigen::Index>(1 + uniform_index(rng, 20));
        LassoConfig cfg;
        cfg.lambda = std::array{0.01, 0.1, 0.5}[static_cast<std::size_t>(t % 3)];
        cfg.track_objective = true;
        cfg.center = t % 2 == 0;
        cfg.standardize = t % 4 < 2;
        const auto m = lasso_fit(random_matrix(rng, n, p), random_vector(rng, n), cfg);
        REQUIRE(!m.objective_history.empty());
        for (std::size_t k = 1; k < m.objective_history.size(); ++k) {
            CHECK(m.objective_history[k] <= m.objective_history[k - 1] + 1e-12);
        }
    }
}

TEST_CASE("KKT certificate at convergence") {
    Rng rng(12);
    for (int t = 0; t < 60; ++t) {
        const auto n = static_cast<Eigen::Index>(5 + uniform_index(rng, 26));
        const auto p = static_cast<Eigen::Index>(1 + uniform_index(rng, 20));
        const double lambda = std::array{0.01, 0.1, 0.5}[static_cast<std::size_t>(t % 3)];
        const Eigen::MatrixXd z = random_matrix(rng, n, p);
        const Eigen::VectorXd y = random_vector(rng, n);

        // Raw problem: certificate checked directly.
        const auto raw = lasso_fit(z, y, raw_config(lambda));
        REQUIRE(raw.converged);
        const double scale = std::max(1.0, (z.transpose() * y).cwiseAbs().maxCoeff());
        CHECK(kkt_violation(z, y, raw.beta, lambda) <= 10 * 1e-7 * scale);
        CHECK(std::abs(kkt_violation(z, y, raw.beta, lambda) - raw.kkt_residual) <= 1e-9);

        // Default config: rebuild the centered unit-norm problem by hand.
        LassoConfig cfg;
        cfg.lambda = lambda;
        const auto m = lasso_fit(z, y, cfg);
        REQUIRE(m.converged);
        Eigen::MatrixXd zw = z.rowwise() - z.colwise().mean();
        const Eigen::VectorXd norms = zw.colwise().norm().transpose();
        zw = zw * norms.cwiseInverse().asDiagonal();
        const Eigen::VectorXd yw = y.array() - y.mean();
        CHECK(kkt_violation(zw, yw, m.beta.cwiseProduct(norms), lambda) <= 1e-6);
    }
}

TEST_CASE("orthonormal designs match the closed form") {
    Rng rng(13);
    for (int t = 0; t < 30; ++t) {
        const auto n = static_cast<Eigen::Index>(20 + uniform_index(rng, 11));
        const auto p = static_cast<Eigen::Index>(1 + uniform_index(rng, 20));
        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(rng, n, p))
                                      .householderQ() *
                                  Eigen::MatrixXd::Identity(n, p);
        const Eigen::VectorXd y = 2.0 * random_vector(rng, n);
        const double lambda = 0.05 + uniform_open(rng);
        const auto m = lasso_fit(q, y, raw_config(lambda));
        for (Eigen::Index j = 0; j < p; ++j) {
            CHECK(std::abs(m.beta(j) - soft_threshold(q.col(j).dot(y), lambda)) <= 1e-8);
        }
    }
}

TEST_CASE("solution does not depend on column order") {
    Rng rng(14);
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index n = 30;
        const auto p = static_cast<Eigen::Index>(2 + uniform_index(rng, 12));
        const Eigen::MatrixXd z = random_matrix(rng, n, p);
        const Eigen::VectorXd y = z.col(0) - 0.5 * z.col(1) + 0.3 * random_vector(rng, n);
        LassoConfig cfg;
        cfg.lambda = 0.1;
        cfg.tol = 1e-10;
        const auto base = lasso_fit(z, y, cfg);

        std::vector<Eigen::Index> perm(static_cast<std::size_t>(p));
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        shuffle_in_place(std::span<Eigen::Index>(perm), rng);
        Eigen::MatrixXd zp(n, p);
        for (Eigen::Index k = 0; k < p; ++k) {
            zp.col(k) = z.col(perm[static_cast<std::size_t>(k)]);
        }
        const auto permuted = lasso_fit(zp, y, cfg);
        for (Eigen::Index k = 0; k < p; ++k) {
            CHECK(std::abs(permuted.beta(k) - base.beta(perm[static_cast<std::size_t>(k)])) <= 1e-6);
        }
    }
}
