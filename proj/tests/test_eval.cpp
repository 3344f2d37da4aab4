#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ogfs/error.hpp"
#include "ogfs/eval.hpp"
#include "ogfs/random.hpp"

using namespace ogfs;

namespace {

Eigen::MatrixXd rows_of(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

LabeledDataset gaussian_data(Rng& rng, std::size_t n, std::size_t d, double shift) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = i % 2 == 0 ? 1 : 2;
        for (std::size_t j = 0; j < d; ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                standard_normal(rng) + (j == 0 && y[i] == 2 ? shift : 0.0) + 3.0 * static_cast<double>(j);
        }
    }
    return make_dataset(std::move(x), std::span<const int>(y));
}

// Plain loops: population z-score on training rows, 1..k NN with
// (distance, index) ordering, smallest-label vote ties.
std::vector<double> brute_force_cv(const LabeledDataset& data, const std::vector<std::size_t>& cols,
                                   const std::vector<std::size_t>& fold_of, std::size_t folds,
                                   std::size_t k) {
    std::vector<double> out;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> tr, te;
        for (std::size_t i = 0; i < data.rows(); ++i) {
            (fold_of[i] == f ? te : tr).push_back(i);
        }
        std::vector<double> mu(cols.size(), 0.0), sd(cols.size(), 0.0);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            for (std::size_t i : tr) {
                mu[c] += data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[c]));
            }
            mu[c] /= static_cast<double>(tr.size());
            for (std::size_t i : tr) {
                const double v =
                    data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[c])) - mu[c];
                sd[c] += v * v;
            }
            sd[c] = std::sqrt(sd[c] / static_cast<double>(tr.size()));
            if (sd[c] == 0.0) {
                sd[c] = 1.0;
            }
        }
        auto z = [&](std::size_t i, std::size_t c) {
            return (data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[c])) - mu[c]) / sd[c];
        };
        std::size_t correct = 0;
        for (std::size_t q : te) {
            std::vector<std::pair<double, std::size_t>> dist;
            for (std::size_t t = 0; t < tr.size(); ++t) {
                double s = 0.0;
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    const double diff = z(tr[t], c) - z(q, c);
                    s += diff * diff;
                }
                dist.emplace_back(s, t);
            }
            std::sort(dist.begin(), dist.end());
            std::map<int, int> votes;
            for (std::size_t r = 0; r < std::min(k, dist.size()); ++r) {
                ++votes[data.labels[tr[dist[r].second]]];
            }
            int best = 0, best_count = -1;
            for (const auto& [label, count] : votes) {
                if (count > best_count) {
                    best = label;
                    best_count = count;
                }
            }
            correct += best == data.labels[q] ? 1 : 0;
        }
        out.push_back(static_cast<double>(correct) / static_cast<double>(te.size()));
    }
    return out;
}

}  // namespace

TEST_CASE("knn_predict") {
    const Eigen::MatrixXd train = rows_of({{0.0}, {1.0}, {10.0}, {11.0}});
    const std::vector<int> y{1, 1, 2, 2};

    CHECK(knn_predict(train, y, rows_of({{0.4}, {10.6}, {5.4}})) == std::vector<int>{1, 2, 1});
    CHECK(knn_predict(train, y, rows_of({{10.6}}), 3) == std::vector<int>{2});
    // Equidistant from 1 and 10: the lower training index wins.
    CHECK(knn_predict(train, y, rows_of({{5.5}})) == std::vector<int>{1});
    // Two votes each: the smaller label wins.
    CHECK(knn_predict(train, y, rows_of({{5.5}}), 4) == std::vector<int>{1});
    // k beyond the training size is clamped.
    CHECK(knn_predict(train, y, rows_of({{10.6}}), 50) == std::vector<int>{1});

    CHECK_THROWS_AS(knn_predict(Eigen::MatrixXd(0, 1), {}, rows_of({{0.0}})), InvalidInput);
    CHECK_THROWS_AS(knn_predict(train, y, rows_of({{0.0, 1.0}})), InvalidInput);
    CHECK_THROWS_AS(knn_predict(train, y, rows_of({{0.0}}), 0), InvalidInput);
}

TEST_CASE("1-NN returns the label of an exact training point") {
    Rng rng(5);
    for (int t = 0; t < 40; ++t) {
        const auto n = static_cast<Eigen::Index>(2 + uniform_index(rng, 30));
        const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 6));
        Eigen::MatrixXd x(n, d);
        std::vector<int> y(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                x(i, j) = standard_normal(rng);
            }
            y[static_cast<std::size_t>(i)] = 1 + static_cast<int>(uniform_index(rng, 4));
        }
        const auto pred = knn_predict(x, y, x);
        CHECK(pred == y);
    }
}

TEST_CASE("stratified_folds") {
    const std::vector<int> one_class(10, 1);
    const auto a = stratified_folds(one_class, 5, 0);
    std::vector<int> sizes(5, 0);
    for (std::size_t f : a) {
        ++sizes[f];
    }
    CHECK(sizes == std::vector<int>{2, 2, 2, 2, 2});

    const std::vector<int> y{1, 1, 2, 2};
    const auto b = stratified_folds(y, 2, 9);
    CHECK(b[0] != b[1]);
    CHECK(b[2] != b[3]);

    CHECK(stratified_folds(one_class, 5, 3) == stratified_folds(one_class, 5, 3));
    CHECK_THROWS_AS(stratified_folds(y, 5, 0), InvalidInput);
    CHECK_THROWS_AS(stratified_folds(y, 1, 0), InvalidInput);

    // Per-class sizes differ by at most one, totals too.
    Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        std::vector<int> labels(20 + uniform_index(rng, 80));
        for (int& v : labels) {
            v = 1 + static_cast<int>(uniform_index(rng, 3));
        }
        const std::size_t folds = 2 + uniform_index(rng, 9);
        const auto f = stratified_folds(labels, folds, t);
        std::map<int, std::vector<int>> per;
        std::vector<int> total(folds, 0);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            per[labels[i]].resize(folds);
            ++per[labels[i]][f[i]];
            ++total[f[i]];
        }
        for (const auto& [label, counts] : per) {
            CHECK(*std::max_element(counts.begin(), counts.end()) -
                      *std::min_element(counts.begin(), counts.end()) <= 1);
        }
        CHECK(*std::max_element(total.begin(), total.end()) -
                  *std::min_element(total.begin(), total.end()) <= 1);
    }
}

TEST_CASE("cross_validate examples") {
    SUBCASE("separable clusters") {
        Rng rng(1);
        const auto data = gaussian_data(rng, 60, 2, 40.0);
        const std::vector<std::size_t> sel{0};
        for (std::size_t folds : {2, 5, 10}) {
            CvOptions o;
            o.folds = folds;
            const auto r = cross_validate(data, sel, o);
            CHECK(r.accuracy == 1.0);
            CHECK(r.fold_accuracies.size() == folds);
            CHECK(r.n_selected == 1);
            CHECK_FALSE(r.majority_fallback);
        }
    }
    SUBCASE("empty selection predicts the training majority") {
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(10, 1);
        const std::vector<int> y{1, 1, 1, 1, 1, 1, 1, 2, 2, 2};
        const auto data = make_dataset(std::move(x), std::span<const int>(y));
        CvOptions o;
        o.folds = 2;
        const auto r = cross_validate(data, {}, o);
        CHECK(r.majority_fallback);
        CHECK(r.n_selected == 0);
        CHECK(r.accuracy == doctest::Approx(0.7));
    }
    SUBCASE("bad selection") {
        Rng rng(1);
        const auto data = gaussian_data(rng, 20, 2, 1.0);
        const std::vector<std::size_t> sel{2};
        CHECK_THROWS_AS(cross_validate(data, sel, {}), InvalidInput);
    }
}

TEST_CASE("cross_validate matches a brute-force loop") {
    Rng rng(8);
    for (int t = 0; t < 12; ++t) {
        const std::size_t n = 20 + uniform_index(rng, 40);
        const std::size_t d = 1 + uniform_index(rng, 5);
        const auto data = gaussian_data(rng, n, d, 1.5);
        std::vector<std::size_t> all(d);
        std::iota(all.begin(), all.end(), std::size_t{0});
        const std::size_t folds = 2 + uniform_index(rng, 8);
        const std::uint64_t seed = rng();
        const auto fold_of = stratified_folds(data.labels, folds, seed);

        const std::size_t grid[] = {1, 3, 5};
        const auto best = cross_validate_best(data, all, folds, grid, seed);
        double top = 0.0;
        for (std::size_t g = 0; g < 3; ++g) {
            const auto expect = brute_force_cv(data, all, fold_of, folds, grid[g]);
            const auto& got = best.per_k[g];
            REQUIRE(got.fold_accuracies.size() == expect.size());
            for (std::size_t f = 0; f < folds; ++f) {
                CHECK(got.fold_accuracies[f] == doctest::Approx(expect[f]).epsilon(1e-12));
            }
            CHECK(got.accuracy ==
                  doctest::Approx(std::accumulate(expect.begin(), expect.end(), 0.0) / static_cast<double>(folds)));
            top = std::max(top, got.accuracy);
        }
        CHECK(best.best.accuracy == top);

        CvOptions o;
        o.folds = folds;
        o.seed = seed;
        o.k_nn = 3;
        CHECK(cross_validate(data, all, o).fold_accuracies == best.per_k[1].fold_accuracies);
    }
}

TEST_CASE("shuffled labels stay near chance") {
    // Null check over seeds: features carry no label information.
    int inside = 0;
    const int trials = 60;
    for (int s = 0; s < trials; ++s) {
        Rng rng(1000 + static_cast<std::uint64_t>(s));
        Eigen::MatrixXd x(200, 5);
        for (Eigen::Index i = 0; i < 200; ++i) {
            for (Eigen::Index j = 0; j < 5; ++j) {
                x(i, j) = standard_normal(rng);
            }
        }
        std::vector<int> y(200);
        for (std::size_t i = 0; i < 200; ++i) {
            y[i] = i < 100 ? 1 : 2;
        }
        shuffle_in_place(std::span<int>(y), rng);
        const auto data = make_dataset(std::move(x), std::span<const int>(y));
        const std::vector<std::size_t> sel{0, 1, 2, 3, 4};
        CvOptions o;
        o.seed = static_cast<std::uint64_t>(s);
        const double acc = cross_validate(data, sel, o).accuracy;
        inside += acc >= 0.35 && acc <= 0.65 ? 1 : 0;
    }
    CHECK(static_cast<double>(inside) / trials >= 0.95);
}

TEST_CASE("fold accuracies are invariant under a consistent row permutation") {
    Rng rng(21);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 30 + uniform_index(rng, 30);
        const auto data = gaussian_data(rng, n, 3, 1.0);
        const std::size_t folds = 5;
        const auto fold_of = stratified_folds(data.labels, folds, t);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        shuffle_in_place(std::span<std::size_t>(perm), rng);
        Eigen::MatrixXd px(data.features.rows(), data.features.cols());
        std::vector<int> py(n);
        std::vector<std::size_t> pf(n);
        for (std::size_t i = 0; i < n; ++i) {
            px.row(static_cast<Eigen::Index>(i)) = data.features.row(static_cast<Eigen::Index>(perm[i]));
            py[i] = data.labels[perm[i]];
            pf[i] = fold_of[perm[i]];
        }
        const auto permuted = make_dataset(std::move(px), std::span<const int>(py));
        const std::vector<std::size_t> sel{0, 1, 2};
        const auto a = cross_validate_assigned(data, sel, fold_of, folds, 1);
        const auto b = cross_validate_assigned(permuted, sel, pf, folds, 1);
        for (std::size_t f = 0; f < folds; ++f) {
            CHECK(a.fold_accuracies[f] == doctest::Approx(b.fold_accuracies[f]).epsilon(1e-12));
        }
    }
}

TEST_CASE("scaling never sees test rows") {
    Rng rng(4);
    auto data = gaussian_data(rng, 40, 2, 2.0);
    const std::size_t folds = 4;
    const auto fold_of = stratified_folds(data.labels, folds, 7);
    const std::size_t poisoned = 13;
    data.features(static_cast<Eigen::Index>(poisoned), 1) = 1e9;

    std::vector<std::size_t> seen;
    const std::vector<std::size_t> sel{0, 1};
    cross_validate_assigned(data, sel, fold_of, folds, 1, [&](std::size_t f, const Standardizer& s) {
        seen.push_back(f);
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < data.rows(); ++i) {
            if (fold_of[i] != f) {
                sum += data.features(static_cast<Eigen::Index>(i), 1);
                ++count;
            }
        }
        CHECK(s.mean(1) == doctest::Approx(sum / static_cast<double>(count)).epsilon(1e-12));
        if (fold_of[poisoned] == f) {
            CHECK(s.mean(1) < 1e3);
            CHECK(s.scale(1) < 1e3);
        } else {
            CHECK(s.mean(1) > 1e6);
        }
    });
    CHECK(seen == std::vector<std::size_t>{0, 1, 2, 3});
}
