#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "odrf/forest.hpp"
#include "odrf/metrics.hpp"
#include "odrf/rng.hpp"
#include "odrf/synthetic.hpp"

using namespace odrf;

namespace {

std::vector<int> all_indices(int n) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

bool forests_identical(const Forest &a, const Forest &b) {
    if (a.trees.size() != b.trees.size()) return false;
    for (size_t t = 0; t < a.trees.size(); ++t) {
        const auto &x = a.trees[t], &y = b.trees[t];
        if (x.nodes.size() != y.nodes.size()) return false;
        for (size_t i = 0; i < x.nodes.size(); ++i) {
            if (x.nodes[i].left != y.nodes[i].left) return false;
            if (x.nodes[i].mean != y.nodes[i].mean) return false;
            if (x.nodes[i].plane.s != y.nodes[i].plane.s) return false;
            if (x.nodes[i].plane.theta != y.nodes[i].plane.theta) return false;
        }
    }
    return true;
}

} // namespace

TEST(Forest, MeanAggregationMatchesPerTreeAverage) {
    const auto target = make_ridge_sine(3, 4.0, 0.1);
    const auto d = sample(target, 200, Task::regression, 21);
    ForestConfig cfg;
    cfg.B = 7;
    cfg.seed = 42;
    const auto f = fit_forest(d, all_indices(d.n), cfg);
    ASSERT_EQ(f.trees.size(), 7u);
    RngStream rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(3);
        for (double &v : x) v = rng.uniform();
        double sum = 0.0;
        for (const auto &t : f.trees) sum += predict(t, x);
        EXPECT_NEAR(predict_forest(f, x), sum / 7.0, 1e-12);
    }
}

TEST(Forest, ThreadCountDoesNotChangeTheModel) {
    const auto target = make_ridge_sine(4, 4.0, 0.1);
    const auto d = sample(target, 300, Task::regression, 23);
    ForestConfig cfg;
    cfg.B = 12;
    cfg.seed = 7;
    cfg.n_threads = 1;
    const auto f1 = fit_forest(d, all_indices(d.n), cfg);
    cfg.n_threads = 4;
    const auto f4 = fit_forest(d, all_indices(d.n), cfg);
    EXPECT_TRUE(forests_identical(f1, f4));
}

TEST(Forest, SeedChangesTheModel) {
    const auto target = make_ridge_sine(3, 4.0, 0.1);
    const auto d = sample(target, 200, Task::regression, 24);
    ForestConfig cfg;
    cfg.B = 5;
    cfg.seed = 1;
    const auto a = fit_forest(d, all_indices(d.n), cfg);
    cfg.seed = 2;
    const auto b = fit_forest(d, all_indices(d.n), cfg);
    EXPECT_FALSE(forests_identical(a, b));
}

TEST(Forest, TreesDifferAcrossTheEnsemble) {
    const auto target = make_ridge_sine(4, 4.0, 0.1);
    const auto d = sample(target, 300, Task::regression, 25);
    ForestConfig cfg;
    cfg.B = 6;
    cfg.seed = 11;
    const auto f = fit_forest(d, all_indices(d.n), cfg);
    int distinct_pairs = 0;
    for (size_t i = 1; i < f.trees.size(); ++i) {
        Forest a{{f.trees[0]}, f.task, f.p}, b{{f.trees[i]}, f.task, f.p};
        if (!forests_identical(a, b)) ++distinct_pairs;
    }
    EXPECT_GT(distinct_pairs, 0);
}

TEST(Forest, PruningShrinksEveryTree) {
    const auto target = make_ridge_sine(3, 4.0, 0.3);
    const auto d = sample(target, 400, Task::regression, 26);
    ForestConfig cfg;
    cfg.B = 4;
    cfg.seed = 3;
    const auto full = fit_forest(d, all_indices(d.n), cfg);
    cfg.prune = PruneConfig{}; // default alpha
    const auto pruned = fit_forest(d, all_indices(d.n), cfg);
    for (size_t t = 0; t < full.trees.size(); ++t)
        EXPECT_LE(pruned.trees[t].leaf_count(), full.trees[t].leaf_count());
}

TEST(Forest, ClassificationVoteAndTieBreak) {
    Forest f;
    f.task = Task::classification;
    f.p = 1;
    auto leaf_tree = [](double mean) {
        ObliqueTree t;
        t.task = Task::classification;
        t.p = 1;
        t.nodes.resize(1);
        t.nodes[0].mean = mean;
        return t;
    };
    f.trees = {leaf_tree(0.9), leaf_tree(0.9), leaf_tree(0.1), leaf_tree(0.1)};
    const double x = 0.5;
    EXPECT_DOUBLE_EQ(vote_fraction(f, &x, 1), 0.5);
    EXPECT_EQ(classify_forest(f, &x, 1), 0); // exact tie goes to class 0
    f.trees.push_back(leaf_tree(0.9));
    EXPECT_EQ(classify_forest(f, &x, 1), 1);
}

TEST(Forest, WrongTaskAndDimensionErrors) {
    const auto target = make_ridge_sine(2, 4.0, 0.1);
    const auto d = sample(target, 100, Task::regression, 27);
    ForestConfig cfg;
    cfg.B = 2;
    const auto f = fit_forest(d, all_indices(d.n), cfg);
    const double x = 0.5;
    EXPECT_THROW(predict_forest(f, &x, 1), Error);
    EXPECT_THROW(vote_fraction(f, &x, 2), Error);
}

TEST(Forest, AveragingBeatsTheTypicalSingleTree) {
    const auto target = make_ridge_sine(5, 4.0, 0.1);
    const auto d = sample(target, 600, Task::regression, 28);
    ForestConfig cfg;
    cfg.B = 30;
    cfg.seed = 9;
    const auto f = fit_forest(d, all_indices(d.n), cfg);

    auto forest_fn = [&](const double *x) { return predict_forest(f, x, d.p); };
    const double forest_risk = l2_risk(forest_fn, target, 20000, 30);

    double mean_tree_risk = 0.0;
    for (const auto &t : f.trees) {
        auto tree_fn = [&](const double *x) { return predict(t, x, d.p); };
        mean_tree_risk += l2_risk(tree_fn, target, 20000, 30);
    }
    mean_tree_risk /= static_cast<double>(f.trees.size());
    // Jensen: ensemble risk is at most the average member risk
    EXPECT_LE(forest_risk, mean_tree_risk + 1e-10);
}

TEST(Forest, BootstrapChangesTheModel) {
    const auto target = make_ridge_sine(3, 4.0, 0.1);
    const auto d = sample(target, 200, Task::regression, 31);
    ForestConfig cfg;
    cfg.B = 5;
    cfg.seed = 4;
    const auto plain = fit_forest(d, all_indices(d.n), cfg);
    cfg.bootstrap = true;
    const auto boot = fit_forest(d, all_indices(d.n), cfg);
    EXPECT_FALSE(forests_identical(plain, boot));
}
