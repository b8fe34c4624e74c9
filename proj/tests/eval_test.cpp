#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "odrf/eval.hpp"

using namespace odrf;

namespace {

std::vector<int> all_indices(int n) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

RawDataset synthetic_raw(int n, int p, Task task, std::uint64_t seed) {
    const auto target = make_ridge_sine(p, 4.0, 0.1);
    const auto d = sample(target, n, task, seed);
    RawDataset raw;
    raw.task = task;
    raw.n = d.n;
    raw.p = d.p;
    raw.features = d.features;
    raw.targets = d.targets;
    return raw;
}

} // namespace

TEST(Metrics, RpeHandValues) {
    // preds {1,2}, truth {0,4}, baseline mean 2 -> (1+4)/(4+4) = 5/8
    EXPECT_NEAR(rpe({1.0, 2.0}, {0.0, 4.0}, 2.0), 5.0 / 8.0, 1e-15);
    EXPECT_THROW(rpe({1.0}, {0.0, 4.0}, 2.0), Error);
    EXPECT_THROW(rpe({}, {}, 0.0), Error);
    EXPECT_THROW(rpe({1.0, 1.0}, {3.0, 3.0}, 3.0), Error); // zero baseline
}

TEST(Metrics, MrHandValues) {
    EXPECT_NEAR(mr({0, 1, 1, 0}, {0, 1, 0, 1}), 0.5, 1e-15);
    EXPECT_NEAR(mr({1, 1}, {1, 1}), 0.0, 1e-15);
    EXPECT_THROW(mr({1}, {1, 0}), Error);
    EXPECT_THROW(mr({}, {}), Error);
}

TEST(Metrics, L2RiskOfTargetItselfIsZero) {
    const auto target = make_ridge_sine(3, 4.0, 0.1);
    auto perfect = [&](const double *x) { return target.value(x); };
    EXPECT_NEAR(l2_risk(perfect, target, 1000, 1), 0.0, 1e-15);
    // the zero function has risk E[m(X)^2] > 0
    auto zero = [](const double *) { return 0.0; };
    EXPECT_GT(l2_risk(zero, target, 1000, 1), 0.01);
}

TEST(Methods, NameRoundTrip) {
    for (const char *name : {"odt", "odt-pruned", "cart", "odrf",
                             "odrf-pruned", "odrf-q", "mean-baseline"})
        EXPECT_EQ(method_name(method_kind_from_name(name)), name);
    EXPECT_THROW(method_kind_from_name("boosting"), Error);
}

TEST(Methods, MeanBaselinePredictsTrainMean) {
    const auto target = make_ridge_sine(2, 4.0, 0.1);
    const auto d = sample(target, 50, Task::regression, 41);
    MethodConfig m;
    m.kind = MethodConfig::Kind::mean_baseline;
    const auto model = fit_method(d, all_indices(d.n), m, 1);
    double mean = 0.0;
    for (double y : d.targets) mean += y;
    mean /= d.n;
    EXPECT_NEAR(model.predict_at(d.row(0), d.p), mean, 1e-12);
}

TEST(Methods, CartSplitsAreAxisAligned) {
    const auto target = make_ridge_sine(4, 4.0, 0.1);
    const auto d = sample(target, 300, Task::regression, 42);
    MethodConfig m;
    m.kind = MethodConfig::Kind::cart;
    const auto model = fit_method(d, all_indices(d.n), m, 2);
    ASSERT_TRUE(model.tree);
    for (const auto &ev : model.tree->trace) {
        EXPECT_EQ(ev.plane.subset.size(), 1u);
        EXPECT_EQ(ev.plane.theta[0], 1.0);
    }
}

TEST(Methods, OdtIsDeterministicAcrossSeeds) {
    const auto target = make_ridge_sine(3, 4.0, 0.1);
    const auto d = sample(target, 200, Task::regression, 43);
    MethodConfig m;
    m.kind = MethodConfig::Kind::odt;
    const auto a = fit_method(d, all_indices(d.n), m, 1);
    const auto b = fit_method(d, all_indices(d.n), m, 999);
    ASSERT_TRUE(a.tree && b.tree);
    ASSERT_EQ(a.tree->nodes.size(), b.tree->nodes.size());
    for (size_t i = 0; i < a.tree->nodes.size(); ++i)
        EXPECT_EQ(a.tree->nodes[i].mean, b.tree->nodes[i].mean);
}

TEST(Methods, PrunedVariantsNeverGrowLarger) {
    const auto target = make_ridge_sine(3, 4.0, 0.3);
    const auto d = sample(target, 400, Task::regression, 44);
    MethodConfig full, pruned;
    full.kind = MethodConfig::Kind::odt;
    pruned.kind = MethodConfig::Kind::odt_pruned;
    const auto a = fit_method(d, all_indices(d.n), full, 1);
    const auto b = fit_method(d, all_indices(d.n), pruned, 1);
    EXPECT_LE(b.tree->leaf_count(), a.tree->leaf_count());
}

TEST(Methods, OdrfQHonoursFixedSubsetSize) {
    const auto target = make_ridge_sine(5, 4.0, 0.1);
    const auto d = sample(target, 300, Task::regression, 45);
    MethodConfig m;
    m.kind = MethodConfig::Kind::odrf_q;
    m.fixed_q = 2;
    m.B = 4;
    const auto model = fit_method(d, all_indices(d.n), m, 3);
    ASSERT_TRUE(model.forest);
    // every stored plane is either a fixed-q oblique cut or the axis-aligned
    // fallback candidate (subset size 1, theta = (1))
    int oblique = 0;
    for (const auto &t : model.forest->trees)
        for (const auto &ev : t.trace) {
            if (ev.plane.subset.size() == 1) {
                EXPECT_EQ(ev.plane.theta[0], 1.0);
            } else {
                EXPECT_EQ(ev.plane.subset.size(), 2u);
                ++oblique;
            }
        }
    EXPECT_GT(oblique, 0);
}

TEST(Eval, MedianOfOddAndEven) {
    EXPECT_DOUBLE_EQ(median_of({3.0, 1.0, 2.0}), 2.0);
    EXPECT_DOUBLE_EQ(median_of({4.0, 1.0, 2.0, 3.0}), 2.5);
    EXPECT_DOUBLE_EQ(median_of({7.0}), 7.0);
}

TEST(Eval, ConsistencyCurveShapeAndDeterminism) {
    const auto target = make_ridge_sine(3, 4.0, 0.1);
    MethodConfig m;
    m.kind = MethodConfig::Kind::odt;
    const std::vector<int> ns = {100, 300};
    const auto a = consistency_curve(target, ns, m, 3, 2000, 7);
    const auto b = consistency_curve(target, ns, m, 3, 2000, 7);
    ASSERT_EQ(a.medians.size(), 2u);
    ASSERT_EQ(a.risks[0].size(), 3u);
    EXPECT_EQ(a.medians, b.medians);
    EXPECT_EQ(a.risks, b.risks);
    // more data should not hurt on this smooth target
    EXPECT_LT(a.medians[1], a.medians[0]);
}

TEST(Eval, BenchmarkShapeMetricAndDeterminism) {
    const auto raw = synthetic_raw(240, 3, Task::regression, 46);
    std::vector<MethodConfig> methods(2);
    methods[0].kind = MethodConfig::Kind::mean_baseline;
    methods[1].kind = MethodConfig::Kind::odt;
    const auto a = benchmark(raw, methods, 3, 11);
    const auto b = benchmark(raw, methods, 3, 11);
    EXPECT_EQ(a.metric, "rpe");
    ASSERT_EQ(a.values.size(), 2u);
    ASSERT_EQ(a.values[0].size(), 3u);
    EXPECT_EQ(a.values, b.values);
    // RPE of the train-mean baseline hovers near 1; the tree should do better
    EXPECT_NEAR(a.means[0], 1.0, 0.2);
    EXPECT_LT(a.means[1], a.means[0]);
    EXPECT_THROW(benchmark(raw, methods, 0, 1), Error);
}

TEST(Eval, BenchmarkClassificationUsesMr) {
    auto raw = synthetic_raw(240, 3, Task::regression, 47);
    raw.task = Task::classification;
    for (double &y : raw.targets) y = y > 0.0 ? 1.0 : 0.0;
    std::vector<MethodConfig> methods(1);
    methods[0].kind = MethodConfig::Kind::odt;
    const auto res = benchmark(raw, methods, 2, 5);
    EXPECT_EQ(res.metric, "mr");
    for (double v : res.values[0]) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Eval, ScaleAllChangesTheScoresButNotTheShape) {
    const auto raw = synthetic_raw(240, 3, Task::regression, 48);
    std::vector<MethodConfig> methods(1);
    methods[0].kind = MethodConfig::Kind::odt;
    const auto a = benchmark(raw, methods, 2, 9, false);
    const auto b = benchmark(raw, methods, 2, 9, true);
    ASSERT_EQ(a.values[0].size(), b.values[0].size());
    // both settings are valid protocols; scores should be comparable
    EXPECT_NEAR(a.means[0], b.means[0], 0.5);
}
