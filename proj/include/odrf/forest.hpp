#pragma once
#include <atomic>
#include <optional>
#include <thread>
#include <vector>

#include "odrf/data.hpp"
#include "odrf/tree.hpp"

namespace odrf {

// ---------------------------------------------------------------------------
// ODRF: an ensemble of randomized oblique trees
// ---------------------------------------------------------------------------

struct ForestConfig {
    int B = 100;
    GrowConfig grow;
    std::optional<PruneConfig> prune;
    bool bootstrap = false; // beyond the proved theory; off by default
    std::uint64_t seed = 0;
    int n_threads = 1;
};

struct Forest {
    std::vector<ObliqueTree> trees;
    Task task = Task::regression;
    int p = 0;
};

// Fits B randomized trees; tree b draws everything from a seed derived from
// (seed, b), so the result is independent of scheduling order.
inline Forest fit_forest(const Dataset &d, const std::vector<int> &train_indices,
                         const ForestConfig &config) {
    Forest forest;
    forest.task = d.task;
    forest.p = d.p;
    forest.trees.resize(config.B);

    auto fit_one = [&](int b) {
        RngStream rng(derive_seed(config.seed, static_cast<std::uint64_t>(b) + 1));
        std::vector<int> idx;
        if (config.bootstrap) {
            const int n = static_cast<int>(train_indices.size());
            idx.reserve(n);
            for (int i = 0; i < n; ++i)
                idx.push_back(train_indices[rng.uniform_int(0, n - 1)]);
        } else {
            idx = train_indices;
        }
        ObliqueTree tree = grow(d, idx, config.grow, /*randomized=*/true, rng);
        if (config.prune)
            tree = prune(tree, d, idx, *config.prune);
        forest.trees[b] = std::move(tree);
    };

    const int n_threads = std::max(1, config.n_threads);
    if (n_threads == 1 || config.B == 1) {
        for (int b = 0; b < config.B; ++b) fit_one(b);
    } else {
        std::vector<std::thread> workers;
        std::atomic<int> cursor{0};
        for (int t = 0; t < std::min(n_threads, config.B); ++t)
            workers.emplace_back([&] {
                for (int b = cursor.fetch_add(1); b < config.B;
                     b = cursor.fetch_add(1))
                    fit_one(b);
            });
        for (auto &w : workers) w.join();
    }
    return forest;
}

// Regression: arithmetic mean of tree predictions.
inline double predict_forest(const Forest &forest, const double *x, int p) {
    if (p != forest.p)
        throw Error(ErrorCode::DimensionMismatch, "predict_forest: wrong dimension");
    double sum = 0.0;
    for (const auto &t : forest.trees) sum += predict(t, x, p);
    return sum / static_cast<double>(forest.trees.size());
}

inline double predict_forest(const Forest &forest, const std::vector<double> &x) {
    return predict_forest(forest, x.data(), static_cast<int>(x.size()));
}

// Fraction of trees voting class 1.
inline double vote_fraction(const Forest &forest, const double *x, int p) {
    if (forest.task != Task::classification)
        throw Error(ErrorCode::WrongTask, "vote_fraction: regression forest");
    int ones = 0;
    for (const auto &t : forest.trees) ones += classify(t, x, p);
    return static_cast<double>(ones) / static_cast<double>(forest.trees.size());
}

// Majority vote; an exact tie (even B) breaks to class 0.
inline int classify_forest(const Forest &forest, const double *x, int p) {
    return vote_fraction(forest, x, p) > 0.5 ? 1 : 0;
}

inline int classify_forest(const Forest &forest, const std::vector<double> &x) {
    return classify_forest(forest, x.data(), static_cast<int>(x.size()));
}

} // namespace odrf
