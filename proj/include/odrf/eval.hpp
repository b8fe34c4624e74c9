#pragma once
#include <algorithm>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "odrf/data.hpp"
#include "odrf/forest.hpp"
#include "odrf/metrics.hpp"
#include "odrf/synthetic.hpp"
#include "odrf/tree.hpp"

namespace odrf {

// ---------------------------------------------------------------------------
// Method configurations for the experiment suite
// ---------------------------------------------------------------------------

struct MethodConfig {
    enum class Kind {
        odt,          // deterministic ODT (all p coordinates per split)
        odt_pruned,
        cart,         // axis-aligned only
        odrf,
        odrf_pruned,
        odrf_q,       // fixed-q feature bagging
        mean_baseline,
    };
    Kind kind = Kind::odt;
    int B = 100;
    int t_n = 0;     // 0 -> ceil(n^{4/5})
    int fixed_q = 2; // odrf_q only
    QRule::Kind forest_q_rule = QRule::Kind::practical;
    double alpha = -1.0; // negative -> default penalty
    int n_candidates = 10;
    int n_threads = 1;
    bool bootstrap = false;

    bool is_forest() const {
        return kind == Kind::odrf || kind == Kind::odrf_pruned ||
               kind == Kind::odrf_q;
    }
    bool is_pruned() const {
        return kind == Kind::odt_pruned || kind == Kind::odrf_pruned;
    }
};

inline MethodConfig::Kind method_kind_from_name(const std::string &name) {
    if (name == "odt") return MethodConfig::Kind::odt;
    if (name == "odt-pruned") return MethodConfig::Kind::odt_pruned;
    if (name == "cart") return MethodConfig::Kind::cart;
    if (name == "odrf") return MethodConfig::Kind::odrf;
    if (name == "odrf-pruned") return MethodConfig::Kind::odrf_pruned;
    if (name == "odrf-q") return MethodConfig::Kind::odrf_q;
    if (name == "mean-baseline") return MethodConfig::Kind::mean_baseline;
    throw Error(ErrorCode::BadSpec, "unknown method: " + name);
}

inline std::string method_name(MethodConfig::Kind k) {
    switch (k) {
    case MethodConfig::Kind::odt: return "odt";
    case MethodConfig::Kind::odt_pruned: return "odt-pruned";
    case MethodConfig::Kind::cart: return "cart";
    case MethodConfig::Kind::odrf: return "odrf";
    case MethodConfig::Kind::odrf_pruned: return "odrf-pruned";
    case MethodConfig::Kind::odrf_q: return "odrf-q";
    case MethodConfig::Kind::mean_baseline: return "mean-baseline";
    }
    return "?";
}

// A fitted model of any method kind behind one prediction surface.
struct FittedModel {
    std::unique_ptr<ObliqueTree> tree;
    std::unique_ptr<Forest> forest;
    double constant = 0.0;
    Task task = Task::regression;

    double predict_at(const double *x, int p) const {
        if (forest) return predict_forest(*forest, x, p);
        if (tree) return predict(*tree, x, p);
        return constant;
    }
    int classify_at(const double *x, int p) const {
        if (forest) return classify_forest(*forest, x, p);
        if (tree) return classify(*tree, x, p);
        return constant >= 0.5 ? 1 : 0;
    }
};

inline FittedModel fit_method(const Dataset &d, const std::vector<int> &train,
                              const MethodConfig &m, std::uint64_t seed) {
    FittedModel out;
    out.task = d.task;
    if (m.kind == MethodConfig::Kind::mean_baseline) {
        double s = 0.0;
        for (int i : train) s += d.targets[i];
        out.constant = s / static_cast<double>(train.size());
        return out;
    }

    GrowConfig grow_cfg;
    grow_cfg.t_n = m.t_n;
    grow_cfg.split.n_candidates = m.n_candidates;

    if (m.is_forest()) {
        ForestConfig fc;
        fc.B = m.B;
        fc.bootstrap = m.bootstrap;
        fc.seed = seed;
        fc.n_threads = m.n_threads;
        fc.grow = grow_cfg;
        fc.grow.split.q_rule =
            m.kind == MethodConfig::Kind::odrf_q
                ? QRule{QRule::Kind::fixed, m.fixed_q}
                : QRule{m.forest_q_rule, 1};
        if (m.kind == MethodConfig::Kind::odrf_pruned)
            fc.prune = PruneConfig{m.alpha};
        out.forest = std::make_unique<Forest>(fit_forest(d, train, fc));
        return out;
    }

    RngStream rng(seed);
    bool randomized = false;
    if (m.kind == MethodConfig::Kind::cart) {
        grow_cfg.split.q_rule = {QRule::Kind::axis_aligned, 1};
        randomized = true; // keep the configured q_rule
    }
    ObliqueTree tree = grow(d, train, grow_cfg, randomized, rng);
    if (m.kind == MethodConfig::Kind::odt_pruned)
        tree = prune(tree, d, train, PruneConfig{m.alpha});
    out.tree = std::make_unique<ObliqueTree>(std::move(tree));
    return out;
}

// ---------------------------------------------------------------------------
// Consistency curves: Monte-Carlo L2 risk vs training size
// ---------------------------------------------------------------------------

struct RiskReport {
    std::vector<int> n_values;
    std::vector<std::vector<double>> risks; // [n index][repetition]
    std::vector<double> medians;            // per n
};

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline RiskReport consistency_curve(const SyntheticTarget &target,
                                    const std::vector<int> &n_values,
                                    const MethodConfig &method, int repetitions,
                                    int n_mc, std::uint64_t seed) {
    RiskReport report;
    report.n_values = n_values;
    for (size_t ni = 0; ni < n_values.size(); ++ni) {
        const int n = n_values[ni];
        std::vector<double> risks;
        for (int rep = 0; rep < repetitions; ++rep) {
            const std::uint64_t rep_seed =
                derive_seed(seed, (ni + 1) * 1000003ULL + rep);
            Dataset d = sample(target, n, Task::regression,
                               derive_seed(rep_seed, 1));
            std::vector<int> train(n);
            std::iota(train.begin(), train.end(), 0);
            FittedModel model = fit_method(d, train, method,
                                           derive_seed(rep_seed, 2));
            risks.push_back(l2_risk(
                [&](const double *x) { return model.predict_at(x, target.p); },
                target, n_mc, derive_seed(rep_seed, 3)));
        }
        report.risks.push_back(risks);
        report.medians.push_back(median_of(risks));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Real-data benchmark protocol: repeated random partitions
// ---------------------------------------------------------------------------

struct BenchmarkResult {
    std::vector<std::string> methods;
    std::vector<std::vector<double>> values; // [method][partition]
    std::vector<double> means;
    std::string metric; // "rpe" or "mr"
};

// For r = 1..R: partition with seed (seed, r), scale, fit each method on the
// training rows, score RPE or MR on the rest. scale_all fits the scaler on
// all rows (protocol fidelity); default fits on the training rows only.
inline BenchmarkResult benchmark(const RawDataset &raw,
                                 const std::vector<MethodConfig> &methods,
                                 int repetitions, std::uint64_t seed,
                                 bool scale_all = false) {
    if (repetitions < 1)
        throw Error(ErrorCode::BadSpec, "benchmark: repetitions < 1");
    BenchmarkResult result;
    result.metric = raw.task == Task::regression ? "rpe" : "mr";
    for (const auto &m : methods) result.methods.push_back(method_name(m.kind));
    result.values.assign(methods.size(), {});

    for (int r = 0; r < repetitions; ++r) {
        const std::uint64_t part_seed = derive_seed(seed, r + 1);
        Partition part = partition(raw.n, part_seed);

        ScalingTransform scaler;
        if (scale_all) {
            scaler = fit_minmax(raw);
        } else {
            RawDataset train_raw;
            train_raw.task = raw.task;
            train_raw.n = static_cast<int>(part.train_indices.size());
            train_raw.p = raw.p;
            for (int i : part.train_indices) {
                for (int j = 0; j < raw.p; ++j)
                    train_raw.features.push_back(raw.at(i, j));
                train_raw.targets.push_back(raw.targets[i]);
            }
            scaler = fit_minmax(train_raw);
        }
        Dataset d = apply_scaler(scaler, raw);

        double train_mean = 0.0;
        for (int i : part.train_indices) train_mean += d.targets[i];
        train_mean /= static_cast<double>(part.train_indices.size());

        for (size_t mi = 0; mi < methods.size(); ++mi) {
            FittedModel model = fit_method(d, part.train_indices, methods[mi],
                                           derive_seed(part_seed, mi + 1));
            double score;
            if (raw.task == Task::regression) {
                std::vector<double> preds, truth;
                for (int i : part.test_indices) {
                    preds.push_back(model.predict_at(d.row(i), d.p));
                    truth.push_back(d.targets[i]);
                }
                score = rpe(preds, truth, train_mean);
            } else {
                std::vector<int> preds, truth;
                for (int i : part.test_indices) {
                    preds.push_back(model.classify_at(d.row(i), d.p));
                    truth.push_back(static_cast<int>(d.targets[i]));
                }
                score = mr(preds, truth);
            }
            result.values[mi].push_back(score);
        }
    }
    for (const auto &vals : result.values) {
        double s = 0.0;
        for (double v : vals) s += v;
        result.means.push_back(s / static_cast<double>(vals.size()));
    }
    return result;
}

} // namespace odrf
