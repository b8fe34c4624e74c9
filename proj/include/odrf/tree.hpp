#pragma once
#include <cmath>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "odrf/data.hpp"
#include "odrf/errors.hpp"
#include "odrf/rng.hpp"
#include "odrf/split.hpp"

namespace odrf {

// ---------------------------------------------------------------------------
// Tree structure
// ---------------------------------------------------------------------------

struct TreeNode {
    SplitPlane plane; // valid when internal
    int left = -1;
    int right = -1;
    double mean = 0.0; // node sample mean (leaf prediction; kept on internals
                       // too so trace prefixes can serve as truncated trees)
    double sse = 0.0;  // absolute sum of squared deviations within the node
    int count = 0;
    int layer = 0;
    int split_order = -1; // index into the growth trace; -1 for leaves

    bool is_leaf() const { return left < 0; }
};

// One split event in breadth-first creation order.
struct SplitEvent {
    int node_id = -1;
    SplitPlane plane;
    double gain = 0.0;
    int n_node = 0;
    double sse_after = 0.0; // total training SSE once this split is applied
};

struct ObliqueTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    std::vector<SplitEvent> trace;
    Task task = Task::regression;
    int n_train = 0;
    int p = 0;
    double root_sse = 0.0;

    int leaf_count() const { return static_cast<int>(trace.size()) + 1; }
    int layer_count() const {
        int l = 0;
        for (const auto &nd : nodes) l = std::max(l, nd.layer);
        return l;
    }

    // Total training SSE of the truncation keeping tau leaves.
    double training_sse_at(int tau) const {
        return tau <= 1 ? root_sse : trace[tau - 2].sse_after;
    }

    const TreeNode &leaf_for(const double *x) const {
        int id = 0;
        while (!nodes[id].is_leaf())
            id = nodes[id].plane.goes_left(x) ? nodes[id].left : nodes[id].right;
        return nodes[id];
    }
};

// ---------------------------------------------------------------------------
// Growth (breadth-first with leaf budget t_n)
// ---------------------------------------------------------------------------

struct GrowConfig {
    int t_n = 0; // 0 -> default ceil(n^{4/5})
    SplitConfig split;
    std::uint64_t seed = 0;
};

inline int default_leaf_budget(int n) {
    return std::max(1, static_cast<int>(std::ceil(std::pow(n, 0.8))));
}

// Grows per-layer queues in insertion order; a node that cannot be split
// stays a leaf; growth halts the moment the leaf budget is reached, possibly
// mid-layer, leaving remaining queued nodes unsplit. With randomized off,
// every split may use all p coordinates.
inline ObliqueTree grow(const Dataset &d, const std::vector<int> &train_indices,
                        const GrowConfig &config, bool randomized,
                        RngStream &rng) {
    const int n = static_cast<int>(train_indices.size());
    if (n < 1)
        throw Error(ErrorCode::TooFewRows, "grow: empty training set");
    const int t_n = config.t_n > 0 ? config.t_n : default_leaf_budget(n);
    if (t_n > n)
        throw Error(ErrorCode::BudgetExceedsData, "grow: t_n exceeds n");

    SplitConfig split_cfg = config.split;
    if (!randomized)
        split_cfg.q_rule = {QRule::Kind::fixed, d.p};

    ObliqueTree tree;
    tree.task = d.task;
    tree.n_train = n;
    tree.p = d.p;

    NodeData root = NodeData::from(d, train_indices);
    tree.root_sse = root.sse;
    tree.nodes.push_back(
        {{}, -1, -1, root.mean, root.sse, n, 0, -1});

    std::deque<std::pair<int, NodeData>> current, next;
    current.emplace_back(0, std::move(root));
    int leaves = 1;
    double total_sse = tree.root_sse;

    while (leaves < t_n) {
        if (current.empty()) {
            if (next.empty()) break; // nothing splittable remains
            std::swap(current, next);
        }
        auto [id, nd] = std::move(current.front());
        current.pop_front();

        auto cand = propose_and_select(nd, d, split_cfg, n, rng);
        if (!cand) continue; // unsplittable; remains a leaf

        std::vector<int> li, ri;
        for (int i : nd.indices) {
            if (cand->plane.goes_left(d.row(i)))
                li.push_back(i);
            else
                ri.push_back(i);
        }
        NodeData lnd = NodeData::from(d, std::move(li));
        NodeData rnd = NodeData::from(d, std::move(ri));

        const int lid = static_cast<int>(tree.nodes.size());
        const int rid = lid + 1;
        const int child_layer = tree.nodes[id].layer + 1;
        tree.nodes.push_back({{}, -1, -1, lnd.mean, lnd.sse,
                              static_cast<int>(lnd.indices.size()), child_layer, -1});
        tree.nodes.push_back({{}, -1, -1, rnd.mean, rnd.sse,
                              static_cast<int>(rnd.indices.size()), child_layer, -1});

        total_sse -= nd.sse - lnd.sse - rnd.sse;
        tree.nodes[id].plane = cand->plane;
        tree.nodes[id].left = lid;
        tree.nodes[id].right = rid;
        tree.nodes[id].split_order = static_cast<int>(tree.trace.size());
        tree.trace.push_back
            ({id, cand->plane, cand->gain, static_cast<int>(nd.indices.size()),
              total_sse});

        next.emplace_back(lid, std::move(lnd));
        next.emplace_back(rid, std::move(rnd));
        ++leaves;
    }
    return tree;
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

inline double predict(const ObliqueTree &tree, const double *x, int p) {
    if (p != tree.p)
        throw Error(ErrorCode::DimensionMismatch, "predict: wrong dimension");
    return tree.leaf_for(x).mean;
}

inline double predict(const ObliqueTree &tree, const std::vector<double> &x) {
    return predict(tree, x.data(), static_cast<int>(x.size()));
}

/// Voting classifier: 1 when the leaf mean reaches 0.5.
inline int classify(const ObliqueTree &tree, const double *x, int p) {
    if (tree.task != Task::classification)
        throw Error(ErrorCode::WrongTask, "classify: regression tree");
    return predict(tree, x, p) >= 0.5 ? 1 : 0;
}

inline int classify(const ObliqueTree &tree, const std::vector<double> &x) {
    return classify(tree, x.data(), static_cast<int>(x.size()));
}

// ---------------------------------------------------------------------------
// Truncation and cost-complexity pruning
// ---------------------------------------------------------------------------

// Keeps the first tau-1 splits of the growth trace; later internals revert to
// leaves with their stored node means.
inline ObliqueTree truncate_to_leaves(const ObliqueTree &tree, int tau) {
    if (tau < 1 || tau > tree.leaf_count())
        throw Error(ErrorCode::BadTau, "truncate_to_leaves: tau out of range");

    ObliqueTree out;
    out.task = tree.task;
    out.n_train = tree.n_train;
    out.p = tree.p;
    out.root_sse = tree.root_sse;

    // copy reachable nodes breadth-first, cutting at split_order >= tau-1
    std::vector<int> remap(tree.nodes.size(), -1);
    std::deque<int> queue = {0};
    remap[0] = 0;
    out.nodes.push_back(tree.nodes[0]);
    while (!queue.empty()) {
        const int old_id = queue.front();
        queue.pop_front();
        const int new_id = remap[old_id];
        const TreeNode &src = tree.nodes[old_id];
        if (src.is_leaf() || src.split_order >= tau - 1) {
            out.nodes[new_id].left = out.nodes[new_id].right = -1;
            out.nodes[new_id].split_order = -1;
            out.nodes[new_id].plane = {};
            continue;
        }
        for (int child : {src.left, src.right}) {
            remap[child] = static_cast<int>(out.nodes.size());
            out.nodes.push_back(tree.nodes[child]);
            queue.push_back(child);
        }
        out.nodes[new_id].left = remap[src.left];
        out.nodes[new_id].right = remap[src.right];
    }
    out.trace.assign(tree.trace.begin(), tree.trace.begin() + (tau - 1));
    for (auto &ev : out.trace) ev.node_id = remap[ev.node_id];
    return out;
}

struct PruneConfig {
    // negative means the default: n^{-1/2} * Var(y_train) for regression,
    // n^{-1/2} for classification.
    double alpha = -1.0;
};

namespace detail {

// Training 0-1 loss of every trace prefix, from one pass over the paths.
inline std::vector<double> zero_one_loss_by_tau(const ObliqueTree &tree,
                                                const Dataset &d,
                                                const std::vector<int> &train) {
    const int T = tree.leaf_count();
    std::vector<double> err(T + 2, 0.0); // difference array over tau = 1..T
    for (int i : train) {
        const double *x = d.row(i);
        const int label = static_cast<int>(d.targets[i]);
        int id = 0;
        int tau_lo = 1;
        while (true) {
            const TreeNode &nd = tree.nodes[id];
            // nd is the active leaf for tau in [tau_lo, tau_hi]
            const int tau_hi =
                nd.is_leaf() ? T : std::min(T, nd.split_order + 1);
            if ((nd.mean >= 0.5 ? 1 : 0) != label) {
                err[tau_lo] += 1.0;
                err[tau_hi + 1] -= 1.0;
            }
            if (nd.is_leaf() || tau_hi >= T) break;
            tau_lo = tau_hi + 1;
            id = nd.plane.goes_left(x) ? nd.left : nd.right;
        }
    }
    std::vector<double> loss(T + 1, 0.0);
    double run = 0.0;
    for (int tau = 1; tau <= T; ++tau) {
        run += err[tau];
        loss[tau] = run / static_cast<double>(train.size());
    }
    return loss;
}

} // namespace detail

// Regression scales the n^{-1/2} rate by the full tree's residual variance —
// the natural unit of the squared-loss term the penalty competes against
// (scaling by the raw target variance over-penalizes by orders of magnitude
// once the tree has explained most of the signal).
inline double default_prune_alpha(const ObliqueTree &tree) {
    const double root = std::sqrt(static_cast<double>(tree.n_train));
    if (tree.task == Task::classification) return 1.0 / root;
    const double resid_var =
        tree.training_sse_at(tree.leaf_count()) / tree.n_train;
    return resid_var / root;
}

// Minimizes (training loss at tau) + alpha * tau over tau = 1..leaf_count by
// trace bookkeeping, ties to the smallest tau. Regression uses squared loss,
// classification 0-1 loss.
inline ObliqueTree prune(const ObliqueTree &tree, const Dataset &d,
                         const std::vector<int> &train_indices,
                         const PruneConfig &config) {
    const double alpha =
        config.alpha >= 0.0 ? config.alpha : default_prune_alpha(tree);
    const int T = tree.leaf_count();
    const double n = static_cast<double>(tree.n_train);

    std::vector<double> cls_loss;
    if (tree.task == Task::classification)
        cls_loss = detail::zero_one_loss_by_tau(tree, d, train_indices);

    int best_tau = 1;
    double best_obj = 0.0;
    for (int tau = 1; tau <= T; ++tau) {
        const double loss = tree.task == Task::regression
                                ? tree.training_sse_at(tau) / n
                                : cls_loss[tau];
        const double obj = loss + alpha * tau;
        if (tau == 1 || obj < best_obj) {
            best_obj = obj;
            best_tau = tau;
        }
    }
    return truncate_to_leaves(tree, best_tau);
}

} // namespace odrf
