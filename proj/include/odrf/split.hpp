#pragma once
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "odrf/data.hpp"
#include "odrf/errors.hpp"
#include "odrf/rng.hpp"

namespace odrf {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

// One oblique cut theta^T x_subset <= s.
struct SplitPlane {
    std::vector<int> subset;   // sorted distinct coordinate indices
    std::vector<double> theta; // unit L2 norm
    double s = 0.0;

    double project(const double *x) const {
        double v = 0.0;
        for (size_t k = 0; k < subset.size(); ++k) v += theta[k] * x[subset[k]];
        return v;
    }
    bool goes_left(const double *x) const { return project(x) <= s; }
};

struct NodeData {
    std::vector<int> indices; // rows of the dataset in this node
    double mean = 0.0;
    double sse = 0.0; // sum of squared deviations from mean (absolute, not /N)

    static NodeData from(const Dataset &d, std::vector<int> idx) {
        NodeData nd;
        nd.indices = std::move(idx);
        double s = 0.0;
        for (int i : nd.indices) s += d.targets[i];
        nd.mean = s / static_cast<double>(nd.indices.size());
        double sse = 0.0;
        for (int i : nd.indices) {
            const double r = d.targets[i] - nd.mean;
            sse += r * r;
        }
        nd.sse = sse;
        return nd;
    }
};

struct SplitCandidate {
    SplitPlane plane;
    double gain = 0.0;
    int left_count = 0;
    int right_count = 0;
};

struct QRule {
    enum class Kind { practical, theory, fixed, axis_aligned };
    Kind kind = Kind::practical;
    int fixed_q = 1;
};

struct SplitConfig {
    int n_candidates = 10;
    QRule q_rule;
    double ridge_lambda = 1e-6;
    bool include_cart_candidate = true;
    double min_gain = 0.0;
    int irls_steps = 5;
};

enum class Criterion { variance, gini };

// ---------------------------------------------------------------------------
// Impurity criteria
// ---------------------------------------------------------------------------

// Variance impurity gain: ||Y-mean||^2_A - sum of weighted child terms.
inline double impurity_gain(const std::vector<double> &y,
                            const std::vector<bool> &left) {
    const int n = static_cast<int>(y.size());
    int nl = 0;
    for (int i = 0; i < n; ++i) nl += left[i] ? 1 : 0;
    const int nr = n - nl;
    if (nl == 0 || nr == 0)
        throw Error(ErrorCode::EmptySide, "impurity_gain: empty side");

    double s = 0.0, sl = 0.0;
    for (int i = 0; i < n; ++i) {
        s += y[i];
        if (left[i]) sl += y[i];
    }
    const double mean = s / n, ml = sl / nl, mr = (s - sl) / nr;
    double v = 0.0, vl = 0.0, vr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - mean;
        v += r * r;
        if (left[i]) {
            const double rl = y[i] - ml;
            vl += rl * rl;
        } else {
            const double rr = y[i] - mr;
            vr += rr * rr;
        }
    }
    return (v - vl - vr) / n;
}

// Decision-stump route to the same quantity: squared inner product of the
// centered response with the normalized two-valued stump. Test oracle for
// impurity_gain.
inline double stump_gain(const std::vector<double> &y,
                         const std::vector<bool> &left) {
    const int n = static_cast<int>(y.size());
    int nl = 0;
    for (int i = 0; i < n; ++i) nl += left[i] ? 1 : 0;
    const int nr = n - nl;
    if (nl == 0 || nr == 0)
        throw Error(ErrorCode::EmptySide, "stump_gain: empty side");

    const double pl = static_cast<double>(nl) / n;
    const double pr = static_cast<double>(nr) / n;
    const double denom = std::sqrt(pl * pr);
    const double stump_l = pr / denom;
    const double stump_r = -pl / denom;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double inner = 0.0;
    for (int i = 0; i < n; ++i)
        inner += (y[i] - mean) * (left[i] ? stump_l : stump_r);
    inner /= n;
    return inner * inner;
}

// Gini gain for binary labels; equals 2x the variance gain on {0,1} targets.
inline double gini_gain(const std::vector<double> &y,
                        const std::vector<bool> &left) {
    const int n = static_cast<int>(y.size());
    int nl = 0, ones = 0, ones_l = 0;
    for (int i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0)
            throw Error(ErrorCode::NonBinary, "gini_gain: labels must be 0/1");
        if (left[i]) {
            ++nl;
            if (y[i] == 1.0) ++ones_l;
        }
        if (y[i] == 1.0) ++ones;
    }
    const int nr = n - nl;
    if (nl == 0 || nr == 0)
        throw Error(ErrorCode::EmptySide, "gini_gain: empty side");

    auto purity = [](int c1, int m) {
        const double p1 = static_cast<double>(c1) / m;
        const double p0 = 1.0 - p1;
        return p0 * p0 + p1 * p1;
    };
    return -purity(ones, n) +
           (static_cast<double>(nl) / n) * purity(ones_l, nl) +
           (static_cast<double>(nr) / n) * purity(ones - ones_l, nr);
}

// ---------------------------------------------------------------------------
// 1-D threshold search
// ---------------------------------------------------------------------------

struct ThresholdResult {
    double s = 0.0;
    double gain = 0.0;
};

// Scans midpoints of consecutive distinct sorted projections with running
// sums. Ties break to the smallest s.
inline ThresholdResult best_threshold(const std::vector<double> &z,
                                      const std::vector<double> &y,
                                      Criterion criterion) {
    const int n = static_cast<int>(z.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return z[a] < z[b]; });
    if (z[order.front()] == z[order.back()])
        throw Error(ErrorCode::NoValidSplit, "best_threshold: all projections equal");

    double total = 0.0, total_sq = 0.0;
    int total_ones = 0;
    for (int i = 0; i < n; ++i) {
        total += y[i];
        total_sq += y[i] * y[i];
        if (y[i] == 1.0) ++total_ones;
    }

    ThresholdResult best;
    bool found = false;
    double run = 0.0;
    int run_ones = 0;
    for (int k = 0; k < n - 1; ++k) {
        const int i = order[k];
        run += y[i];
        if (y[i] == 1.0) ++run_ones;
        if (z[order[k]] == z[order[k + 1]]) continue;
        const int nl = k + 1, nr = n - nl;
        double gain;
        if (criterion == Criterion::variance) {
            gain = (run * run / nl + (total - run) * (total - run) / nr -
                    total * total / n) /
                   n;
        } else {
            auto purity = [](double c1, int m) {
                const double p1 = c1 / m;
                const double p0 = 1.0 - p1;
                return p0 * p0 + p1 * p1;
            };
            gain = -purity(total_ones, n) +
                   (static_cast<double>(nl) / n) * purity(run_ones, nl) +
                   (static_cast<double>(nr) / n) *
                       purity(total_ones - run_ones, nr);
        }
        if (!found || gain > best.gain) {
            best.gain = gain;
            best.s = 0.5 * (z[order[k]] + z[order[k + 1]]);
            found = true;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Direction estimation
// ---------------------------------------------------------------------------

namespace detail {

// In-place Cholesky solve of A x = b for symmetric positive definite A (q x q,
// row-major). Returns false if a pivot degenerates.
inline bool solve_spd(std::vector<double> A, std::vector<double> b, int q,
                      std::vector<double> &x) {
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = A[i * q + j];
            for (int k = 0; k < j; ++k) sum -= A[i * q + k] * A[j * q + k];
            if (i == j) {
                if (sum <= 0.0) return false;
                A[i * q + j] = std::sqrt(sum);
            } else {
                A[i * q + j] = sum / A[j * q + j];
            }
        }
    }
    // forward then backward substitution
    for (int i = 0; i < q; ++i) {
        double sum = b[i];
        for (int k = 0; k < i; ++k) sum -= A[i * q + k] * b[k];
        b[i] = sum / A[i * q + i];
    }
    x.assign(q, 0.0);
    for (int i = q - 1; i >= 0; --i) {
        double sum = b[i];
        for (int k = i + 1; k < q; ++k) sum -= A[k * q + i] * x[k];
        x[i] = sum / A[i * q + i];
    }
    return true;
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Ridge least squares of centered y on centered X.
inline std::vector<double> ridge_direction(const std::vector<double> &X, int n,
                                           int q, const std::vector<double> &y,
                                           double lambda) {
    std::vector<double> xm(q, 0.0);
    double ym = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < q; ++j) xm[j] += X[i * q + j];
        ym += y[i];
    }
    for (int j = 0; j < q; ++j) xm[j] /= n;
    ym /= n;

    std::vector<double> A(static_cast<size_t>(q) * q, 0.0), b(q, 0.0);
    for (int i = 0; i < n; ++i) {
        const double ry = y[i] - ym;
        for (int j = 0; j < q; ++j) {
            const double rj = X[i * q + j] - xm[j];
            b[j] += rj * ry;
            for (int k = 0; k <= j; ++k)
                A[j * q + k] += rj * (X[i * q + k] - xm[k]);
        }
    }
    for (int j = 0; j < q; ++j) {
        for (int k = j + 1; k < q; ++k) A[j * q + k] = A[k * q + j];
        A[j * q + j] += lambda;
    }
    std::vector<double> beta;
    if (!solve_spd(A, b, q, beta)) beta.assign(q, 0.0);
    return beta;
}

// A few IRLS steps for ridge-penalized logistic regression; returns the
// non-intercept coefficients. Weights clip to [1e-6, 0.25].
inline std::vector<double> irls_direction(const std::vector<double> &X, int n,
                                          int q, const std::vector<double> &y,
                                          double lambda, int steps) {
    const int d = q + 1; // intercept first
    std::vector<double> beta(d, 0.0);
    std::vector<double> A(static_cast<size_t>(d) * d), b(d), eta(n);
    for (int step = 0; step < steps; ++step) {
        std::fill(A.begin(), A.end(), 0.0);
        std::fill(b.begin(), b.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            double e = beta[0];
            for (int j = 0; j < q; ++j) e += beta[j + 1] * X[i * q + j];
            eta[i] = e;
            const double p = sigmoid(e);
            const double w = std::clamp(p * (1.0 - p), 1e-6, 0.25);
            const double wz = w * e + (y[i] - p); // w * working response
            b[0] += wz;
            A[0] += w;
            for (int j = 0; j < q; ++j) {
                const double xj = X[i * q + j];
                b[j + 1] += wz * xj;
                A[(j + 1) * d] += w * xj;
                for (int k = 0; k <= j; ++k)
                    A[(j + 1) * d + (k + 1)] += w * xj * X[i * q + k];
            }
        }
        for (int j = 0; j < d; ++j)
            for (int k = j + 1; k < d; ++k) A[j * d + k] = A[k * d + j];
        for (int j = 1; j < d; ++j) A[j * d + j] += lambda; // intercept unpenalized
        std::vector<double> next;
        if (!solve_spd(A, b, d, next)) break;
        beta = next;
    }
    return std::vector<double>(beta.begin() + 1, beta.end());
}

} // namespace detail

// Fits a direction on a coordinate subset: ridge least squares for
// regression, a few IRLS logistic steps for classification, L2-normalized.
// Degenerate solutions fall back to the best single-axis direction.
inline std::vector<double> fit_direction(const std::vector<double> &X, int n,
                                         int q, const std::vector<double> &y,
                                         Task task, double lambda,
                                         int irls_steps) {
    if (q == 1) return {1.0}; // a scalar normalizes to the axis direction
    std::vector<double> theta =
        task == Task::regression
            ? detail::ridge_direction(X, n, q, y, lambda)
            : detail::irls_direction(X, n, q, y, lambda, irls_steps);
    double norm = 0.0;
    for (double v : theta) norm += v * v;
    norm = std::sqrt(norm);
    if (norm >= 1e-12) {
        for (double &v : theta) v /= norm;
        return theta;
    }
    // fallback: axis of the subset feature with the best marginal gain
    int best_j = 0;
    double best_gain = -1.0;
    std::vector<double> col(n);
    const Criterion crit =
        task == Task::regression ? Criterion::variance : Criterion::gini;
    for (int j = 0; j < q; ++j) {
        for (int i = 0; i < n; ++i) col[i] = X[i * q + j];
        try {
            const auto r = best_threshold(col, y, crit);
            if (r.gain > best_gain) {
                best_gain = r.gain;
                best_j = j;
            }
        } catch (const Error &) {
            // constant column; skip
        }
    }
    theta.assign(q, 0.0);
    theta[best_j] = 1.0;
    return theta;
}

// ---------------------------------------------------------------------------
// Feature-subset draw
// ---------------------------------------------------------------------------

// theory: q uniform on 1..p; practical: q uniform on 1..min(floor(sqrt(n)), p);
// fixed: q constant. Subset uniform among size-q subsets, sorted.
inline std::vector<int> draw_subset(int p, const QRule &rule, int n_root,
                                    RngStream &rng) {
    int q;
    switch (rule.kind) {
    case QRule::Kind::theory:
        q = static_cast<int>(rng.uniform_int(1, p));
        break;
    case QRule::Kind::practical: {
        const int cap = std::max(
            1, std::min(static_cast<int>(std::sqrt(static_cast<double>(n_root))), p));
        q = static_cast<int>(rng.uniform_int(1, cap));
        break;
    }
    case QRule::Kind::fixed:
        q = std::clamp(rule.fixed_q, 1, p);
        break;
    case QRule::Kind::axis_aligned:
        q = 1;
        break;
    }
    auto subset = rng.sample_without_replacement(p, q);
    std::sort(subset.begin(), subset.end());
    return subset;
}

// ---------------------------------------------------------------------------
// Candidate generation and selection
// ---------------------------------------------------------------------------

namespace detail {

// Best exhaustive axis-aligned cut over all p features, if any.
inline std::optional<SplitCandidate> cart_candidate(const NodeData &node,
                                                    const Dataset &d,
                                                    Criterion crit) {
    const int n = static_cast<int>(node.indices.size());
    std::vector<double> col(n), y(n);
    for (int i = 0; i < n; ++i) y[i] = d.targets[node.indices[i]];
    std::optional<SplitCandidate> best;
    for (int j = 0; j < d.p; ++j) {
        for (int i = 0; i < n; ++i) col[i] = d.at(node.indices[i], j);
        ThresholdResult r;
        try {
            r = best_threshold(col, y, crit);
        } catch (const Error &) {
            continue;
        }
        if (!best || r.gain > best->gain) {
            SplitCandidate c;
            c.plane.subset = {j};
            c.plane.theta = {1.0};
            c.plane.s = r.s;
            c.gain = r.gain;
            for (int i = 0; i < n; ++i)
                (col[i] <= r.s ? c.left_count : c.right_count)++;
            best = c;
        }
    }
    return best;
}

} // namespace detail

// Generates n_candidates random-subset oblique candidates (plus an optional
// exhaustive axis-aligned one) and returns the max-gain candidate. Absent
// means the node cannot be split and becomes a leaf.
inline std::optional<SplitCandidate>
propose_and_select(const NodeData &node, const Dataset &d,
                   const SplitConfig &config, int n_root, RngStream &rng) {
    const int n = static_cast<int>(node.indices.size());
    if (n < 2) return std::nullopt;

    bool identical_rows = true;
    for (int i = 1; i < n && identical_rows; ++i)
        for (int j = 0; j < d.p; ++j)
            if (d.at(node.indices[i], j) != d.at(node.indices[0], j)) {
                identical_rows = false;
                break;
            }
    if (identical_rows) return std::nullopt;

    const Criterion crit =
        d.task == Task::regression ? Criterion::variance : Criterion::gini;
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = d.targets[node.indices[i]];

    std::optional<SplitCandidate> best;
    auto consider = [&](SplitCandidate c) {
        if (!best || c.gain > best->gain) best = std::move(c);
    };

    if (config.q_rule.kind != QRule::Kind::axis_aligned) {
        // fixed(q = p) always fits the same direction; one candidate suffices
        const bool deterministic = config.q_rule.kind == QRule::Kind::fixed &&
                                   std::clamp(config.q_rule.fixed_q, 1, d.p) == d.p;
        const int n_cand = deterministic ? 1 : config.n_candidates;
        std::vector<double> Xsub, z(n);
        for (int k = 0; k < n_cand; ++k) {
            const auto subset = draw_subset(d.p, config.q_rule, n_root, rng);
            const int q = static_cast<int>(subset.size());
            Xsub.resize(static_cast<size_t>(n) * q);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < q; ++j)
                    Xsub[static_cast<size_t>(i) * q + j] =
                        d.at(node.indices[i], subset[j]);
            const auto theta =
                fit_direction(Xsub, n, q, y, d.task, config.ridge_lambda,
                              config.irls_steps);
            for (int i = 0; i < n; ++i) {
                double v = 0.0;
                for (int j = 0; j < q; ++j)
                    v += theta[j] * Xsub[static_cast<size_t>(i) * q + j];
                z[i] = v;
            }
            ThresholdResult r;
            try {
                r = best_threshold(z, y, crit);
            } catch (const Error &) {
                continue; // degenerate projection
            }
            SplitCandidate c;
            c.plane.subset = subset;
            c.plane.theta = theta;
            c.plane.s = r.s;
            c.gain = r.gain;
            for (int i = 0; i < n; ++i)
                (z[i] <= r.s ? c.left_count : c.right_count)++;
            consider(std::move(c));
        }
    }

    if (config.include_cart_candidate ||
        config.q_rule.kind == QRule::Kind::axis_aligned) {
        if (auto c = detail::cart_candidate(node, d, crit)) consider(std::move(*c));
    }

    if (!best || best->gain < config.min_gain) return std::nullopt;
    return best;
}

} // namespace odrf
