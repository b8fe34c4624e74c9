#pragma once
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "odrf/data.hpp"
#include "odrf/errors.hpp"
#include "odrf/rng.hpp"

namespace odrf {

// ---------------------------------------------------------------------------
// Synthetic regression targets with known ground truth
// ---------------------------------------------------------------------------

enum class BaseFn { sigmoid, sine, quadratic, linear };

inline double eval_base(BaseFn f, double v) {
    switch (f) {
    case BaseFn::sigmoid:
        return 1.0 / (1.0 + std::exp(-v));
    case BaseFn::sine:
        return std::sin(v);
    case BaseFn::quadratic:
        return v * v;
    case BaseFn::linear:
        return v;
    }
    return 0.0;
}

inline BaseFn base_from_name(const std::string &name) {
    if (name == "sigmoid") return BaseFn::sigmoid;
    if (name == "sine") return BaseFn::sine;
    if (name == "quadratic") return BaseFn::quadratic;
    if (name == "linear") return BaseFn::linear;
    throw Error(ErrorCode::BadSpec, "unknown base function: " + name);
}

// One ridge component: amplitude * g(arg_scale * theta^T x_subset).
struct TargetComponent {
    std::vector<int> subset; // coordinates the component touches
    std::vector<double> theta; // unit norm, same length as subset
    BaseFn base = BaseFn::linear;
    double amplitude = 1.0;
    double arg_scale = 1.0;
};

struct SyntheticTarget {
    enum class Kind { ridge_sum, extended_additive };
    Kind kind = Kind::ridge_sum;
    std::vector<TargetComponent> components;
    double offset = 0.0;
    double noise_sigma = 0.0;
    int p = 1;

    double value(const double *x) const {
        double m = offset;
        for (const auto &c : components) {
            double v = 0.0;
            for (size_t k = 0; k < c.subset.size(); ++k)
                v += c.theta[k] * x[c.subset[k]];
            m += c.amplitude * eval_base(c.base, c.arg_scale * v);
        }
        return m;
    }
    double value(const std::vector<double> &x) const { return value(x.data()); }
};

// m(x) = sin(freq * theta^T x) with theta = (1,...,1)/sqrt(p).
inline SyntheticTarget make_ridge_sine(int p, double freq, double noise_sigma) {
    if (p < 1) throw Error(ErrorCode::BadSpec, "make_ridge_sine: p < 1");
    SyntheticTarget t;
    t.kind = SyntheticTarget::Kind::ridge_sum;
    t.p = p;
    t.noise_sigma = noise_sigma;
    TargetComponent c;
    c.base = BaseFn::sine;
    c.arg_scale = freq;
    c.subset.resize(p);
    c.theta.assign(p, 1.0 / std::sqrt(static_cast<double>(p)));
    for (int j = 0; j < p; ++j) c.subset[j] = j;
    t.components.push_back(std::move(c));
    return t;
}

// Extended additive model: V components, each touching exactly q coordinates
// through a random unit direction; base functions cycle through the family.
inline SyntheticTarget make_extended_additive(int p, int q, int V,
                                              double noise_sigma,
                                              std::uint64_t seed) {
    if (p < 1 || q < 1 || q > p || V < 1)
        throw Error(ErrorCode::BadSpec, "make_extended_additive: bad p/q/V");
    SyntheticTarget t;
    t.kind = SyntheticTarget::Kind::extended_additive;
    t.p = p;
    t.noise_sigma = noise_sigma;
    RngStream rng(derive_seed(seed, 0xadd1));
    const BaseFn cycle[] = {BaseFn::sine, BaseFn::sigmoid, BaseFn::quadratic,
                            BaseFn::linear};
    for (int v = 0; v < V; ++v) {
        TargetComponent c;
        c.subset = rng.sample_without_replacement(p, q);
        std::sort(c.subset.begin(), c.subset.end());
        c.theta.resize(q);
        double norm = 0.0;
        for (int k = 0; k < q; ++k) {
            c.theta[k] = rng.gaussian();
            norm += c.theta[k] * c.theta[k];
        }
        norm = std::sqrt(norm);
        if (norm < 1e-12) { c.theta.assign(q, 0.0); c.theta[0] = 1.0; norm = 1.0; }
        else for (double &w : c.theta) w /= norm;
        c.base = cycle[v % 4];
        c.arg_scale = c.base == BaseFn::sine ? 4.0 : 1.0;
        t.components.push_back(std::move(c));
    }
    return t;
}

// Rescales the target's range over n_probe uniform points to [lo, hi];
// used to build valid Bernoulli means for classification experiments.
inline SyntheticTarget rescale_to(const SyntheticTarget &src, double lo,
                                  double hi, std::uint64_t seed,
                                  int n_probe = 100000) {
    RngStream rng(derive_seed(seed, 0x5ca1e));
    std::vector<double> x(src.p);
    double vmin = 0.0, vmax = 0.0;
    for (int i = 0; i < n_probe; ++i) {
        for (int j = 0; j < src.p; ++j) x[j] = rng.uniform();
        const double v = src.value(x);
        if (i == 0) { vmin = vmax = v; }
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    const double span = vmax > vmin ? vmax - vmin : 1.0;
    const double scale = (hi - lo) / span;
    SyntheticTarget out = src;
    out.offset = lo + (src.offset - vmin) * scale;
    for (auto &c : out.components) c.amplitude *= scale;
    return out;
}

// X uniform on [0,1]^p; regression draws Y = m(X) + Gaussian noise,
// classification draws Y ~ Bernoulli(clamp(m(X), 0, 1)).
inline Dataset sample(const SyntheticTarget &target, int n, Task task,
                      std::uint64_t seed) {
    if (n < 1) throw Error(ErrorCode::BadSpec, "sample: n < 1");
    Dataset d;
    d.task = task;
    d.n = n;
    d.p = target.p;
    d.features.resize(static_cast<size_t>(n) * target.p);
    d.targets.resize(n);
    RngStream rng(seed);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < target.p; ++j)
            d.features[static_cast<size_t>(i) * target.p + j] = rng.uniform();
        const double m = target.value(d.row(i));
        if (task == Task::regression) {
            d.targets[i] =
                m + (target.noise_sigma > 0.0 ? target.noise_sigma * rng.gaussian()
                                              : 0.0);
        } else {
            const double prob = std::clamp(m, 0.0, 1.0);
            d.targets[i] = rng.uniform() < prob ? 1.0 : 0.0;
        }
    }
    return d;
}

} // namespace odrf
