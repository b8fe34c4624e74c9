#pragma once
#include <functional>
#include <vector>

#include "odrf/errors.hpp"
#include "odrf/rng.hpp"
#include "odrf/synthetic.hpp"

namespace odrf {

// Relative prediction error: sum (yhat - y)^2 / sum (train-mean - y)^2.
inline double rpe(const std::vector<double> &predictions,
                  const std::vector<double> &y_test, double y_train_mean) {
    if (predictions.size() != y_test.size())
        throw Error(ErrorCode::LengthMismatch, "rpe: length mismatch");
    if (y_test.empty())
        throw Error(ErrorCode::LengthMismatch, "rpe: empty test set");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < y_test.size(); ++i) {
        const double e = predictions[i] - y_test[i];
        const double b = y_train_mean - y_test[i];
        num += e * e;
        den += b * b;
    }
    if (den <= 0.0)
        throw Error(ErrorCode::ZeroDenominator, "rpe: zero baseline error");
    return num / den;
}

// Misclassification rate.
inline double mr(const std::vector<int> &predicted,
                 const std::vector<int> &truth) {
    if (predicted.size() != truth.size() || predicted.empty())
        throw Error(ErrorCode::LengthMismatch, "mr: length mismatch");
    int wrong = 0;
    for (size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] != truth[i]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

// Monte-Carlo estimate of the L2 risk against mu = uniform on [0,1]^p.
inline double l2_risk(const std::function<double(const double *)> &model,
                      const SyntheticTarget &target, int n_mc,
                      std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> x(target.p);
    double sum = 0.0;
    for (int i = 0; i < n_mc; ++i) {
        for (int j = 0; j < target.p; ++j) x[j] = rng.uniform();
        const double e = model(x.data()) - target.value(x.data());
        sum += e * e;
    }
    return sum / static_cast<double>(n_mc);
}

} // namespace odrf
