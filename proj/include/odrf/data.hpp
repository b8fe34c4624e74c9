#pragma once
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "odrf/errors.hpp"
#include "odrf/rng.hpp"

namespace odrf {

enum class Task { regression, classification };

inline std::string task_name(Task t) {
    return t == Task::regression ? "regression" : "classification";
}

// ---------------------------------------------------------------------------
// Raw ingestion
// ---------------------------------------------------------------------------

struct RawDataset {
    std::vector<double> features; // row-major, n x p
    std::vector<double> targets;
    std::vector<std::string> feature_names;
    std::string target_name;
    Task task = Task::regression;
    int n = 0;
    int p = 0;

    double at(int i, int j) const { return features[static_cast<size_t>(i) * p + j]; }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

inline bool parse_cell(const std::string &s, double &out) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return false;
    size_t e = s.find_last_not_of(" \t");
    const char *first = s.data() + b;
    const char *last = s.data() + e + 1;
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

} // namespace detail

// Rows with any missing or unparseable cell are dropped whole.
inline RawDataset load_csv(const std::string &path, const std::string &target_name,
                           Task task) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::EmptyDataset, "cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::EmptyDataset, "empty file: " + path);

    auto header = detail::split_csv_line(line);
    int target_col = -1;
    for (size_t j = 0; j < header.size(); ++j)
        if (header[j] == target_name) target_col = static_cast<int>(j);
    if (target_col < 0)
        throw Error(ErrorCode::MissingColumn,
                    "target column not found: " + target_name);

    RawDataset raw;
    raw.task = task;
    raw.target_name = target_name;
    for (size_t j = 0; j < header.size(); ++j)
        if (static_cast<int>(j) != target_col) raw.feature_names.push_back(header[j]);
    raw.p = static_cast<int>(raw.feature_names.size());
    if (raw.p < 1)
        throw Error(ErrorCode::EmptyDataset, "no feature columns in " + path);

    std::vector<double> row(header.size());
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) continue; // malformed row, drop
        bool ok = true;
        for (size_t j = 0; j < cells.size(); ++j)
            if (!detail::parse_cell(cells[j], row[j])) { ok = false; break; }
        if (!ok) continue;
        const double y = row[target_col];
        if (task == Task::classification && y != 0.0 && y != 1.0)
            throw Error(ErrorCode::BadLabel,
                        "classification target outside {0,1}: " + std::to_string(y));
        for (size_t j = 0; j < cells.size(); ++j)
            if (static_cast<int>(j) != target_col) raw.features.push_back(row[j]);
        raw.targets.push_back(y);
    }
    raw.n = static_cast<int>(raw.targets.size());
    if (raw.n < 1)
        throw Error(ErrorCode::EmptyDataset, "all rows dropped in " + path);
    return raw;
}

// ---------------------------------------------------------------------------
// Min-max scaling to [0,1]
// ---------------------------------------------------------------------------

struct ScalingTransform {
    std::vector<double> mins;
    std::vector<double> ranges;
};

struct Dataset {
    std::vector<double> features; // row-major, n x p, each value in [0,1]
    std::vector<double> targets;
    Task task = Task::regression;
    int n = 0;
    int p = 0;

    double at(int i, int j) const { return features[static_cast<size_t>(i) * p + j]; }
    const double *row(int i) const { return features.data() + static_cast<size_t>(i) * p; }
};

inline ScalingTransform fit_minmax(const RawDataset &raw) {
    ScalingTransform t;
    t.mins.assign(raw.p, 0.0);
    t.ranges.assign(raw.p, 0.0);
    for (int j = 0; j < raw.p; ++j) {
        double lo = raw.at(0, j), hi = raw.at(0, j);
        for (int i = 1; i < raw.n; ++i) {
            lo = std::min(lo, raw.at(i, j));
            hi = std::max(hi, raw.at(i, j));
        }
        t.mins[j] = lo;
        t.ranges[j] = hi - lo;
    }
    return t;
}

// Values outside the fitted range clamp to [0,1]; constant features map to 0.
inline Dataset apply_scaler(const ScalingTransform &t, const RawDataset &raw) {
    if (static_cast<int>(t.mins.size()) != raw.p)
        throw Error(ErrorCode::DimensionMismatch, "scaler dimension mismatch");
    Dataset d;
    d.task = raw.task;
    d.n = raw.n;
    d.p = raw.p;
    d.targets = raw.targets;
    d.features.resize(raw.features.size());
    for (int i = 0; i < raw.n; ++i) {
        for (int j = 0; j < raw.p; ++j) {
            double v = 0.0;
            if (t.ranges[j] > 0.0) {
                v = (raw.at(i, j) - t.mins[j]) / t.ranges[j];
                v = std::clamp(v, 0.0, 1.0);
            }
            d.features[static_cast<size_t>(i) * raw.p + j] = v;
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Train/test partition: |train| = min(floor(2N/3), 2000)
// ---------------------------------------------------------------------------

struct Partition {
    std::vector<int> train_indices;
    std::vector<int> test_indices;
};

inline Partition partition(int N, std::uint64_t seed) {
    if (N < 2)
        throw Error(ErrorCode::TooFewRows, "need at least 2 rows to partition");
    const int n_train = std::min(2 * N / 3, 2000);
    RngStream rng(seed);
    std::vector<int> perm = rng.sample_without_replacement(N, N);
    Partition part;
    part.train_indices.assign(perm.begin(), perm.begin() + n_train);
    part.test_indices.assign(perm.begin() + n_train, perm.end());
    std::sort(part.train_indices.begin(), part.train_indices.end());
    std::sort(part.test_indices.begin(), part.test_indices.end());
    return part;
}

} // namespace odrf
