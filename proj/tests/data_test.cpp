#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "odrf/data.hpp"

using namespace odrf;

namespace {

class TempCsv {
  public:
    explicit TempCsv(const std::string &content) {
        path_ = std::string(::testing::TempDir()) + "odrf_data_" +
                std::to_string(counter_++) + ".csv";
        std::ofstream out(path_);
        out << content;
    }
    ~TempCsv() { std::remove(path_.c_str()); }
    const std::string &path() const { return path_; }

  private:
    static inline int counter_ = 0;
    std::string path_;
};

} // namespace

TEST(LoadCsv, CleanFile) {
    TempCsv f("a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
    const auto raw = load_csv(f.path(), "y", Task::regression);
    EXPECT_EQ(raw.n, 3);
    EXPECT_EQ(raw.p, 2);
    EXPECT_EQ(raw.feature_names, (std::vector<std::string>{"a", "b"}));
    EXPECT_DOUBLE_EQ(raw.at(1, 1), 5.0);
    EXPECT_DOUBLE_EQ(raw.targets[2], 9.0);
}

TEST(LoadCsv, RowsWithMissingCellsAreDropped) {
    TempCsv f("a,b,y\n1,2,3\n4,,6\n7,8,9\n10,11,12\n");
    const auto raw = load_csv(f.path(), "y", Task::regression);
    EXPECT_EQ(raw.n, 3);
    EXPECT_DOUBLE_EQ(raw.targets[1], 9.0);
}

TEST(LoadCsv, BadClassificationLabel) {
    TempCsv f("a,y\n1,0\n2,2\n");
    EXPECT_THROW(load_csv(f.path(), "y", Task::classification), Error);
}

TEST(LoadCsv, MissingTargetColumn) {
    TempCsv f("a,b\n1,2\n");
    try {
        load_csv(f.path(), "y", Task::regression);
        FAIL() << "expected MissingColumn";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingColumn);
    }
}

TEST(LoadCsv, AllRowsDropped) {
    TempCsv f("a,y\n,1\nx,2\n");
    EXPECT_THROW(load_csv(f.path(), "y", Task::regression), Error);
}

TEST(LoadCsv, Idempotent) {
    TempCsv f("a,b,y\n0.25,2,3\n4,5.5,6\n");
    const auto a = load_csv(f.path(), "y", Task::regression);
    const auto b = load_csv(f.path(), "y", Task::regression);
    EXPECT_EQ(a.features, b.features);
    EXPECT_EQ(a.targets, b.targets);
}

namespace {

RawDataset column(const std::vector<double> &values) {
    RawDataset raw;
    raw.n = static_cast<int>(values.size());
    raw.p = 1;
    raw.features = values;
    raw.targets.assign(raw.n, 0.0);
    raw.feature_names = {"x"};
    return raw;
}

} // namespace

TEST(FitMinmax, HandValues) {
    auto t = fit_minmax(column({2, 4, 6}));
    EXPECT_DOUBLE_EQ(t.mins[0], 2.0);
    EXPECT_DOUBLE_EQ(t.ranges[0], 4.0);

    t = fit_minmax(column({5, 5, 5}));
    EXPECT_DOUBLE_EQ(t.mins[0], 5.0);
    EXPECT_DOUBLE_EQ(t.ranges[0], 0.0);

    t = fit_minmax(column({0, 1}));
    EXPECT_DOUBLE_EQ(t.mins[0], 0.0);
    EXPECT_DOUBLE_EQ(t.ranges[0], 1.0);
}

TEST(ApplyScaler, HandValues) {
    const auto raw = column({2, 4, 6});
    const auto d = apply_scaler(fit_minmax(raw), raw);
    EXPECT_DOUBLE_EQ(d.at(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(d.at(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(d.at(2, 0), 1.0);
}

TEST(ApplyScaler, ConstantColumnMapsToZero) {
    const auto raw = column({5, 5, 5});
    const auto d = apply_scaler(fit_minmax(raw), raw);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(d.at(i, 0), 0.0);
}

TEST(ApplyScaler, OutOfRangeValuesClamp) {
    const auto t = fit_minmax(column({2, 4, 6}));
    const auto d = apply_scaler(t, column({8, 0}));
    EXPECT_DOUBLE_EQ(d.at(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(d.at(1, 0), 0.0);
}

TEST(ApplyScaler, DimensionMismatch) {
    ScalingTransform t;
    t.mins = {0, 0};
    t.ranges = {1, 1};
    EXPECT_THROW(apply_scaler(t, column({1, 2})), Error);
}

TEST(ApplyScaler, RefittingScaledDataIsContractive) {
    RawDataset raw;
    raw.n = 5;
    raw.p = 2;
    raw.feature_names = {"a", "b"};
    raw.features = {3, 10, 7, 20, 1, 15, 9, 40, 5, 30};
    raw.targets.assign(5, 0.0);
    const auto d = apply_scaler(fit_minmax(raw), raw);
    for (double v : d.features) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    RawDataset scaled = raw;
    scaled.features = d.features;
    const auto t2 = fit_minmax(scaled);
    for (int j = 0; j < 2; ++j) {
        EXPECT_DOUBLE_EQ(t2.mins[j], 0.0);
        EXPECT_LE(t2.ranges[j], 1.0);
    }
}

TEST(Partition, SizesFollowTheProtocol) {
    EXPECT_EQ(partition(300, 1).train_indices.size(), 200u);
    EXPECT_EQ(partition(6000, 1).train_indices.size(), 2000u);
    const auto p3 = partition(3, 1);
    EXPECT_EQ(p3.train_indices.size(), 2u);
    EXPECT_EQ(p3.test_indices.size(), 1u);
}

TEST(Partition, DisjointAndCovering) {
    const auto part = partition(100, 7);
    std::vector<bool> seen(100, false);
    for (int i : part.train_indices) seen[i] = true;
    for (int i : part.test_indices) {
        EXPECT_FALSE(seen[i]);
        seen[i] = true;
    }
    for (bool b : seen) EXPECT_TRUE(b);
}

TEST(Partition, DeterministicAndSeedSensitive) {
    const auto a = partition(100, 42);
    const auto b = partition(100, 42);
    const auto c = partition(100, 43);
    EXPECT_EQ(a.train_indices, b.train_indices);
    EXPECT_NE(a.train_indices, c.train_indices);
}

TEST(Partition, TooFewRows) {
    EXPECT_THROW(partition(1, 0), Error);
}
