#include <pulsecast/fuzzifier.hpp>

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pulsecast;

TEST(Partition, SevenIntervals) {
    auto p = make_partition(-7, 7, 7);
    EXPECT_EQ(p.lower(1), -7.0);
    EXPECT_EQ(p.upper(1), -5.0);
    EXPECT_EQ(p.lower(2), -5.0);
    EXPECT_EQ(p.upper(2), -3.0);
    EXPECT_EQ(p.lower(7), 5.0);
    EXPECT_EQ(p.upper(7), 7.0);
    EXPECT_FALSE(p.interval(1).contains(-5.0));
    EXPECT_TRUE(p.interval(7).contains(7.0));
}

TEST(Partition, Bisection) {
    auto p = make_partition(-7, 7, 2);
    EXPECT_EQ(p.lower(1), -7.0);
    EXPECT_EQ(p.upper(1), 0.0);
    EXPECT_EQ(p.lower(2), 0.0);
    EXPECT_EQ(p.upper(2), 7.0);
}

TEST(Partition, FourteenUnitIntervalsByEnumeration) {
    auto p = make_partition(-7, 7, 14);
    for (std::size_t i = 1; i <= 14; ++i) {
        EXPECT_DOUBLE_EQ(p.upper(i) - p.lower(i), 1.0);
        EXPECT_DOUBLE_EQ(p.lower(i), -8.0 + double(i));
        if (i > 1) {
            EXPECT_EQ(p.lower(i), p.upper(i - 1));
        }
    }
    EXPECT_EQ(p.lower(1), -7.0);
    EXPECT_EQ(p.upper(14), 7.0);
}

TEST(Partition, Errors) {
    EXPECT_THROW(make_partition(-7, 7, 1), argument_error);
    EXPECT_THROW(make_partition(-7, 7, 36), argument_error);
    EXPECT_THROW(make_partition(7, -7, 7), argument_error);
    EXPECT_THROW(make_partition(1, 1, 7), argument_error);
    EXPECT_THROW(midpoint(make_partition(-7, 7, 7), 0), argument_error);
    EXPECT_THROW(midpoint(make_partition(-7, 7, 7), 8), argument_error);
}

TEST(IntervalOf, WorkedExampleAndBoundaries) {
    auto p = make_partition(-7, 7, 7);
    EXPECT_EQ(interval_of(p, 5.58).index, 7u);
    EXPECT_EQ(interval_of(p, -1.31).index, 3u);
    EXPECT_EQ(interval_of(p, 7.0).index, 7u);
    EXPECT_EQ(interval_of(p, -9.0).index, 1u);
    EXPECT_EQ(interval_of(p, 12.0).index, 7u);
    EXPECT_EQ(interval_of(p, -7.0).index, 1u);
    EXPECT_EQ(interval_of(p, -5.0).index, 2u);
    EXPECT_EQ(interval_of(p, -1.0).index, 4u);
    EXPECT_EQ(interval_of(p, 0.99999).index, 4u);
    EXPECT_EQ(interval_of(p, 1.0).index, 5u);
}

TEST(Midpoint, Values) {
    auto p = make_partition(-7, 7, 7);
    // oracle: centre of the enumerated bounds
    for (std::size_t i = 1; i <= 7; ++i)
        EXPECT_DOUBLE_EQ(p.midpoint(i), (p.lower(i) + p.upper(i)) / 2);
    EXPECT_EQ(p.midpoint(4), 0.0);
    EXPECT_DOUBLE_EQ(p.midpoint(7), 6.0);
    EXPECT_DOUBLE_EQ(p.midpoint(1), -6.0);
}

TEST(Fuzzify, SixDayExample) {
    auto p = make_partition(-7, 7, 7);
    ReturnSeries r;
    Date d = test::day(2014, 12, 26);
    for (double c : {5.58, 0.65, -1.31, 1.20, -0.55, 1.02}) {
        r.entries.push_back({d, c});
        d = add_days(d, 1);
    }
    auto f = fuzzify(p, r);
    std::vector<std::size_t> got;
    for (auto s : f.symbols) got.push_back(s.index);
    EXPECT_EQ(got, (std::vector<std::size_t>{7, 4, 3, 5, 4, 5}));
    EXPECT_EQ(f.dates.front(), test::day(2014, 12, 26));
    EXPECT_EQ(f.clamp_count, 0u);
}

TEST(Fuzzify, EmptyZeroAndClamped) {
    auto p = make_partition(-7, 7, 7);
    EXPECT_TRUE(fuzzify(p, ReturnSeries{}).empty());

    ReturnSeries zeros;
    for (int i = 0; i < 5; ++i) zeros.entries.push_back({test::day(2015, 1, 1 + unsigned(i)), 0.0});
    for (auto s : fuzzify(p, zeros).symbols) EXPECT_EQ(s.index, 4u);

    ReturnSeries wild{{{test::day(2015, 1, 1), 9.5}, {test::day(2015, 1, 2), -30}, {test::day(2015, 1, 3), 1}}};
    auto f = fuzzify(p, wild);
    EXPECT_EQ(f.clamp_count, 2u);
    EXPECT_EQ(f.symbols[0].index, 7u);
    EXPECT_EQ(f.symbols[1].index, 1u);
}

class PartitionProperties : public ::testing::TestWithParam<std::size_t> {};

TEST_P(PartitionProperties, CoverageMidpointsAndZero) {
    const std::size_t n = GetParam();
    auto p = make_partition(-7, 7, n);
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> x(-7, 7);
    auto contained_in = [&](double v) {
        std::size_t hits = 0;
        for (std::size_t i = 1; i <= n; ++i) hits += p.interval(i).contains(v);
        return hits;
    };
    for (int k = 0; k < 2000; ++k) {
        double v = x(rng);
        ASSERT_EQ(contained_in(v), 1u) << v;
        auto s = p.interval_of(v);
        ASSERT_TRUE(p.interval(s.index).contains(v));
        EXPECT_LE(std::abs(p.midpoint(s.index) - v), p.width() / 2 + 1e-12);
    }
    for (std::size_t i = 1; i <= n; ++i) {
        EXPECT_EQ(contained_in(p.lower(i)), 1u);
        EXPECT_EQ(p.interval_of(p.lower(i)).index, i);
        EXPECT_GT(p.midpoint(i), p.lower(i));
        EXPECT_LT(p.midpoint(i), p.upper(i));
        if (i > 1) {
            EXPECT_GT(p.midpoint(i), p.midpoint(i - 1));
        }
    }
    EXPECT_EQ(contained_in(7.0), 1u);
    if (n % 2 == 1) {
        const std::size_t c = (n + 1) / 2;
        EXPECT_EQ(p.midpoint(c), 0.0);
        EXPECT_TRUE(p.interval(c).contains(0.0));
        EXPECT_LT(p.lower(c), 0.0);
        EXPECT_GT(p.upper(c), 0.0);
    } else {
        EXPECT_EQ(p.upper(n / 2), 0.0);
        EXPECT_EQ(p.lower(n / 2 + 1), 0.0);
    }
}

INSTANTIATE_TEST_SUITE_P(AllCounts, PartitionProperties, ::testing::Range<std::size_t>(2, 36));
