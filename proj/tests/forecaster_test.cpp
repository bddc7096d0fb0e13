#include <pulsecast/forecaster.hpp>

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace pulsecast;

namespace {

DegreeStats stats_of(std::vector<std::size_t> counts) {
    DegreeStats s{1, {}, 0};
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i]) {
            s.successor_counts[Symbol(i + 1)] = counts[i];
            s.total += counts[i];
        }
    return s;
}

// For [-7, 7] with n = 7 the midpoints are the even integers 2i - 8, so the
// weighted mean is an exact ratio of integer sums.
double exact_ratio_n7(const std::vector<std::size_t>& counts) {
    long long num = 0, den = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        num += (2 * (long long)(i + 1) - 8) * (long long)counts[i];
        den += (long long)counts[i];
    }
    return double(num) / double(den);
}

FuzzySeries history_of(const UniversePartition& p, std::vector<std::size_t> symbols) {
    FuzzySeries f{p, {}, {}, 0};
    Date d = test::day(2015, 1, 1);
    for (auto s : symbols) {
        f.symbols.push_back({s});
        f.dates.push_back(d);
        d = add_days(d, 1);
    }
    return f;
}

const UniversePartition seven(-7, 7, 7);

} // namespace

TEST(ForecastPercent, CountRows) {
    const std::vector<std::vector<std::size_t>> rows{
        {30, 70, 150, 250, 100, 80, 50},
        {25, 50, 100, 200, 80, 60, 40},
        {10, 20, 60, 150, 50, 30, 25},
        {0, 0, 10, 100, 20, 10, 5},
    };
    const std::vector<double> oracle{60.0 / 730, 90.0 / 555, 110.0 / 345, 90.0 / 145};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        EXPECT_DOUBLE_EQ(exact_ratio_n7(rows[r]), oracle[r]);
        EXPECT_NEAR(forecast_percent(stats_of(rows[r]), seven), oracle[r], 1e-12);
    }
    EXPECT_NEAR(forecast_percent(stats_of(rows[0]), seven), 0.082, 0.0005);
    EXPECT_NEAR(forecast_percent(stats_of(rows[1]), seven), 0.162, 0.0005);
    // The three-decimal reference values for the last two rows are truncations.
    EXPECT_EQ(std::floor(forecast_percent(stats_of(rows[2]), seven) * 1000) / 1000, 0.318);
    EXPECT_EQ(std::floor(forecast_percent(stats_of(rows[3]), seven) * 1000) / 1000, 0.620);
}

TEST(ForecastPercent, CentreOnlyAndErrors) {
    EXPECT_EQ(forecast_percent(stats_of({0, 0, 0, 42, 0, 0, 0}), seven), 0.0);
    EXPECT_THROW(forecast_percent(DegreeStats{1, {}, 0}, seven), argument_error);
}

TEST(ForecastPercent, OrderFreeScaleFreeAndBounded) {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t n = 2 + iter % 34;
        UniversePartition p(-7, 7, n);
        std::uniform_int_distribution<std::size_t> cnt(0, 50);
        std::vector<std::size_t> counts(n);
        for (auto& c : counts) c = cnt(rng);
        counts[iter % n] += 1;
        auto base = stats_of(counts);
        double pct = forecast_percent(base, p);
        EXPECT_GE(pct, p.midpoint(1) - 1e-12);
        EXPECT_LE(pct, p.midpoint(n) + 1e-12);
        EXPECT_GE(pct, -7 + p.width() / 2 - 1e-12);
        EXPECT_LE(pct, 7 - p.width() / 2 + 1e-12);

        // insertion order
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        DegreeStats shuffled{1, {}, 0};
        for (auto i : order)
            if (counts[i]) {
                shuffled.successor_counts.emplace(Symbol(i + 1), counts[i]);
                shuffled.total += counts[i];
            }
        EXPECT_DOUBLE_EQ(forecast_percent(shuffled, p), pct);

        // common factor
        std::vector<std::size_t> scaled = counts;
        for (auto& c : scaled) c *= 3 + iter % 5;
        EXPECT_NEAR(forecast_percent(stats_of(scaled), p), pct, 1e-12);
    }
}

TEST(PriceFromPercent, Modes) {
    EXPECT_NEAR(price_from_percent(100, 0.082, PercentScaling::table3_compat), 108.2, 1e-9);
    EXPECT_EQ(price_from_percent(100, 0.0, PercentScaling::table3_compat), 100.0);
    EXPECT_EQ(price_from_percent(100, 0.0, PercentScaling::unit_consistent), 100.0);
    EXPECT_NEAR(price_from_percent(100, 0.082, PercentScaling::unit_consistent), 100.082, 1e-9);
    EXPECT_THROW(price_from_percent(0, 1, PercentScaling::unit_consistent), argument_error);
    EXPECT_THROW(price_from_percent(100, -1.5, PercentScaling::table3_compat), domain_error);
    EXPECT_THROW(price_from_percent(100, -100, PercentScaling::unit_consistent), domain_error);
}

TEST(Aggregate, MeanFallbackSingleton) {
    std::vector<double> prices{108.2, 116.2, 131.8, 162.0};
    auto f = aggregate(prices, 100);
    EXPECT_NEAR(f.final_price, 129.55, 1e-9);
    EXPECT_FALSE(f.fallback_used);
    EXPECT_EQ(f.depth(), 4u);

    auto none = aggregate(std::vector<double>{}, 100);
    EXPECT_EQ(none.final_price, 100.0);
    EXPECT_TRUE(none.fallback_used);
    EXPECT_TRUE(none.per_degree.empty());

    EXPECT_EQ(aggregate(std::vector<double>{42.5}, 100).final_price, 42.5);
}

TEST(ForecastFromMatch, ReferencePercentsGiveReferencePrices) {
    const std::vector<double> pcts{0.082, 0.162, 0.318, 0.620};
    const std::vector<double> expected{108.2, 116.2, 131.8, 162.0};
    std::vector<double> prices;
    for (std::size_t i = 0; i < 4; ++i) {
        prices.push_back(price_from_percent(100, pcts[i], PercentScaling::table3_compat));
        EXPECT_NEAR(prices.back(), expected[i], 0.005);
    }
    EXPECT_NEAR(aggregate(prices, 100).final_price, 129.55, 0.005);
}

TEST(ForecastFromMatch, ExactCountsGiveSlightlyHigherAverage) {
    MatchResult m;
    const std::vector<std::vector<std::size_t>> rows{
        {30, 70, 150, 250, 100, 80, 50},
        {25, 50, 100, 200, 80, 60, 40},
        {10, 20, 60, 150, 50, 30, 25},
        {0, 0, 10, 100, 20, 10, 5},
    };
    double oracle = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto s = stats_of(rows[r]);
        s.degree = r + 1;
        m.stats.push_back(s);
        oracle += 100 * (1 + exact_ratio_n7(rows[r])) / 4;
    }
    ForecastConfig cfg{seven, 20, PercentScaling::table3_compat};
    auto f = forecast_from_match(m, 100, cfg);
    EXPECT_NEAR(f.final_price, oracle, 1e-9);
    EXPECT_NEAR(f.final_price, 129.597, 0.001);
    EXPECT_EQ(f.per_degree[3].degree, 4u);
    EXPECT_NEAR(f.per_degree[3].forecast_percent, 90.0 / 145, 1e-12);
}

TEST(ForecastNext, UnseenLastSymbolFallsBack) {
    ForecastConfig cfg{seven, 20, PercentScaling::unit_consistent};
    auto f = forecast_next(history_of(seven, {4, 4, 5, 4, 4, 7}), 250.0, cfg);
    EXPECT_TRUE(f.fallback_used);
    EXPECT_EQ(f.final_price, 250.0);
}

TEST(ForecastNext, ConstantCentreHistoryIsFlat) {
    ForecastConfig cfg{seven, 20, PercentScaling::unit_consistent};
    for (std::size_t len : {2u, 5u, 30u}) {
        auto f = forecast_next(history_of(seven, std::vector<std::size_t>(len, 4)), 100.0, cfg);
        ASSERT_FALSE(f.fallback_used);
        EXPECT_EQ(f.depth(), std::min<std::size_t>(len - 1, 20));
        for (const auto& d : f.per_degree) EXPECT_EQ(d.forecast_percent, 0.0);
        EXPECT_EQ(f.final_price, 100.0);
    }
}

TEST(ForecastNext, QueryTakesTailOfHistory) {
    UniversePartition p(-7, 7, 3);
    ForecastConfig cfg{p, 2, PercentScaling::unit_consistent};
    auto h = history_of(p, {1, 3, 2, 2, 1, 3});
    auto f = forecast_next(h, 100.0, cfg);
    // query "1 3": the final occurrence has no successor, the one at 0..1 is followed by 2
    ASSERT_EQ(f.depth(), 2u);
    EXPECT_DOUBLE_EQ(f.per_degree[0].forecast_percent, p.midpoint(2));
    EXPECT_DOUBLE_EQ(f.per_degree[1].forecast_percent, p.midpoint(2));
    EXPECT_EQ(f.per_degree[1].degree, 2u);
}

TEST(ForecastNext, NaiveAndIndexedAgreeAndBoundedMove) {
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n = 2 + iter % 34;
        UniversePartition p(-7, 7, n);
        std::uniform_int_distribution<std::size_t> sym(1, std::min<std::size_t>(n, 4));
        std::vector<std::size_t> syms(1 + iter * 3);
        for (auto& s : syms) s = sym(rng);
        ForecastConfig cfg{p, 1 + std::size_t(iter % 25), PercentScaling::unit_consistent};
        auto h = history_of(p, syms);
        auto a = forecast_next(h, 100.0, cfg);
        auto b = forecast_next(h, 100.0, cfg, NaiveMatcher{});
        EXPECT_EQ(a.final_price, b.final_price);
        EXPECT_EQ(a.depth(), b.depth());
        EXPECT_LE(std::abs(a.final_price - 100.0), 7.0 + 1e-9);
        EXPECT_EQ(forecast_next(h, 100.0, cfg).final_price, a.final_price);
    }
}

TEST(ForecastNext, Errors) {
    ForecastConfig cfg{seven, 20, PercentScaling::unit_consistent};
    EXPECT_THROW(forecast_next(history_of(seven, {}), 100, cfg), argument_error);
    EXPECT_THROW(forecast_next(history_of(seven, {4}), 0, cfg), argument_error);
    EXPECT_THROW(forecast_next(history_of(UniversePartition(-7, 7, 3), {2}), 10, cfg),
                 argument_error);
}
