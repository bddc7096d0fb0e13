#pragma once

#include <pulsecast/evaluator.hpp>
#include <pulsecast/forecaster.hpp>
#include <pulsecast/fuzzifier.hpp>
#include <pulsecast/matcher.hpp>
#include <pulsecast/timeseries.hpp>

#include <fmt/core.h>

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace pulsecast {

struct GoldenCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace golden {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Successor counts A1..A7 for the suffixes A5, A4A5, A5A4A5, A3A5A4A5.
inline constexpr std::array<std::array<std::size_t, 7>, 4> table2_counts{{
    {30, 70, 150, 250, 100, 80, 50},
    {25, 50, 100, 200, 80, 60, 40},
    {10, 20, 60, 150, 50, 30, 25},
    {0, 0, 10, 100, 20, 10, 5},
}};

inline constexpr std::array<double, 4> table2_reference_percents{0.082, 0.162, 0.318, 0.620};

inline DegreeStats table2_row(std::size_t row) {
    DegreeStats s{row + 1, {}, 0};
    for (std::size_t i = 0; i < 7; ++i)
        if (auto c = table2_counts[row][i]; c != 0) {
            s.successor_counts[Symbol(i + 1)] = c;
            s.total += c;
        }
    return s;
}

inline GoldenCheck check_percent_change() {
    PriceSeries s{{{Date{std::chrono::year{2014}, std::chrono::month{12}, std::chrono::day{25}}, 55.5},
                   {Date{std::chrono::year{2014}, std::chrono::month{12}, std::chrono::day{26}}, 58.6}}};
    double got = percent_changes(s)[0].change;
    // 5.5856 is shown as 5.58 (two decimals, truncated)
    return {"change extent 55.5 -> 58.6 is 5.58%", std::floor(got * 100.0) / 100.0 == 5.58,
            fmt::format("got {:.4f}", got)};
}

inline GoldenCheck check_table1() {
    const UniversePartition p(-7, 7, 7);
    const std::array<double, 6> changes{5.58, 0.65, -1.31, 1.20, -0.55, 1.02};
    const std::array<std::size_t, 6> expected{7, 4, 3, 5, 4, 5};
    bool ok = true;
    std::string got;
    for (std::size_t i = 0; i < changes.size(); ++i) {
        auto idx = p.interval_of(changes[i]).index;
        ok = ok && idx == expected[i];
        got += (i ? " A" : "A") + std::to_string(idx);
    }
    return {"fuzzification of six daily changes, n=7", ok, "got " + got};
}

/// Tolerance 0.0005 on rows 1-3 against the reference percents and on row 4
/// against 0.6667. Rows 3 and 4 miss these targets: the reference percents
/// are truncated to three decimals (0.31884 -> 0.318) and 90/145 = 0.62069.
inline std::vector<GoldenCheck> check_table2() {
    const UniversePartition p(-7, 7, 7);
    const std::array<double, 4> targets{0.082, 0.162, 0.318, 0.6667};
    std::vector<GoldenCheck> out;
    for (std::size_t r = 0; r < 4; ++r) {
        double got = forecast_percent(table2_row(r), p);
        out.push_back({fmt::format("midpoint-weighted percent, degree {} -> {}", r + 1, targets[r]),
                       near(got, targets[r], 0.0005), fmt::format("got {:.5f}", got)});
    }
    return out;
}

inline GoldenCheck check_matcher_example() {
    SymbolSequence training({1, 3, 2, 2, 1, 3, 1}, 3);
    QuerySuffix query({2, 1, 3}, 3);
    MatchResult expected{{{1, {{1, 1}, {2, 1}}, 2}, {2, {{1, 1}, {2, 1}}, 2}, {3, {{1, 1}}, 1}}};
    MatchResult indexed = match_degrees(training, query);
    MatchResult naive = match_degrees_naive(training, query);
    return {"degree search on A1 A3 A2 A2 A1 A3 A1 with query A2 A1 A3",
            indexed == expected && naive == expected,
            fmt::format("depth {} (indexed), {} (naive)", indexed.depth(), naive.depth())};
}

inline GoldenCheck check_table3() {
    const std::array<double, 4> expected{108.2, 116.2, 131.8, 162.0};
    std::vector<double> prices;
    bool ok = true;
    for (std::size_t i = 0; i < 4; ++i) {
        prices.push_back(price_from_percent(100.0, table2_reference_percents[i],
                                            PercentScaling::table3_compat));
        ok = ok && near(prices.back(), expected[i], 0.005);
    }
    Forecast f = aggregate(prices, 100.0);
    ok = ok && near(f.final_price, 129.55, 0.005);
    return {"per-degree prices and average 129.55 (table3-compat)", ok,
            fmt::format("got {:.3f} {:.3f} {:.3f} {:.3f} -> {:.3f}", prices[0], prices[1],
                        prices[2], prices[3], f.final_price)};
}

inline std::vector<GoldenCheck> check_table4() {
    const Date d{std::chrono::year{2015}, std::chrono::month{1}, std::chrono::day{2}};
    std::vector<GoldenCheck> out;
    for (double scale : {1.0, 10.0}) {
        std::array<EvalPair, 1> pair{{{d, 1020.0 * scale, 1010.0 * scale}}};
        double e = rmse(pair);
        double m = mape(pair);
        out.push_back({fmt::format("RMSE {} and MAPE 0.99% for actual {} / forecast {}", 10 * scale,
                                   1010 * scale, 1020 * scale),
                       e == 10.0 * scale && near(m, 0.990, 0.001),
                       fmt::format("got RMSE {} MAPE {:.4f}%", e, m)});
    }
    return out;
}

} // namespace golden

/// Worked numbers of the method, checked end to end.
inline std::vector<GoldenCheck> run_golden_checks() {
    std::vector<GoldenCheck> out;
    out.push_back(golden::check_percent_change());
    out.push_back(golden::check_table1());
    for (auto& c : golden::check_table2()) out.push_back(std::move(c));
    out.push_back(golden::check_matcher_example());
    out.push_back(golden::check_table3());
    for (auto& c : golden::check_table4()) out.push_back(std::move(c));
    return out;
}

} // namespace pulsecast
