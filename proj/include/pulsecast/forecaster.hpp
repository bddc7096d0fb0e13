#pragma once

#include <pulsecast/errors.hpp>
#include <pulsecast/fuzzifier.hpp>
#include <pulsecast/matcher.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pulsecast {

/// How a forecast percentage turns into a price.
///  - unit_consistent: prev * (1 + pct / 100); pct is in percent.
///  - table3_compat:   prev * (1 + pct); reproduces the published worked example.
enum class PercentScaling { unit_consistent, table3_compat };

inline std::string_view to_string(PercentScaling m) {
    return m == PercentScaling::unit_consistent ? "unit-consistent" : "table3-compat";
}

inline PercentScaling parse_scaling(std::string_view s) {
    if (s == "unit-consistent") return PercentScaling::unit_consistent;
    if (s == "table3-compat") return PercentScaling::table3_compat;
    throw argument_error("unknown percent scaling '" + std::string(s) + "'");
}

inline constexpr std::size_t default_max_degree = 20;

struct ForecastConfig {
    UniversePartition partition{-7.0, 7.0, 3};
    std::size_t max_degree = default_max_degree;
    PercentScaling scaling = PercentScaling::unit_consistent;
};

struct DegreeForecast {
    std::size_t degree = 0;
    double forecast_percent = 0.0;
    double forecast_price = 0.0;
};

struct Forecast {
    std::vector<DegreeForecast> per_degree;
    double final_price = 0.0;
    bool fallback_used = false;

    std::size_t depth() const noexcept { return per_degree.size(); }
};

/// Count-weighted average of interval midpoints.
inline double forecast_percent(const DegreeStats& stats, const UniversePartition& p) {
    if (stats.total == 0) throw argument_error("forecast_percent needs at least one successor");
    double weighted = 0.0;
    std::size_t total = 0;
    for (const auto& [interval, count] : stats.successor_counts) {
        weighted += double(count) * p.midpoint(interval);
        total += count;
    }
    if (total == 0) throw argument_error("forecast_percent needs at least one successor");
    return weighted / double(total);
}

inline double price_from_percent(double previous_price, double pct, PercentScaling mode) {
    if (!(previous_price > 0.0)) throw argument_error("previous price must be positive");
    const double factor = mode == PercentScaling::unit_consistent ? pct / 100.0 : pct;
    const double price = previous_price * (1.0 + factor);
    if (!(price > 0.0))
        throw domain_error("forecast price is not positive (pct " + std::to_string(pct) + ")");
    return price;
}

/// Plain mean of the per-degree prices; persistence when there are none.
inline Forecast aggregate(std::span<const double> per_degree_prices, double previous_price) {
    Forecast out;
    if (per_degree_prices.empty()) {
        out.final_price = previous_price;
        out.fallback_used = true;
        return out;
    }
    out.per_degree.reserve(per_degree_prices.size());
    for (std::size_t i = 0; i < per_degree_prices.size(); ++i)
        out.per_degree.push_back({i + 1, 0.0, per_degree_prices[i]});
    out.final_price = std::accumulate(per_degree_prices.begin(), per_degree_prices.end(), 0.0) /
                      double(per_degree_prices.size());
    return out;
}

/// Applies the midpoint weighting and price conversion to every matched degree.
inline Forecast forecast_from_match(const MatchResult& match, double previous_price,
                                    const ForecastConfig& cfg) {
    std::vector<double> percents;
    std::vector<double> prices;
    for (const auto& row : match.stats) {
        percents.push_back(forecast_percent(row, cfg.partition));
        prices.push_back(price_from_percent(previous_price, percents.back(), cfg.scaling));
    }
    Forecast out = aggregate(prices, previous_price);
    for (std::size_t i = 0; i < out.per_degree.size(); ++i) {
        out.per_degree[i].degree = match.stats[i].degree;
        out.per_degree[i].forecast_percent = percents[i];
    }
    return out;
}

/// Last min(max_degree, len) symbols of the history.
inline QuerySuffix query_suffix(const SymbolSequence& history, std::size_t max_degree) {
    if (history.empty()) throw argument_error("history must not be empty");
    if (max_degree == 0) throw argument_error("max_degree must be at least 1");
    const std::size_t take = std::min(max_degree, history.size());
    auto all = history.symbols();
    return QuerySuffix({all.end() - std::ptrdiff_t(take), all.end()}, take);
}

/**
 * One-step-ahead forecast from a fuzzified history.
 *
 * The whole history is the training text and its tail is the query; the
 * occurrence ending at the final symbol has no successor and never counts.
 */
template <typename Matcher = IndexedMatcher>
Forecast forecast_next(const FuzzySeries& history, double previous_price, const ForecastConfig& cfg,
                       const Matcher& matcher = {}) {
    if (history.empty()) throw argument_error("history must not be empty");
    if (!(previous_price > 0.0)) throw argument_error("previous price must be positive");
    if (history.partition != cfg.partition)
        throw argument_error("history was fuzzified with a different partition");
    SymbolSequence text = to_symbol_sequence(history);
    QuerySuffix query = query_suffix(text, cfg.max_degree);
    return forecast_from_match(matcher(text, query), previous_price, cfg);
}

} // namespace pulsecast
