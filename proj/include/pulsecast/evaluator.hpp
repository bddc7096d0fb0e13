#pragma once

#include <pulsecast/errors.hpp>
#include <pulsecast/forecaster.hpp>
#include <pulsecast/fuzzifier.hpp>
#include <pulsecast/timeseries.hpp>

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pulsecast {

struct EvalPair {
    Date date;
    double forecast_price = 0.0;
    double actual_price = 0.0;

    friend bool operator==(const EvalPair&, const EvalPair&) = default;
};

inline double rmse(std::span<const EvalPair> pairs) {
    if (pairs.empty()) throw argument_error("rmse of an empty set");
    double sum = 0.0;
    for (const auto& p : pairs) {
        const double e = p.forecast_price - p.actual_price;
        sum += e * e;
    }
    return std::sqrt(sum / double(pairs.size()));
}

/// Mean absolute percentage error, in percent.
inline double mape(std::span<const EvalPair> pairs) {
    if (pairs.empty()) throw argument_error("mape of an empty set");
    double sum = 0.0;
    for (const auto& p : pairs) {
        if (!(p.actual_price > 0.0)) throw argument_error("mape needs positive actual prices");
        sum += std::abs(p.forecast_price - p.actual_price) / p.actual_price;
    }
    return sum / double(pairs.size()) * 100.0;
}

/// How much history precedes the first forecast day. The start is anchored
/// there; later forecast days keep that start and see the window expand.
struct TrainingLimit {
    enum class Unit { days, years };
    Unit unit = Unit::days;
    unsigned value = 0;

    friend bool operator==(const TrainingLimit&, const TrainingLimit&) = default;
};

inline std::string to_string(const TrainingLimit& t) {
    return std::to_string(t.value) + (t.unit == TrainingLimit::Unit::days ? "d" : "y");
}

/// "250d", "250" (days) or "2y".
inline TrainingLimit parse_training_limit(std::string_view s) {
    if (s.empty()) throw argument_error("empty training length");
    TrainingLimit out;
    std::string_view digits = s;
    if (s.back() == 'y' || s.back() == 'd') {
        out.unit = s.back() == 'y' ? TrainingLimit::Unit::years : TrainingLimit::Unit::days;
        digits.remove_suffix(1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos)
        throw argument_error("bad training length '" + std::string(s) + "'");
    out.value = unsigned(std::stoul(std::string(digits)));
    if (out.value == 0) throw argument_error("training length must be positive");
    return out;
}

/// Forecast days, by inclusive date bounds or as the trailing `last_days`
/// points. Default: every day from the third point on.
struct BacktestWindow {
    std::optional<Date> from;
    std::optional<Date> to;
    std::optional<std::size_t> last_days;
    std::optional<TrainingLimit> training;
};

struct BacktestReport {
    std::vector<EvalPair> pairs;
    std::vector<std::size_t> depths; // deepest matched degree per day
    std::vector<bool> fallback;      // persistence used per day
    double rmse = 0.0;
    double mape = 0.0;
    std::size_t n_days = 0;
    std::size_t fallback_days = 0;

    double average_depth() const {
        if (depths.empty()) return 0.0;
        double s = 0.0;
        for (auto d : depths) s += double(d);
        return s / double(depths.size());
    }
};

struct ResolvedWindow {
    std::size_t first = 0; // first forecast index
    std::size_t last = 0;  // one past the last forecast index
    std::size_t training_start = 0;
};

/// Maps a window spec onto point indices. Throws argument_error when the
/// window is empty or lacks the two prior prices a forecast needs.
inline ResolvedWindow resolve_window(const PriceSeries& series, const BacktestWindow& w) {
    const std::size_t n = series.size();
    if (n < 3) throw argument_error("backtest needs at least 3 price points");
    ResolvedWindow r{2, n, 0};
    if (w.from) {
        r.first = n;
        for (std::size_t i = 0; i < n; ++i)
            if (series[i].date >= *w.from) { r.first = i; break; }
    }
    if (w.to) {
        r.last = 0;
        for (std::size_t i = n; i-- > 0;)
            if (series[i].date <= *w.to) { r.last = i + 1; break; }
    }
    if (w.last_days) {
        if (*w.last_days == 0) throw argument_error("last_days must be positive");
        r.first = std::max(r.first, r.last > *w.last_days ? r.last - *w.last_days : 0);
    }
    if (r.first >= r.last) throw argument_error("backtest window is empty");
    if (r.first < 2)
        throw argument_error("first forecast day needs at least 2 prior prices");

    if (w.training) {
        const TrainingLimit& t = *w.training;
        if (t.unit == TrainingLimit::Unit::days) {
            if (t.value > r.first)
                throw argument_error("training length " + to_string(t) + " exceeds the " +
                                     std::to_string(r.first) + " days before the window");
            r.training_start = r.first - t.value;
        } else {
            const Date first_day = series[r.first].date;
            const Date cutoff = first_day - std::chrono::years{int(t.value)};
            if (!(series[0].date <= cutoff))
                throw argument_error("training length " + to_string(t) +
                                     " reaches before the start of the series");
            r.training_start = 0;
            while (series[r.training_start].date <= cutoff && r.training_start < r.first)
                ++r.training_start;
        }
        if (r.first - r.training_start < 2)
            throw argument_error("training length " + to_string(t) + " leaves fewer than 2 prices");
    }
    return r;
}

/// One forecast day: fuzzify closes [start, t) and predict close_t.
template <typename Matcher = IndexedMatcher>
Forecast forecast_day(const PriceSeries& series, std::size_t start, std::size_t t,
                      const ForecastConfig& cfg, const Matcher& matcher = {}) {
    if (t < start + 2 || t > series.size())
        throw argument_error("forecast day needs at least 2 prior prices");
    ReturnSeries returns = percent_changes(series.slice(start, t));
    FuzzySeries history = fuzzify(cfg.partition, returns);
    return forecast_next(history, series[t - 1].close, cfg, matcher);
}

/**
 * Rolling one-day-ahead backtest. The forecast for day t only reads closes
 * strictly before t.
 */
template <typename Matcher = IndexedMatcher>
BacktestReport backtest(const PriceSeries& series, const ForecastConfig& cfg,
                        const BacktestWindow& window = {}, const Matcher& matcher = {}) {
    const ResolvedWindow r = resolve_window(series, window);
    BacktestReport report;
    for (std::size_t t = r.first; t < r.last; ++t) {
        Forecast f = forecast_day(series, r.training_start, t, cfg, matcher);
        report.pairs.push_back({series[t].date, f.final_price, series[t].close});
        report.depths.push_back(f.depth());
        report.fallback.push_back(f.fallback_used);
        if (f.fallback_used) ++report.fallback_days;
    }
    report.n_days = report.pairs.size();
    report.rmse = rmse(report.pairs);
    report.mape = mape(report.pairs);
    return report;
}

} // namespace pulsecast
