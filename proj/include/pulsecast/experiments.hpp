#pragma once

#include <pulsecast/errors.hpp>
#include <pulsecast/evaluator.hpp>
#include <pulsecast/forecaster.hpp>
#include <pulsecast/fuzzifier.hpp>
#include <pulsecast/timeseries.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pulsecast {

struct SweepRow {
    std::string parameter; // "7", "2y", "250d"
    double rmse = 0.0;
    double mape = 0.0;
    double avg_match_len = 0.0;
    std::size_t fallback_days = 0;
};

struct SweepResult {
    enum class Kind { interval_count, training_length };
    Kind kind = Kind::interval_count;
    std::vector<SweepRow> rows;
};

inline SweepRow sweep_row(std::string parameter, const BacktestReport& r) {
    return {std::move(parameter), r.rmse, r.mape, r.average_depth(), r.fallback_days};
}

/// One backtest per interval count; the template's bounds and other settings are kept.
inline SweepResult sweep_intervals(const PriceSeries& series, std::span<const std::size_t> counts,
                                   const ForecastConfig& cfg_template,
                                   const BacktestWindow& window = {}) {
    if (counts.empty()) throw argument_error("interval sweep needs at least one count");
    SweepResult out{SweepResult::Kind::interval_count, {}};
    for (std::size_t n : counts) {
        ForecastConfig cfg = cfg_template;
        cfg.partition = UniversePartition(cfg_template.partition.d_min(),
                                          cfg_template.partition.d_max(), n);
        out.rows.push_back(sweep_row(std::to_string(n), backtest(series, cfg, window)));
    }
    return out;
}

inline std::vector<std::size_t> interval_range(std::size_t first, std::size_t last) {
    if (first > last) throw argument_error("empty interval range");
    std::vector<std::size_t> v;
    for (std::size_t n = first; n <= last; ++n) v.push_back(n);
    return v;
}

/// One backtest per training length over the same forecast days. Duplicate
/// lengths produce duplicate rows.
inline SweepResult sweep_training_length(const PriceSeries& series,
                                         std::span<const TrainingLimit> lengths,
                                         const ForecastConfig& cfg,
                                         const BacktestWindow& window = {}) {
    if (lengths.empty()) throw argument_error("training sweep needs at least one length");
    SweepResult out{SweepResult::Kind::training_length, {}};
    for (const auto& len : lengths) {
        BacktestWindow w = window;
        w.training = len;
        out.rows.push_back(sweep_row(to_string(len), backtest(series, cfg, w)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Absolute-price baseline

/**
 * First-order fuzzy time series over absolute prices: the universe is
 * [training min, training max] split into n equal intervals, relations are
 * A_i -> multiset of successor intervals, and the forecast is the mean
 * successor midpoint. An interval without relations forecasts its own
 * midpoint. Every forecast is a convex combination of midpoints, so it can
 * never leave the training price range.
 */
class BaselineForecaster {
public:
    BaselineForecaster(std::span<const double> training_closes, std::size_t n) : n_(n) {
        if (n < 1) throw argument_error("baseline needs at least one interval");
        if (training_closes.size() < 2)
            throw argument_error("baseline needs at least 2 training prices");
        auto [lo, hi] = std::minmax_element(training_closes.begin(), training_closes.end());
        lo_ = *lo;
        hi_ = *hi;
        if (!(lo_ < hi_)) throw argument_error("degenerate price universe (min == max)");
        for (std::size_t t = 1; t < training_closes.size(); ++t)
            ++relations_[interval_of(training_closes[t - 1])][interval_of(training_closes[t])];
    }

    double lower_bound() const noexcept { return lo_; }
    double upper_bound() const noexcept { return hi_; }
    std::size_t size() const noexcept { return n_; }
    double width() const noexcept { return (hi_ - lo_) / double(n_); }

    double midpoint(std::size_t i) const {
        return lo_ + double(2 * i - 1) * (hi_ - lo_) / double(2 * n_);
    }

    /// Prices outside the universe fall into the nearest boundary interval.
    std::size_t interval_of(double price) const {
        double x = std::clamp(price, lo_, hi_);
        auto i = std::size_t(std::floor((x - lo_) / width())) + 1;
        return std::min(i, n_);
    }

    double forecast(double previous_price) const {
        const std::size_t lhs = interval_of(previous_price);
        auto it = relations_.find(lhs);
        if (it == relations_.end()) return midpoint(lhs);
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& [rhs, c] : it->second) {
            sum += double(c) * midpoint(rhs);
            count += c;
        }
        return sum / double(count);
    }

private:
    std::size_t n_;
    double lo_ = 0.0;
    double hi_ = 0.0;
    std::map<std::size_t, std::map<std::size_t, std::size_t>> relations_;
};

/// Trains on closes [0, training_days) and forecasts days [training_days, end)
/// one step ahead from each actual previous close.
inline std::vector<EvalPair> baseline_absolute_fts(const PriceSeries& series, std::size_t n,
                                                   std::size_t training_days,
                                                   std::optional<std::size_t> end = {}) {
    const std::size_t stop = std::min(end.value_or(series.size()), series.size());
    if (training_days < 2 || training_days >= stop)
        throw argument_error("baseline needs >= 2 training days and at least one forecast day");
    const auto closes = series.closes();
    BaselineForecaster model(std::span<const double>(closes.data(), training_days), n);
    std::vector<EvalPair> out;
    for (std::size_t t = training_days; t < stop; ++t)
        out.push_back({series[t].date, model.forecast(closes[t - 1]), closes[t]});
    return out;
}

} // namespace pulsecast
