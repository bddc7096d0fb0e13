#pragma once

#include <pulsecast/errors.hpp>
#include <pulsecast/timeseries.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace pulsecast {

inline constexpr std::size_t min_intervals = 2;
inline constexpr std::size_t max_intervals = 35;

/// 1-based interval label: A_i / u_i.
struct FuzzySymbol {
    std::size_t index = 1;

    friend bool operator==(const FuzzySymbol&, const FuzzySymbol&) = default;
    friend auto operator<=>(const FuzzySymbol&, const FuzzySymbol&) = default;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool closed_hi = false; // only the last interval includes its upper bound

    bool contains(double x) const noexcept {
        return x >= lo && (closed_hi ? x <= hi : x < hi);
    }
};

/**
 * Equal-width partition of the universe of discourse [d_min, d_max] (percent
 * changes) into n intervals. Interval i covers [d_min + (i-1)w, d_min + iw),
 * the last one is closed at d_max.
 */
class UniversePartition {
public:
    UniversePartition() : UniversePartition(-7.0, 7.0, 7) {}

    UniversePartition(double d_min, double d_max, std::size_t n)
        : d_min_(d_min), d_max_(d_max), n_(n) {
        if (!std::isfinite(d_min) || !std::isfinite(d_max) || !(d_min < d_max))
            throw argument_error("universe bounds must satisfy d_min < d_max");
        if (n < min_intervals || n > max_intervals)
            throw argument_error("interval count must be in [2, 35], got " + std::to_string(n));
    }

    double d_min() const noexcept { return d_min_; }
    double d_max() const noexcept { return d_max_; }
    std::size_t size() const noexcept { return n_; }
    double width() const noexcept { return (d_max_ - d_min_) / double(n_); }

    // Multiply before dividing: for symmetric bounds this puts 0 exactly on
    // the center boundary (even n) or the center midpoint (odd n).
    double lower(std::size_t i) const {
        check(i);
        return i == 1 ? d_min_ : d_min_ + double(i - 1) * (d_max_ - d_min_) / double(n_);
    }
    double upper(std::size_t i) const {
        check(i);
        return i == n_ ? d_max_ : d_min_ + double(i) * (d_max_ - d_min_) / double(n_);
    }

    Interval interval(std::size_t i) const { return {lower(i), upper(i), i == n_}; }

    double midpoint(std::size_t i) const {
        check(i);
        return d_min_ + double(2 * i - 1) * (d_max_ - d_min_) / double(2 * n_);
    }

    double clamp(double change) const noexcept { return std::clamp(change, d_min_, d_max_); }

    bool in_range(double change) const noexcept {
        return change >= d_min_ && change <= d_max_;
    }

    /// Interval containing the clamped change.
    FuzzySymbol interval_of(double change) const {
        if (std::isnan(change)) throw argument_error("cannot fuzzify NaN change");
        double x = clamp(change);
        auto guess = std::size_t(std::floor((x - d_min_) / width())) + 1;
        guess = std::clamp<std::size_t>(guess, 1, n_);
        // floor() can land one off near a boundary; settle against the exact bounds.
        while (guess > 1 && x < lower(guess)) --guess;
        while (guess < n_ && x >= upper(guess)) ++guess;
        return {guess};
    }

    friend bool operator==(const UniversePartition&, const UniversePartition&) = default;

private:
    void check(std::size_t i) const {
        if (i < 1 || i > n_)
            throw argument_error("interval index " + std::to_string(i) + " outside 1.." +
                                 std::to_string(n_));
    }

    double d_min_;
    double d_max_;
    std::size_t n_;
};

inline UniversePartition make_partition(double d_min, double d_max, std::size_t n) {
    return UniversePartition(d_min, d_max, n);
}

inline FuzzySymbol interval_of(const UniversePartition& p, double change) {
    return p.interval_of(change);
}

inline double midpoint(const UniversePartition& p, std::size_t i) { return p.midpoint(i); }

struct FuzzySeries {
    UniversePartition partition;
    std::vector<Date> dates;
    std::vector<FuzzySymbol> symbols;
    std::size_t clamp_count = 0;

    std::size_t size() const noexcept { return symbols.size(); }
    bool empty() const noexcept { return symbols.empty(); }
};

inline FuzzySeries fuzzify(const UniversePartition& p, const ReturnSeries& returns) {
    FuzzySeries out{p, {}, {}, 0};
    out.dates.reserve(returns.size());
    out.symbols.reserve(returns.size());
    for (const auto& e : returns.entries) {
        if (!p.in_range(e.change)) ++out.clamp_count;
        out.dates.push_back(e.date);
        out.symbols.push_back(p.interval_of(e.change));
    }
    return out;
}

} // namespace pulsecast
