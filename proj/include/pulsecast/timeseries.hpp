#pragma once

#include <pulsecast/errors.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace pulsecast {

using Date = std::chrono::year_month_day;

inline Date add_days(Date d, int days) {
    return Date{std::chrono::sys_days{d} + std::chrono::days{days}};
}

inline std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(d.year()), unsigned(d.month()),
                  unsigned(d.day()));
    return buf;
}

/// Parses `text` with a strftime-style format (default ISO-8601). Throws
/// validation_error when the text does not form a valid calendar date.
inline Date parse_date(std::string_view text, const std::string& format = "%Y-%m-%d") {
    std::tm tm{};
    std::istringstream in{std::string(text)};
    in >> std::get_time(&tm, format.c_str());
    if (in.fail())
        throw validation_error("unparseable date '" + std::string(text) + "'");
    in >> std::ws;
    if (!in.eof())
        throw validation_error("trailing characters in date '" + std::string(text) + "'");
    Date d{std::chrono::year{tm.tm_year + 1900}, std::chrono::month{unsigned(tm.tm_mon + 1)},
           std::chrono::day{unsigned(tm.tm_mday)}};
    if (!d.ok())
        throw validation_error("invalid calendar date '" + std::string(text) + "'");
    return d;
}

struct PricePoint {
    Date date;
    double close = 0.0;

    friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

// Ordered closes. Construction does not enforce the invariants so that
// validate_series can report on raw input; operations check what they need.
struct PriceSeries {
    std::vector<PricePoint> points;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
    const PricePoint& operator[](std::size_t i) const { return points[i]; }

    std::vector<double> closes() const {
        std::vector<double> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(p.close);
        return out;
    }

    /// Copy of points [first, last).
    PriceSeries slice(std::size_t first, std::size_t last) const {
        last = std::min(last, points.size());
        first = std::min(first, last);
        return PriceSeries{{points.begin() + std::ptrdiff_t(first),
                            points.begin() + std::ptrdiff_t(last)}};
    }

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;
};

struct ReturnEntry {
    Date date;
    double change = 0.0; // percent, signed

    friend bool operator==(const ReturnEntry&, const ReturnEntry&) = default;
};

// entries[k] is the change from point k to point k+1 and carries point k+1's date.
struct ReturnSeries {
    std::vector<ReturnEntry> entries;

    std::size_t size() const noexcept { return entries.size(); }
    bool empty() const noexcept { return entries.empty(); }
    const ReturnEntry& operator[](std::size_t i) const { return entries[i]; }
};

/// Daily change extent in percent: (close_t / close_{t-1} - 1) * 100, unrounded.
inline ReturnSeries percent_changes(const PriceSeries& series) {
    if (series.size() < 2)
        throw length_error("percent_changes needs at least 2 price points, got " +
                           std::to_string(series.size()));
    for (const auto& p : series.points)
        if (!(p.close > 0.0) || !std::isfinite(p.close))
            throw validation_error("non-positive or non-finite close on " + format_date(p.date));

    ReturnSeries out;
    out.entries.reserve(series.size() - 1);
    for (std::size_t t = 1; t < series.size(); ++t)
        out.entries.push_back(
            {series[t].date, (series[t].close / series[t - 1].close - 1.0) * 100.0});
    return out;
}

struct ValidationReport {
    std::vector<Date> duplicate_dates;
    std::vector<Date> non_monotone_dates; // first date of each out-of-order pair
    std::vector<std::size_t> non_positive_prices; // 0-based point indices
    std::size_t out_of_range_changes = 0;

    bool empty() const noexcept {
        return duplicate_dates.empty() && non_monotone_dates.empty() &&
               non_positive_prices.empty() && out_of_range_changes == 0;
    }
};

/// Report-only check. Changes outside [d_min, d_max] are counted (the
/// fuzzifier will clamp them) but do not make the series unusable.
inline ValidationReport validate_series(const PriceSeries& series, double d_min = -7.0,
                                        double d_max = 7.0) {
    ValidationReport report;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& p = series[i];
        if (!(p.close > 0.0) || !std::isfinite(p.close)) report.non_positive_prices.push_back(i);
        if (i == 0) continue;
        const auto& prev = series[i - 1];
        if (p.date == prev.date)
            report.duplicate_dates.push_back(p.date);
        else if (p.date < prev.date)
            report.non_monotone_dates.push_back(prev.date);
        if (prev.close > 0.0 && p.close > 0.0) {
            double change = (p.close / prev.close - 1.0) * 100.0;
            if (change < d_min || change > d_max) ++report.out_of_range_changes;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Synthetic fixtures

enum class ScenarioVariant { rise_then_rise, rise_then_fall, fall_then_fall, fall_then_rise };

inline ScenarioVariant parse_variant(std::string_view s) {
    if (s == "rise-then-rise") return ScenarioVariant::rise_then_rise;
    if (s == "rise-then-fall") return ScenarioVariant::rise_then_fall;
    if (s == "fall-then-fall") return ScenarioVariant::fall_then_fall;
    if (s == "fall-then-rise") return ScenarioVariant::fall_then_rise;
    throw argument_error("unknown scenario variant '" + std::string(s) + "'");
}

namespace detail {

inline constexpr std::array<double, 15> rising_training{1, 2, 4, 3, 4, 6, 5, 7,
                                                        8, 10, 9, 12, 13, 13, 15};
inline constexpr std::array<double, 5> continue_rise{16, 18, 17, 18, 19};
inline constexpr std::array<double, 5> turn_fall{14, 12, 13, 11, 10};
inline constexpr double mirror_offset = 20.0;

inline Date fixture_start() {
    using namespace std::chrono;
    return Date{year{2014}, month{12}, day{1}};
}

} // namespace detail

/// The four boundedness scenarios: "fig1" rises over days 1-15, "fig2" is its
/// mirror image (close' = 20 - close). Days 16-20 continue or reverse the trend.
inline PriceSeries synth_scenario(std::string_view name, ScenarioVariant variant) {
    bool mirrored = false;
    bool reverse_tail = false;
    if (name == "fig1") {
        if (variant == ScenarioVariant::rise_then_rise)
            reverse_tail = false;
        else if (variant == ScenarioVariant::rise_then_fall)
            reverse_tail = true;
        else
            throw argument_error("fig1 only has rise-then-rise and rise-then-fall variants");
    } else if (name == "fig2") {
        mirrored = true;
        if (variant == ScenarioVariant::fall_then_fall)
            reverse_tail = false;
        else if (variant == ScenarioVariant::fall_then_rise)
            reverse_tail = true;
        else
            throw argument_error("fig2 only has fall-then-fall and fall-then-rise variants");
    } else {
        throw argument_error("unknown scenario '" + std::string(name) + "'");
    }

    std::vector<double> closes(detail::rising_training.begin(), detail::rising_training.end());
    const auto& tail = reverse_tail ? detail::turn_fall : detail::continue_rise;
    closes.insert(closes.end(), tail.begin(), tail.end());

    PriceSeries out;
    Date d = detail::fixture_start();
    for (double c : closes) {
        out.points.push_back({d, mirrored ? detail::mirror_offset - c : c});
        d = add_days(d, 1);
    }
    return out;
}

/// Mirrors a series around the fixture offset; applying it twice is the identity.
inline PriceSeries mirror_series(const PriceSeries& s, double offset = detail::mirror_offset) {
    PriceSeries out = s;
    for (auto& p : out.points) p.close = offset - p.close;
    return out;
}

struct RandomWalkParams {
    std::size_t days = 200;
    std::uint64_t seed = 42;
    double start_price = 100.0;
    double drift_pct = 0.02;  // mean daily change, percent
    double sigma_pct = 1.2;   // daily change stdev, percent
    double limit_pct = 7.0;   // daily moves are capped at +/- limit
    Date start = Date{std::chrono::year{2014}, std::chrono::month{7}, std::chrono::day{1}};
};

namespace detail {

// mt19937_64 output is fixed by the standard; the <random> distributions are
// not, so the transform to normals is done here.
inline double unit_open(std::mt19937_64& rng) {
    return (double(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

inline double standard_normal(std::mt19937_64& rng) {
    double u1 = unit_open(rng);
    double u2 = unit_open(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline bool is_weekend(Date d) {
    std::chrono::weekday wd{std::chrono::sys_days{d}};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

} // namespace detail

/// Seeded geometric random walk on weekdays, with daily moves capped at the limit.
inline PriceSeries random_walk(const RandomWalkParams& params) {
    if (params.days == 0) throw argument_error("random_walk needs at least one day");
    if (!(params.start_price > 0.0)) throw argument_error("start_price must be positive");
    std::mt19937_64 rng(params.seed);
    PriceSeries out;
    out.points.reserve(params.days);
    Date d = params.start;
    while (detail::is_weekend(d)) d = add_days(d, 1);
    double price = params.start_price;
    for (std::size_t i = 0; i < params.days; ++i) {
        if (i > 0) {
            double change = params.drift_pct + params.sigma_pct * detail::standard_normal(rng);
            change = std::clamp(change, -params.limit_pct, params.limit_pct);
            price *= 1.0 + change / 100.0;
            do {
                d = add_days(d, 1);
            } while (detail::is_weekend(d));
        }
        out.points.push_back({d, price});
    }
    return out;
}

} // namespace pulsecast
