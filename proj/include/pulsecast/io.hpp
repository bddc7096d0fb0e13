#pragma once

#include <pulsecast/errors.hpp>
#include <pulsecast/evaluator.hpp>
#include <pulsecast/experiments.hpp>
#include <pulsecast/forecaster.hpp>
#include <pulsecast/timeseries.hpp>

#include <fmt/core.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pulsecast {

// ---------------------------------------------------------------------------
// CSV ingestion

struct IngestSpec {
    std::string path;
    std::string date_column = "date";
    std::string close_column = "close";
    std::string date_format = "%Y-%m-%d";
};

struct IngestedSeries {
    PriceSeries series;
    ValidationReport report;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// Comma-separated fields; double quotes group a field and "" escapes a quote.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back(trim(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) throw ingest_error("unterminated quote", line_no);
    fields.emplace_back(trim(field));
    return fields;
}

inline double parse_price(std::string_view text, std::size_t line_no) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw ingest_error("unparseable price '" + std::string(text) + "'", line_no);
    return value;
}

} // namespace detail

/// Reads (date, close) rows; the result is sorted by date. Non-positive closes
/// are reported, not rejected; duplicate dates are an error.
inline IngestedSeries read_price_csv(std::istream& in, const IngestSpec& spec) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> date_col, close_col;
    std::size_t header_width = 0;

    struct Row {
        PricePoint point;
        std::size_t line;
    };
    std::vector<Row> rows;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (detail::trim(view).empty() || view.starts_with('#')) continue;
        auto fields = detail::split_csv_line(view, line_no);
        if (!date_col) {
            header_width = fields.size();
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i] == spec.date_column) date_col = i;
                if (fields[i] == spec.close_column) close_col = i;
            }
            if (!date_col) throw ingest_error("missing column '" + spec.date_column + "'", line_no);
            if (!close_col)
                throw ingest_error("missing column '" + spec.close_column + "'", line_no);
            continue;
        }
        if (fields.size() != header_width)
            throw ingest_error("expected " + std::to_string(header_width) + " fields, got " +
                                   std::to_string(fields.size()),
                               line_no);
        Date d;
        try {
            d = parse_date(fields[*date_col], spec.date_format);
        } catch (const validation_error& e) {
            throw ingest_error(e.what(), line_no);
        }
        rows.push_back({{d, detail::parse_price(fields[*close_col], line_no)}, line_no});
    }
    if (!date_col) throw ingest_error("missing header row");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.point.date < b.point.date; });
    IngestedSeries out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].point.date == rows[i - 1].point.date)
            throw ingest_error("duplicate date " + format_date(rows[i].point.date), rows[i].line);
        out.series.points.push_back(rows[i].point);
    }
    out.report = validate_series(out.series);
    return out;
}

inline IngestedSeries ingest_csv(const IngestSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) throw ingest_error("cannot open '" + spec.path + "'");
    return read_price_csv(in, spec);
}

inline void write_price_csv(const PriceSeries& series, std::ostream& out) {
    out << "date,close\n";
    for (const auto& p : series.points) out << format_date(p.date) << ',' << fmt::format("{}", p.close) << '\n';
}

// ---------------------------------------------------------------------------
// Run configuration

enum class OutputFormat { csv, json };

struct RunConfig {
    double d_min = -7.0;
    double d_max = 7.0;
    std::size_t n = 3;
    std::size_t max_degree = default_max_degree;
    PercentScaling scaling = PercentScaling::unit_consistent;
    BacktestWindow window;
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = 42;

    ForecastConfig forecast_config() const {
        if (max_degree == 0) throw argument_error("max_degree must be at least 1");
        return {UniversePartition(d_min, d_max, n), max_degree, scaling};
    }
};

/// Ordered key/value pairs; the same keys are accepted by apply_config_entry.
inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> kv{
        {"d_min", fmt::format("{}", c.d_min)},
        {"d_max", fmt::format("{}", c.d_max)},
        {"n", std::to_string(c.n)},
        {"max_degree", std::to_string(c.max_degree)},
        {"scaling", std::string(to_string(c.scaling))},
        {"from", c.window.from ? format_date(*c.window.from) : ""},
        {"to", c.window.to ? format_date(*c.window.to) : ""},
        {"last", c.window.last_days ? std::to_string(*c.window.last_days) : ""},
        {"training", c.window.training ? to_string(*c.window.training) : ""},
        {"format", c.format == OutputFormat::csv ? "csv" : "json"},
        {"seed", std::to_string(c.seed)},
    };
    return kv;
}

namespace detail {

template <typename T>
T parse_integer(std::string_view key, std::string_view v) {
    T value{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
        throw argument_error("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
    return value;
}

inline double parse_real(std::string_view key, std::string_view v) {
    double value{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(value))
        throw argument_error("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
    return value;
}

} // namespace detail

inline void apply_config_entry(RunConfig& c, std::string_view key, std::string_view value) {
    if (key == "d_min") c.d_min = detail::parse_real(key, value);
    else if (key == "d_max") c.d_max = detail::parse_real(key, value);
    else if (key == "n") c.n = detail::parse_integer<std::size_t>(key, value);
    else if (key == "max_degree") c.max_degree = detail::parse_integer<std::size_t>(key, value);
    else if (key == "scaling") c.scaling = parse_scaling(value);
    else if (key == "from") c.window.from = value.empty() ? std::nullopt : std::optional(parse_date(value));
    else if (key == "to") c.window.to = value.empty() ? std::nullopt : std::optional(parse_date(value));
    else if (key == "last")
        c.window.last_days = value.empty() ? std::nullopt
                                           : std::optional(detail::parse_integer<std::size_t>(key, value));
    else if (key == "training")
        c.window.training = value.empty() ? std::nullopt : std::optional(parse_training_limit(value));
    else if (key == "format") {
        if (value == "csv") c.format = OutputFormat::csv;
        else if (value == "json") c.format = OutputFormat::json;
        else throw argument_error("format must be csv or json");
    } else if (key == "seed") c.seed = detail::parse_integer<std::uint64_t>(key, value);
    else throw argument_error("unknown config key '" + std::string(key) + "'");
}

/// key=value lines; blank lines and '#' comments are skipped.
inline void read_config(std::istream& in, RunConfig& c) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v = detail::trim(line);
        if (v.empty() || v.front() == '#') continue;
        auto eq = v.find('=');
        if (eq == std::string_view::npos)
            throw argument_error("config line " + std::to_string(line_no) + ": expected key=value");
        try {
            apply_config_entry(c, detail::trim(v.substr(0, eq)), detail::trim(v.substr(eq + 1)));
        } catch (const validation_error& e) {
            throw argument_error("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

inline void write_config(const RunConfig& c, std::ostream& out) {
    for (const auto& [k, v] : config_entries(c)) out << k << '=' << v << '\n';
}

inline nlohmann::ordered_json config_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : config_entries(c)) j[k] = v;
    return j;
}

// ---------------------------------------------------------------------------
// Reports

namespace detail {

inline void write_config_comment(const RunConfig& c, std::ostream& out) {
    for (const auto& [k, v] : config_entries(c)) out << "# " << k << '=' << v << '\n';
}

inline std::string fixed(double v) { return fmt::format("{:.6f}", v); }

} // namespace detail

inline void write_backtest_csv(const BacktestReport& r, const RunConfig& c, std::ostream& out) {
    detail::write_config_comment(c, out);
    out << "# rmse=" << detail::fixed(r.rmse) << '\n'
        << "# mape=" << detail::fixed(r.mape) << '\n'
        << "# n_days=" << r.n_days << '\n'
        << "# fallback_days=" << r.fallback_days << '\n';
    out << "date,forecast,actual,abs_error\n";
    for (const auto& p : r.pairs)
        out << format_date(p.date) << ',' << detail::fixed(p.forecast_price) << ','
            << detail::fixed(p.actual_price) << ','
            << detail::fixed(std::abs(p.forecast_price - p.actual_price)) << '\n';
}

inline void write_backtest_json(const BacktestReport& r, const RunConfig& c, std::ostream& out) {
    nlohmann::ordered_json j;
    j["config"] = config_json(c);
    j["rmse"] = r.rmse;
    j["mape"] = r.mape;
    j["n_days"] = r.n_days;
    j["fallback_days"] = r.fallback_days;
    j["avg_match_len"] = r.average_depth();
    auto& days = j["days"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.pairs.size(); ++i) {
        const auto& p = r.pairs[i];
        days.push_back({{"date", format_date(p.date)},
                        {"forecast", p.forecast_price},
                        {"actual", p.actual_price},
                        {"abs_error", std::abs(p.forecast_price - p.actual_price)},
                        {"depth", r.depths[i]},
                        {"fallback", bool(r.fallback[i])}});
    }
    out << j.dump(2) << '\n';
}

inline void write_sweep_csv(const SweepResult& s, const RunConfig& c, std::ostream& out) {
    detail::write_config_comment(c, out);
    out << (s.kind == SweepResult::Kind::interval_count ? "n" : "training")
        << ",rmse,mape,avg_match_len\n";
    for (const auto& row : s.rows)
        out << row.parameter << ',' << detail::fixed(row.rmse) << ',' << detail::fixed(row.mape)
            << ',' << detail::fixed(row.avg_match_len) << '\n';
}

inline void write_sweep_json(const SweepResult& s, const RunConfig& c, std::ostream& out) {
    nlohmann::ordered_json j;
    j["config"] = config_json(c);
    j["parameter"] = s.kind == SweepResult::Kind::interval_count ? "n" : "training";
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : s.rows)
        rows.push_back({{"value", row.parameter},
                        {"rmse", row.rmse},
                        {"mape", row.mape},
                        {"avg_match_len", row.avg_match_len},
                        {"fallback_days", row.fallback_days}});
    out << j.dump(2) << '\n';
}

} // namespace pulsecast
