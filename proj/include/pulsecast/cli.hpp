#pragma once

#include <pulsecast/errors.hpp>
#include <pulsecast/evaluator.hpp>
#include <pulsecast/experiments.hpp>
#include <pulsecast/forecaster.hpp>
#include <pulsecast/fuzzifier.hpp>
#include <pulsecast/io.hpp>
#include <pulsecast/matcher.hpp>
#include <pulsecast/selftest.hpp>
#include <pulsecast/timeseries.hpp>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace pulsecast::cli {

enum ExitCode : int { ok = 0, usage = 1, data = 2 };

namespace detail {

// Thrown for bad flag values detected after CLI11 parsing.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    std::optional<std::string> config_path;
    std::optional<std::string> d_min, d_max, n, max_degree, scaling, format, from, to, last,
        training, seed;
    bool compat_table3 = false;
    std::optional<std::string> output;

    std::string input;
    std::string date_col = "date";
    std::string close_col = "close";
    std::string date_format = "%Y-%m-%d";
};

inline void add_model_flags(CLI::App& app, CommonFlags& f) {
    app.add_option("--config", f.config_path, "key=value config file; flags override it");
    app.add_option("--n", f.n, "interval count (2..35, default 3)");
    app.add_option("--d-min", f.d_min, "lower universe bound in percent (default -7)");
    app.add_option("--d-max", f.d_max, "upper universe bound in percent (default 7)");
    app.add_option("--max-degree", f.max_degree, "longest suffix searched (default 20)");
    app.add_option("--scaling", f.scaling, "unit-consistent | table3-compat");
    app.add_flag("--compat-table3", f.compat_table3, "shorthand for --scaling table3-compat");
    app.add_option("--format", f.format, "csv | json");
    app.add_option("-o,--output", f.output, "write the report here instead of stdout");
}

inline void add_input_flags(CLI::App& app, CommonFlags& f, bool required) {
    auto* opt = app.add_option("-i,--input", f.input, "price CSV with a header row");
    if (required) opt->required();
    app.add_option("--date-col", f.date_col, "date column name");
    app.add_option("--close-col", f.close_col, "close column name");
    app.add_option("--date-format", f.date_format, "strftime-style date format");
}

inline void add_window_flags(CLI::App& app, CommonFlags& f) {
    app.add_option("--from", f.from, "first forecast date (inclusive)");
    app.add_option("--to", f.to, "last forecast date (inclusive)");
    app.add_option("--last", f.last, "forecast only the last N days");
    app.add_option("--training", f.training, "training history before the window, e.g. 500d or 2y");
}

inline RunConfig build_config(const CommonFlags& f) {
    RunConfig c;
    try {
        if (f.config_path) {
            std::ifstream in(*f.config_path);
            if (!in) throw usage_error("cannot open config file '" + *f.config_path + "'");
            read_config(in, c);
        }
        auto apply = [&](const char* key, const std::optional<std::string>& v) {
            if (v) apply_config_entry(c, key, *v);
        };
        apply("d_min", f.d_min);
        apply("d_max", f.d_max);
        apply("n", f.n);
        apply("max_degree", f.max_degree);
        apply("scaling", f.scaling);
        apply("format", f.format);
        apply("from", f.from);
        apply("to", f.to);
        apply("last", f.last);
        apply("training", f.training);
        apply("seed", f.seed);
        if (f.compat_table3) c.scaling = PercentScaling::table3_compat;
        (void)c.forecast_config(); // validates partition and degree
    } catch (const argument_error& e) {
        throw usage_error(e.what());
    } catch (const validation_error& e) {
        throw usage_error(e.what());
    }
    return c;
}

inline IngestedSeries load(const CommonFlags& f, std::ostream& err) {
    IngestedSeries in = ingest_csv({f.input, f.date_col, f.close_col, f.date_format});
    const auto& r = in.report;
    if (!r.non_positive_prices.empty())
        throw validation_error(std::to_string(r.non_positive_prices.size()) +
                               " non-positive closes in '" + f.input + "'");
    if (r.out_of_range_changes > 0)
        err << "note: " << r.out_of_range_changes
            << " daily changes fall outside the universe and will be clamped\n";
    return in;
}

// Runs `body` with the chosen output stream.
inline void with_output(const CommonFlags& f, std::ostream& out,
                        const std::function<void(std::ostream&)>& body) {
    if (!f.output) {
        body(out);
        return;
    }
    std::ofstream file(*f.output);
    if (!file) throw ingest_error("cannot write '" + *f.output + "'");
    body(file);
}

inline std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        out.push_back(pulsecast::detail::parse_real("list", pulsecast::detail::trim(item)));
    if (out.empty()) throw usage_error("empty number list");
    return out;
}

inline std::string pattern_label(std::span<const Symbol> query, std::size_t degree) {
    std::string s;
    for (std::size_t k = degree; k >= 1; --k) s += "A" + std::to_string(query[query.size() - k]);
    return s;
}

// Per-degree rows, one column per interval, then the percent and price.
inline void print_forecast_table(const std::vector<std::string>& patterns,
                                 const std::vector<DegreeStats>& stats, const Forecast& f,
                                 std::size_t n, double previous_price, std::ostream& out) {
    std::vector<std::string> head{"degree", "pattern"};
    for (std::size_t i = 1; i <= n; ++i) head.push_back("A" + std::to_string(i));
    head.push_back("percent");
    head.push_back("price");
    std::vector<std::vector<std::string>> rows{head};
    for (std::size_t r = 0; r < f.per_degree.size(); ++r) {
        std::vector<std::string> row{std::to_string(f.per_degree[r].degree),
                                     r < patterns.size() ? patterns[r] : ""};
        for (std::size_t i = 1; i <= n; ++i) {
            if (r < stats.size()) {
                auto it = stats[r].successor_counts.find(Symbol(i));
                row.push_back(std::to_string(it == stats[r].successor_counts.end() ? 0 : it->second));
            } else {
                row.push_back("-");
            }
        }
        row.push_back(fmt::format("{:.4f}", f.per_degree[r].forecast_percent));
        row.push_back(fmt::format("{:.4f}", f.per_degree[r].forecast_price));
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> width(head.size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "  " : "") << fmt::format("{:>{}}", row[c], width[c]);
        out << '\n';
    }
    out << fmt::format("previous price: {:.4f}\n", previous_price);
    if (f.fallback_used) out << "no degree-1 match: persistence forecast\n";
    out << fmt::format("final forecast: {:.4f}\n", f.final_price);
}

inline void print_forecast_json(const std::vector<std::string>& patterns,
                                const std::vector<DegreeStats>& stats, const Forecast& f,
                                double previous_price, const RunConfig& c, std::ostream& out) {
    nlohmann::ordered_json j;
    j["config"] = config_json(c);
    j["previous_price"] = previous_price;
    auto& rows = j["degrees"] = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < f.per_degree.size(); ++r) {
        nlohmann::ordered_json row;
        row["degree"] = f.per_degree[r].degree;
        if (r < patterns.size()) row["pattern"] = patterns[r];
        if (r < stats.size()) {
            nlohmann::ordered_json counts = nlohmann::ordered_json::object();
            for (const auto& [s, cnt] : stats[r].successor_counts) counts["A" + std::to_string(s)] = cnt;
            row["successor_counts"] = counts;
        }
        row["percent"] = f.per_degree[r].forecast_percent;
        row["price"] = f.per_degree[r].forecast_price;
        rows.push_back(row);
    }
    j["fallback_used"] = f.fallback_used;
    j["final_price"] = f.final_price;
    out << j.dump(2) << '\n';
}

// Rows of "pattern,A1,...,An" successor counts.
inline std::vector<DegreeStats> read_counts_table(const std::string& path, std::size_t n,
                                                  std::vector<std::string>& patterns) {
    std::ifstream in(path);
    if (!in) throw ingest_error("cannot open '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    std::vector<DegreeStats> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (pulsecast::detail::trim(line).empty() || line.front() == '#') continue;
        auto fields = pulsecast::detail::split_csv_line(line, line_no);
        if (header) {
            header = false;
            if (fields.size() != n + 1)
                throw ingest_error("counts table needs pattern plus " + std::to_string(n) +
                                       " interval columns",
                                   line_no);
            continue;
        }
        if (fields.size() != n + 1) throw ingest_error("wrong field count", line_no);
        DegreeStats row{out.size() + 1, {}, 0};
        for (std::size_t i = 1; i <= n; ++i) {
            double v = pulsecast::detail::parse_price(fields[i], line_no);
            if (v < 0 || v != std::floor(v)) throw ingest_error("counts must be whole numbers", line_no);
            if (v > 0) {
                row.successor_counts[Symbol(i)] = std::size_t(v);
                row.total += std::size_t(v);
            }
        }
        if (row.total == 0) throw ingest_error("a degree row needs at least one count", line_no);
        patterns.push_back(fields[0]);
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using namespace detail;
    CLI::App app{"Pulse-pattern fuzzy time-series forecasting and backtesting"};
    app.require_subcommand(1);
    CommonFlags f;

    auto* forecast = app.add_subcommand("forecast", "one-day-ahead forecast with per-degree table");
    add_model_flags(*forecast, f);
    add_input_flags(*forecast, f, false);
    std::optional<std::string> counts_path, percents;
    std::optional<double> previous;
    forecast->add_option("--counts", counts_path, "successor-count table (pattern,A1..An)");
    forecast->add_option("--percents", percents, "comma-separated per-degree percents");
    forecast->add_option("--previous", previous, "previous close for --counts/--percents");

    auto* bt = app.add_subcommand("backtest", "rolling one-day-ahead backtest");
    add_model_flags(*bt, f);
    add_input_flags(*bt, f, true);
    add_window_flags(*bt, f);

    std::size_t n_first = 2, n_last = 31, synth_days = 200;
    auto* si = app.add_subcommand("sweep-intervals", "backtest for each interval count");
    add_model_flags(*si, f);
    add_input_flags(*si, f, false);
    add_window_flags(*si, f);
    si->add_option("--n-min", n_first, "first interval count (default 2)");
    si->add_option("--n-max", n_last, "last interval count (default 31)");
    si->add_option("--synth-days", synth_days, "random-walk length when no --input is given");
    si->add_option("--seed", f.seed, "random-walk seed");

    std::string lengths;
    auto* st = app.add_subcommand("sweep-training", "backtest for each training length");
    add_model_flags(*st, f);
    add_input_flags(*st, f, false);
    add_window_flags(*st, f);
    st->add_option("--lengths", lengths, "comma-separated lengths, e.g. 250d,1y,2y")->required();
    st->add_option("--synth-days", synth_days, "random-walk length when no --input is given");
    st->add_option("--seed", f.seed, "random-walk seed");

    std::string scenario, variant = "rise-then-rise";
    bool walk = false;
    auto* sy = app.add_subcommand("synth", "emit a fixture or a seeded random walk as CSV");
    sy->add_option("--scenario", scenario, "fig1 | fig2");
    sy->add_option("--variant", variant,
                   "rise-then-rise | rise-then-fall | fall-then-fall | fall-then-rise");
    sy->add_flag("--random-walk", walk, "emit a seeded random walk instead");
    sy->add_option("--days", synth_days, "random-walk length");
    sy->add_option("--seed", f.seed, "random-walk seed");
    sy->add_option("-o,--output", f.output, "write here instead of stdout");

    auto* self = app.add_subcommand("selftest", "run the golden worked examples");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }

    RunConfig cfg;
    try {
        cfg = build_config(f);
        if (forecast->parsed() && f.input.empty() && !counts_path && !percents)
            throw usage_error("forecast needs --input, --counts or --percents");
        if (forecast->parsed() && (counts_path || percents) && !previous)
            throw usage_error("--counts/--percents need --previous");
        if (si->parsed() && (n_first > n_last))
            throw usage_error("--n-min must not exceed --n-max");
        if (sy->parsed() && scenario.empty() && !walk)
            throw usage_error("synth needs --scenario or --random-walk");
    } catch (const usage_error& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }

    auto synth_or_input = [&]() -> PriceSeries {
        if (!f.input.empty()) return load(f, err).series;
        RandomWalkParams p;
        p.days = synth_days;
        p.seed = cfg.seed;
        return random_walk(p);
    };

    try {
        if (self->parsed()) {
            bool all = true;
            for (const auto& c : run_golden_checks()) {
                out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  [" << c.detail << "]\n";
                all = all && c.passed;
            }
            return all ? ok : data;
        }

        if (sy->parsed()) {
            PriceSeries s;
            if (walk) {
                RandomWalkParams p;
                p.days = synth_days;
                p.seed = cfg.seed;
                s = random_walk(p);
            } else {
                s = synth_scenario(scenario, parse_variant(variant));
            }
            with_output(f, out, [&](std::ostream& o) { write_price_csv(s, o); });
            return ok;
        }

        const ForecastConfig fc = cfg.forecast_config();

        if (forecast->parsed()) {
            std::vector<std::string> patterns;
            std::vector<DegreeStats> stats;
            Forecast fcst;
            double prev = 0.0;
            if (percents) {
                prev = *previous;
                std::vector<double> prices;
                auto pcts = parse_number_list(*percents);
                for (double p : pcts) prices.push_back(price_from_percent(prev, p, fc.scaling));
                fcst = aggregate(prices, prev);
                for (std::size_t i = 0; i < fcst.per_degree.size(); ++i)
                    fcst.per_degree[i].forecast_percent = pcts[i];
            } else if (counts_path) {
                prev = *previous;
                stats = read_counts_table(*counts_path, fc.partition.size(), patterns);
                fcst = forecast_from_match(MatchResult{stats}, prev, fc);
            } else {
                PriceSeries s = load(f, err).series;
                FuzzySeries history = fuzzify(fc.partition, percent_changes(s));
                SymbolSequence text = to_symbol_sequence(history);
                QuerySuffix query = query_suffix(text, fc.max_degree);
                MatchResult m = match_degrees(text, query);
                prev = s.points.back().close;
                fcst = forecast_from_match(m, prev, fc);
                stats = m.stats;
                for (const auto& row : m.stats) patterns.push_back(pattern_label(query.symbols(), row.degree));
            }
            with_output(f, out, [&](std::ostream& o) {
                if (cfg.format == OutputFormat::json)
                    print_forecast_json(patterns, stats, fcst, prev, cfg, o);
                else
                    print_forecast_table(patterns, stats, fcst, fc.partition.size(), prev, o);
            });
            return ok;
        }

        if (bt->parsed()) {
            PriceSeries s = load(f, err).series;
            BacktestReport r = backtest(s, fc, cfg.window);
            with_output(f, out, [&](std::ostream& o) {
                if (cfg.format == OutputFormat::json) write_backtest_json(r, cfg, o);
                else write_backtest_csv(r, cfg, o);
            });
            return ok;
        }

        if (si->parsed()) {
            PriceSeries s = synth_or_input();
            auto counts = interval_range(n_first, n_last);
            SweepResult r = sweep_intervals(s, counts, fc, cfg.window);
            with_output(f, out, [&](std::ostream& o) {
                if (cfg.format == OutputFormat::json) write_sweep_json(r, cfg, o);
                else write_sweep_csv(r, cfg, o);
            });
            return ok;
        }

        if (st->parsed()) {
            std::vector<TrainingLimit> limits;
            std::stringstream in(lengths);
            std::string item;
            try {
                while (std::getline(in, item, ','))
                    limits.push_back(parse_training_limit(pulsecast::detail::trim(item)));
            } catch (const argument_error& e) {
                err << "error: " << e.what() << '\n';
                return usage;
            }
            PriceSeries s = synth_or_input();
            SweepResult r = sweep_training_length(s, limits, fc, cfg.window);
            with_output(f, out, [&](std::ostream& o) {
                if (cfg.format == OutputFormat::json) write_sweep_json(r, cfg, o);
                else write_sweep_csv(r, cfg, o);
            });
            return ok;
        }
    } catch (const usage_error& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return data;
    }
    return usage;
}

} // namespace pulsecast::cli
