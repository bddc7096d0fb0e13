#pragma once

#include <pulsecast/errors.hpp>
#include <pulsecast/fuzzifier.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace pulsecast {

using Symbol = std::uint32_t;

/// Interval indices (1..alphabet_size) forming the text that is searched.
class SymbolSequence {
public:
    SymbolSequence(std::vector<Symbol> symbols, std::size_t alphabet_size)
        : symbols_(std::move(symbols)), alphabet_size_(alphabet_size) {
        if (alphabet_size_ == 0) throw argument_error("alphabet size must be positive");
        for (Symbol s : symbols_)
            if (s < 1 || s > alphabet_size_)
                throw argument_error("symbol " + std::to_string(s) + " outside alphabet 1.." +
                                     std::to_string(alphabet_size_));
    }

    std::span<const Symbol> symbols() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }

private:
    std::vector<Symbol> symbols_;
    std::size_t alphabet_size_;
};

inline SymbolSequence to_symbol_sequence(const FuzzySeries& fs) {
    std::vector<Symbol> out;
    out.reserve(fs.size());
    for (auto s : fs.symbols) out.push_back(Symbol(s.index));
    return SymbolSequence(std::move(out), fs.partition.size());
}

/// Recent symbols (most recent last); degrees 1..max_degree are searched.
class QuerySuffix {
public:
    QuerySuffix(std::vector<Symbol> symbols, std::size_t max_degree)
        : symbols_(std::move(symbols)), max_degree_(max_degree) {
        if (symbols_.empty()) throw argument_error("query suffix must not be empty");
        if (max_degree_ < 1 || max_degree_ > symbols_.size())
            throw argument_error("max_degree must be in 1.." + std::to_string(symbols_.size()));
    }

    explicit QuerySuffix(std::vector<Symbol> symbols)
        : QuerySuffix(symbols, symbols.size()) {}

    std::span<const Symbol> symbols() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    std::size_t max_degree() const noexcept { return max_degree_; }

    /// The d-th most recent symbol, d = 1 being the last one.
    Symbol back(std::size_t d) const { return symbols_[symbols_.size() - d]; }

private:
    std::vector<Symbol> symbols_;
    std::size_t max_degree_;
};

/// Successor tallies for one suffix length: N_i keyed by interval index.
struct DegreeStats {
    std::size_t degree = 0;
    std::map<Symbol, std::size_t> successor_counts;
    std::size_t total = 0;

    friend bool operator==(const DegreeStats&, const DegreeStats&) = default;
};

struct MatchResult {
    std::vector<DegreeStats> stats; // degrees 1..depth(), consecutive

    std::size_t depth() const noexcept { return stats.size(); }

    friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

namespace detail {

inline void check_match_inputs(const SymbolSequence& training, const QuerySuffix& query) {
    if (training.empty()) throw argument_error("training sequence must not be empty");
    for (Symbol s : query.symbols())
        if (s < 1 || s > training.alphabet_size())
            throw argument_error("query symbol " + std::to_string(s) + " outside alphabet");
}

} // namespace detail

/// Direct scan: for each degree d, test every end position j that still has a
/// successor. O(len * d) per degree. Serves as the oracle for MatchIndex.
inline MatchResult match_degrees_naive(const SymbolSequence& training, const QuerySuffix& query) {
    detail::check_match_inputs(training, query);
    const auto text = training.symbols();
    const std::size_t len = text.size();

    MatchResult result;
    for (std::size_t d = 1; d <= query.max_degree(); ++d) {
        DegreeStats row{d, {}, 0};
        for (std::size_t j = d - 1; j + 1 < len; ++j) {
            bool equal = true;
            for (std::size_t k = 1; k <= d && equal; ++k) equal = text[j + 1 - k] == query.back(k);
            if (equal) {
                ++row.successor_counts[text[j + 1]];
                ++row.total;
            }
        }
        if (row.total == 0) break;
        result.stats.push_back(std::move(row));
    }
    return result;
}

/**
 * Reusable index over a training sequence.
 *
 * Degree d searches for the last d query symbols ending anywhere in the
 * training text, so patterns grow to the left. The index therefore holds the
 * suffix array of the *reversed* text: in reverse, the pattern grows to the
 * right and each degree only narrows the previous suffix-array range by one
 * symbol. The successor of an occurrence in forward order is the symbol
 * preceding it in reverse order, so per-symbol prefix counts over that
 * "preceding symbol" column give every N_i in O(alphabet) per degree.
 */
class MatchIndex {
public:
    explicit MatchIndex(const SymbolSequence& training)
        : alphabet_size_(training.alphabet_size()) {
        if (training.empty()) throw argument_error("cannot index an empty training sequence");
        const auto text = training.symbols();
        reversed_.assign(text.rbegin(), text.rend());
        build_suffix_array();
        build_successor_ranks();
    }

    std::size_t size() const noexcept { return reversed_.size(); }
    std::size_t alphabet_size() const noexcept { return alphabet_size_; }

    MatchResult match(const QuerySuffix& query) const {
        for (Symbol s : query.symbols())
            if (s < 1 || s > alphabet_size_)
                throw argument_error("query symbol " + std::to_string(s) + " outside alphabet");

        const std::size_t len = reversed_.size();
        std::size_t lo = 0;
        std::size_t hi = len;
        MatchResult result;
        for (std::size_t d = 1; d <= query.max_degree(); ++d) {
            const Symbol want = query.back(d);
            const std::size_t offset = d - 1;
            // Within [lo, hi) all suffixes share their first d-1 symbols, so they
            // are ordered by the symbol at `offset` (0 when the suffix ended).
            auto key = [&](std::size_t k) -> Symbol {
                std::size_t pos = suffix_array_[k] + offset;
                return pos < len ? reversed_[pos] : 0;
            };
            std::size_t a = lo, b = hi;
            while (a < b) {
                std::size_t mid = a + (b - a) / 2;
                if (key(mid) < want) a = mid + 1; else b = mid;
            }
            std::size_t new_lo = a;
            b = hi;
            while (a < b) {
                std::size_t mid = a + (b - a) / 2;
                if (key(mid) <= want) a = mid + 1; else b = mid;
            }
            lo = new_lo;
            hi = a;
            if (lo == hi) break;

            DegreeStats row{d, {}, 0};
            for (Symbol s = 1; s <= alphabet_size_; ++s) {
                std::size_t c = rank(s, hi) - rank(s, lo);
                if (c != 0) {
                    row.successor_counts.emplace(s, c);
                    row.total += c;
                }
            }
            if (row.total == 0) break;
            result.stats.push_back(std::move(row));
        }
        return result;
    }

private:
    // Prefix doubling over integer ranks; O(n log^2 n), fine for daily series.
    void build_suffix_array() {
        const std::size_t n = reversed_.size();
        suffix_array_.resize(n);
        std::iota(suffix_array_.begin(), suffix_array_.end(), std::size_t{0});
        std::vector<std::size_t> rank(reversed_.begin(), reversed_.end());
        std::vector<std::size_t> next(n);
        for (std::size_t k = 1;; k <<= 1) {
            auto second = [&](std::size_t i) { return i + k < n ? rank[i + k] + 1 : 0; };
            auto less = [&](std::size_t a, std::size_t b) {
                if (rank[a] != rank[b]) return rank[a] < rank[b];
                return second(a) < second(b);
            };
            std::sort(suffix_array_.begin(), suffix_array_.end(), less);
            next[suffix_array_[0]] = 0;
            for (std::size_t i = 1; i < n; ++i)
                next[suffix_array_[i]] =
                    next[suffix_array_[i - 1]] + (less(suffix_array_[i - 1], suffix_array_[i]) ? 1 : 0);
            rank.swap(next);
            if (rank[suffix_array_[n - 1]] == n - 1 || k >= n) break;
        }
    }

    void build_successor_ranks() {
        const std::size_t n = reversed_.size();
        const std::size_t stride = n + 1;
        ranks_.assign((alphabet_size_ + 1) * stride, 0);
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t pos = suffix_array_[k];
            Symbol succ = pos == 0 ? 0 : reversed_[pos - 1];
            for (Symbol s = 1; s <= alphabet_size_; ++s)
                ranks_[s * stride + k + 1] = ranks_[s * stride + k] + (s == succ ? 1 : 0);
        }
    }

    std::size_t rank(Symbol s, std::size_t k) const {
        return ranks_[s * (reversed_.size() + 1) + k];
    }

    std::size_t alphabet_size_;
    std::vector<Symbol> reversed_;
    std::vector<std::size_t> suffix_array_;
    std::vector<std::uint32_t> ranks_;
};

inline MatchIndex build_index(const SymbolSequence& training) { return MatchIndex(training); }

inline MatchResult match_degrees(const SymbolSequence& training, const QuerySuffix& query) {
    detail::check_match_inputs(training, query);
    return MatchIndex(training).match(query);
}

struct IndexedMatcher {
    MatchResult operator()(const SymbolSequence& training, const QuerySuffix& query) const {
        return match_degrees(training, query);
    }
};

struct NaiveMatcher {
    MatchResult operator()(const SymbolSequence& training, const QuerySuffix& query) const {
        return match_degrees_naive(training, query);
    }
};

} // namespace pulsecast
