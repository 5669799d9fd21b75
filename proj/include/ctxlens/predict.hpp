#pragma once

#include "ctxlens/scaling.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ctxlens {

/// A tokenized, lemmatized, vocabulary-filtered text.
struct Text {
    std::vector<std::vector<std::string>> sentences;
    std::size_t raw_token_count = 0;
    std::size_t dropped_token_count = 0;
};

/// Reduces an inflected token to a vocabulary word, or nullopt. The raw
/// lowercased token is tried first, then the suffix rules in order:
/// -ies>y, -es>, -s>, -ed>, -ing>. After a strip, a doubled final
/// consonant is undoubled and a final e is restored as fallbacks
/// (stopped>stopp>stop, writing>writ>write).
std::optional<std::string> lemmatize(const std::string& token,
                                     const std::unordered_set<std::string>& vocab);

/// Splits on `.`, `!`, `?` followed by whitespace (or end of input),
/// lowercases, lemmatizes, drops unmatched tokens and empty sentences.
/// Sentence-final abbreviations are not special-cased ("Mr. Smith"
/// splits). Raises when fewer than 2 usable sentences remain.
Text prepare_text(const std::string& raw,
                  const std::unordered_set<std::string>& vocab);

struct SentenceRecord {
    std::size_t index = 0;         // 1-based sentence position i
    std::size_t context_size = 0;  // bag size of C_i
    bool skipped = false;          // empty context bag
    double avg_rank = 0.0;         // token-multiplicity ranks
    double error = 0.0;            // avg_rank / |V'|
    double avg_rank_types = 0.0;   // unique-type variant
    double error_types = 0.0;
    std::size_t ranked_tokens = 0;
    std::size_t excluded_tokens = 0;  // S_i tokens outside V'
};

struct PredictionReport {
    std::size_t n = 0;
    std::size_t vprime_size = 0;
    bool unit_scaling = false;
    std::vector<SentenceRecord> records;
    double mean_error = 0.0;
    double mean_error_types = 0.0;
    double euclidean_mean_error = 0.0;
    std::optional<double> frequency_mean_error;
    double chance_error = 0.5;

    std::string to_json() const;
};

struct EvaluateOptions {
    /// Forces every scaling factor to 1, turning the adaptive ranking
    /// into the plain-Euclidean ranking.
    bool unit_scaling = false;
    /// word -> corpus count for the prior-frequency baseline; the
    /// baseline is omitted when absent.
    const std::unordered_map<std::string, double>* frequencies = nullptr;
    std::size_t threads = 1;
};

/// Single-sentence prediction: ranks vprime by context distance from the
/// bag of sentences S_{i-n}..S_{i-1} and averages the 1-based ranks of
/// the tokens of S_i. i is 1-based, n+1 <= i <= N.
SentenceRecord prediction_error(const QuerySpace& space, const Text& text,
                                std::size_t i, std::size_t n,
                                const std::vector<std::string>& vprime,
                                bool unit_scaling = false);

/// Full evaluation over i = n+1..N plus the Euclidean and frequency
/// baselines.
PredictionReport evaluate(const QuerySpace& space, const Text& text, std::size_t n,
                          const std::vector<std::string>& vprime,
                          const EvaluateOptions& options = {});

/// CSV of (i, e_i, e_i_types, skipped); one row per evaluated sentence.
std::string error_series_csv(const PredictionReport& report);

struct ErrorSeriesRow {
    std::size_t index = 0;
    double error = 0.0;
    double error_types = 0.0;
    bool skipped = false;
};
std::vector<ErrorSeriesRow> parse_error_series(const std::string& csv);

/// `word<TAB>count` lines; blank lines ignored.
std::unordered_map<std::string, double> load_frequency_file(const std::string& path);

} // namespace ctxlens
