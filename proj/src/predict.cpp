#include "ctxlens/predict.hpp"

#include "ctxlens/error.hpp"
#include "ctxlens/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ctxlens {

namespace {

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

std::string lowercased(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

std::optional<std::string> lemmatize(const std::string& token,
                                     const std::unordered_set<std::string>& vocab) {
    const std::string word = lowercased(token);
    if (word.empty()) return std::nullopt;
    if (vocab.count(word)) return word;

    struct Rule {
        const char* suffix;
        const char* replacement;
    };
    static constexpr Rule kRules[] = {
        {"ies", "y"}, {"es", ""}, {"s", ""}, {"ed", ""}, {"ing", ""},
    };

    for (const auto& rule : kRules) {
        const std::size_t len = std::char_traits<char>::length(rule.suffix);
        if (word.size() <= len || !word.ends_with(rule.suffix)) continue;
        const std::string base = word.substr(0, word.size() - len) + rule.replacement;
        if (vocab.count(base)) return base;
        // stopped -> stopp -> stop
        if (base.size() >= 2 && base.back() == base[base.size() - 2] &&
            !is_vowel(base.back())) {
            const std::string undoubled = base.substr(0, base.size() - 1);
            if (vocab.count(undoubled)) return undoubled;
        }
        // writing -> writ -> write
        const std::string restored = base + "e";
        if (vocab.count(restored)) return restored;
    }
    return std::nullopt;
}

Text prepare_text(const std::string& raw,
                  const std::unordered_set<std::string>& vocab) {
    Text text;
    std::vector<std::string> current;

    std::istringstream stream(raw);
    std::string chunk;
    auto close_sentence = [&] {
        if (!current.empty()) {
            text.sentences.push_back(std::move(current));
            current.clear();
        }
    };

    while (stream >> chunk) {
        ++text.raw_token_count;
        const bool boundary =
            chunk.back() == '.' || chunk.back() == '!' || chunk.back() == '?';

        // strip non-alphabetic characters from both ends
        std::size_t b = 0;
        std::size_t e = chunk.size();
        while (b < e && !std::isalpha(static_cast<unsigned char>(chunk[b]))) ++b;
        while (e > b && !std::isalpha(static_cast<unsigned char>(chunk[e - 1]))) --e;
        if (e > b) {
            if (auto lemma = lemmatize(chunk.substr(b, e - b), vocab))
                current.push_back(*lemma);
            else
                ++text.dropped_token_count;
        }
        if (boundary) close_sentence();
    }
    close_sentence();

    if (text.sentences.size() < 2)
        raise(ErrorCode::args, "no usable sentences: need at least 2, got " +
                                   std::to_string(text.sentences.size()));
    return text;
}

namespace {

struct Ranking {
    // word -> 1-based rank
    std::unordered_map<std::string, std::size_t> rank;
};

Ranking rank_vocabulary(const QuerySpace& space,
                        const std::vector<std::size_t>& vprime_rows,
                        const std::vector<std::string>& vprime,
                        const std::vector<std::size_t>& context_rows,
                        const ScalingProfile& profile) {
    std::vector<std::pair<double, const std::string*>> scored;
    scored.reserve(vprime.size());
    for (std::size_t i = 0; i < vprime.size(); ++i)
        scored.emplace_back(
            space.context_distance_rows(vprime_rows[i], context_rows, profile),
            &vprime[i]);
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first < b.first;
                  return *a.second < *b.second;
              });
    Ranking r;
    r.rank.reserve(scored.size());
    for (std::size_t pos = 0; pos < scored.size(); ++pos)
        r.rank.emplace(*scored[pos].second, pos + 1);
    return r;
}

SentenceRecord score_sentence(const std::vector<std::string>& sentence,
                              std::size_t index, std::size_t context_size,
                              const Ranking& ranking, std::size_t vprime_size) {
    SentenceRecord rec;
    rec.index = index;
    rec.context_size = context_size;

    double rank_sum = 0.0;
    std::size_t counted = 0;
    double type_sum = 0.0;
    std::size_t type_count = 0;
    std::unordered_set<std::string> seen;
    for (const auto& tok : sentence) {
        const auto it = ranking.rank.find(tok);
        if (it == ranking.rank.end()) {
            ++rec.excluded_tokens;
            continue;
        }
        rank_sum += static_cast<double>(it->second);
        ++counted;
        if (seen.insert(tok).second) {
            type_sum += static_cast<double>(it->second);
            ++type_count;
        }
    }
    if (counted == 0) {
        rec.skipped = true;
        return rec;
    }
    rec.ranked_tokens = counted;
    rec.avg_rank = rank_sum / static_cast<double>(counted);
    rec.error = rec.avg_rank / static_cast<double>(vprime_size);
    rec.avg_rank_types = type_sum / static_cast<double>(type_count);
    rec.error_types = rec.avg_rank_types / static_cast<double>(vprime_size);
    return rec;
}

std::vector<std::size_t> context_row_bag(const QuerySpace& space, const Text& text,
                                         std::size_t i, std::size_t n) {
    std::vector<std::size_t> rows;
    for (std::size_t s = i - 1 - n; s <= i - 2; ++s)
        for (const auto& tok : text.sentences[s]) rows.push_back(space.resolve(tok));
    return rows;
}

} // namespace

SentenceRecord prediction_error(const QuerySpace& space, const Text& text,
                                std::size_t i, std::size_t n,
                                const std::vector<std::string>& vprime,
                                bool unit_scaling) {
    const std::size_t N = text.sentences.size();
    if (n < 1 || i < n + 1 || i > N)
        raise(ErrorCode::range, "sentence index " + std::to_string(i) +
                                    " out of range for n=" + std::to_string(n));
    if (vprime.empty()) raise(ErrorCode::args, "empty evaluation vocabulary");

    std::vector<std::size_t> vprime_rows;
    vprime_rows.reserve(vprime.size());
    for (const auto& w : vprime) vprime_rows.push_back(space.resolve(w));

    const auto context_rows = context_row_bag(space, text, i, n);
    if (context_rows.empty()) {
        SentenceRecord rec;
        rec.index = i;
        rec.skipped = true;
        return rec;
    }
    const ScalingProfile profile =
        unit_scaling ? space.unit_profile() : space.profile_rows(context_rows);
    const Ranking ranking =
        rank_vocabulary(space, vprime_rows, vprime, context_rows, profile);
    return score_sentence(text.sentences[i - 1], i, context_rows.size(), ranking,
                          vprime.size());
}

namespace {

std::vector<SentenceRecord> evaluate_pass(const QuerySpace& space, const Text& text,
                                          std::size_t n,
                                          const std::vector<std::string>& vprime,
                                          const std::vector<std::size_t>& vprime_rows,
                                          bool unit_scaling, std::size_t threads) {
    const std::size_t N = text.sentences.size();
    std::vector<SentenceRecord> records(N - n);
    parallel_for(records.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t slot = begin; slot < end; ++slot) {
            const std::size_t i = n + 1 + slot;
            const auto context_rows = context_row_bag(space, text, i, n);
            if (context_rows.empty()) {
                records[slot].index = i;
                records[slot].skipped = true;
                continue;
            }
            const ScalingProfile profile = unit_scaling
                                               ? space.unit_profile()
                                               : space.profile_rows(context_rows);
            const Ranking ranking =
                rank_vocabulary(space, vprime_rows, vprime, context_rows, profile);
            records[slot] = score_sentence(text.sentences[i - 1], i,
                                           context_rows.size(), ranking, vprime.size());
        }
    });
    return records;
}

double mean_of(const std::vector<SentenceRecord>& records,
               double SentenceRecord::*field) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& rec : records) {
        if (rec.skipped) continue;
        total += rec.*field;
        ++count;
    }
    if (count == 0) raise(ErrorCode::state, "every sentence was skipped");
    return total / static_cast<double>(count);
}

} // namespace

PredictionReport evaluate(const QuerySpace& space, const Text& text, std::size_t n,
                          const std::vector<std::string>& vprime,
                          const EvaluateOptions& options) {
    const std::size_t N = text.sentences.size();
    if (n < 1 || n > N - 1)
        raise(ErrorCode::range,
              "n must be in [1, " + std::to_string(N - 1) + "], got " + std::to_string(n));
    if (vprime.empty()) raise(ErrorCode::args, "empty evaluation vocabulary");

    std::vector<std::size_t> vprime_rows;
    vprime_rows.reserve(vprime.size());
    for (const auto& w : vprime) vprime_rows.push_back(space.resolve(w));

    PredictionReport report;
    report.n = n;
    report.vprime_size = vprime.size();
    report.unit_scaling = options.unit_scaling;

    // The Euclidean baseline is the unit-scaling pass; when unit scaling
    // is forced, the adaptive records are that same pass.
    const auto euclidean_records =
        evaluate_pass(space, text, n, vprime, vprime_rows, true, options.threads);
    report.records = options.unit_scaling
                         ? euclidean_records
                         : evaluate_pass(space, text, n, vprime, vprime_rows, false,
                                         options.threads);
    report.mean_error = mean_of(report.records, &SentenceRecord::error);
    report.mean_error_types = mean_of(report.records, &SentenceRecord::error_types);
    report.euclidean_mean_error = mean_of(euclidean_records, &SentenceRecord::error);

    if (options.frequencies) {
        // context-independent ranking by descending corpus frequency
        std::vector<std::pair<double, const std::string*>> scored;
        scored.reserve(vprime.size());
        for (const auto& w : vprime) {
            const auto it = options.frequencies->find(w);
            scored.emplace_back(it == options.frequencies->end() ? 0.0 : it->second,
                                &w);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return *a.second < *b.second;
        });
        Ranking freq_ranking;
        for (std::size_t pos = 0; pos < scored.size(); ++pos)
            freq_ranking.rank.emplace(*scored[pos].second, pos + 1);

        std::vector<SentenceRecord> freq_records(N - n);
        for (std::size_t slot = 0; slot < freq_records.size(); ++slot) {
            const std::size_t i = n + 1 + slot;
            const auto context_rows = context_row_bag(space, text, i, n);
            if (context_rows.empty()) {
                freq_records[slot].index = i;
                freq_records[slot].skipped = true;
                continue;
            }
            freq_records[slot] = score_sentence(text.sentences[i - 1], i,
                                                context_rows.size(), freq_ranking,
                                                vprime.size());
        }
        report.frequency_mean_error = mean_of(freq_records, &SentenceRecord::error);
    }
    return report;
}

std::string PredictionReport::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["vprime_size"] = vprime_size;
    j["unit_scaling"] = unit_scaling;
    j["mean_error"] = mean_error;
    j["mean_error_types"] = mean_error_types;
    j["euclidean_mean_error"] = euclidean_mean_error;
    if (frequency_mean_error)
        j["frequency_mean_error"] = *frequency_mean_error;
    else
        j["frequency_mean_error"] = nullptr;
    j["chance_error"] = chance_error;
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& rec : records) {
        nlohmann::json r;
        r["index"] = rec.index;
        r["context_size"] = rec.context_size;
        r["skipped"] = rec.skipped;
        r["avg_rank"] = rec.avg_rank;
        r["error"] = rec.error;
        r["avg_rank_types"] = rec.avg_rank_types;
        r["error_types"] = rec.error_types;
        r["ranked_tokens"] = rec.ranked_tokens;
        r["excluded_tokens"] = rec.excluded_tokens;
        recs.push_back(std::move(r));
    }
    j["records"] = std::move(recs);
    return j.dump(2) + "\n";
}

std::string error_series_csv(const PredictionReport& report) {
    std::ostringstream out;
    out << "i,e_i,e_i_types,skipped\n";
    char buf[96];
    for (const auto& rec : report.records) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%d\n", rec.index, rec.error,
                      rec.error_types, rec.skipped ? 1 : 0);
        out << buf;
    }
    return out.str();
}

std::vector<ErrorSeriesRow> parse_error_series(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "i,e_i,e_i_types,skipped")
        raise(ErrorCode::parse, "bad error-series header");
    std::vector<ErrorSeriesRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ErrorSeriesRow row;
        int skipped = 0;
        char* end = nullptr;
        row.index = std::strtoull(line.c_str(), &end, 10);
        if (!end || *end != ',') raise(ErrorCode::parse, "bad error-series row: " + line);
        row.error = std::strtod(end + 1, &end);
        if (!end || *end != ',') raise(ErrorCode::parse, "bad error-series row: " + line);
        row.error_types = std::strtod(end + 1, &end);
        if (!end || *end != ',') raise(ErrorCode::parse, "bad error-series row: " + line);
        skipped = static_cast<int>(std::strtol(end + 1, &end, 10));
        row.skipped = skipped != 0;
        rows.push_back(row);
    }
    return rows;
}

std::unordered_map<std::string, double> load_frequency_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io, "cannot open frequency file " + path);
    std::unordered_map<std::string, double> freq;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            raise(ErrorCode::parse,
                  "bad frequency line " + std::to_string(lineno) + " (want word<TAB>count)");
        try {
            freq[lowercased(line.substr(0, tab))] = std::stod(line.substr(tab + 1));
        } catch (...) {
            raise(ErrorCode::parse, "bad count on frequency line " + std::to_string(lineno));
        }
    }
    return freq;
}

} // namespace ctxlens
