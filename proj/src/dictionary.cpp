#include "ctxlens/dictionary.hpp"

#include "ctxlens/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace ctxlens {

namespace {

std::string lowercased(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    raise(ErrorCode::parse, what + ", line " + std::to_string(line));
}

} // namespace

std::vector<std::size_t> Dictionary::senses_of(const std::string& headword) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].headword == headword) out.push_back(i);
    return out;
}

Dictionary parse_dictionary(std::istream& source) {
    Dictionary dict;
    std::set<std::pair<std::string, int>> seen;
    std::string line;
    std::size_t lineno = 0;
    bool have_vocab = false;

    while (std::getline(source, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        const auto first = trimmed.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        trimmed = trimmed.substr(first);
        if (trimmed.rfind("//", 0) == 0) continue;

        if (!have_vocab) {
            if (trimmed.rfind("#vocab", 0) != 0)
                parse_fail(lineno, "expected #vocab declaration before entries");
            std::istringstream words(trimmed.substr(6));
            std::string w;
            while (words >> w) {
                w = lowercased(w);
                if (w.find('_') != std::string::npos)
                    parse_fail(lineno, "vocabulary word '" + w + "' contains '_'");
                if (!dict.vocab_index.emplace(w, dict.defining_vocabulary.size()).second)
                    parse_fail(lineno, "duplicate vocabulary word '" + w + "'");
                dict.defining_vocabulary.push_back(w);
            }
            if (dict.defining_vocabulary.empty())
                parse_fail(lineno, "empty defining vocabulary");
            have_vocab = true;
            continue;
        }

        const auto colon = trimmed.find(':');
        if (colon == std::string::npos)
            parse_fail(lineno, "malformed entry (missing ':')");
        const std::string head_part = lowercased(trimmed.substr(0, colon));
        const auto underscore = head_part.rfind('_');
        if (underscore == std::string::npos || underscore == 0 ||
            underscore + 1 == head_part.size())
            parse_fail(lineno, "malformed headword '" + head_part + "' (want head_sense)");

        DictEntry entry;
        entry.headword = head_part.substr(0, underscore);
        const std::string sense_part = head_part.substr(underscore + 1);
        if (!std::all_of(sense_part.begin(), sense_part.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            parse_fail(lineno, "non-numeric sense suffix '" + sense_part + "'");
        entry.sense = std::stoi(sense_part);
        if (entry.sense < 1) parse_fail(lineno, "sense suffix must be positive");
        if (entry.headword.find('_') != std::string::npos)
            parse_fail(lineno, "headword '" + entry.headword + "' contains '_'");

        if (!seen.emplace(entry.headword, entry.sense).second)
            parse_fail(lineno, "duplicate entry " + entry.label());

        std::istringstream tokens(trimmed.substr(colon + 1));
        std::string tok;
        while (tokens >> tok) {
            tok = lowercased(tok);
            if (!dict.in_vocabulary(tok))
                parse_fail(lineno, "token " + tok + " not in defining vocabulary");
            entry.definition.push_back(tok);
        }
        if (entry.definition.empty())
            parse_fail(lineno, "empty definition for " + entry.label());
        dict.entries.push_back(std::move(entry));
    }

    if (!have_vocab)
        raise(ErrorCode::parse, "dictionary has no #vocab declaration");
    return dict;
}

Dictionary parse_dictionary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io, "cannot open dictionary " + path);
    return parse_dictionary(in);
}

} // namespace ctxlens
