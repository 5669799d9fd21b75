#pragma once

#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

namespace ctxlens {

/// One dictionary entry: a headword, its positive sense number, and the
/// ordered definition token list. Distinct senses of the same headword
/// are distinct entries (`motor_1`, `motor_2`).
struct DictEntry {
    std::string headword;
    int sense = 1;
    std::vector<std::string> definition;

    std::string label() const { return headword + "_" + std::to_string(sense); }
};

/// A closed dictionary: every definition token is a member of the
/// defining vocabulary. Word-ids are lowercased at parse time and may
/// not contain '_' (reserved for the sense suffix).
struct Dictionary {
    std::vector<DictEntry> entries;                    // file order
    std::vector<std::string> defining_vocabulary;      // #vocab order
    std::unordered_map<std::string, std::size_t> vocab_index;

    bool in_vocabulary(const std::string& word) const {
        return vocab_index.count(word) > 0;
    }

    /// Indices into `entries` for every sense of a headword, file order.
    std::vector<std::size_t> senses_of(const std::string& headword) const;
};

/// Parses the line-oriented dictionary file format:
///   - `// ...` comment lines and blank lines are ignored
///   - first content line: `#vocab w1 w2 ... wk`
///   - entry lines: `<head>_<sense>: t1 t2 ... tn`
/// Errors carry the 1-based line number.
Dictionary parse_dictionary(std::istream& source);
Dictionary parse_dictionary_file(const std::string& path);

} // namespace ctxlens
