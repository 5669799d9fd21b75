#pragma once

#include "ctxlens/activation.hpp"
#include "ctxlens/basis.hpp"
#include "ctxlens/dictionary.hpp"
#include "ctxlens/network.hpp"
#include "ctxlens/pipeline.hpp"

#include <string>
#include <vector>

namespace testfx {

inline std::string data_path(const char* name) {
    return std::string(CTXLENS_DATA_DIR) + "/" + name;
}

/// The toy200 pipeline built once and shared across test cases.
struct Toy200 {
    ctxlens::Dictionary dict;
    ctxlens::SemanticNetwork net;
    ctxlens::LabeledMatrix pvectors;
    ctxlens::Basis basis;    // m selected by the noise criterion
    ctxlens::LabeledMatrix qvectors;
    std::vector<std::string> function_words;
    std::vector<std::size_t> function_rows;
};

inline const Toy200& toy200() {
    static const Toy200 fixture = [] {
        Toy200 f;
        f.dict = ctxlens::parse_dictionary_file(data_path("toy200.dict"));
        f.net = ctxlens::build_network(f.dict);
        f.pvectors = ctxlens::build_all_pvectors(f.net, f.dict, {});
        f.function_words = ctxlens::load_word_list(data_path("function_words.txt"));
        const auto index = f.pvectors.label_index();
        for (const auto& w : f.function_words) f.function_rows.push_back(index.at(w));
        f.basis = ctxlens::fit_basis(f.pvectors);
        ctxlens::select_m(f.basis, f.pvectors, f.function_rows);
        f.qvectors = ctxlens::project_all(f.pvectors, f.basis);
        return f;
    }();
    return fixture;
}

} // namespace testfx
