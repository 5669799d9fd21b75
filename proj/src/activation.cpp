#include "ctxlens/activation.hpp"

#include "ctxlens/error.hpp"
#include "ctxlens/kernels.hpp"
#include "ctxlens/parallel.hpp"

#include <cmath>
#include <map>

namespace ctxlens {

namespace {

std::vector<double> seed_distribution(const SemanticNetwork& net, const Seed& seed) {
    if (seed.empty()) raise(ErrorCode::args, "empty activation seed");
    std::vector<double> s(net.node_count(), 0.0);
    double total = 0.0;
    for (const auto& [node, weight] : seed) {
        if (node >= net.node_count())
            raise(ErrorCode::range, "seed node index " + std::to_string(node) +
                                        " out of range");
        if (weight < 0.0) raise(ErrorCode::args, "negative seed weight");
        s[node] += weight;
        total += weight;
    }
    if (total <= 0.0) raise(ErrorCode::args, "seed weights sum to zero");
    kernels::scale(s.data(), 1.0 / total, s.size());
    return s;
}

// t <- W^T a  (activity flows along outgoing links)
void propagate(const SemanticNetwork& net, const std::vector<double>& a,
               std::vector<double>& t) {
    std::fill(t.begin(), t.end(), 0.0);
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        const auto links = net.links_of(i);
        const auto w = net.weights_of(i);
        for (std::size_t k = 0; k < links.size(); ++k) t[links[k]] += ai * w[k];
    }
}

void normalize(std::vector<double>& v) {
    const double total = kernels::sum(v.data(), v.size());
    if (total > 0.0) kernels::scale(v.data(), 1.0 / total, v.size());
}

} // namespace

void ActivationConfig::validate() const {
    if (steps < 1) raise(ErrorCode::args, "activation steps must be >= 1");
    if (!(retention >= 0.0 && retention < 1.0))
        raise(ErrorCode::args, "retention must be in [0,1)");
    if (!(source_clamp > 0.0 && source_clamp <= 1.0))
        raise(ErrorCode::args, "source_clamp must be in (0,1]");
}

std::vector<std::vector<double>> spread_trace(const SemanticNetwork& net,
                                              const Seed& seed,
                                              const ActivationConfig& cfg) {
    cfg.validate();
    const std::vector<double> s = seed_distribution(net, seed);

    std::vector<std::vector<double>> trace;
    trace.reserve(cfg.steps + 2);
    std::vector<double> a = s;
    std::vector<double> t(a.size());
    trace.push_back(a);
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        propagate(net, a, t);
        // a <- retention*a + (1-retention)*t
        kernels::axpby(1.0 - cfg.retention, t.data(), cfg.retention, a.data(), a.size());
        trace.push_back(a);
    }
    kernels::axpby(cfg.source_clamp, s.data(), 1.0, a.data(), a.size());
    normalize(a);
    trace.push_back(std::move(a));
    return trace;
}

PVector spread(const SemanticNetwork& net, const Seed& seed,
               const ActivationConfig& cfg) {
    cfg.validate();
    const std::vector<double> s = seed_distribution(net, seed);

    std::vector<double> a = s;
    std::vector<double> t(a.size());
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        propagate(net, a, t);
        kernels::axpby(1.0 - cfg.retention, t.data(), cfg.retention, a.data(), a.size());
    }
    kernels::axpby(cfg.source_clamp, s.data(), 1.0, a.data(), a.size());
    normalize(a);
    return {std::move(a), {}};
}

Seed seed_for_word(const SemanticNetwork& net, const Dictionary& dict,
                   const std::string& word) {
    const auto vocab_it = dict.vocab_index.find(word);
    if (vocab_it != dict.vocab_index.end())
        return {{static_cast<std::uint32_t>(vocab_it->second), 1.0}};

    // `head_N` picks one sense; a plain headword concatenates all senses.
    std::string head = word;
    int sense = 0;
    if (const auto underscore = word.rfind('_'); underscore != std::string::npos) {
        head = word.substr(0, underscore);
        try {
            sense = std::stoi(word.substr(underscore + 1));
        } catch (...) {
            raise(ErrorCode::unknown_word, "unknown word '" + word + "'");
        }
    }

    std::map<std::uint32_t, double> counts;
    bool found = false;
    for (const auto& entry : dict.entries) {
        if (entry.headword != head) continue;
        if (sense != 0 && entry.sense != sense) continue;
        found = true;
        for (const auto& tok : entry.definition)
            counts[static_cast<std::uint32_t>(dict.vocab_index.at(tok))] += 1.0;
    }
    if (!found) raise(ErrorCode::unknown_word, "unknown word '" + word + "'");

    Seed seed;
    seed.reserve(counts.size());
    for (const auto& [node, c] : counts) seed.push_back({node, c});
    (void)net;
    return seed;
}

PVector p_vector(const SemanticNetwork& net, const Dictionary& dict,
                 const std::string& word, const ActivationConfig& cfg) {
    PVector p = spread(net, seed_for_word(net, dict, word), cfg);
    p.source = word;
    return p;
}

LabeledMatrix build_all_pvectors(const SemanticNetwork& net, const Dictionary& dict,
                                 const ActivationConfig& cfg, std::size_t threads) {
    cfg.validate();
    LabeledMatrix m;
    m.cols = net.node_count();
    m.labels.reserve(dict.defining_vocabulary.size() + dict.entries.size());
    for (const auto& w : dict.defining_vocabulary) m.labels.push_back(w);
    for (const auto& entry : dict.entries) m.labels.push_back(entry.label());
    m.rows = m.labels.size();
    m.data.assign(m.rows * m.cols, 0.0);

    parallel_for(m.rows, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            PVector p;
            try {
                p = p_vector(net, dict, m.labels[r], cfg);
            } catch (const Error& e) {
                raise(e.code(), std::string(e.what()) + " (while building P-vector for '" +
                                    m.labels[r] + "')");
            }
            std::copy(p.values.begin(), p.values.end(), m.row(r).begin());
        }
    });
    return m;
}

} // namespace ctxlens
