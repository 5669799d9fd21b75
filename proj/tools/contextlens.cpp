// contextlens: build and query an adaptively scaled semantic space
// derived from a closed-vocabulary dictionary.

#include "ctxlens/activation.hpp"
#include "ctxlens/basis.hpp"
#include "ctxlens/dictionary.hpp"
#include "ctxlens/error.hpp"
#include "ctxlens/io.hpp"
#include "ctxlens/matrix.hpp"
#include "ctxlens/network.hpp"
#include "ctxlens/parallel.hpp"
#include "ctxlens/pipeline.hpp"
#include "ctxlens/predict.hpp"
#include "ctxlens/scaling.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <iostream>
#include <unordered_set>

namespace {

using namespace ctxlens;

ContextBag parse_context(const std::string& spec) {
    ContextBag bag;
    std::string current;
    for (const char c : spec + ",") {
        if (c == ',') {
            std::string w;
            for (const char ch : current)
                if (!std::isspace(static_cast<unsigned char>(ch)))
                    w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
            if (!w.empty()) bag.push_back(w);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (bag.empty()) raise(ErrorCode::args, "empty context");
    return bag;
}

std::string head_of(const std::string& label) {
    const auto underscore = label.rfind('_');
    return underscore == std::string::npos ? label : label.substr(0, underscore);
}

/// Plain-word rows of a Q/P matrix are the defining vocabulary.
std::vector<std::string> vocabulary_labels(const LabeledMatrix& m) {
    std::vector<std::string> vocab;
    for (const auto& label : m.labels)
        if (label.find('_') == std::string::npos) vocab.push_back(label);
    return vocab;
}

int run_build_network(const std::string& dict_path, const std::string& out_path) {
    const Dictionary dict = parse_dictionary_file(dict_path);
    const SemanticNetwork net = build_network(dict);
    net.save(out_path);
    std::cout << "network: nodes=" << net.node_count() << " links=" << net.link_count()
              << " -> " << out_path << "\n";
    return 0;
}

int run_compute_pvectors(const std::string& network_path, const std::string& dict_path,
                         const ActivationConfig& cfg, std::size_t threads,
                         const std::string& out_path, const std::string& trace_word,
                         const std::string& trace_out) {
    const Dictionary dict = parse_dictionary_file(dict_path);
    const SemanticNetwork net = SemanticNetwork::load(network_path);

    if (!trace_word.empty()) {
        const auto trace = spread_trace(net, seed_for_word(net, dict, trace_word), cfg);
        std::string csv = "step";
        for (const auto& node : net.nodes) csv += "," + node;
        csv += "\n";
        char buf[32];
        for (std::size_t t = 0; t < trace.size(); ++t) {
            const bool final_row = t + 1 == trace.size();
            csv += final_row ? "result" : std::to_string(t);
            for (const double v : trace[t]) {
                std::snprintf(buf, sizeof buf, ",%.17g", v);
                csv += buf;
            }
            csv += "\n";
        }
        if (trace_out.empty())
            std::cout << csv;
        else
            io::write_file_atomic(trace_out, csv);
    }

    const LabeledMatrix m = build_all_pvectors(net, dict, cfg, resolve_threads(threads));
    m.save(out_path);
    std::cout << "pvectors: rows=" << m.rows << " cols=" << m.cols << " -> " << out_path
              << "\n";
    return 0;
}

int run_fit_basis(const std::string& pvectors_path, const std::string& fwords_path,
                  const std::string& out_path, const std::string& curve_path,
                  std::size_t m_override, std::size_t threads) {
    const LabeledMatrix pvectors = LabeledMatrix::load(pvectors_path);
    const auto function_words = load_word_list(fwords_path);
    const auto index = pvectors.label_index();
    std::vector<std::size_t> function_rows;
    for (const auto& w : function_words) {
        const auto it = index.find(w);
        if (it == index.end())
            raise(ErrorCode::unknown_word, "function word '" + w + "' is not a vocabulary row");
        function_rows.push_back(it->second);
    }

    const std::size_t nthreads = resolve_threads(threads);
    Basis basis = fit_basis(pvectors, nthreads);

    if (!curve_path.empty()) {
        const NoiseCurve curve = noise_curve(basis, pvectors, function_rows, nthreads);
        std::string csv = "m,noise_proportion,function_mass,total_mass\n";
        char buf[128];
        for (std::size_t m = 1; m <= basis.dim; ++m) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", m,
                          curve.proportion[m - 1], curve.function_mass[m - 1],
                          curve.total_mass[m - 1]);
            csv += buf;
        }
        io::write_file_atomic(curve_path, csv);
    }

    if (m_override > 0) {
        if (m_override > basis.dim) raise(ErrorCode::range, "m override exceeds dimensions");
        basis.m = m_override;
    } else {
        select_m(basis, pvectors, function_rows, nthreads);
    }
    basis.save(out_path);
    std::cout << "basis: dim=" << basis.dim << " m=" << basis.m
              << " variance_coverage=" << cumulative_variance(basis, basis.m) << " -> "
              << out_path << "\n";
    return 0;
}

int run_project(const std::string& basis_path, const std::string& pvectors_path,
                const std::string& out_path, std::size_t threads) {
    const Basis basis = Basis::load(basis_path);
    const LabeledMatrix pvectors = LabeledMatrix::load(pvectors_path);
    const LabeledMatrix q = project_all(pvectors, basis, resolve_threads(threads));
    q.save(out_path);
    std::cout << "qvectors: rows=" << q.rows << " m=" << q.cols << " -> " << out_path << "\n";
    return 0;
}

int run_neighbors(const std::string& basis_path, const std::string& qvectors_path,
                  const std::string& context_spec, std::size_t k,
                  const std::string& exclude_path) {
    const Basis basis = Basis::load(basis_path);
    const LabeledMatrix q = LabeledMatrix::load(qvectors_path);
    const QuerySpace space(basis, q);
    const ContextBag context = parse_context(context_spec);

    std::vector<std::string> candidates;
    if (!exclude_path.empty()) {
        const auto excluded_words = load_word_list(exclude_path);
        const std::unordered_set<std::string> excluded(excluded_words.begin(),
                                                       excluded_words.end());
        for (const auto& label : q.labels)
            if (!excluded.count(label) && !excluded.count(head_of(label)))
                candidates.push_back(label);
    }

    const auto neighbors = space.nearest(context, k, candidates);
    std::printf("%-20s %s\n", "word", "d(w,C)");
    for (const auto& nb : neighbors) std::printf("%-20s %.6f\n", nb.word.c_str(), nb.distance);
    return 0;
}

int run_distance(const std::string& basis_path, const std::string& qvectors_path,
                 const std::string& context_spec, const std::string& w1,
                 const std::string& w2) {
    const Basis basis = Basis::load(basis_path);
    const LabeledMatrix q = LabeledMatrix::load(qvectors_path);
    const QuerySpace space(basis, q);
    const ContextBag context = parse_context(context_spec);
    const ScalingProfile profile = space.profile(context);
    std::printf("%.17g\n", space.distance(w1, w2, profile));
    return 0;
}

int run_predict(const std::string& basis_path, const std::string& qvectors_path,
                const std::string& text_path, std::size_t n,
                const std::string& fwords_path, const std::string& freq_path,
                const std::string& report_path, const std::string& csv_path,
                std::size_t threads) {
    const Basis basis = Basis::load(basis_path);
    const LabeledMatrix q = LabeledMatrix::load(qvectors_path);
    const QuerySpace space(basis, q);

    const std::vector<std::string> vocab = vocabulary_labels(q);
    const std::unordered_set<std::string> vocab_set(vocab.begin(), vocab.end());

    const auto function_words = load_word_list(fwords_path);
    const std::unordered_set<std::string> fset(function_words.begin(), function_words.end());
    std::vector<std::string> vprime;
    for (const auto& w : vocab)
        if (!fset.count(w)) vprime.push_back(w);

    const Text text = prepare_text(io::read_file(text_path), vocab_set);

    EvaluateOptions options;
    options.threads = resolve_threads(threads);
    std::unordered_map<std::string, double> freq;
    if (!freq_path.empty()) {
        try {
            freq = load_frequency_file(freq_path);
            options.frequencies = &freq;
        } catch (const Error& e) {
            std::cerr << "warning: frequency baseline disabled: " << e.what() << "\n";
        }
    }

    const PredictionReport report = evaluate(space, text, n, vprime, options);
    if (!report_path.empty()) io::write_file_atomic(report_path, report.to_json());
    if (!csv_path.empty()) io::write_file_atomic(csv_path, error_series_csv(report));

    std::cout << "sentences=" << text.sentences.size() << " |V'|=" << report.vprime_size
              << " n=" << report.n << "\n";
    std::cout << "mean_error=" << report.mean_error
              << " euclidean=" << report.euclidean_mean_error;
    if (report.frequency_mean_error)
        std::cout << " frequency=" << *report.frequency_mean_error;
    std::cout << " chance=" << report.chance_error << "\n";
    return 0;
}

int run_pipeline_cmd(const std::string& config_path, const PipelineConfig& overrides,
                     const std::vector<std::pair<const CLI::Option*, std::function<void(PipelineConfig&)>>>& applied) {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = load_pipeline_config(config_path);
    for (const auto& [option, apply] : applied)
        if (!option->empty()) apply(cfg);
    (void)overrides;

    const PipelineOutcome outcome = run_pipeline(cfg, &std::cout);
    std::cout << "manifest: " << outcome.manifest_path << " (" << outcome.rebuilt_count
              << " stages rebuilt)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"context-sensitive semantic distance over a dictionary network"};
    app.require_subcommand(1);

    std::string dict_path, network_path, pvectors_path, basis_path, qvectors_path;
    std::string out_path, fwords_path, curve_path, context_spec, exclude_path;
    std::string text_path, freq_path, report_path, csv_path, trace_word, trace_out;
    std::string config_path, w1, w2;
    std::vector<std::string> info_paths;
    std::size_t k = 15, n = 4, m_override = 0, threads = 0;
    ActivationConfig acfg;

    auto* build = app.add_subcommand("build-network", "parse a dictionary and build the network");
    build->add_option("--dict", dict_path)->required();
    build->add_option("--out", out_path)->required();

    auto* pvec = app.add_subcommand("compute-pvectors", "spread activation for every word");
    pvec->add_option("--network", network_path)->required();
    pvec->add_option("--dict", dict_path)->required();
    pvec->add_option("--steps", acfg.steps);
    pvec->add_option("--retention", acfg.retention);
    pvec->add_option("--clamp", acfg.source_clamp);
    pvec->add_option("--threads", threads);
    pvec->add_option("--trace", trace_word, "emit per-step activity CSV for one word");
    pvec->add_option("--trace-out", trace_out);
    pvec->add_option("--out", out_path)->required();

    auto* fit = app.add_subcommand("fit-basis", "fit principal components and select m");
    fit->add_option("--pvectors", pvectors_path)->required();
    fit->add_option("--function-words", fwords_path)->required();
    fit->add_option("--dump-noise-curve", curve_path);
    fit->add_option("--m-override", m_override);
    fit->add_option("--threads", threads);
    fit->add_option("--out", out_path)->required();

    auto* proj = app.add_subcommand("project", "map P-vectors to Q-vectors");
    proj->add_option("--basis", basis_path)->required();
    proj->add_option("--pvectors", pvectors_path)->required();
    proj->add_option("--threads", threads);
    proj->add_option("--out", out_path)->required();

    auto* nb = app.add_subcommand("neighbors", "closest words to a context");
    nb->add_option("--basis", basis_path)->required();
    nb->add_option("--qvectors", qvectors_path)->required();
    nb->add_option("--context", context_spec, "comma-separated word bag")->required();
    nb->add_option("--k", k);
    nb->add_option("--exclude", exclude_path, "word list to exclude from candidates");

    auto* dist = app.add_subcommand("distance", "context-sensitive distance between two words");
    dist->add_option("--basis", basis_path)->required();
    dist->add_option("--qvectors", qvectors_path)->required();
    dist->add_option("--context", context_spec)->required();
    dist->add_option("w1", w1)->required();
    dist->add_option("w2", w2)->required();

    auto* pred = app.add_subcommand("predict", "word-prediction evaluation over a text");
    pred->add_option("--basis", basis_path)->required();
    pred->add_option("--qvectors", qvectors_path)->required();
    pred->add_option("--text", text_path)->required();
    pred->add_option("--n", n);
    pred->add_option("--function-words", fwords_path)->required();
    pred->add_option("--freq", freq_path);
    pred->add_option("--out", report_path);
    pred->add_option("--csv", csv_path);
    pred->add_option("--threads", threads);

    PipelineConfig overrides;
    auto* pipe = app.add_subcommand("pipeline", "run the whole build with stage caching");
    pipe->add_option("--config", config_path);
    std::vector<std::pair<const CLI::Option*, std::function<void(PipelineConfig&)>>> pipe_overrides;
    auto pipe_opt = [&](const char* flag, auto member) {
        const CLI::Option* option = pipe->add_option(flag, overrides.*member);
        pipe_overrides.emplace_back(option, [&overrides, member](PipelineConfig& cfg) {
            cfg.*member = overrides.*member;
        });
    };
    pipe_opt("--dict", &PipelineConfig::dict_path);
    pipe_opt("--function-words", &PipelineConfig::function_words_path);
    pipe_opt("--output-dir", &PipelineConfig::output_dir);
    pipe_opt("--steps", &PipelineConfig::steps);
    pipe_opt("--retention", &PipelineConfig::retention);
    pipe_opt("--clamp", &PipelineConfig::source_clamp);
    pipe_opt("--m-override", &PipelineConfig::m_override);
    pipe_opt("--threads", &PipelineConfig::thread_count);

    auto* info = app.add_subcommand("info", "summarize artifact files");
    info->add_option("paths", info_paths)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return run_build_network(dict_path, out_path);
        if (pvec->parsed())
            return run_compute_pvectors(network_path, dict_path, acfg, threads, out_path,
                                        trace_word, trace_out);
        if (fit->parsed())
            return run_fit_basis(pvectors_path, fwords_path, out_path, curve_path,
                                 m_override, threads);
        if (proj->parsed()) return run_project(basis_path, pvectors_path, out_path, threads);
        if (nb->parsed())
            return run_neighbors(basis_path, qvectors_path, context_spec, k, exclude_path);
        if (dist->parsed())
            return run_distance(basis_path, qvectors_path, context_spec, w1, w2);
        if (pred->parsed())
            return run_predict(basis_path, qvectors_path, text_path, n, fwords_path,
                               freq_path, report_path, csv_path, threads);
        if (pipe->parsed()) return run_pipeline_cmd(config_path, overrides, pipe_overrides);
        if (info->parsed()) {
            for (const auto& path : info_paths)
                std::cout << ctxlens::artifact_info(path) << "\n";
            return 0;
        }
    } catch (const ctxlens::Error& e) {
        std::cerr << "error: " << ctxlens::error_code_name(e.code()) << ": " << e.what()
                  << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: E_INTERNAL: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
