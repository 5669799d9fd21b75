#include "ctxlens/pipeline.hpp"

#include "ctxlens/activation.hpp"
#include "ctxlens/basis.hpp"
#include "ctxlens/dictionary.hpp"
#include "ctxlens/error.hpp"
#include "ctxlens/io.hpp"
#include "ctxlens/network.hpp"
#include "ctxlens/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ctxlens {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

void PipelineConfig::validate() const {
    if (dict_path.empty()) raise(ErrorCode::args, "config: dict path is required");
    if (function_words_path.empty())
        raise(ErrorCode::args, "config: function_words path is required");
    if (steps < 1) raise(ErrorCode::args, "config: steps must be >= 1");
    if (!(retention >= 0.0 && retention < 1.0))
        raise(ErrorCode::args, "config: retention must be in [0,1)");
    if (!(source_clamp > 0.0 && source_clamp <= 1.0))
        raise(ErrorCode::args, "config: clamp must be in (0,1]");
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io, "cannot open config " + path.string());
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            raise(ErrorCode::parse,
                  "config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        try {
            if (key == "dict") cfg.dict_path = value;
            else if (key == "function_words") cfg.function_words_path = value;
            else if (key == "steps") cfg.steps = std::stoul(value);
            else if (key == "retention") cfg.retention = std::stod(value);
            else if (key == "clamp") cfg.source_clamp = std::stod(value);
            else if (key == "m_override") cfg.m_override = std::stoul(value);
            else if (key == "output_dir") cfg.output_dir = value;
            else if (key == "threads") cfg.thread_count = std::stoul(value);
            else
                raise(ErrorCode::parse, "config line " + std::to_string(lineno) +
                                            ": unknown key '" + key + "'");
        } catch (const Error&) {
            throw;
        } catch (...) {
            raise(ErrorCode::parse,
                  "config line " + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    return cfg;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io, "cannot open word list " + path.string());
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = trim(line);
        if (w.empty()) continue;
        std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) {
            return static_cast<char>(std::tolower(c));
        });
        words.push_back(std::move(w));
    }
    if (words.empty()) raise(ErrorCode::args, "word list " + path.string() + " is empty");
    return words;
}

namespace {

using nlohmann::json;

json load_manifest(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return json{{"version", 1}, {"stages", json::object()}};
    try {
        json m = json::parse(io::read_file(path));
        if (!m.contains("stages") || !m["stages"].is_object())
            return json{{"version", 1}, {"stages", json::object()}};
        return m;
    } catch (...) {
        // unreadable manifest: rebuild everything
        return json{{"version", 1}, {"stages", json::object()}};
    }
}

std::string file_hash_or_missing(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return "<missing>";
    return io::sha256_hex(io::read_file(path));
}

struct StagePlan {
    std::string name;
    std::vector<std::filesystem::path> inputs;
    std::string params;
    std::filesystem::path output;
};

bool stage_clean(const json& manifest, const StagePlan& plan) {
    const auto& stages = manifest["stages"];
    if (!stages.contains(plan.name)) return false;
    const auto& rec = stages[plan.name];
    if (rec.value("params", "") != plan.params) return false;
    if (!rec.contains("inputs") || !rec.contains("output")) return false;
    for (const auto& input : plan.inputs) {
        const std::string key = input.string();
        if (!rec["inputs"].contains(key)) return false;
        if (rec["inputs"][key].get<std::string>() != file_hash_or_missing(input))
            return false;
    }
    const auto& out = rec["output"];
    if (out.value("path", "") != plan.output.string()) return false;
    return out.value("hash", "") == file_hash_or_missing(plan.output);
}

void record_stage(json& manifest, const StagePlan& plan) {
    json inputs = json::object();
    for (const auto& input : plan.inputs)
        inputs[input.string()] = file_hash_or_missing(input);
    manifest["stages"][plan.name] = {
        {"params", plan.params},
        {"inputs", std::move(inputs)},
        {"output",
         {{"path", plan.output.string()}, {"hash", file_hash_or_missing(plan.output)}}},
    };
}

} // namespace

PipelineOutcome run_pipeline(const PipelineConfig& config, std::ostream* log) {
    config.validate();
    const std::size_t threads = resolve_threads(config.thread_count);
    const std::filesystem::path out_dir = config.output_dir;
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path manifest_path = out_dir / "manifest.json";

    const std::filesystem::path network_path = out_dir / "network.bin";
    const std::filesystem::path pvectors_path = out_dir / "pvectors.bin";
    const std::filesystem::path basis_path = out_dir / "basis.bin";
    const std::filesystem::path qvectors_path = out_dir / "qvectors.bin";

    std::ostringstream activation_params;
    activation_params << "steps=" << config.steps << " retention=" << config.retention
                      << " clamp=" << config.source_clamp;

    const StagePlan plans[] = {
        {"build-network", {config.dict_path}, "", network_path},
        {"compute-pvectors",
         {network_path, config.dict_path},
         activation_params.str(),
         pvectors_path},
        {"fit-basis",
         {pvectors_path, config.function_words_path},
         "m_override=" + std::to_string(config.m_override),
         basis_path},
        {"project", {basis_path, pvectors_path}, "", qvectors_path},
    };

    json manifest = load_manifest(manifest_path);
    PipelineOutcome outcome;
    outcome.manifest_path = manifest_path.string();

    bool upstream_rebuilt = false;
    for (const auto& plan : plans) {
        StageResult result;
        result.name = plan.name;
        result.output_path = plan.output.string();

        // A rerun upstream invalidates everything downstream, so a clean
        // record is only trusted when nothing above it was rebuilt.
        const bool clean = !upstream_rebuilt && stage_clean(manifest, plan);
        if (clean) {
            result.rebuilt = false;
            result.output_hash = manifest["stages"][plan.name]["output"]["hash"];
            outcome.stages.push_back(std::move(result));
            if (log) *log << "[skip] " << plan.name << "\n";
            continue;
        }

        try {
            if (plan.name == "build-network") {
                const Dictionary dict = parse_dictionary_file(config.dict_path);
                build_network(dict).save(plan.output);
            } else if (plan.name == "compute-pvectors") {
                const Dictionary dict = parse_dictionary_file(config.dict_path);
                const SemanticNetwork net = SemanticNetwork::load(network_path);
                ActivationConfig acfg;
                acfg.steps = config.steps;
                acfg.retention = config.retention;
                acfg.source_clamp = config.source_clamp;
                build_all_pvectors(net, dict, acfg, threads).save(plan.output);
            } else if (plan.name == "fit-basis") {
                const LabeledMatrix pvectors = LabeledMatrix::load(pvectors_path);
                const auto function_words = load_word_list(config.function_words_path);
                const auto index = pvectors.label_index();
                std::vector<std::size_t> function_rows;
                for (const auto& w : function_words) {
                    const auto it = index.find(w);
                    if (it == index.end())
                        raise(ErrorCode::unknown_word,
                              "function word '" + w + "' is not a vocabulary row");
                    function_rows.push_back(it->second);
                }
                Basis basis = fit_basis(pvectors, threads);
                if (config.m_override > 0) {
                    if (config.m_override > basis.dim)
                        raise(ErrorCode::range, "m_override exceeds dimension count");
                    basis.m = config.m_override;
                } else {
                    select_m(basis, pvectors, function_rows, threads);
                }
                basis.save(plan.output);
            } else {
                const Basis basis = Basis::load(basis_path);
                const LabeledMatrix pvectors = LabeledMatrix::load(pvectors_path);
                project_all(pvectors, basis, threads).save(plan.output);
            }
        } catch (const Error& e) {
            raise(ErrorCode::stage,
                  "stage " + plan.name + " failed: " + std::string(e.what()));
        }

        record_stage(manifest, plan);
        io::write_file_atomic(manifest_path, manifest.dump(2) + "\n");
        result.rebuilt = true;
        result.output_hash = manifest["stages"][plan.name]["output"]["hash"];
        outcome.stages.push_back(std::move(result));
        ++outcome.rebuilt_count;
        upstream_rebuilt = true;
        if (log) *log << "[build] " << plan.name << " -> " << plan.output.string() << "\n";
    }
    return outcome;
}

std::string artifact_info(const std::filesystem::path& path) {
    const std::string bytes = io::read_file(path);
    std::ostringstream out;

    if (bytes.size() >= 8 && std::equal(io::kMagic, io::kMagic + 8, bytes.begin())) {
        io::ByteReader r(bytes);
        const io::ArtifactType type = io::read_header(r);
        const std::string hash = io::sha256_hex(bytes);
        if (type == io::ArtifactType::network) {
            const SemanticNetwork net = SemanticNetwork::deserialize(bytes);
            out << "network: nodes=" << net.node_count() << " links=" << net.link_count();
        } else if (type == io::ArtifactType::matrix) {
            const LabeledMatrix m = LabeledMatrix::deserialize(bytes);
            out << "matrix: rows=" << m.rows << " cols=" << m.cols;
        } else {
            const Basis b = Basis::deserialize(bytes);
            out << "basis: dim=" << b.dim << " m=" << b.m << " fitted_rows=" << b.fitted_rows
                << " rank=" << b.effective_rank();
            if (b.m >= 1 && b.m <= b.dim) {
                out << " variance_coverage=" << cumulative_variance(b, b.m);
            }
        }
        out << " sha256=" << hash;
        return out.str();
    }

    // manifests are plain JSON
    try {
        const json m = json::parse(bytes);
        if (m.contains("stages")) {
            out << "manifest: " << m["stages"].size() << " stages";
            for (const auto& [name, rec] : m["stages"].items())
                out << "\n  " << name << ": " << rec["output"]["path"].get<std::string>()
                    << " sha256=" << rec["output"]["hash"].get<std::string>();
            return out.str();
        }
    } catch (...) {
    }
    raise(ErrorCode::format, "unknown artifact format: " + path.string());
}

} // namespace ctxlens
