#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace ctxlens {

/// Pipeline parameters. A key=value config file fills these; the
/// CONTEXTLENS_THREADS environment variable overrides thread_count at
/// run time.
struct PipelineConfig {
    std::string dict_path;
    std::string function_words_path;
    std::size_t steps = 10;
    double retention = 0.5;
    double source_clamp = 0.25;
    std::size_t m_override = 0;    // 0 = select m by the noise criterion
    std::string output_dir = ".";
    std::size_t thread_count = 0;  // 0 = hardware concurrency

    void validate() const;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct StageResult {
    std::string name;
    bool rebuilt = false;
    std::string output_path;
    std::string output_hash;
};

struct PipelineOutcome {
    std::vector<StageResult> stages;
    std::string manifest_path;
    std::size_t rebuilt_count = 0;
};

/// Runs build-network -> compute-pvectors -> fit-basis -> project with a
/// content-hash stage cache. A stage reruns when its inputs, parameters,
/// or output bytes differ from the manifest record, or when an upstream
/// stage reran; untouched stages are skipped. The manifest is updated
/// after each completed stage, so a failed stage never registers a
/// partial artifact.
PipelineOutcome run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

/// Loads the function-word list (one word per line, lowercased).
std::vector<std::string> load_word_list(const std::filesystem::path& path);

/// Human-readable one-artifact summary (type, dimensions, counts, hash).
std::string artifact_info(const std::filesystem::path& path);

} // namespace ctxlens
