#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ctxlens {

/// Dense row-major double matrix with one word-id label per row. Used for
/// both the P-matrix (activation patterns) and the Q-matrix (projections).
struct LabeledMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::string> labels;
    std::vector<double> data;

    std::span<const double> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }
    std::span<double> row(std::size_t r) {
        return {data.data() + r * cols, cols};
    }

    /// label -> row index (labels are unique per file)
    std::unordered_map<std::string, std::size_t> label_index() const;

    std::string serialize() const;
    static LabeledMatrix deserialize(std::span<const char> bytes);

    void save(const std::filesystem::path& path) const;
    static LabeledMatrix load(const std::filesystem::path& path);
};

} // namespace ctxlens
