#include "ctxlens/matrix.hpp"

#include "ctxlens/error.hpp"
#include "ctxlens/io.hpp"

namespace ctxlens {

std::unordered_map<std::string, std::size_t> LabeledMatrix::label_index() const {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!index.emplace(labels[i], i).second)
            raise(ErrorCode::format, "duplicate row label '" + labels[i] + "'");
    }
    return index;
}

std::string LabeledMatrix::serialize() const {
    io::ByteWriter w;
    w.raw(io::header(io::ArtifactType::matrix).data(), 16);
    w.u64(rows);
    w.u64(cols);
    for (const auto& label : labels) w.str(label);
    w.f64_block(data);
    return w.take();
}

LabeledMatrix LabeledMatrix::deserialize(std::span<const char> bytes) {
    io::ByteReader r(bytes);
    if (io::read_header(r) != io::ArtifactType::matrix)
        raise(ErrorCode::format, "artifact is not a matrix file");
    LabeledMatrix m;
    m.rows = r.u64();
    m.cols = r.u64();
    m.labels.reserve(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) m.labels.push_back(r.str());
    m.data.resize(m.rows * m.cols);
    r.f64_block(m.data.data(), m.data.size());
    if (!r.at_end()) raise(ErrorCode::format, "trailing bytes in matrix file");
    return m;
}

void LabeledMatrix::save(const std::filesystem::path& path) const {
    io::write_file_atomic(path, serialize());
}

LabeledMatrix LabeledMatrix::load(const std::filesystem::path& path) {
    const std::string bytes = io::read_file(path);
    return deserialize(bytes);
}

} // namespace ctxlens
