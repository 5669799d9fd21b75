#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ctxlens::io {

/// All numeric artifacts share one container: an 8-byte magic, a u32
/// format version, a u32 artifact type, then a type-specific payload.
/// Integers are little-endian; doubles are raw IEEE-754. The layout is
/// fixed, so serialize(load(bytes)) == bytes for every valid artifact.
inline constexpr char kMagic[8] = {'C', 'T', 'X', 'L', 'E', 'N', 'S', '\0'};
inline constexpr std::uint32_t kFormatVersion = 1;

enum class ArtifactType : std::uint32_t {
    network = 1,
    matrix = 2,
    basis = 3,
};

class ByteWriter {
public:
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void str(const std::string& s);
    void f64_block(std::span<const double> v);
    void raw(const void* p, std::size_t n);

    const std::string& bytes() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const char> data) : data_(data) {}

    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();
    void f64_block(double* out, std::size_t n);
    void bytes(void* out, std::size_t n);
    bool at_end() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n);
    std::span<const char> data_;
    std::size_t pos_ = 0;
};

std::string header(ArtifactType type);

/// Validates magic and version, returns the payload type and a reader
/// positioned at the payload.
ArtifactType read_header(ByteReader& reader);

std::string read_file(const std::filesystem::path& path);

/// Writes via a temp file + rename so failed runs never leave a
/// half-written artifact behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

} // namespace ctxlens::io
