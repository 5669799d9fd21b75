#include "ctxlens/io.hpp"

#include "ctxlens/error.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "artifact files are little-endian; big-endian hosts are unsupported");

namespace ctxlens::io {

void ByteWriter::u32(std::uint32_t v) { raw(&v, sizeof v); }
void ByteWriter::u64(std::uint64_t v) { raw(&v, sizeof v); }
void ByteWriter::f64(double v) { raw(&v, sizeof v); }

void ByteWriter::str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
}

void ByteWriter::f64_block(std::span<const double> v) {
    raw(v.data(), v.size() * sizeof(double));
}

void ByteWriter::raw(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
}

void ByteReader::need(std::size_t n) {
    if (pos_ + n > data_.size())
        raise(ErrorCode::format, "artifact truncated: wanted " + std::to_string(n) +
                                     " bytes at offset " + std::to_string(pos_));
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, data_.data() + pos_, 4);
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, data_.data() + pos_, 8);
    pos_ += 8;
    return v;
}

double ByteReader::f64() {
    need(8);
    double v;
    std::memcpy(&v, data_.data() + pos_, 8);
    pos_ += 8;
    return v;
}

std::string ByteReader::str() {
    const std::uint32_t len = u32();
    need(len);
    std::string s(data_.data() + pos_, len);
    pos_ += len;
    return s;
}

void ByteReader::f64_block(double* out, std::size_t n) {
    need(n * sizeof(double));
    std::memcpy(out, data_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
}

void ByteReader::bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
}

std::string header(ArtifactType type) {
    ByteWriter w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(type));
    return w.take();
}

ArtifactType read_header(ByteReader& reader) {
    if (reader.remaining() < sizeof kMagic + 8)
        raise(ErrorCode::format, "not a contextlens artifact: file too short");
    char magic[8];
    reader.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        raise(ErrorCode::format, "not a contextlens artifact: bad magic bytes");
    const std::uint32_t version = reader.u32();
    if (version != kFormatVersion)
        raise(ErrorCode::format,
              "unsupported artifact format version " + std::to_string(version));
    const std::uint32_t type = reader.u32();
    if (type < 1 || type > 3)
        raise(ErrorCode::format, "unknown artifact type tag " + std::to_string(type));
    return static_cast<ArtifactType>(type);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io, "cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    if (in.bad()) raise(ErrorCode::io, "read failed for " + path.string());
    return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(ErrorCode::io, "cannot create " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) raise(ErrorCode::io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) raise(ErrorCode::io, "rename failed for " + path.string() + ": " + ec.message());
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        raise(ErrorCode::state, "sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    return sha256_hex(read_file(path));
}

} // namespace ctxlens::io
