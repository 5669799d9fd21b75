#include "ctxlens/network.hpp"

#include "ctxlens/error.hpp"
#include "ctxlens/io.hpp"

#include <map>

namespace ctxlens {

SemanticNetwork build_network(const Dictionary& dict) {
    const std::size_t n = dict.defining_vocabulary.size();
    SemanticNetwork net;
    net.nodes = dict.defining_vocabulary;
    net.offsets.assign(n + 1, 0);

    // token counts per node, aggregated over all senses of the node's word
    std::vector<std::map<std::uint32_t, double>> counts(n);
    for (const auto& entry : dict.entries) {
        const auto it = dict.vocab_index.find(entry.headword);
        if (it == dict.vocab_index.end()) continue;    // non-vocabulary headword
        auto& bucket = counts[it->second];
        for (const auto& tok : entry.definition)
            bucket[static_cast<std::uint32_t>(dict.vocab_index.at(tok))] += 1.0;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (counts[i].empty())
            counts[i][static_cast<std::uint32_t>(i)] = 1.0;    // self-link
        double total = 0.0;
        for (const auto& [_, c] : counts[i]) total += c;
        for (const auto& [target, c] : counts[i]) {
            net.targets.push_back(target);
            net.weights.push_back(c / total);
        }
        net.offsets[i + 1] = net.targets.size();
    }
    return net;
}

std::string SemanticNetwork::serialize() const {
    io::ByteWriter w;
    w.raw(io::header(io::ArtifactType::network).data(), 16);
    w.u64(node_count());
    w.u64(link_count());
    for (const auto& node : nodes) w.str(node);
    for (std::size_t i = 0; i < node_count(); ++i) {
        w.u32(static_cast<std::uint32_t>(offsets[i + 1] - offsets[i]));
        for (std::uint64_t k = offsets[i]; k < offsets[i + 1]; ++k) {
            w.u32(targets[k]);
            w.f64(weights[k]);
        }
    }
    return w.take();
}

SemanticNetwork SemanticNetwork::deserialize(std::span<const char> bytes) {
    io::ByteReader r(bytes);
    if (io::read_header(r) != io::ArtifactType::network)
        raise(ErrorCode::format, "artifact is not a network file");
    SemanticNetwork net;
    const std::uint64_t n = r.u64();
    const std::uint64_t links = r.u64();
    net.nodes.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) net.nodes.push_back(r.str());
    net.offsets.assign(n + 1, 0);
    net.targets.reserve(links);
    net.weights.reserve(links);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint32_t degree = r.u32();
        for (std::uint32_t k = 0; k < degree; ++k) {
            const std::uint32_t target = r.u32();
            if (target >= n) raise(ErrorCode::format, "link target out of range");
            net.targets.push_back(target);
            net.weights.push_back(r.f64());
        }
        net.offsets[i + 1] = net.targets.size();
    }
    if (net.link_count() != links)
        raise(ErrorCode::format, "network link count mismatch");
    if (!r.at_end()) raise(ErrorCode::format, "trailing bytes in network file");
    return net;
}

void SemanticNetwork::save(const std::filesystem::path& path) const {
    io::write_file_atomic(path, serialize());
}

SemanticNetwork SemanticNetwork::load(const std::filesystem::path& path) {
    const std::string bytes = io::read_file(path);
    return deserialize(bytes);
}

} // namespace ctxlens
