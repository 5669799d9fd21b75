#include "ctxlens/network.hpp"

#include "ctxlens/error.hpp"
#include "ctxlens/kernels.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <map>
#include <sstream>

using namespace ctxlens;

namespace {

Dictionary parse_str(const std::string& text) {
    std::istringstream in(text);
    return parse_dictionary(in);
}

std::map<std::string, double> links_as_map(const SemanticNetwork& net,
                                           const std::string& word) {
    std::size_t node = 0;
    for (; node < net.node_count(); ++node)
        if (net.nodes[node] == word) break;
    REQUIRE(node < net.node_count());
    std::map<std::string, double> out;
    const auto targets = net.links_of(node);
    const auto weights = net.weights_of(node);
    for (std::size_t k = 0; k < targets.size(); ++k)
        out[net.nodes[targets[k]]] = weights[k];
    return out;
}

} // namespace

TEST_CASE("uniform weights from distinct tokens") {
    const auto net = build_network(parse_str("#vocab a b c\na_1: b c\nb_1: a\nc_1: a b\n"));
    CHECK(net.node_count() == 3);
    const auto links = links_as_map(net, "a");
    CHECK(links.size() == 2);
    CHECK(links.at("b") == doctest::Approx(0.5));
    CHECK(links.at("c") == doctest::Approx(0.5));
}

TEST_CASE("count-proportional weighting") {
    const auto net = build_network(parse_str("#vocab a b c\na_1: b b c\nb_1: a\nc_1: a\n"));
    const auto links = links_as_map(net, "a");
    CHECK(links.at("b") == doctest::Approx(2.0 / 3.0));
    CHECK(links.at("c") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("word with no entry gets a self-link") {
    const auto net = build_network(parse_str("#vocab a b\na_1: b\n"));
    const auto links = links_as_map(net, "b");
    CHECK(links.size() == 1);
    CHECK(links.at("b") == doctest::Approx(1.0));
}

TEST_CASE("multi-sense definitions concatenate before weighting") {
    const auto net =
        build_network(parse_str("#vocab a b c\na_1: b\na_2: c c c\nb_1: a\nc_1: a\n"));
    const auto links = links_as_map(net, "a");
    CHECK(links.at("b") == doctest::Approx(0.25));
    CHECK(links.at("c") == doctest::Approx(0.75));
}

TEST_CASE("non-vocabulary headwords add no links") {
    const auto net = build_network(parse_str("#vocab a b\na_1: b\nb_1: a\nzebra_1: a b\n"));
    CHECK(net.node_count() == 2);
    CHECK(net.link_count() == 2);
}

TEST_CASE("row-stochasticity on toy200") {
    const auto& net = testfx::toy200().net;
    CHECK(net.node_count() == 200);
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        const auto w = net.weights_of(i);
        const double total = kernels::sum(w.data(), w.size());
        CHECK(std::fabs(total - 1.0) <= 1e-9);
        for (const double x : w) CHECK(x >= 0.0);
    }
    // link count equals aggregated (node, token) pairs
    std::size_t expected = 0;
    for (std::size_t i = 0; i < net.node_count(); ++i) expected += net.links_of(i).size();
    CHECK(net.link_count() == expected);
}

TEST_CASE("serialization round-trips bit-exactly and deterministically") {
    const auto& net = testfx::toy200().net;
    const std::string bytes = net.serialize();
    CHECK(bytes == net.serialize());
    const auto back = SemanticNetwork::deserialize(bytes);
    CHECK(back.serialize() == bytes);
    CHECK(back.nodes == net.nodes);
    CHECK(back.link_count() == net.link_count());

    // identical input bytes -> byte-identical networks
    const auto again = build_network(parse_dictionary_file(testfx::data_path("toy200.dict")));
    CHECK(again.serialize() == bytes);
}
