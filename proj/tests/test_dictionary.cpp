#include "ctxlens/dictionary.hpp"

#include "ctxlens/error.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <sstream>

using namespace ctxlens;

namespace {

Dictionary parse_str(const std::string& text) {
    std::istringstream in(text);
    return parse_dictionary(in);
}

} // namespace

TEST_CASE("minimal closed dictionary parses") {
    const auto dict = parse_str("#vocab a b c\na_1: b c\nb_1: a\nc_1: a b\n");
    CHECK(dict.entries.size() == 3);
    CHECK(dict.defining_vocabulary == std::vector<std::string>{"a", "b", "c"});
    CHECK(dict.entries[0].headword == "a");
    CHECK(dict.entries[0].sense == 1);
    CHECK(dict.entries[0].definition == std::vector<std::string>{"b", "c"});
}

TEST_CASE("closedness violation reports token and line") {
    try {
        parse_str("#vocab a b c\na_1: b d\n");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse);
        CHECK(std::string(e.what()).find("token d not in defining vocabulary") !=
              std::string::npos);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("duplicate headword+sense rejected") {
    CHECK_THROWS_AS(parse_str("#vocab a b\na_1: b\na_1: b b\n"), Error);
}

TEST_CASE("comments and blank lines ignored, case folded") {
    const auto dict = parse_str(
        "// header comment\n\n#vocab A b\n// entry comment\nA_1: B b\n");
    CHECK(dict.defining_vocabulary == std::vector<std::string>{"a", "b"});
    CHECK(dict.entries[0].definition == std::vector<std::string>{"b", "b"});
}

TEST_CASE("malformed lines carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_str("#vocab a\nnonsense\n"),
                         doctest::Contains("line 2"), Error);
    CHECK_THROWS_AS(parse_str("#vocab a\na_x: a\n"), Error);
    CHECK_THROWS_AS(parse_str("#vocab a\na_0: a\n"), Error);
    CHECK_THROWS_AS(parse_str("a_1: a\n"), Error);          // entries before #vocab
    CHECK_THROWS_AS(parse_str("#vocab a\na_1:\n"), Error);  // empty definition
    CHECK_THROWS_AS(parse_str("#vocab a a_b\n"), Error);    // underscore in vocab word
}

TEST_CASE("multi-sense and non-vocabulary headwords are entries") {
    const auto dict =
        parse_str("#vocab a b\na_1: b\na_2: b b\nb_1: a\nzebra_1: a b\n");
    CHECK(dict.entries.size() == 4);
    CHECK(dict.senses_of("a").size() == 2);
    CHECK(dict.senses_of("zebra").size() == 1);
    CHECK_FALSE(dict.in_vocabulary("zebra"));
}

TEST_CASE("toy200 fixture loads with 200 entries over a 200-word vocabulary") {
    const auto& fx = testfx::toy200();
    CHECK(fx.dict.entries.size() == 200);
    CHECK(fx.dict.defining_vocabulary.size() == 200);
    for (const auto& entry : fx.dict.entries)
        for (const auto& tok : entry.definition) CHECK(fx.dict.in_vocabulary(tok));
}
