#include <catch2/catch_amalgamated.hpp>

#include "hybridclf/errors.hpp"
#include "hybridclf/vocab.hpp"

#include <filesystem>
#include <fstream>

using namespace hybridclf;

namespace {

TokenSequence seq(std::vector<std::string> t) { return TokenSequence{std::move(t)}; }

}  // namespace

TEST_CASE("build_vocabulary ordering and ties", "[vocab]") {
    const auto v = build_vocabulary({seq({"a", "b", "a"}), seq({"a"})}, 5);
    REQUIRE(v.size() == 4);
    CHECK(v.id_of(kPadToken) == 0);
    CHECK(v.id_of(kOovToken) == 1);
    CHECK(v.id_of("a") == 2);
    CHECK(v.id_of("b") == 3);

    const auto tie = build_vocabulary({seq({"b", "a", "b", "a"})}, 1);
    CHECK(tie.size() == 3);
    CHECK(tie.contains("a"));
    CHECK_FALSE(tie.contains("b"));

    CHECK(build_vocabulary({}, 10).size() == 2);
}

TEST_CASE("vocabulary cap", "[vocab]") {
    std::vector<std::string> toks;
    for (int i = 0; i < 6000; ++i) toks.push_back("t" + std::to_string(i));
    CHECK(build_vocabulary({seq(toks)}, 5000).size() == 5002);
}

TEST_CASE("encode and decode", "[vocab]") {
    const auto v = build_vocabulary({seq({"x", "y", "z"})}, 10);
    const auto e = encode(seq({"x", "y", "z"}), v, 5);
    CHECK(e.ids == std::vector<std::size_t>{v.id_of("x"), v.id_of("y"), v.id_of("z"), 0, 0});
    CHECK(e.true_length == 3);
    CHECK(decode(e, v) == std::vector<std::string>{"x", "y", "z"});

    std::vector<std::string> many;
    for (int i = 0; i < 250; ++i) many.push_back(i < 200 ? "x" : "y");
    const auto long_seq = encode(seq(many), v, 200);
    CHECK(long_seq.ids.size() == 200);
    CHECK(long_seq.true_length == 200);
    CHECK(long_seq.ids.back() == v.id_of("x"));

    const auto unk = encode(seq({"nope"}), v, 3);
    CHECK(unk.ids[0] == kOovId);
    CHECK(decode(unk, v) == std::vector<std::string>{kOovToken});
}

TEST_CASE("embedding text format", "[vocab][embedding]") {
    const auto m = parse_embedding_text("the 0.1 0.2\n", 2);
    REQUIRE(m.size() == 1);
    CHECK(m.at("the") == std::vector<double>{0.1, 0.2});

    try {
        parse_embedding_text("the 0.1\n", 2);
        FAIL("no throw");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_embedding_text("a 1 2\nb 1 x\n", 2), FormatError);

    const auto path = std::filesystem::temp_directory_path() / "hybridclf_vocab_test.txt";
    {
        std::ofstream out(path);
        out << "a 1 2\nb 3 4\nc 5 6\n";
    }
    CHECK(load_embedding_file(path, 2).size() == 3);
    std::filesystem::remove(path);
}

TEST_CASE("assemble_embedding and embed", "[vocab][embedding]") {
    const auto v = build_vocabulary({seq({"the", "bank", "bank"})}, 10);
    const PretrainedVectors pre{{"the", {0.1, 0.2, 0.3}}};
    const auto t1 = assemble_embedding(v, pre, 3, 9);
    const auto t2 = assemble_embedding(v, pre, 3, 9);
    CHECK(t1 == t2);
    CHECK(t1.vocab_size() == v.size());
    for (std::size_t j = 0; j < 3; ++j) CHECK(t1.matrix.at(kPadId, j) == 0.0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(t1.matrix.at(v.id_of("the"), j) == pre.at("the")[j]);
    for (std::size_t j = 0; j < 3; ++j) {
        const double x = t1.matrix.at(v.id_of("bank"), j);
        CHECK(x >= -0.05);
        CHECK(x <= 0.05);
    }
    CHECK_FALSE(assemble_embedding(v, pre, 3, 10) == t1);
    CHECK_THROWS_AS(assemble_embedding(v, pre, 4, 9), ConfigError);

    const EncodedSequence pad{{0, 0, 0}, 0};
    const Tensor zero = embed(pad, t1);
    CHECK(zero.shape() == Shape{3, 3});
    for (double x : zero.values()) CHECK(x == 0.0);

    const EncodedSequence one{{v.id_of("bank"), 0, 0}, 1};
    const Tensor e = embed(one, t1);
    for (std::size_t j = 0; j < 3; ++j) CHECK(e.at(0, j) == t1.matrix.at(v.id_of("bank"), j));
}
