#include <catch2/catch_amalgamated.hpp>

#include "hybridclf/preprocess.hpp"
#include "hybridclf/rng.hpp"

#include "support/oracles.hpp"

using namespace hybridclf;
using Tokens = std::vector<std::string>;

TEST_CASE("clean", "[preprocess]") {
    CHECK(clean("<p>Hello</p>", true) == "p hello");
    CHECK(clean("ABC", false) == "abc");
    CHECK(clean("<script>var x=1</script>ok", true) == "script ok");
    CHECK(clean("", true).empty());
}

TEST_CASE("tokenize", "[preprocess]") {
    CHECK(tokenize("p@ssw0rd reset", 2) == Tokens{"p@ssw0rd", "reset"});
    CHECK(tokenize("a bb ccc", 2) == Tokens{"bb", "ccc"});
    CHECK(tokenize("2024 click", 2) == Tokens{"click"});
    CHECK(tokenize("credit_card-number", 2) == Tokens{"credit_card", "number"});
    CHECK(tokenize("", 2).empty());
}

TEST_CASE("lemmatize", "[preprocess]") {
    CHECK(lemmatize("running") == "run");
    CHECK(lemmatize("run") == "run");
    CHECK(lemmatize("pages") == "page");
    CHECK(lemmatize("stories") == "story");
    CHECK(lemmatize("classes") == "class");
    CHECK(lemmatize("status") == "status");
}

TEST_CASE("remove_stop_words and bigrams", "[preprocess]") {
    CHECK(remove_stop_words({"the", "account"}, default_stop_words()) == Tokens{"account"});
    CHECK(remove_stop_words({}, default_stop_words()).empty());
    const StopWordSet none{"foo"};
    CHECK(remove_stop_words({"urgent", "click"}, none) == Tokens{"urgent", "click"});

    CHECK(generate_bigrams({"credit", "card"}) == Tokens{"credit_card"});
    CHECK(generate_bigrams({"x"}).empty());
    CHECK(generate_bigrams({"a", "b", "c"}) == Tokens{"a_b", "b_c"});
}

TEST_CASE("preprocess examples", "[preprocess]") {
    const PreprocessConfig cfg;
    CHECK(preprocess("Verify your ACCOUNT", cfg).tokens == Tokens{"verify", "account", "verify_account"});
    CHECK(preprocess("", cfg).tokens.empty());
    CHECK(preprocess("the the the", cfg).tokens.empty());

    PreprocessConfig no_bigrams;
    no_bigrams.emit_bigrams = false;
    CHECK(preprocess("Verify your ACCOUNT", no_bigrams).tokens == Tokens{"verify", "account"});

    PreprocessConfig bad;
    bad.min_token_len = 0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("hand-traced pipeline fixtures", "[preprocess][golden]") {
    const PreprocessConfig cfg;
    for (const auto& f : oracles::pipeline_fixtures()) {
        INFO(f.text);
        CHECK(preprocess(f.text, cfg).tokens == f.tokens);
    }
}

namespace {

std::string random_text(Rng& rng) {
    static const std::vector<std::string> pieces{
        "<p>", "</p>", "<a href=\"x\">", "Running", "pages", "the", "CLASSES", "stories", "p@ssw0rd",
        "&amp;", "2024", "  ", "\n", "hopped", "agreed", "is", "verify", "bank_id", "caf\xC3\xA9", "-",
        "<!-- c -->", "<style>x{}</style>", "ACCOUNT", "does", "login"};
    std::string out;
    const auto n = rng.below(20);
    for (std::uint64_t i = 0; i < n; ++i) {
        out += pieces[rng.below(pieces.size())];
        if (rng.bernoulli(0.6)) out += ' ';
    }
    return out;
}

}  // namespace

TEST_CASE("preprocess properties", "[preprocess][property]") {
    Rng rng(2024);
    const PreprocessConfig cfg;
    const auto& stop = default_stop_words();
    for (int trial = 0; trial < 500; ++trial) {
        const std::string text = random_text(rng);
        INFO(text);
        const auto a = preprocess(text, cfg);
        CHECK(a == preprocess(text, cfg));

        const auto words = remove_stop_words(
            [&] {
                Tokens t;
                for (const auto& w : tokenize(clean(text, true), 2)) t.push_back(lemmatize(w));
                return t;
            }(),
            stop);
        const std::size_t expected_bigrams = words.empty() ? 0 : words.size() - 1;
        CHECK(a.tokens.size() == words.size() + expected_bigrams);
        for (const auto& w : words) {
            CHECK_FALSE(stop.contains(w));
            CHECK(lemmatize(w) == w);
        }
    }
}

TEST_CASE("lemmatize is idempotent", "[preprocess][property]") {
    Rng rng(5);
    const std::string letters = "abcdefghijklmnopqrstuvwxyz";
    const std::vector<std::string> suffixes{"", "s", "es", "ies", "sses", "ing", "ed", "eed", "ated", "izing", "ss"};
    for (int trial = 0; trial < 5000; ++trial) {
        std::string w;
        const auto len = 1 + rng.below(8);
        for (std::uint64_t i = 0; i < len; ++i) w += letters[rng.below(letters.size())];
        w += suffixes[rng.below(suffixes.size())];
        const std::string once = lemmatize(w);
        INFO(w);
        CHECK(lemmatize(once) == once);
    }
}
